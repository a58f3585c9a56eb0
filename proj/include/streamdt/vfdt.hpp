#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "streamdt/merit.hpp"
#include "streamdt/params.hpp"
#include "streamdt/schema.hpp"
#include "streamdt/stats.hpp"
#include "streamdt/tree.hpp"

namespace streamdt {

/// Incremental Hoeffding tree (VFDT): grows by splitting leaves once the gain
/// advantage of the best attribute over the runner-up clears the Hoeffding
/// bound, and never revisits a split. Only leaves keep live statistics;
/// internal nodes are frozen when created.
class VfdtLearner {
public:
    VfdtLearner(Schema schema, HyperParams params)
        : schema_(std::move(schema)), params_(std::move(params)) {
        schema_.validate();
        params_.validate();
        root_ = make_leaf(std::vector<std::uint8_t>(
            static_cast<std::size_t>(schema_.attribute_count()), 1));
    }

    int predict(const Instance& x) const { return tree_predict(*root_, x, schema_); }

    void learn_one(const Instance& x) {
        ++examples_seen_;
        TreeNode& leaf = route_to_leaf(*root_, x, schema_);
        update_stats(leaf.stats, x, schema_);
        ++leaf.examples_since_eval;
        if (leaf.examples_since_eval >= params_.leaf_cadence) {
            leaf.examples_since_eval = 0;
            try_split(leaf);
        }
    }

    const Schema& schema() const { return schema_; }
    const HyperParams& params() const { return params_; }
    const TreeNode& root() const { return *root_; }
    std::uint64_t examples_seen() const { return examples_seen_; }

private:
    // Split test per the classic procedure: rank the available attributes plus
    // the null split, and split on the winner X_a iff G(X_a) - G(X_b) exceeds
    // the Hoeffding bound, or the bound has shrunk below the tie threshold.
    void try_split(TreeNode& leaf) {
        if (leaf.stats.is_pure()) return;
        const MeritReport report =
            rank_candidates(leaf.stats, leaf.available, /*include_null=*/true, schema_, params_);
        if (report.best.choice.is_null()) return;
        const double eps = hoeffding_bound(report.range, params_.delta, leaf.stats.total);
        if (report.best.merit - report.second_best.merit > eps || eps < params_.tau)
            split_leaf(leaf, report.best.choice);
    }

    void split_leaf(TreeNode& leaf, const SplitChoice& choice) {
        const AttributeSpec& attr = schema_.attributes[static_cast<std::size_t>(choice.attribute)];
        std::vector<std::uint8_t> child_available = leaf.available;
        if (attr.is_nominal() && !params_.reuse_nominal_attributes)
            child_available[static_cast<std::size_t>(choice.attribute)] = 0;
        const int fanout = attr.is_nominal() ? attr.value_count() : 2;
        leaf.split = choice;
        leaf.children.reserve(static_cast<std::size_t>(fanout));
        for (int j = 0; j < fanout; ++j) leaf.children.push_back(make_leaf(child_available));
        // frozen from here on; drop the statistics
        leaf.stats = SufficientStats{};
        leaf.available.clear();
    }

    std::unique_ptr<TreeNode> make_leaf(std::vector<std::uint8_t> available) {
        auto node = std::make_unique<TreeNode>();
        node->stats = SufficientStats(schema_);
        node->available = std::move(available);
        node->node_id = next_node_id_++;
        return node;
    }

    Schema schema_;
    HyperParams params_;
    std::unique_ptr<TreeNode> root_;
    std::uint64_t examples_seen_ = 0;
    std::uint64_t next_node_id_ = 0;
};

}  // namespace streamdt
