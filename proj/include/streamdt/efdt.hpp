#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "streamdt/merit.hpp"
#include "streamdt/params.hpp"
#include "streamdt/schema.hpp"
#include "streamdt/stats.hpp"
#include "streamdt/tree.hpp"

namespace streamdt {

enum class SplitEventKind { split, replace, kill };

inline std::string_view to_string(SplitEventKind kind) {
    switch (kind) {
        case SplitEventKind::split: return "split";
        case SplitEventKind::replace: return "replace";
        case SplitEventKind::kill: return "kill";
    }
    return "?";
}

/// One structure change: a leaf split, an internal node re-split on a better
/// attribute, or a subtree killed back to a leaf. Attribute -1 means "none".
struct SplitEvent {
    std::uint64_t timestep = 0;
    std::uint64_t node_id = 0;
    SplitEventKind kind = SplitEventKind::split;
    int old_attribute = -1;
    int new_attribute = -1;
};

inline void write_events_csv(std::ostream& os, std::span<const SplitEvent> events) {
    os << "timestep,node_id,event,old_attr,new_attr\n";
    for (const SplitEvent& e : events) {
        os << e.timestep << ',' << e.node_id << ',' << to_string(e.kind) << ','
           << e.old_attribute << ',' << e.new_attribute << '\n';
    }
}

/// Extremely fast decision tree: splits a leaf as soon as the best attribute
/// beats not splitting at all, then keeps re-evaluating deployed splits with
/// fresh evidence, replacing them when a better attribute emerges. Every node
/// on the routing path keeps live statistics.
class EfdtLearner {
public:
    EfdtLearner(Schema schema, HyperParams params)
        : schema_(std::move(schema)), params_(std::move(params)) {
        schema_.validate();
        params_.validate();
        root_ = make_leaf(std::vector<std::uint8_t>(
            static_cast<std::size_t>(schema_.attribute_count()), 1));
    }

    int predict(const Instance& x) const { return tree_predict(*root_, x, schema_); }

    void learn_one(const Instance& x) {
        ++examples_seen_;
        last_nodes_touched_ = 0;
        TreeNode* node = root_.get();
        while (true) {
            update_stats(node->stats, x, schema_);
            ++last_nodes_touched_;
            ++node->examples_since_eval;
            if (node->is_leaf()) {
                if (node->examples_since_eval >= params_.leaf_cadence) {
                    node->examples_since_eval = 0;
                    attempt_to_split(*node);
                }
                return;  // leaf splits leave the current example with the old leaf
            }
            if (node->examples_since_eval >= params_.internal_cadence) {
                node->examples_since_eval = 0;
                re_evaluate_best_split(*node);
                if (node->is_leaf()) return;  // subtree killed; already counted here
            }
            // After a replacement this descends into one of the fresh leaves.
            node = node->children[static_cast<std::size_t>(child_index(node->split, x, schema_))].get();
        }
    }

    /// Leaf split test: split on the best attribute X_a as soon as its gain
    /// beats the null split by more than the Hoeffding bound. No-op for pure
    /// leaves.
    void attempt_to_split(TreeNode& leaf) {
        if (leaf.stats.is_pure()) return;
        const MeritReport report =
            rank_candidates(leaf.stats, leaf.available, /*include_null=*/true, schema_, params_);
        if (report.best.choice.is_null()) return;
        const double eps = hoeffding_bound(report.range, params_.delta, leaf.stats.total);
        const double advantage = report.best.merit - null_split_merit(leaf.stats);
        if (advantage > eps || (params_.efdt_tie_break && eps < params_.tau)) {
            resplit(leaf, report.best.choice);
            log_event(SplitEventKind::split, leaf.node_id, -1, leaf.split.attribute);
        }
    }

    /// Internal-node check: compare the best candidate (null split included)
    /// against the deployed split. Keeping the current winner is a no-op
    /// regardless of the bound; a null-split winner kills the subtree; any
    /// other winner re-splits the node with fresh children.
    void re_evaluate_best_split(TreeNode& node) {
        const MeritReport report =
            rank_candidates(node.stats, node.available, /*include_null=*/true, schema_, params_);
        const double current_merit = info_gain(node.stats, node.split, schema_);
        const double eps = hoeffding_bound(report.range, params_.delta, node.stats.total);
        apply_reevaluation(node, report.best, current_merit, eps);
    }

    /// Decision core of re_evaluate_best_split, split out so tests can drive
    /// the kill branch with injected merits (unreachable under information
    /// gain, whose merits are never negative). Returns true when the node was
    /// restructured.
    bool apply_reevaluation(TreeNode& node, const SplitCandidate& best, double current_merit,
                            double epsilon) {
        if (!best.choice.is_null() && best.choice.attribute == node.split.attribute)
            return false;  // current split is still the winner
        const bool confident = best.merit - current_merit > epsilon;
        const bool tie_forced = params_.efdt_tie_break && epsilon < params_.tau;
        if (!confident && !tie_forced) return false;
        if (best.choice.is_null()) {
            const int old_attribute = node.split.attribute;
            node.children.clear();
            node.split = SplitChoice{};
            log_event(SplitEventKind::kill, node.node_id, old_attribute, -1);
        } else {
            const int old_attribute = node.split.attribute;
            node.children.clear();
            resplit(node, best.choice);
            log_event(SplitEventKind::replace, node.node_id, old_attribute, best.choice.attribute);
        }
        return true;
    }

    const Schema& schema() const { return schema_; }
    const HyperParams& params() const { return params_; }
    const TreeNode& root() const { return *root_; }
    TreeNode& mutable_root() { return *root_; }
    std::uint64_t examples_seen() const { return examples_seen_; }
    const std::vector<SplitEvent>& split_events() const { return split_events_; }

    // Stats updates performed by the most recent learn_one; at most one per
    // node on the routing path.
    std::uint32_t last_nodes_touched() const { return last_nodes_touched_; }

private:
    void resplit(TreeNode& node, const SplitChoice& choice) {
        const AttributeSpec& attr = schema_.attributes[static_cast<std::size_t>(choice.attribute)];
        std::vector<std::uint8_t> child_available = node.available;
        if (attr.is_nominal() && !params_.reuse_nominal_attributes)
            child_available[static_cast<std::size_t>(choice.attribute)] = 0;
        const int fanout = attr.is_nominal() ? attr.value_count() : 2;
        node.split = choice;
        node.children.reserve(static_cast<std::size_t>(fanout));
        for (int j = 0; j < fanout; ++j) node.children.push_back(make_leaf(child_available));
    }

    void log_event(SplitEventKind kind, std::uint64_t node_id, int old_attribute, int new_attribute) {
        split_events_.push_back({examples_seen_, node_id, kind, old_attribute, new_attribute});
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
    std::vector<SplitEvent> split_events_;
    std::uint64_t examples_seen_ = 0;
    std::uint64_t next_node_id_ = 0;
    std::uint32_t last_nodes_touched_ = 0;
};

}  // namespace streamdt
