#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamdt/merit.hpp"
#include "streamdt/schema.hpp"
#include "streamdt/stats.hpp"
#include "streamdt/tree.hpp"

namespace streamdt {

namespace detail {

inline std::unique_ptr<TreeNode> batch_fit_rec(std::span<const Instance> data,
                                               const std::vector<std::uint32_t>& idx,
                                               std::vector<std::uint8_t>& available,
                                               const Schema& schema, std::uint64_t& next_id) {
    auto node = std::make_unique<TreeNode>();
    node->node_id = next_id++;
    node->stats = SufficientStats(schema);
    node->available = available;
    for (std::uint32_t i : idx) update_stats(node->stats, data[i], schema);
    if (node->stats.is_pure()) return node;

    // Impure nodes keep splitting while attributes remain, even at zero gain:
    // parity-style concepts only resolve after several splits. Strict > keeps
    // the lowest index on ties.
    int best = -1;
    double best_gain = -1.0;
    for (int a = 0; a < schema.attribute_count(); ++a) {
        if (!available[static_cast<std::size_t>(a)]) continue;
        const double g = info_gain(node->stats, SplitChoice{a}, schema);
        if (g > best_gain) {
            best = a;
            best_gain = g;
        }
    }
    if (best < 0) return node;  // attributes exhausted

    const int fanout = schema.attributes[static_cast<std::size_t>(best)].value_count();
    std::vector<std::vector<std::uint32_t>> parts(static_cast<std::size_t>(fanout));
    for (std::uint32_t i : idx)
        parts[static_cast<std::size_t>(nominal_value(data[i], best))].push_back(i);

    node->split = SplitChoice{best};
    available[static_cast<std::size_t>(best)] = 0;
    node->children.reserve(static_cast<std::size_t>(fanout));
    for (int v = 0; v < fanout; ++v)
        node->children.push_back(batch_fit_rec(data, parts[static_cast<std::size_t>(v)],
                                               available, schema, next_id));
    available[static_cast<std::size_t>(best)] = 1;
    return node;
}

}  // namespace detail

/// Batch decision tree over nominal attributes: recursively split on the
/// highest-information-gain attribute (ties to the lowest index), stop on pure
/// nodes or exhausted attributes. No pruning. Branches that receive no data
/// stay as empty leaves, which predict class 0 just like the incremental
/// learners' fresh leaves.
inline std::unique_ptr<TreeNode> batch_fit(std::span<const Instance> instances, const Schema& schema) {
    schema.validate();
    if (!schema.all_nominal())
        throw std::invalid_argument("batch_fit: only nominal attributes are supported");
    if (instances.empty()) throw std::invalid_argument("batch_fit: needs at least one instance");
    std::vector<std::uint32_t> idx(instances.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    std::vector<std::uint8_t> available(static_cast<std::size_t>(schema.attribute_count()), 1);
    std::uint64_t next_id = 0;
    return detail::batch_fit_rec(instances, idx, available, schema, next_id);
}

/// True iff both trees deploy the same split (attribute, and threshold for
/// numeric splits) at every corresponding node and their leaves vote the same
/// class, comparing children in value order.
inline bool trees_structurally_equal(const TreeNode& a, const TreeNode& b) {
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return majority_class(a.stats) == majority_class(b.stats);
    if (a.split.attribute != b.split.attribute) return false;
    if (a.split.threshold != b.split.threshold) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t j = 0; j < a.children.size(); ++j)
        if (!trees_structurally_equal(*a.children[j], *b.children[j])) return false;
    return true;
}

/// Fraction of the sample on which the two trees predict different classes.
inline double extensional_disagreement(const TreeNode& a, const TreeNode& b, const Schema& schema,
                                       std::span<const Instance> sample) {
    if (sample.empty()) throw std::invalid_argument("extensional_disagreement: empty sample");
    std::size_t differ = 0;
    for (const Instance& x : sample)
        if (tree_predict(a, x, schema) != tree_predict(b, x, schema)) ++differ;
    return static_cast<double>(differ) / static_cast<double>(sample.size());
}

/// Every point of a small nominal attribute space (labels left at 0), for
/// exhaustive agreement checks.
inline std::vector<Instance> enumerate_domain(const Schema& schema) {
    if (!schema.all_nominal())
        throw std::invalid_argument("enumerate_domain: only nominal attributes are enumerable");
    std::uint64_t size = 1;
    for (const AttributeSpec& a : schema.attributes) {
        size *= static_cast<std::uint64_t>(a.value_count());
        if (size > 5'000'000)
            throw std::invalid_argument("enumerate_domain: attribute space too large to enumerate");
    }
    std::vector<Instance> points;
    points.reserve(size);
    Instance x;
    x.values.assign(schema.attributes.size(), 0.0);
    for (std::uint64_t n = 0; n < size; ++n) {
        std::uint64_t rest = n;
        for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
            const auto v = static_cast<std::uint64_t>(schema.attributes[i].value_count());
            x.values[i] = static_cast<double>(rest % v);
            rest /= v;
        }
        points.push_back(x);
    }
    return points;
}

}  // namespace streamdt
