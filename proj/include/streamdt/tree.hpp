#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "streamdt/schema.hpp"
#include "streamdt/stats.hpp"

namespace streamdt {

/// A deployed split: an attribute index, plus a cut point for numeric
/// attributes. attribute < 0 encodes the null split (no split at all); the
/// null split is only ever a candidate, it never ends up inside a tree.
struct SplitChoice {
    int attribute = -1;
    double threshold = 0.0;

    bool is_null() const { return attribute < 0; }
};

/// Leaf or internal node. A node is a leaf iff it has no children. Internal
/// nominal splits have one child per attribute value, numeric splits have two
/// (<= threshold, > threshold).
struct TreeNode {
    SufficientStats stats;
    SplitChoice split{};                             // meaningful only when internal
    std::vector<std::unique_ptr<TreeNode>> children;
    std::vector<std::uint8_t> available;             // attributes still usable at this node
    std::uint64_t node_id = 0;
    std::uint64_t examples_since_eval = 0;

    bool is_leaf() const { return children.empty(); }
};

inline int child_index(const SplitChoice& split, const Instance& x, const Schema& schema) {
    const AttributeSpec& a = schema.attributes[static_cast<std::size_t>(split.attribute)];
    if (a.is_nominal()) {
        const int v = nominal_value(x, split.attribute);
        if (v < 0 || v >= a.value_count())
            throw std::out_of_range("child_index: value out of range for attribute '" + a.name + "'");
        return v;
    }
    return x.values[static_cast<std::size_t>(split.attribute)] <= split.threshold ? 0 : 1;
}

inline const TreeNode& route_to_leaf(const TreeNode& root, const Instance& x, const Schema& schema) {
    const TreeNode* node = &root;
    while (!node->is_leaf())
        node = node->children[static_cast<std::size_t>(child_index(node->split, x, schema))].get();
    return *node;
}

inline TreeNode& route_to_leaf(TreeNode& root, const Instance& x, const Schema& schema) {
    return const_cast<TreeNode&>(route_to_leaf(static_cast<const TreeNode&>(root), x, schema));
}

inline int tree_predict(const TreeNode& root, const Instance& x, const Schema& schema) {
    return majority_class(route_to_leaf(root, x, schema).stats);
}

struct TreeSummary {
    std::uint64_t nodes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t depth = 0;  // edges on the longest root-to-leaf path
};

namespace detail {
inline void summarize_rec(const TreeNode& node, std::uint64_t level, TreeSummary& out) {
    ++out.nodes;
    if (level > out.depth) out.depth = level;
    if (node.is_leaf()) {
        ++out.leaves;
        return;
    }
    for (const auto& child : node.children) summarize_rec(*child, level + 1, out);
}
}  // namespace detail

inline TreeSummary summarize_tree(const TreeNode& root) {
    TreeSummary out;
    detail::summarize_rec(root, 0, out);
    return out;
}

namespace detail {
inline void write_tree_rec(std::ostream& os, const TreeNode& node, const Schema& schema,
                           int indent, const std::string& branch) {
    for (int i = 0; i < indent; ++i) os << "  ";
    os << branch;
    if (node.is_leaf()) {
        os << "class=" << majority_class(node.stats) << "\n";
        return;
    }
    const AttributeSpec& a = schema.attributes[static_cast<std::size_t>(node.split.attribute)];
    os << "split(" << a.name << ")\n";
    for (std::size_t j = 0; j < node.children.size(); ++j) {
        std::string label;
        if (a.is_nominal()) {
            label = a.name + "=" + a.values[j] + " -> ";
        } else {
            label = a.name + (j == 0 ? "<=" : ">") + std::to_string(node.split.threshold) + " -> ";
        }
        write_tree_rec(os, *node.children[j], schema, indent + 1, label);
    }
}
}  // namespace detail

/// Indented text dump, one node per line; stable across runs, so suitable for
/// golden-file comparisons.
inline void write_tree(std::ostream& os, const TreeNode& root, const Schema& schema) {
    detail::write_tree_rec(os, root, schema, 0, "");
}

}  // namespace streamdt
