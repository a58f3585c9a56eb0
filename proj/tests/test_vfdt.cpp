#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "streamdt/batch.hpp"
#include "streamdt/rng.hpp"
#include "streamdt/stream.hpp"
#include "streamdt/vfdt.hpp"

using namespace streamdt;

namespace {

Instance make_instance(std::vector<double> values, int label) {
    Instance x;
    x.values = std::move(values);
    x.label = label;
    return x;
}

// Two binary attributes; attribute 0 equals the class, attribute 1 is noise.
Instance perfect_attr0(Xorshift64Star& rng) {
    const int label = static_cast<int>(rng.next_below(2));
    return make_instance({static_cast<double>(label), static_cast<double>(rng.next_below(2))}, label);
}

// Checks the structural invariants: fanout dictated by the split, and each
// nominal attribute used at most once per path when reuse is off.
void check_tree_invariants(const TreeNode& node, const Schema& schema,
                           std::vector<std::uint8_t> used) {
    if (node.is_leaf()) return;
    const AttributeSpec& attr = schema.attributes[static_cast<std::size_t>(node.split.attribute)];
    const std::size_t fanout = attr.is_nominal() ? static_cast<std::size_t>(attr.value_count()) : 2;
    REQUIRE(node.children.size() == fanout);
    if (attr.is_nominal()) {
        REQUIRE(used[static_cast<std::size_t>(node.split.attribute)] == 0);
        used[static_cast<std::size_t>(node.split.attribute)] = 1;
    }
    for (const auto& child : node.children) check_tree_invariants(*child, schema, used);
}

void collect_splits(const TreeNode& node, std::map<std::uint64_t, int>& splits) {
    if (node.is_leaf()) return;
    splits[node.node_id] = node.split.attribute;
    for (const auto& child : node.children) collect_splits(*child, splits);
}

}  // namespace

TEST_CASE("fresh learner predicts class 0") {
    VfdtLearner learner(make_nominal_schema(2, 2, 2), HyperParams{});
    CHECK(learner.predict(make_instance({0, 0}, 0)) == 0);
    CHECK(learner.predict(make_instance({1, 1}, 0)) == 0);
}

TEST_CASE("vfdt splits on a perfect attribute at the first cadence check") {
    // With the class readable from attribute 0, the gain advantage is about a
    // full bit while the bound at n=200 (R=1, delta=0.05) is only ~0.0866.
    Xorshift64Star rng(3);
    VfdtLearner learner(make_nominal_schema(2, 2, 2), HyperParams{});
    for (int i = 0; i < 199; ++i) learner.learn_one(perfect_attr0(rng));
    REQUIRE(learner.root().is_leaf());
    learner.learn_one(perfect_attr0(rng));
    REQUIRE_FALSE(learner.root().is_leaf());
    CHECK(learner.root().split.attribute == 0);
    CHECK(learner.examples_seen() == 200);
    // children start from zero counts
    for (const auto& child : learner.root().children) CHECK(child->stats.total == 0);

    // routing: once the fresh children have seen data, an instance with value
    // v goes to child v and gets that child's majority
    for (int i = 0; i < 50; ++i) learner.learn_one(perfect_attr0(rng));
    CHECK(learner.predict(make_instance({0, 0}, 0)) == 0);
    CHECK(learner.predict(make_instance({1, 0}, 0)) == 1);
}

TEST_CASE("vfdt never splits a pure leaf") {
    VfdtLearner learner(make_nominal_schema(2, 3, 2), HyperParams{});
    Xorshift64Star rng(11);
    for (int i = 0; i < 10000; ++i) {
        learner.learn_one(make_instance({static_cast<double>(rng.next_below(3)),
                                         static_cast<double>(rng.next_below(3))},
                                        1));
    }
    CHECK(learner.root().is_leaf());
    CHECK(learner.predict(make_instance({0, 0}, 1)) == 1);
}

TEST_CASE("identically distributed attributes never split under tau=0") {
    // Attribute 1 duplicates attribute 0, so their count tables are equal at
    // every step and the gain difference is exactly zero.
    HyperParams params;
    params.tau = 0.0;
    VfdtLearner learner(make_nominal_schema(2, 2, 2), params);
    Xorshift64Star rng(17);
    for (int i = 0; i < 100000; ++i) {
        const double v = static_cast<double>(rng.next_below(2));
        learner.learn_one(make_instance({v, v}, static_cast<int>(v)));
    }
    CHECK(learner.root().is_leaf());
}

TEST_CASE("prediction matches an independent path trace on a grown tree") {
    const StreamSpec stream =
        make_concept_stream(build_random_tree_concept(900, 4, 3, 3, 4, 0.1), 30000, 901);
    VfdtLearner learner(stream.schema, HyperParams{});
    for (std::uint64_t t = 0; t < stream.length; ++t) learner.learn_one(instance_at(stream, t));
    REQUIRE_FALSE(learner.root().is_leaf());

    Xorshift64Star rng(902);
    for (int i = 0; i < 200; ++i) {
        Instance x;
        for (int a = 0; a < 4; ++a) x.values.push_back(static_cast<double>(rng.next_below(3)));
        x.label = 0;
        // trace the path by hand
        const TreeNode* node = &learner.root();
        while (!node->is_leaf()) {
            const int v = nominal_value(x, node->split.attribute);
            node = node->children[static_cast<std::size_t>(v)].get();
        }
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (node->stats.class_counts[static_cast<std::size_t>(k)] >
                node->stats.class_counts[static_cast<std::size_t>(best)])
                best = k;
        CHECK(learner.predict(x) == best);
    }
}

TEST_CASE("vfdt structure invariants and frozen splits over a full run") {
    const StreamSpec stream =
        make_concept_stream(build_random_tree_concept(42, 5, 3, 3, 5, 0.15), 40000, 43);
    VfdtLearner learner(stream.schema, HyperParams{});

    std::map<std::uint64_t, int> seen_splits;
    std::uint64_t last_leaves = 1;
    for (std::uint64_t t = 0; t < stream.length; ++t) {
        learner.learn_one(instance_at(stream, t));
        if ((t + 1) % 500 == 0) {
            // leaves never decrease
            const TreeSummary summary = summarize_tree(learner.root());
            REQUIRE(summary.leaves >= last_leaves);
            last_leaves = summary.leaves;
            // once created, an internal node's split never changes
            std::map<std::uint64_t, int> now;
            collect_splits(learner.root(), now);
            for (const auto& [id, attr] : now) {
                auto it = seen_splits.find(id);
                if (it != seen_splits.end()) REQUIRE(it->second == attr);
            }
            seen_splits = std::move(now);
        }
    }
    REQUIRE_FALSE(learner.root().is_leaf());
    check_tree_invariants(learner.root(), stream.schema,
                          std::vector<std::uint8_t>(5, 0));
}

TEST_CASE("vfdt is deterministic for identical instance sequences") {
    const StreamSpec stream =
        make_concept_stream(build_random_tree_concept(77, 4, 3, 4, 4, 0.2), 20000, 78);
    VfdtLearner a(stream.schema, HyperParams{});
    VfdtLearner b(stream.schema, HyperParams{});
    for (std::uint64_t t = 0; t < stream.length; ++t) {
        const Instance x = instance_at(stream, t);
        a.learn_one(x);
        b.learn_one(x);
    }
    CHECK(trees_structurally_equal(a.root(), b.root()));
}
