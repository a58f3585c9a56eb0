#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "streamdt/rng.hpp"
#include "streamdt/schema.hpp"

namespace streamdt {

// Hidden labeling tree of a synthetic concept. Internal nodes test one
// nominal attribute; leaves carry the class.
struct ConceptNode {
    int attribute = -1;
    int label = 0;
    std::vector<ConceptNode> children;

    bool is_leaf() const { return attribute < 0; }
};

/// A total labeling function over a nominal attribute space, realized as a
/// randomly grown decision tree. Deterministic in its seed.
struct RandomTreeConcept {
    Schema schema;
    ConceptNode root;
    std::uint64_t seed = 0;
    int max_depth = 5;
    double leaf_prob = 0.15;

    int label_of(const Instance& x) const {
        const ConceptNode* node = &root;
        while (!node->is_leaf())
            node = &node->children[static_cast<std::size_t>(nominal_value(x, node->attribute))];
        return node->label;
    }
};

namespace detail {

inline ConceptNode build_concept_node(Xorshift64Star& rng, int depth, int depth_cap,
                                      double leaf_prob, int values, int classes,
                                      std::vector<std::uint8_t>& used, int remaining) {
    ConceptNode node;
    const bool must_leaf = depth >= depth_cap || remaining == 0;
    // the root always splits so every concept actually depends on the attributes
    const bool chance_leaf = depth > 0 && rng.next_unit() < leaf_prob;
    if (must_leaf || chance_leaf) {
        node.label = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
        return node;
    }
    int pick = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(remaining)));
    int attr = -1;
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i] && pick-- == 0) {
            attr = static_cast<int>(i);
            break;
        }
    }
    node.attribute = attr;
    used[static_cast<std::size_t>(attr)] = 1;
    node.children.reserve(static_cast<std::size_t>(values));
    for (int v = 0; v < values; ++v)
        node.children.push_back(build_concept_node(rng, depth + 1, depth_cap, leaf_prob, values,
                                                   classes, used, remaining - 1));
    used[static_cast<std::size_t>(attr)] = 0;
    return node;
}

}  // namespace detail

/// Grows a random labeling tree over `attrs` nominal attributes with `values`
/// values each: attributes are picked uniformly without reuse along a path,
/// levels below the root terminate early with probability `leaf_prob`, and
/// leaves get uniform random labels. The depth cap is min(max_depth, attrs).
inline RandomTreeConcept build_random_tree_concept(std::uint64_t seed, int attrs, int values,
                                                   int classes, int max_depth = 5,
                                                   double leaf_prob = 0.15) {
    if (attrs < 1) throw std::invalid_argument("random tree concept: needs at least one attribute");
    if (values < 2) throw std::invalid_argument("random tree concept: values must be at least 2");
    if (classes < 2) throw std::invalid_argument("random tree concept: classes must be at least 2");
    if (max_depth < 1) throw std::invalid_argument("random tree concept: max_depth must be at least 1");
    if (!(leaf_prob >= 0.0 && leaf_prob <= 1.0))
        throw std::invalid_argument("random tree concept: leaf_prob must lie in [0,1]");
    RandomTreeConcept concept_out;
    concept_out.schema = make_nominal_schema(attrs, values, classes);
    concept_out.seed = seed;
    concept_out.max_depth = max_depth;
    concept_out.leaf_prob = leaf_prob;
    Xorshift64Star rng(seed);
    std::vector<std::uint8_t> used(static_cast<std::size_t>(attrs), 0);
    const int depth_cap = std::min(max_depth, attrs);
    concept_out.root =
        detail::build_concept_node(rng, 0, depth_cap, leaf_prob, values, classes, used, attrs);
    return concept_out;
}

/// An immutable, fully seeded stream description. Exactly one source is set:
/// a stationary concept, a pair of concepts with an abrupt switch, or a
/// materialized list of rows (typically loaded from CSV).
struct StreamSpec {
    Schema schema;
    std::uint64_t length = 0;
    std::uint64_t instance_seed = 0;
    std::shared_ptr<const RandomTreeConcept> concept_a;
    std::shared_ptr<const RandomTreeConcept> concept_b;  // set only for drift streams
    std::uint64_t switch_at = 0;
    std::shared_ptr<const std::vector<Instance>> rows;   // set only for file streams

    void validate() const {
        if (length < 1) throw std::invalid_argument("stream: length must be at least 1");
        if (rows) {
            if (rows->size() < length)
                throw std::invalid_argument("stream: fewer rows than the declared length");
            return;
        }
        if (!concept_a) throw std::invalid_argument("stream: no source configured");
        if (concept_b && switch_at >= length)
            throw std::invalid_argument("stream: drift switch point must precede the end");
    }
};

inline StreamSpec make_concept_stream(RandomTreeConcept concept_in, std::uint64_t length,
                                      std::uint64_t instance_seed) {
    StreamSpec spec;
    spec.schema = concept_in.schema;
    spec.length = length;
    spec.instance_seed = instance_seed;
    spec.concept_a = std::make_shared<const RandomTreeConcept>(std::move(concept_in));
    spec.validate();
    return spec;
}

inline StreamSpec make_drift_stream(RandomTreeConcept before, RandomTreeConcept after,
                                    std::uint64_t switch_at, std::uint64_t length,
                                    std::uint64_t instance_seed) {
    StreamSpec spec;
    spec.schema = before.schema;
    spec.length = length;
    spec.instance_seed = instance_seed;
    spec.concept_a = std::make_shared<const RandomTreeConcept>(std::move(before));
    spec.concept_b = std::make_shared<const RandomTreeConcept>(std::move(after));
    spec.switch_at = switch_at;
    spec.validate();
    return spec;
}

/// Seeded Fisher-Yates permutation; deterministic in the seed and preserves
/// the row multiset.
inline void shuffle_instances(std::vector<Instance>& rows, std::uint64_t seed) {
    Xorshift64Star rng(seed);
    for (std::size_t i = rows.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(rows[i - 1], rows[j]);
    }
}

inline StreamSpec make_file_stream(Schema schema, std::vector<Instance> rows,
                                   std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
    if (shuffle_seed) shuffle_instances(rows, *shuffle_seed);
    StreamSpec spec;
    spec.schema = std::move(schema);
    spec.length = rows.size();
    spec.rows = std::make_shared<const std::vector<Instance>>(std::move(rows));
    spec.validate();
    return spec;
}

/// The t-th instance of the stream, as a pure function of (spec, t): attribute
/// values are drawn from a generator seeded per timestep, and the label comes
/// from whichever concept is active at t. Throws std::out_of_range past the
/// end of the stream.
inline Instance instance_at(const StreamSpec& spec, std::uint64_t t) {
    if (t >= spec.length) throw std::out_of_range("instance_at: past the end of the stream");
    if (spec.rows) return (*spec.rows)[t];
    Xorshift64Star rng(derive_seed(spec.instance_seed, t));
    Instance x;
    x.values.resize(spec.schema.attributes.size());
    for (std::size_t i = 0; i < spec.schema.attributes.size(); ++i) {
        const AttributeSpec& a = spec.schema.attributes[i];
        if (a.is_nominal())
            x.values[i] = static_cast<double>(
                rng.next_below(static_cast<std::uint64_t>(a.value_count())));
        else
            x.values[i] = rng.next_unit();
    }
    const RandomTreeConcept& active =
        (spec.concept_b && t >= spec.switch_at) ? *spec.concept_b : *spec.concept_a;
    x.label = active.label_of(x);
    return x;
}

}  // namespace streamdt
