#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamdt/schema.hpp"

namespace streamdt {

/// Single-pass per-class summary of one numeric attribute. Uses the Welford
/// recurrence, so the variance accumulator never goes negative.
struct GaussianEstimator {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // accumulated squared deviation from the running mean
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }

    double variance() const { return count > 0 ? m2 / static_cast<double>(count) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }

    // Expected number of observations with value <= t under the fitted normal.
    // A degenerate (constant) estimator puts all mass on its mean.
    double mass_below(double t) const {
        if (count == 0) return 0.0;
        const double sd = stddev();
        if (sd <= 0.0) return mean <= t ? static_cast<double>(count) : 0.0;
        const double z = (t - mean) / sd;
        return static_cast<double>(count) * 0.5 * std::erfc(-z / std::numbers::sqrt2);
    }
};

/// Per-node class-conditional attribute-value counts: exact integer counts for
/// nominal attributes (one v_i x c block per attribute, value-major) and one
/// GaussianEstimator per class per numeric attribute.
struct SufficientStats {
    std::vector<std::int64_t> class_counts;
    std::vector<std::int64_t> nominal_counts;      // concatenated v_i x c blocks
    std::vector<GaussianEstimator> numeric_stats;  // c estimators per numeric attribute
    std::vector<std::int32_t> attr_offset;         // offset of attribute i within its kind's store
    std::int64_t total = 0;

    SufficientStats() = default;

    explicit SufficientStats(const Schema& schema) {
        const int c = schema.class_count;
        class_counts.assign(static_cast<std::size_t>(c), 0);
        attr_offset.resize(schema.attributes.size());
        std::int32_t nominal_cells = 0;
        std::int32_t numeric_slots = 0;
        for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
            const AttributeSpec& a = schema.attributes[i];
            if (a.is_nominal()) {
                attr_offset[i] = nominal_cells;
                nominal_cells += a.value_count() * c;
            } else {
                attr_offset[i] = numeric_slots;
                numeric_slots += c;
            }
        }
        nominal_counts.assign(static_cast<std::size_t>(nominal_cells), 0);
        numeric_stats.assign(static_cast<std::size_t>(numeric_slots), GaussianEstimator{});
    }

    int class_count() const { return static_cast<int>(class_counts.size()); }

    std::int64_t& nominal_count(int attr, int value, int k) {
        return nominal_counts[static_cast<std::size_t>(attr_offset[static_cast<std::size_t>(attr)] +
                                                       value * class_count() + k)];
    }
    std::int64_t nominal_count(int attr, int value, int k) const {
        return nominal_counts[static_cast<std::size_t>(attr_offset[static_cast<std::size_t>(attr)] +
                                                       value * class_count() + k)];
    }

    // Counts for one (attribute, value) cell across all classes.
    std::span<const std::int64_t> nominal_row(int attr, int value) const {
        const std::size_t start = static_cast<std::size_t>(
            attr_offset[static_cast<std::size_t>(attr)] + value * class_count());
        return {nominal_counts.data() + start, static_cast<std::size_t>(class_count())};
    }

    GaussianEstimator& estimator(int attr, int k) {
        return numeric_stats[static_cast<std::size_t>(attr_offset[static_cast<std::size_t>(attr)] + k)];
    }
    const GaussianEstimator& estimator(int attr, int k) const {
        return numeric_stats[static_cast<std::size_t>(attr_offset[static_cast<std::size_t>(attr)] + k)];
    }

    bool is_pure() const {
        int nonzero = 0;
        for (std::int64_t n : class_counts)
            if (n > 0 && ++nonzero > 1) return false;
        return true;
    }

    // Scalar slots held by this node's statistics; proportional to
    // sum_i v_i*c for nominal attributes plus a constant per numeric
    // estimator. Used by the resource-accounting checks.
    std::size_t memory_cells() const {
        return class_counts.size() + nominal_counts.size() + 5 * numeric_stats.size();
    }
};

/// Majority vote; an all-zero vector yields class 0 and ties break toward the
/// lowest class index, so predictions are deterministic from the first example.
inline int majority_class(const SufficientStats& stats) {
    int best = 0;
    for (int k = 1; k < stats.class_count(); ++k)
        if (stats.class_counts[static_cast<std::size_t>(k)] >
            stats.class_counts[static_cast<std::size_t>(best)])
            best = k;
    return best;
}

/// Absorbs one labeled instance. Throws std::out_of_range when a nominal value
/// or the label does not fit the schema.
inline void update_stats(SufficientStats& stats, const Instance& x, const Schema& schema) {
    const int c = stats.class_count();
    if (x.label < 0 || x.label >= c) throw std::out_of_range("update_stats: label out of range");
    if (x.values.size() != static_cast<std::size_t>(schema.attribute_count()))
        throw std::invalid_argument("update_stats: wrong number of attribute values");
    for (int i = 0; i < schema.attribute_count(); ++i) {
        const AttributeSpec& a = schema.attributes[static_cast<std::size_t>(i)];
        if (a.is_nominal()) {
            const int v = nominal_value(x, i);
            if (v < 0 || v >= a.value_count())
                throw std::out_of_range("update_stats: value out of range for attribute '" + a.name + "'");
            ++stats.nominal_count(i, v, x.label);
        } else {
            const double r = x.values[static_cast<std::size_t>(i)];
            if (!std::isfinite(r))
                throw std::invalid_argument("update_stats: non-finite reading for attribute '" + a.name + "'");
            stats.estimator(i, x.label).add(r);
        }
    }
    ++stats.class_counts[static_cast<std::size_t>(x.label)];
    ++stats.total;
}

}  // namespace streamdt
