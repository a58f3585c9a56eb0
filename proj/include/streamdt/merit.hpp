#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamdt/params.hpp"
#include "streamdt/schema.hpp"
#include "streamdt/stats.hpp"
#include "streamdt/tree.hpp"

namespace streamdt {

/// Shannon entropy in bits of a count vector; 0*log0 terms contribute nothing
/// and an all-zero vector has entropy 0.
inline double entropy(std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (std::int64_t n : counts) total += n;
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (std::int64_t n : counts) {
        if (n > 0) {
            const double p = static_cast<double>(n) / static_cast<double>(total);
            h -= p * std::log2(p);
        }
    }
    return h;
}

// Same, over fractional masses (numeric splits work with implied class mass).
inline double entropy(std::span<const double> masses) {
    double total = 0.0;
    for (double m : masses) total += m;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double m : masses) {
        if (m > 0.0) {
            const double p = m / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

/// Merit of not splitting, relative to the node's own class distribution.
/// Identically zero under information gain; kept as a named operation so the
/// split tests read like their definitions.
inline double null_split_merit(const SufficientStats&) { return 0.0; }

/// Confidence radius eps = sqrt(R^2 ln(1/delta) / 2n) on the deviation of an
/// n-sample mean with range R. Throws std::domain_error for n = 0: the bound
/// is undefined before the first example.
inline double hoeffding_bound(double range, double delta, std::int64_t n) {
    if (n <= 0) throw std::domain_error("hoeffding_bound: undefined before the first example");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("hoeffding_bound: delta must lie in (0,1)");
    if (!(range > 0.0)) throw std::invalid_argument("hoeffding_bound: range must be positive");
    return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

/// Information gain of the partition induced by `choice`, in bits: parent
/// class entropy minus the child-weight-averaged entropy. The null split is
/// exactly 0; results are clamped to [0, log2 c].
inline double info_gain(const SufficientStats& stats, const SplitChoice& choice, const Schema& schema) {
    if (choice.is_null()) return 0.0;
    if (stats.total == 0) return 0.0;
    const int c = stats.class_count();
    const double range = std::log2(static_cast<double>(schema.class_count));
    const double parent = entropy(std::span<const std::int64_t>(stats.class_counts));
    double children = 0.0;
    const AttributeSpec& a = schema.attributes[static_cast<std::size_t>(choice.attribute)];
    if (a.is_nominal()) {
        const double total = static_cast<double>(stats.total);
        for (int v = 0; v < a.value_count(); ++v) {
            const auto row = stats.nominal_row(choice.attribute, v);
            std::int64_t n_v = 0;
            for (std::int64_t n : row) n_v += n;
            if (n_v > 0) children += (static_cast<double>(n_v) / total) * entropy(row);
        }
    } else {
        std::vector<double> below(static_cast<std::size_t>(c), 0.0);
        std::vector<double> above(static_cast<std::size_t>(c), 0.0);
        double n_below = 0.0, n_above = 0.0;
        for (int k = 0; k < c; ++k) {
            const GaussianEstimator& est = stats.estimator(choice.attribute, k);
            const double m = std::clamp(est.mass_below(choice.threshold), 0.0,
                                        static_cast<double>(est.count));
            below[static_cast<std::size_t>(k)] = m;
            above[static_cast<std::size_t>(k)] = static_cast<double>(est.count) - m;
            n_below += below[static_cast<std::size_t>(k)];
            n_above += above[static_cast<std::size_t>(k)];
        }
        const double total = n_below + n_above;
        if (total > 0.0) {
            if (n_below > 0.0) children += (n_below / total) * entropy(std::span<const double>(below));
            if (n_above > 0.0) children += (n_above / total) * entropy(std::span<const double>(above));
        }
    }
    return std::clamp(parent - children, 0.0, range);
}

struct SplitCandidate {
    SplitChoice choice{};
    double merit = 0.0;
};

/// Ranked split candidates at a node. `candidates` keeps the deterministic
/// evaluation order: attributes by ascending index, the null split last, so a
/// linear strict-greater scan implements the tie rules (lower attribute index
/// wins, the null split loses all merit ties).
struct MeritReport {
    std::vector<SplitCandidate> candidates;
    SplitCandidate best{};
    SplitCandidate second_best{};
    double range = 0.0;  // log2(class_count), the range fed to the Hoeffding bound
};

namespace detail {

// Best cut point for one numeric attribute: probe the midpoints of
// `numeric_candidates` equal-width bins over the range observed at this node,
// scoring each by the implied class mass on either side. A degenerate range
// yields merit 0.
inline SplitCandidate best_numeric_candidate(const SufficientStats& stats, int attr,
                                             const Schema& schema, const HyperParams& params) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < stats.class_count(); ++k) {
        const GaussianEstimator& est = stats.estimator(attr, k);
        if (est.count > 0) {
            lo = std::min(lo, est.lo);
            hi = std::max(hi, est.hi);
        }
    }
    SplitCandidate out{SplitChoice{attr, lo < hi ? lo : 0.0}, 0.0};
    if (!(lo < hi)) return out;
    const int bins = params.numeric_candidates;
    for (int b = 0; b < bins; ++b) {
        const double t = lo + (hi - lo) * (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
        const double g = info_gain(stats, SplitChoice{attr, t}, schema);
        if (g > out.merit) {
            out.merit = g;
            out.choice.threshold = t;
        }
    }
    return out;
}

}  // namespace detail

/// Computes the merit of every available attribute (and, when asked, the null
/// split) and fills best/second_best under the deterministic tie order.
/// Throws std::invalid_argument on an empty candidate set or empty stats.
inline MeritReport rank_candidates(const SufficientStats& stats,
                                   std::span<const std::uint8_t> available, bool include_null,
                                   const Schema& schema, const HyperParams& params) {
    if (stats.total < 1) throw std::invalid_argument("rank_candidates: no examples at this node");
    MeritReport report;
    report.range = std::log2(static_cast<double>(schema.class_count));
    for (int i = 0; i < schema.attribute_count(); ++i) {
        if (!available[static_cast<std::size_t>(i)]) continue;
        if (schema.attributes[static_cast<std::size_t>(i)].is_nominal()) {
            report.candidates.push_back({SplitChoice{i}, info_gain(stats, SplitChoice{i}, schema)});
        } else {
            report.candidates.push_back(detail::best_numeric_candidate(stats, i, schema, params));
        }
    }
    if (include_null) report.candidates.push_back({SplitChoice{}, 0.0});
    if (report.candidates.empty())
        throw std::invalid_argument("rank_candidates: empty candidate set");

    std::size_t best = 0;
    for (std::size_t j = 1; j < report.candidates.size(); ++j)
        if (report.candidates[j].merit > report.candidates[best].merit) best = j;
    report.best = report.candidates[best];
    if (report.candidates.size() == 1) {
        report.second_best = SplitCandidate{SplitChoice{}, 0.0};
    } else {
        std::size_t second = best == 0 ? 1 : 0;
        for (std::size_t j = 0; j < report.candidates.size(); ++j) {
            if (j == best) continue;
            if (report.candidates[j].merit > report.candidates[second].merit) second = j;
        }
        report.second_best = report.candidates[second];
    }
    return report;
}

}  // namespace streamdt
