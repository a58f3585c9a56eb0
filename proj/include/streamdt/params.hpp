#pragma once

#include <cstdint>
#include <stdexcept>

namespace streamdt {

/// Learner hyperparameters shared by the Hoeffding tree and EFDT.
struct HyperParams {
    double delta = 0.05;  // split-test significance; 0.05 is this library's default, not a canonical value
    double tau = 0.05;    // tie-break threshold (used by the Hoeffding tree split test)
    std::uint64_t leaf_cadence = 200;       // examples between split attempts at a leaf
    std::uint64_t internal_cadence = 2000;  // examples between re-evaluations at an internal node
    int numeric_candidates = 10;            // candidate thresholds per numeric attribute
    // With the default, a nominal attribute already split on along the path is
    // removed from the candidate set of the subtree.
    bool reuse_nominal_attributes = false;
    bool efdt_tie_break = false;  // ablation switch: let EFDT use tau like the Hoeffding tree does

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("params: delta must lie in (0,1)");
        if (tau < 0.0) throw std::invalid_argument("params: tau must be non-negative");
        if (leaf_cadence < 1 || internal_cadence < 1)
            throw std::invalid_argument("params: cadences must be at least 1");
        if (numeric_candidates < 1)
            throw std::invalid_argument("params: numeric_candidates must be at least 1");
    }
};

}  // namespace streamdt
