#pragma once

#include <cstddef>
#include <string>

#include "stats.hpp"

namespace linens {

enum class EstimateMethod { naive, tilted, chain };

inline const char* to_string(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::naive: return "naive";
        case EstimateMethod::tilted: return "tilted";
        case EstimateMethod::chain: return "chain";
    }
    return "?";
}

// A log-probability estimate with its uncertainty and provenance.
// When no success was observed, log_p is -inf and log_p_upper_ci carries the
// one-sided rule-of-three bound.
struct TailEstimate {
    double log_p = kNegInf;
    double stderr_log = kPosInf;
    std::size_t n = 0;
    EstimateMethod method = EstimateMethod::naive;
    std::size_t successes = 0;    // samples with a positive contribution
    double ess = 0.0;             // effective sample size of the weights
    double log_p_upper_ci = 0.0;  // one-sided 95% upper bound on log p

    bool degenerate() const { return log_p == kNegInf; }
};

} // namespace linens
