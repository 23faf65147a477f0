// Gibbs reweighting: the finite-temperature Hamiltonian
// H_t(x) = 2 t^(2/3) exp(t^(1/3) x) and its zero-temperature limit
// (hard non-intersection), plus partition-function estimation.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "bridge.hpp"
#include "ensemble.hpp"
#include "stats.hpp"
#include "tail_estimate.hpp"

namespace linens {

struct Hamiltonian {
    double t = 1.0;
    bool zero_temperature = false;

    static Hamiltonian finite(double t) {
        if (!(t > 0.0)) throw std::domain_error("Hamiltonian: need t > 0");
        return Hamiltonian{t, false};
    }
    static Hamiltonian zero() { return Hamiltonian{0.0, true}; }

    double cbrt_t() const { return std::cbrt(t); }
    double prefactor() const { return 2.0 * std::cbrt(t * t); } // 2 t^(2/3)
};

// H_t(gap) evaluated with the overflow guard: any exponent argument above
// 700 means the weight is below the smallest positive double, so callers
// short-circuit to -inf.
inline constexpr double kHamiltonianExpCap = 700.0;

// -sum_i int H_t(L_{i+1} - L_i) du with L_0 = upper boundary (term dropped
// when absent) and L_{k+1} = lower boundary (term dropped when absent);
// trapezoid in u. Zero temperature: 0 when strictly ordered, -inf otherwise.
inline double log_boltzmann_weight(const EnsembleState& st, const Hamiltonian& h) {
    st.validate();
    if (h.zero_temperature) return st.strictly_ordered() ? 0.0 : kNegInf;
    const double a = h.cbrt_t();
    const double pref = h.prefactor();
    double total = 0.0;
    auto add_pair = [&](const std::vector<double>& above, const std::vector<double>& below) -> bool {
        double prev = 0.0;
        for (std::size_t j = 0; j < st.n(); ++j) {
            const double arg = a * (below[j] - above[j]);
            if (arg > kHamiltonianExpCap) return false;
            const double term = pref * std::exp(arg);
            if (j > 0) total += 0.5 * (st.grid[j] - st.grid[j - 1]) * (term + prev);
            prev = term;
        }
        return true;
    };
    if (st.upper_boundary)
        if (!add_pair(*st.upper_boundary, st.curves.front())) return kNegInf;
    for (std::size_t i = 1; i < st.k(); ++i)
        if (!add_pair(st.curves[i - 1], st.curves[i])) return kNegInf;
    if (st.lower_boundary)
        if (!add_pair(st.curves.back(), *st.lower_boundary)) return kNegInf;
    return -total;
}

// MC estimate of Z = E_free[exp(log weight)] for a single curve above an
// optional lower boundary; log-space average with delta-method stderr.
inline TailEstimate estimate_partition_function(const BridgeSpec& spec,
                                                const std::optional<SampledPath>& lower,
                                                const Hamiltonian& h, std::size_t n_samples,
                                                Rng& rng, const Grid& grid) {
    if (n_samples < 1) throw std::domain_error("estimate_partition_function: need N >= 1");
    if (lower && lower->grid != grid)
        throw std::domain_error("estimate_partition_function: lower boundary grid mismatch");
    LogWeightedMean acc;
    std::size_t successes = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        SampledPath p = sample_bridge(spec, grid, rng);
        EnsembleState st;
        st.grid = grid;
        st.curves = {std::move(p.values)};
        st.left_values = {spec.left_y};
        st.right_values = {spec.right_y};
        st.rate = spec.rate;
        if (lower) st.lower_boundary = lower->values;
        const double lw = log_boltzmann_weight(st, h);
        if (lw != kNegInf) ++successes;
        acc.add(lw);
    }
    TailEstimate est;
    est.n = n_samples;
    est.successes = successes;
    est.method = EstimateMethod::naive;
    est.ess = acc.ess();
    est.log_p = acc.log_mean();
    est.stderr_log = acc.stderr_log();
    if (est.degenerate()) est.log_p_upper_ci = std::log(rule_of_three_upper(n_samples));
    else est.log_p_upper_ci = est.log_p + 1.6448536269514722 * est.stderr_log;
    return est;
}

} // namespace linens
