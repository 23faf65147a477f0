// Brownian bridge laws on grids: exact sampling, decomposition, and the
// closed-form Gaussian/bridge estimates used throughout the estimators.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "tail_estimate.hpp"

namespace linens {

// One Brownian bridge law: interval, endpoint values, variance per unit time.
// Rate 2 is the convention used by default throughout this library.
struct BridgeSpec {
    double left_x;
    double right_x;
    double left_y;
    double right_y;
    double rate = 2.0;

    BridgeSpec(double lx, double rx, double ly, double ry, double r = 2.0)
        : left_x(lx), right_x(rx), left_y(ly), right_y(ry), rate(r) {
        if (!(left_x < right_x)) throw std::domain_error("BridgeSpec: need left_x < right_x");
        if (!(rate > 0.0)) throw std::domain_error("BridgeSpec: need rate > 0");
    }

    double length() const { return right_x - left_x; }
    BridgeSpec reversed() const { return BridgeSpec(-right_x, -left_x, right_y, left_y, rate); }
};

inline void check_in_interval(const BridgeSpec& s, double x) {
    if (!(x >= s.left_x && x <= s.right_x))
        throw std::domain_error("bridge: x outside the bridge interval");
}

// Linear interpolation of the endpoints.
inline double bridge_mean(const BridgeSpec& s, double x) {
    check_in_interval(s, x);
    return s.left_y + (x - s.left_x) / s.length() * (s.right_y - s.left_y);
}

// rate * (x - l)(r - x)/(r - l); zero at the pinned endpoints.
inline double bridge_variance(const BridgeSpec& s, double x) {
    check_in_interval(s, x);
    return s.rate * (x - s.left_x) * (s.right_x - x) / s.length();
}

// Exact finite-dimensional bridge law on the grid, sampled left to right by
// conditional Gaussians (exact marginals on nonuniform grids too).
inline SampledPath sample_bridge(const BridgeSpec& s, const Grid& grid, Rng& rng) {
    check_grid(grid);
    if (grid.front() != s.left_x || grid.back() != s.right_x)
        throw std::domain_error("sample_bridge: grid endpoints must equal spec endpoints");
    const std::size_t n = grid.size();
    std::vector<double> v(n);
    v.front() = s.left_y;
    v.back() = s.right_y;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double rem = s.right_x - grid[j - 1];
        const double dx = grid[j] - grid[j - 1];
        const double mean = v[j - 1] + dx / rem * (s.right_y - v[j - 1]);
        const double var = s.rate * dx * (s.right_x - grid[j]) / rem;
        v[j] = rng.normal(mean, std::sqrt(var));
    }
    return SampledPath{grid, std::move(v)};
}

// Bridge sampled under a mean shift m (the importance proposal), together
// with the exact log likelihood ratio log dP/dQ of the unshifted law P
// against the proposal Q at the returned path. m must vanish at both
// endpoints. On the grid the ratio is a finite Gaussian density ratio:
//   log LR = -(1/rate) * sum_j [ dG_j + dm_j/2 ] dm_j / dx_j,
// with G the path minus chord minus shift.
struct ShiftedDraw {
    SampledPath path;
    double log_lr;
};

inline ShiftedDraw sample_bridge_shifted(const BridgeSpec& s, const Grid& grid,
                                         const std::vector<double>& shift, Rng& rng) {
    check_grid(grid);
    if (grid.front() != s.left_x || grid.back() != s.right_x)
        throw std::domain_error("sample_bridge_shifted: grid endpoints must equal spec endpoints");
    if (shift.size() != grid.size())
        throw std::domain_error("sample_bridge_shifted: shift size mismatch");
    if (shift.front() != 0.0 || shift.back() != 0.0)
        throw std::domain_error("sample_bridge_shifted: shift must vanish at endpoints");
    BridgeSpec zero(s.left_x, s.right_x, 0.0, 0.0, s.rate);
    SampledPath g = sample_bridge(zero, grid, rng);
    const std::size_t n = grid.size();
    std::vector<double> v(n);
    double log_lr = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double chord = s.left_y + (grid[j] - s.left_x) / s.length() * (s.right_y - s.left_y);
        v[j] = chord + shift[j] + g.values[j];
    }
    for (std::size_t j = 1; j < n; ++j) {
        const double dm = shift[j] - shift[j - 1];
        if (dm == 0.0) continue;
        const double dg = g.values[j] - g.values[j - 1];
        const double dx = grid[j] - grid[j - 1];
        log_lr -= (dg + 0.5 * dm) * dm / (s.rate * dx);
    }
    return ShiftedDraw{SampledPath{grid, std::move(v)}, log_lr};
}

// Affinely detrended restriction of a path to [a,b]; zero at both ends.
inline SampledPath bridge_of(const SampledPath& p, double a, double b) {
    const std::size_t ia = grid_index_of(p.grid, a);
    const std::size_t ib = grid_index_of(p.grid, b);
    if (ia >= ib) throw std::domain_error("bridge_of: need a < b");
    const double fa = p.values[ia], fb = p.values[ib];
    Grid g(p.grid.begin() + static_cast<std::ptrdiff_t>(ia),
           p.grid.begin() + static_cast<std::ptrdiff_t>(ib) + 1);
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g[j];
        v[j] = p.values[ia + j] - (b - x) / (b - a) * fa - (x - a) / (b - a) * fb;
    }
    return SampledPath{std::move(g), std::move(v)};
}

// Rebuild a path from its detrended piece and the two anchor values.
inline SampledPath reconstruct_from_bridge(const SampledPath& detrended, double fa, double fb) {
    const double a = detrended.x_left(), b = detrended.x_right();
    std::vector<double> v(detrended.size());
    for (std::size_t j = 0; j < detrended.size(); ++j) {
        const double x = detrended.grid[j];
        v[j] = detrended.values[j] + (b - x) / (b - a) * fa + (x - a) / (b - a) * fb;
    }
    return SampledPath{detrended.grid, std::move(v)};
}

// P(sup B >= M sigma_I) = exp(-M^2/2) for a zero-endpoint bridge, where
// sigma_I^2 = max variance over the interval.
inline double sup_tail_exact(double big_m) {
    if (!(big_m >= 0.0)) throw std::domain_error("sup_tail_exact: need M >= 0");
    return std::exp(-0.5 * big_m * big_m);
}

// Exact draw of the maximum of the bridge over one cell, conditional on the
// endpoint values (reflection-principle inversion):
//   P(max >= m) = exp(-2 (m-a)(m-b) / (rate dx)),  m >= max(a,b).
inline double cell_max_exact(double a, double b, double dx, double rate, double u01) {
    const double e = -0.5 * rate * dx * std::log(u01);
    return 0.5 * ((a + b) + std::sqrt((a - b) * (a - b) + 4.0 * e));
}

inline double cell_min_exact(double a, double b, double dx, double rate, double u01) {
    const double e = -0.5 * rate * dx * std::log(u01);
    return 0.5 * ((a + b) - std::sqrt((a - b) * (a - b) + 4.0 * e));
}

// Continuum supremum of the bridge carried by a sampled path: maximum of the
// node values and one exact cell-maximum draw per cell.
inline double path_sup_exact(const SampledPath& p, double rate, Rng& rng) {
    double m = p.values.front();
    for (std::size_t j = 1; j < p.size(); ++j) {
        const double c = cell_max_exact(p.values[j - 1], p.values[j],
                                        p.grid[j] - p.grid[j - 1], rate, rng.uniform01());
        if (c > m) m = c;
    }
    return m;
}

// Continuum supremum restricted to the cells inside [a, b] (grid points).
inline double path_sup_exact_on(const SampledPath& p, double a, double b, double rate, Rng& rng) {
    const std::size_t ia = grid_index_of(p.grid, a);
    const std::size_t ib = grid_index_of(p.grid, b);
    double m = p.values[ia];
    for (std::size_t j = ia + 1; j <= ib; ++j) {
        const double c = cell_max_exact(p.values[j - 1], p.values[j],
                                        p.grid[j] - p.grid[j - 1], rate, rng.uniform01());
        if (c > m) m = c;
    }
    return m;
}

inline double path_inf_exact(const SampledPath& p, double rate, Rng& rng) {
    double m = p.values.front();
    for (std::size_t j = 1; j < p.size(); ++j) {
        const double c = cell_min_exact(p.values[j - 1], p.values[j],
                                        p.grid[j] - p.grid[j - 1], rate, rng.uniform01());
        if (c < m) m = c;
    }
    return m;
}

// Two-sided Gaussian tail sandwich, valid for x >= sqrt(4/3) sigma:
//   (1/sqrt(2 pi)) (sigma/4x) exp(-x^2/2sigma^2) <= P(N(0,sigma^2) >= x)
//                                                <= exp(-x^2/2sigma^2).
struct TailSandwich {
    double lower;
    double upper;
};

inline TailSandwich gaussian_tail_sandwich(double x, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_tail_sandwich: need sigma > 0");
    if (!(x >= std::sqrt(4.0 / 3.0) * sigma))
        throw std::domain_error("gaussian_tail_sandwich: need x >= sqrt(4/3) sigma");
    const double e = std::exp(-x * x / (2.0 * sigma * sigma));
    const double lower = 0.3989422804014327 * sigma / (4.0 * x) * e;
    return TailSandwich{lower, e};
}

// Log versions, stable deep in the tail.
inline double log_gaussian_tail_upper(double x, double sigma) {
    return -x * x / (2.0 * sigma * sigma);
}
inline double log_gaussian_tail_lower(double x, double sigma) {
    if (!(x >= std::sqrt(4.0 / 3.0) * sigma))
        throw std::domain_error("log_gaussian_tail_lower: need x >= sqrt(4/3) sigma");
    return std::log(0.3989422804014327 * sigma / (4.0 * x)) - x * x / (2.0 * sigma * sigma);
}

// Variance of the integral of a rate-2 zero-mean bridge over [-z, z].
inline double bridge_integral_variance(double z) {
    if (!(z > 0.0)) throw std::domain_error("bridge_integral_variance: need z > 0");
    return 4.0 * z * z * z / 3.0;
}

// MC estimate of P(inf_{[0,r]} B < -eta K) for the rate-2 bridge from (0,0)
// to (r, K r); the infimum is evaluated at grid points only.
inline TailEstimate line_avoidance_tail(double big_k, double r, double eta, std::size_t n_samples,
                                        Rng& rng, double grid_step = 0.01) {
    if (!(big_k >= 0.5 * std::max(1.0, 1.0 / eta)))
        throw std::domain_error("line_avoidance_tail: need K >= max(1, 1/eta)/2");
    const BridgeSpec spec(0.0, r, 0.0, big_k * r, 2.0);
    const Grid grid = make_grid(0.0, r, grid_step);
    const double level = -eta * big_k;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const SampledPath p = sample_bridge(spec, grid, rng);
        for (double v : p.values) {
            if (v < level) {
                ++hits;
                break;
            }
        }
    }
    TailEstimate est;
    est.n = n_samples;
    est.successes = hits;
    est.method = EstimateMethod::naive;
    est.ess = static_cast<double>(n_samples);
    if (hits == 0) {
        est.log_p = kNegInf;
        est.stderr_log = kPosInf;
        est.log_p_upper_ci = std::log(rule_of_three_upper(n_samples));
    } else {
        const double p_hat = static_cast<double>(hits) / static_cast<double>(n_samples);
        est.log_p = std::log(p_hat);
        est.stderr_log = binomial_stderr(p_hat, n_samples) / p_hat;
        est.log_p_upper_ci = est.log_p + 1.6448536269514722 * est.stderr_log;
    }
    return est;
}

} // namespace linens
