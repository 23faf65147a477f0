// Resampling Markov chain for curve ensembles: Metropolis block updates with
// bridge proposals, an exact site-conditional (heat-bath) sweep used for
// monotone couplings, non-intersecting sampling, and the conditional
// one-point law of the top curve.
//
// Update order follows the convention that curve i sees curve i-1 from the
// current (new) sweep and curve i+1 from the previous one.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bridge.hpp"
#include "ensemble.hpp"
#include "hamiltonian.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace linens {

struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hard constraint that curve 1 passes through [lo, hi] at grid point x.
struct PinWindow {
    double x;
    double lo;
    double hi;

    PinWindow(double x_, double center, double eps) : x(x_), lo(center - eps), hi(center + eps) {
        if (!(eps > 0.0)) throw std::domain_error("PinWindow: need eps > 0");
    }
    static PinWindow interval(double x_, double lo_, double hi_) {
        if (!(lo_ < hi_)) throw std::domain_error("PinWindow: need lo < hi");
        PinWindow p(x_, 0.5 * (lo_ + hi_), 0.5 * (hi_ - lo_));
        return p;
    }
    double center() const { return 0.5 * (lo + hi); }
    double half_width() const { return 0.5 * (hi - lo); }
};

struct ChainConfig {
    double sup_bound = kPosInf;          // M; +inf disables the bound
    std::vector<PinWindow> pins;         // constraints on curve 1 only
    std::size_t sweeps_per_sample = 1;
    double proposal_scale = kPosInf;     // block width in x units; +inf = full curve

    ChainConfig() = default;
    ChainConfig(double m, std::vector<PinWindow> p, std::size_t sps = 1, double scale = kPosInf)
        : sup_bound(m), pins(std::move(p)), sweeps_per_sample(sps), proposal_scale(scale) {
        if (!(sup_bound > 0.0)) throw std::domain_error("ChainConfig: need M > 0");
        for (const auto& pin : pins)
            if (pin.hi < -sup_bound || pin.lo > sup_bound)
                throw std::domain_error("ChainConfig: pin window outside [-M, M]");
    }
};

// Throws when the state violates the config or (in zero temperature) the
// ordering constraints.
inline void ensure_feasible(const EnsembleState& st, const Hamiltonian& h, const ChainConfig& cfg) {
    st.validate();
    if (h.zero_temperature && !st.strictly_ordered())
        throw std::domain_error("chain: zero-temperature state must be strictly ordered");
    if (std::isfinite(cfg.sup_bound)) {
        for (const auto& c : st.curves)
            for (double v : c)
                if (std::abs(v) > cfg.sup_bound)
                    throw std::domain_error("chain: state violates the sup-norm bound");
    }
    for (const auto& pin : cfg.pins) {
        const std::size_t j = grid_index_of(st.grid, pin.x);
        if (j == 0 || j + 1 == st.n())
            throw std::domain_error("chain: pin location must be an interior grid point");
        const double v = st.curves.front()[j];
        if (!(v >= pin.lo && v <= pin.hi))
            throw std::domain_error("chain: state violates a pin window");
    }
}

struct SweepStats {
    std::size_t proposals = 0;
    std::size_t accepts = 0;

    double acceptance_rate() const {
        return proposals ? static_cast<double>(accepts) / static_cast<double>(proposals) : 0.0;
    }
};

namespace chain_detail {

// Block edges for one pass; every block keeps at least one interior point,
// and no edge may sit on a pin.
inline std::vector<std::size_t> block_edges(const Grid& g, double scale, int phase,
                                            const std::vector<std::size_t>& pin_idx) {
    const std::size_t n = g.size();
    std::vector<std::size_t> edges{0};
    if (std::isfinite(scale) && scale < g.back() - g.front()) {
        double x = g.front() + (phase == 0 ? scale : 0.5 * scale);
        for (; x < g.back() - 1e-12; x += scale) {
            auto it = std::lower_bound(g.begin(), g.end(), x);
            std::size_t idx = static_cast<std::size_t>(it - g.begin());
            if (idx >= n - 1) break;
            for (std::size_t p : pin_idx)
                if (idx == p) ++idx;
            if (idx > edges.back() + 1 && idx < n - 1) edges.push_back(idx);
        }
        if (edges.size() > 1 && n - 1 <= edges.back() + 1) edges.pop_back();
    }
    edges.push_back(n - 1);
    return edges;
}

// Interaction log-weight of one curve segment against fixed neighbors over
// cells [ja, jb], including the sup-norm and ordering/pin indicators.
// `vals` holds the whole curve; interior of the block is the candidate.
inline double local_log_weight(const Grid& grid, const std::vector<double>& vals, std::size_t ja,
                               std::size_t jb, const std::vector<double>* above,
                               const std::vector<double>* below, const Hamiltonian& h,
                               double sup_bound, const std::vector<std::size_t>& pin_idx,
                               const std::vector<PinWindow>& pins) {
    for (std::size_t j = ja + 1; j < jb; ++j)
        if (std::isfinite(sup_bound) && std::abs(vals[j]) > sup_bound) return kNegInf;
    for (std::size_t m = 0; m < pin_idx.size(); ++m) {
        const std::size_t p = pin_idx[m];
        if (p > ja && p < jb && !(vals[p] >= pins[m].lo && vals[p] <= pins[m].hi)) return kNegInf;
    }
    if (h.zero_temperature) {
        for (std::size_t j = ja; j <= jb; ++j) {
            if (above && !(vals[j] < (*above)[j])) return kNegInf;
            if (below && !(vals[j] > (*below)[j])) return kNegInf;
        }
        return 0.0;
    }
    const double a = h.cbrt_t();
    const double pref = h.prefactor();
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t j = ja; j <= jb; ++j) {
        double g = 0.0;
        if (above) {
            const double arg = a * (vals[j] - (*above)[j]);
            if (arg > kHamiltonianExpCap) return kNegInf;
            g += pref * std::exp(arg);
        }
        if (below) {
            const double arg = a * ((*below)[j] - vals[j]);
            if (arg > kHamiltonianExpCap) return kNegInf;
            g += pref * std::exp(arg);
        }
        if (j > ja) total += 0.5 * (grid[j] - grid[j - 1]) * (g + prev);
        prev = g;
    }
    return -total;
}

// Sequential free-bridge marginal log-density of the anchor values inside a
// block, and the sub-bridge sampler between anchors.
inline double anchors_log_density(const Grid& grid, double rate, std::size_t ja, std::size_t jb,
                                  double va, double vb, const std::vector<std::size_t>& anchor_idx,
                                  const std::vector<double>& anchor_vals) {
    double logf = 0.0;
    double x_prev = grid[ja], v_prev = va;
    const double xb = grid[jb];
    for (std::size_t m = 0; m < anchor_idx.size(); ++m) {
        const double xp = grid[anchor_idx[m]];
        const double rem = xb - x_prev;
        const double mean = v_prev + (xp - x_prev) / rem * (vb - v_prev);
        const double var = rate * (xp - x_prev) * (xb - xp) / rem;
        const double d = anchor_vals[m] - mean;
        logf += -0.5 * d * d / var - 0.5 * std::log(6.283185307179586 * var);
        x_prev = xp;
        v_prev = anchor_vals[m];
    }
    return logf;
}

// Fill vals on (ja, jb) with a free bridge through the given anchors.
inline void fill_bridge_segment(const Grid& grid, double rate, std::vector<double>& vals,
                                std::size_t ja, std::size_t jb, Rng& rng) {
    for (std::size_t j = ja + 1; j < jb; ++j) {
        const double rem = grid[jb] - grid[j - 1];
        const double dx = grid[j] - grid[j - 1];
        const double mean = vals[j - 1] + dx / rem * (vals[jb] - vals[j - 1]);
        const double var = rate * dx * (grid[jb] - grid[j]) / rem;
        vals[j] = rng.normal(mean, std::sqrt(var));
    }
}

} // namespace chain_detail

// One full Metropolis sweep: curves in increasing index order, each curve
// updated by fresh free-bridge proposals (whole curve, or overlapping blocks
// of width cfg.proposal_scale), accepted against the neighbor-interaction
// weight. Curve 1 proposals are conditioned through the pin windows (window
// midpoint conditioning plus uniform jitter, corrected in the ratio).
inline EnsembleState gibbs_sweep(const EnsembleState& state, const Hamiltonian& h,
                                 const ChainConfig& cfg, Rng& rng, SweepStats* stats = nullptr) {
    EnsembleState next = state;
    const Grid& grid = next.grid;
    const std::size_t n = grid.size();

    std::vector<std::size_t> pin_idx;
    pin_idx.reserve(cfg.pins.size());
    for (const auto& pin : cfg.pins) pin_idx.push_back(grid_index_of(grid, pin.x));

    for (std::size_t ci = 0; ci < next.k(); ++ci) {
        const std::vector<double>* above =
            ci == 0 ? (next.upper_boundary ? &*next.upper_boundary : nullptr) : &next.curves[ci - 1];
        const std::vector<double>* below =
            ci + 1 == next.k() ? (next.lower_boundary ? &*next.lower_boundary : nullptr)
                               : &next.curves[ci + 1];
        static const std::vector<std::size_t> no_pins;
        const std::vector<std::size_t>& curve_pins = ci == 0 ? pin_idx : no_pins;

        for (int phase = 0; phase < 2; ++phase) {
            const auto edges = chain_detail::block_edges(grid, cfg.proposal_scale, phase, curve_pins);
            if (phase == 1 && edges.size() <= 2) continue; // full-curve mode: one pass suffices
            std::vector<double>& vals = next.curves[ci];
            for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
                const std::size_t ja = edges[b], jb = edges[b + 1];
                if (jb <= ja + 1) continue;

                std::vector<std::size_t> anchor_idx;
                std::vector<double> old_anchor_vals, new_anchor_vals;
                std::vector<const PinWindow*> anchor_pins;
                for (std::size_t m = 0; m < curve_pins.size(); ++m) {
                    const std::size_t p = curve_pins[m];
                    if (p > ja && p < jb) {
                        anchor_idx.push_back(p);
                        old_anchor_vals.push_back(vals[p]);
                        anchor_pins.push_back(&cfg.pins[m]);
                    }
                }
                for (const auto* pin : anchor_pins)
                    new_anchor_vals.push_back(rng.uniform(pin->lo, pin->hi));

                std::vector<double> proposal = vals;
                for (std::size_t m = 0; m < anchor_idx.size(); ++m)
                    proposal[anchor_idx[m]] = new_anchor_vals[m];
                std::size_t seg_start = ja;
                for (std::size_t m = 0; m <= anchor_idx.size(); ++m) {
                    const std::size_t seg_end = m < anchor_idx.size() ? anchor_idx[m] : jb;
                    chain_detail::fill_bridge_segment(grid, next.rate, proposal, seg_start, seg_end, rng);
                    seg_start = seg_end;
                }

                double log_ratio =
                    chain_detail::local_log_weight(grid, proposal, ja, jb, above, below, h,
                                                   cfg.sup_bound, curve_pins, cfg.pins) -
                    chain_detail::local_log_weight(grid, vals, ja, jb, above, below, h,
                                                   cfg.sup_bound, curve_pins, cfg.pins);
                if (!anchor_idx.empty()) {
                    log_ratio += chain_detail::anchors_log_density(grid, next.rate, ja, jb, vals[ja],
                                                                   vals[jb], anchor_idx, new_anchor_vals) -
                                 chain_detail::anchors_log_density(grid, next.rate, ja, jb, vals[ja],
                                                                   vals[jb], anchor_idx, old_anchor_vals);
                }

                const double u = rng.uniform01();
                if (stats) ++stats->proposals;
                if (std::log(u) < log_ratio) {
                    for (std::size_t j = ja + 1; j < jb; ++j) vals[j] = proposal[j];
                    if (stats) ++stats->accepts;
                }
            }
        }
    }
    return next;
}

// ---- Exact site-conditional (heat-bath) sweep ----

// Quantile of N(mu, sigma^2) truncated to [lo, hi]; monotone in u, mu, lo, hi.
inline double truncated_normal_quantile(double mu, double sigma, double lo, double hi, double u) {
    if (!(lo <= hi)) throw std::domain_error("truncated_normal_quantile: empty interval");
    const double a = (lo - mu) / sigma, b = (hi - mu) / sigma;
    double xi;
    if (a >= 0.0) {
        const double ta = normal_tail(a), tb = normal_tail(b);
        double q = ta - u * (ta - tb);
        if (q <= 0.0) return hi;
        if (q >= 1.0) return lo;
        xi = -normal_quantile(q);
    } else if (b <= 0.0) {
        const double pa = normal_tail(-a), pb = normal_tail(-b);
        double p = pa + u * (pb - pa);
        if (p <= 0.0) return lo;
        if (p >= 1.0) return hi;
        xi = normal_quantile(p);
    } else {
        const double pa = normal_cdf(a), pb = normal_cdf(b);
        double p = pa + u * (pb - pa);
        p = std::min(std::max(p, 1e-300), 1.0 - 1e-16);
        xi = normal_quantile(p);
    }
    const double y = mu + sigma * xi;
    return std::min(std::max(y, lo), hi);
}

namespace chain_detail {

// Exact draw from the single-site conditional at finite temperature:
// density on [lo, hi] proportional to
//   exp(-(y-mu)^2/(2 s2) - w pref [e^{a(below-y)} + e^{a(y-above)}]) ,
// sampled by numeric inversion (log-concave; Simpson + bisection).
inline double sample_site_finite_t(double mu, double s2, double w_node, const Hamiltonian& h,
                                   const double* below, const double* above, double lo, double hi,
                                   double u) {
    const double a = h.cbrt_t();
    const double pref = h.prefactor() * w_node;
    auto neg_e = [&](double y) {
        double e = (y - mu) * (y - mu) / (2.0 * s2);
        if (below) e += pref * std::exp(std::min(a * (*below - y), kHamiltonianExpCap));
        if (above) e += pref * std::exp(std::min(a * (y - *above), kHamiltonianExpCap));
        return -e;
    };
    auto d_neg_e = [&](double y) {
        double d = -(y - mu) / s2;
        if (below) d += a * pref * std::exp(std::min(a * (*below - y), kHamiltonianExpCap));
        if (above) d -= a * pref * std::exp(std::min(a * (y - *above), kHamiltonianExpCap));
        return d;
    };
    // Mode by bisection on the decreasing derivative.
    double mlo = lo, mhi = hi;
    double mode;
    if (d_neg_e(mlo) <= 0.0) mode = mlo;
    else if (d_neg_e(mhi) >= 0.0) mode = mhi;
    else {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (mlo + mhi);
            (d_neg_e(mid) > 0.0 ? mlo : mhi) = mid;
        }
        mode = 0.5 * (mlo + mhi);
    }
    const double sd = std::sqrt(s2);
    const double L = std::max(lo, mode - 12.0 * sd);
    const double R = std::min(hi, mode + 12.0 * sd);
    if (!(L < R)) return std::min(std::max(mode, lo), hi);
    const int panels = 512; // even
    const double dx = (R - L) / panels;
    const double e0 = neg_e(mode);
    // Cumulative trapezoid of exp(neg_e - e0).
    std::vector<double> cum(panels + 1, 0.0);
    double prev = std::exp(neg_e(L) - e0);
    for (int i = 1; i <= panels; ++i) {
        const double f = std::exp(neg_e(L + i * dx) - e0);
        cum[i] = cum[i - 1] + 0.5 * dx * (prev + f);
        prev = f;
    }
    const double target = u * cum[panels];
    std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
    if (idx == 0) return L;
    if (idx > static_cast<std::size_t>(panels)) return R;
    const double c0 = cum[idx - 1], c1 = cum[idx];
    const double frac = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
    return L + (static_cast<double>(idx - 1) + frac) * dx;
}

struct SiteContext {
    const Grid* grid;
    const ChainConfig* cfg;
    const Hamiltonian* h;
    std::vector<std::size_t> pin_idx;
};

// Heat-bath update of site j on curve ci of st (in place), using uniform u.
inline void site_update(EnsembleState& st, const SiteContext& ctx, std::size_t ci, std::size_t j,
                        double u) {
    const Grid& grid = *ctx.grid;
    std::vector<double>& vals = st.curves[ci];
    const double dl = grid[j] - grid[j - 1];
    const double dr = grid[j + 1] - grid[j];
    const double mu = (dr * vals[j - 1] + dl * vals[j + 1]) / (dl + dr);
    const double s2 = st.rate * dl * dr / (dl + dr);
    const double* above = ci == 0
                              ? (st.upper_boundary ? &(*st.upper_boundary)[j] : nullptr)
                              : &st.curves[ci - 1][j];
    const double* below = ci + 1 == st.k()
                              ? (st.lower_boundary ? &(*st.lower_boundary)[j] : nullptr)
                              : &st.curves[ci + 1][j];
    double lo = -ctx.cfg->sup_bound, hi = ctx.cfg->sup_bound;
    if (ci == 0) {
        for (std::size_t m = 0; m < ctx.pin_idx.size(); ++m) {
            if (ctx.pin_idx[m] == j) {
                lo = std::max(lo, ctx.cfg->pins[m].lo);
                hi = std::min(hi, ctx.cfg->pins[m].hi);
            }
        }
    }
    if (ctx.h->zero_temperature) {
        if (above) hi = std::min(hi, *above);
        if (below) lo = std::max(lo, *below);
        if (!(lo < hi)) return; // infeasible corner; leave the site unchanged
        vals[j] = truncated_normal_quantile(mu, std::sqrt(s2), lo, hi, u);
    } else {
        if (!(lo < hi)) return;
        const double w_node = trapezoid_weight(grid, j);
        vals[j] = sample_site_finite_t(mu, s2, w_node, *ctx.h, below, above, lo, hi, u);
    }
}

} // namespace chain_detail

// One heat-bath sweep: every interior site of every curve is redrawn from its
// exact full conditional (curves in increasing order, sites left to right).
// Same invariant law as gibbs_sweep; rejection-free.
inline EnsembleState gibbs_sweep_heatbath(const EnsembleState& state, const Hamiltonian& h,
                                          const ChainConfig& cfg, Rng& rng) {
    EnsembleState next = state;
    chain_detail::SiteContext ctx{&next.grid, &cfg, &h, {}};
    for (const auto& pin : cfg.pins) ctx.pin_idx.push_back(grid_index_of(next.grid, pin.x));
    for (std::size_t ci = 0; ci < next.k(); ++ci)
        for (std::size_t j = 1; j + 1 < next.n(); ++j)
            chain_detail::site_update(next, ctx, ci, j, rng.uniform01());
    return next;
}

// Shared-randomness coupled heat-bath sweep of an ordered pair. One uniform
// per site drives both chains through their own conditional quantile maps
// (monotone in the boundary data), so pointwise domination is preserved.
inline std::pair<EnsembleState, EnsembleState> monotone_gibbs_sweep_pair(
    const EnsembleState& hi, const EnsembleState& lo, const Hamiltonian& h,
    const ChainConfig& cfg_hi, const ChainConfig& cfg_lo, Rng& rng) {
    if (!dominates(hi, lo))
        throw std::domain_error("monotone_gibbs_sweep_pair: inputs are not ordered");
    if (cfg_hi.pins.size() != cfg_lo.pins.size())
        throw std::domain_error("monotone_gibbs_sweep_pair: pin lists differ in size");
    for (std::size_t m = 0; m < cfg_hi.pins.size(); ++m) {
        if (cfg_hi.pins[m].x != cfg_lo.pins[m].x ||
            cfg_hi.pins[m].lo < cfg_lo.pins[m].lo || cfg_hi.pins[m].hi < cfg_lo.pins[m].hi)
            throw std::domain_error("monotone_gibbs_sweep_pair: pin windows are not ordered");
    }
    EnsembleState a = hi, b = lo;
    chain_detail::SiteContext ctx_a{&a.grid, &cfg_hi, &h, {}};
    chain_detail::SiteContext ctx_b{&b.grid, &cfg_lo, &h, {}};
    for (const auto& pin : cfg_hi.pins) ctx_a.pin_idx.push_back(grid_index_of(a.grid, pin.x));
    for (const auto& pin : cfg_lo.pins) ctx_b.pin_idx.push_back(grid_index_of(b.grid, pin.x));
    for (std::size_t ci = 0; ci < a.k(); ++ci) {
        for (std::size_t j = 1; j + 1 < a.n(); ++j) {
            const double u = rng.uniform01();
            chain_detail::site_update(a, ctx_a, ci, j, u);
            chain_detail::site_update(b, ctx_b, ci, j, u);
        }
    }
    return {std::move(a), std::move(b)};
}

inline std::pair<EnsembleState, EnsembleState> monotone_gibbs_sweep_pair(
    const EnsembleState& hi, const EnsembleState& lo, const Hamiltonian& h,
    const ChainConfig& cfg, Rng& rng) {
    return monotone_gibbs_sweep_pair(hi, lo, h, cfg, cfg, rng);
}

// Runs sweeps and reports a feasibility error when every proposal has been
// rejected 10^4 times in a row (empty-support detection).
class ChainRunner {
  public:
    ChainRunner(EnsembleState state, Hamiltonian h, ChainConfig cfg)
        : state_(std::move(state)), h_(h), cfg_(std::move(cfg)) {
        ensure_feasible(state_, h_, cfg_);
    }

    void sweep(Rng& rng) {
        SweepStats stats;
        state_ = gibbs_sweep(state_, h_, cfg_, rng, &stats);
        if (stats.accepts == 0) consecutive_rejects_ += stats.proposals;
        else consecutive_rejects_ = 0;
        if (consecutive_rejects_ >= 10000)
            throw FeasibilityError("chain: 10^4 consecutive rejections; constraints look infeasible");
        total_.proposals += stats.proposals;
        total_.accepts += stats.accepts;
    }

    void run(std::size_t sweeps, Rng& rng) {
        for (std::size_t s = 0; s < sweeps; ++s) sweep(rng);
    }

    const EnsembleState& state() const { return state_; }
    const SweepStats& stats() const { return total_; }

  private:
    EnsembleState state_;
    Hamiltonian h_;
    ChainConfig cfg_;
    SweepStats total_;
    std::size_t consecutive_rejects_ = 0;
};

// Default burn-in: 10 * k * (grid length) sweeps.
inline std::size_t default_burn_in(std::size_t k, std::size_t grid_len) {
    return 10 * k * grid_len;
}

enum class SamplerMethod { rejection, chain };

// Exact (rejection) or asymptotically exact (chain) sample of k strictly
// ordered bridges above an optional lower boundary.
inline EnsembleState sample_nonintersecting(std::size_t k, const std::vector<double>& w,
                                            const std::vector<double>& z, const Grid& grid,
                                            const std::optional<SampledPath>& lower, Rng& rng,
                                            SamplerMethod method = SamplerMethod::rejection,
                                            double rate = 2.0, std::size_t chain_burn_in = 0) {
    check_grid(grid);
    if (w.size() != k || z.size() != k || k == 0)
        throw std::domain_error("sample_nonintersecting: need k matching values");
    if (k > 8) throw std::domain_error("sample_nonintersecting: k <= 8 supported");
    for (std::size_t i = 1; i < k; ++i)
        if (!(w[i - 1] > w[i] && z[i - 1] > z[i]))
            throw std::domain_error("sample_nonintersecting: w, z must be strictly decreasing");
    if (lower) {
        if (lower->grid != grid) throw std::domain_error("sample_nonintersecting: lower grid mismatch");
        if (!(lower->values.front() < w[k - 1] && lower->values.back() < z[k - 1]))
            throw std::domain_error("sample_nonintersecting: lower must be below w_k, z_k at endpoints");
    }

    auto make_state = [&](std::vector<std::vector<double>> curves) {
        EnsembleState st;
        st.grid = grid;
        st.curves = std::move(curves);
        st.left_values = w;
        st.right_values = z;
        st.rate = rate;
        if (lower) st.lower_boundary = lower->values;
        return st;
    };

    if (method == SamplerMethod::rejection) {
        const std::size_t max_attempts = 3000000;
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            std::vector<std::vector<double>> curves(k);
            for (std::size_t i = 0; i < k; ++i) {
                BridgeSpec spec(grid.front(), grid.back(), w[i], z[i], rate);
                curves[i] = sample_bridge(spec, grid, rng).values;
            }
            EnsembleState st = make_state(std::move(curves));
            if (st.strictly_ordered()) return st;
        }
        throw FeasibilityError(
            "sample_nonintersecting: estimated acceptance below 1e-6; use the chain method");
    }

    // Chain method: start from chords pushed apart by a bump vanishing at the
    // endpoints, then run block sweeps at zero temperature.
    const double span = grid.back() - grid.front();
    std::vector<std::vector<double>> curves(k, std::vector<double>(grid.size()));
    double gap_min = kPosInf;
    for (std::size_t i = 1; i < k; ++i)
        gap_min = std::min(gap_min, std::min(w[i - 1] - w[i], z[i - 1] - z[i]));
    if (lower)
        gap_min = std::min(gap_min, std::min(w[k - 1] - lower->values.front(),
                                             z[k - 1] - lower->values.back()));
    if (!std::isfinite(gap_min)) gap_min = 1.0;
    const double delta = gap_min / (2.0 * static_cast<double>(k + 1));
    for (std::size_t idx = 0; idx < k; ++idx) {
        const std::size_t i = k - 1 - idx; // bottom up
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double x = grid[j];
            const double chord = w[i] + (x - grid.front()) / span * (z[i] - w[i]);
            const double bump =
                delta * std::min(1.0, std::min(x - grid.front(), grid.back() - x));
            double floor_v = kNegInf;
            if (i + 1 < k) floor_v = curves[i + 1][j] + bump;
            else if (lower) floor_v = lower->values[j] + bump;
            curves[i][j] = std::max(chord, floor_v);
        }
        curves[i].front() = w[i];
        curves[i].back() = z[i];
    }
    EnsembleState st = make_state(std::move(curves));
    ChainConfig cfg(kPosInf, {}, 1, std::max(1.0, span / 16.0));
    cfg.sup_bound = kPosInf;
    ChainRunner runner(std::move(st), Hamiltonian::zero(), cfg);
    const std::size_t burn =
        chain_burn_in ? chain_burn_in : default_burn_in(k, grid.size());
    runner.run(burn, rng);
    return runner.state();
}

// Conditional one-point law of curve 1 at interior grid point x0, given the
// detrended bridges on both sides and everything else: Gaussian (mu, var)
// reweighted by the nondecreasing factor exp(logWpt(x)) from the interaction
// with the curve below.
struct ConditionalPointLaw {
    double mu;
    double var;
    std::function<double(double)> log_w_pt;
};

inline ConditionalPointLaw conditional_point_law(const EnsembleState& st, double x0,
                                                 const Hamiltonian& h) {
    st.validate();
    const std::size_t p = grid_index_of(st.grid, x0);
    if (p == 0 || p + 1 == st.n())
        throw std::domain_error("conditional_point_law: x0 must be interior");
    const double a = st.grid.front(), b = st.grid.back();
    const double va = st.curves[0].front(), vb = st.curves[0].back();
    const double mu = ((b - x0) * va + (x0 - a) * vb) / (b - a);
    const double var = st.rate * (x0 - a) * (b - x0) / (b - a);

    const bool has_below = st.k() >= 2 || st.lower_boundary.has_value();
    if (!has_below) {
        return ConditionalPointLaw{mu, var, [](double) { return 0.0; }};
    }
    std::vector<double> below = st.k() >= 2 ? st.curves[1] : *st.lower_boundary;

    // Detrended side bridges of curve 1 (fixed under the conditioning).
    SampledPath top{st.grid, st.curves[0]};
    SampledPath left = bridge_of(top, a, x0);
    SampledPath right = bridge_of(top, x0, b);
    const Grid grid = st.grid;
    const double rate = st.rate;
    const Hamiltonian ham = h;

    auto rebuild = [grid, left, right, p, a, b, x0, va, vb](double x) {
        std::vector<double> v(grid.size());
        for (std::size_t j = 0; j <= p; ++j) {
            const double u = grid[j];
            v[j] = left.values[j] + (x0 - u) / (x0 - a) * va + (u - a) / (x0 - a) * x;
        }
        for (std::size_t j = p; j < grid.size(); ++j) {
            const double u = grid[j];
            v[j] = right.values[j - p] + (b - u) / (b - x0) * x + (u - x0) / (b - x0) * vb;
        }
        return v;
    };

    auto log_w = [rebuild, below = std::move(below), grid, ham, rate](double x) -> double {
        const std::vector<double> v = rebuild(x);
        if (ham.zero_temperature) {
            for (std::size_t j = 0; j < grid.size(); ++j)
                if (!(v[j] > below[j])) return kNegInf;
            return 0.0;
        }
        const double ac = ham.cbrt_t();
        const double pref = ham.prefactor();
        double total = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double arg = ac * (below[j] - v[j]);
            if (arg > kHamiltonianExpCap) return kNegInf;
            const double term = pref * std::exp(arg);
            if (j > 0) total += 0.5 * (grid[j] - grid[j - 1]) * (term + prev);
            prev = term;
        }
        return -total;
    };

    return ConditionalPointLaw{mu, var, log_w};
}

} // namespace linens
