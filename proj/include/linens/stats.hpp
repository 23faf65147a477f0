// Small statistics toolkit: mergeable moments, log-space accumulators,
// Gaussian tails, quantiles, KS distances, and simple least squares.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace linens {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Mergeable count/mean/M2; merge order must be fixed for determinism.
struct RunningMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningMoments& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double nt = na + nb;
        mean += d * nb / nt;
        m2 += o.m2 + d * d * na * nb / nt;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double sd() const { return std::sqrt(variance()); }
    double stderr_mean() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : kPosInf; }
    // stderr of the sample variance under approximate normality.
    double stderr_variance() const {
        return n > 1 ? variance() * std::sqrt(2.0 / static_cast<double>(n - 1)) : kPosInf;
    }
};

// Streaming log-sum-exp over log-valued terms; mergeable, overflow-safe.
struct LogSumExp {
    double max_log = kNegInf;
    double sum_scaled = 0.0; // sum of exp(log_w - max_log)
    std::size_t n = 0;

    void add(double log_w) {
        ++n;
        if (log_w == kNegInf) return;
        if (log_w > max_log) {
            if (max_log != kNegInf) sum_scaled *= std::exp(max_log - log_w);
            max_log = log_w;
            sum_scaled += 1.0;
        } else {
            sum_scaled += std::exp(log_w - max_log);
        }
    }

    void merge(const LogSumExp& o) {
        if (o.n == 0) return;
        n += o.n;
        if (o.max_log == kNegInf) return;
        if (max_log == kNegInf) { max_log = o.max_log; sum_scaled = o.sum_scaled; return; }
        if (o.max_log > max_log) {
            sum_scaled = sum_scaled * std::exp(max_log - o.max_log) + o.sum_scaled;
            max_log = o.max_log;
        } else {
            sum_scaled += o.sum_scaled * std::exp(o.max_log - max_log);
        }
    }

    double log_sum() const { return sum_scaled > 0.0 ? max_log + std::log(sum_scaled) : kNegInf; }
    double log_mean() const {
        return n > 0 ? log_sum() - std::log(static_cast<double>(n)) : kNegInf;
    }
};

// Weighted-mean estimate in log space: log mean, delta-method stderr of the
// log, and effective sample size (sum w)^2 / sum w^2.
struct LogWeightedMean {
    LogSumExp sum_w;
    LogSumExp sum_w2;

    void add(double log_w) {
        sum_w.add(log_w);
        sum_w2.add(log_w == kNegInf ? kNegInf : 2.0 * log_w);
    }
    void merge(const LogWeightedMean& o) { sum_w.merge(o.sum_w); sum_w2.merge(o.sum_w2); }

    std::size_t n() const { return sum_w.n; }
    double log_mean() const { return sum_w.log_mean(); }
    // se(log m) ~ sd(w) / (sqrt(n) m) = sqrt(n/(n-1) (S2/S1^2 - 1/n)),
    // computed stably from log sums S1 = sum w, S2 = sum w^2.
    double stderr_log() const {
        const std::size_t m = sum_w.n;
        if (m < 2 || sum_w.log_sum() == kNegInf) return kPosInf;
        const double n = static_cast<double>(m);
        const double ratio = std::exp(sum_w2.log_sum() - 2.0 * sum_w.log_sum());
        const double v = n / (n - 1.0) * (ratio - 1.0 / n);
        return v > 0.0 ? std::sqrt(v) : 0.0;
    }
    double ess() const {
        if (sum_w.n == 0 || sum_w.log_sum() == kNegInf) return 0.0;
        return std::exp(2.0 * sum_w.log_sum() - sum_w2.log_sum());
    }
};

// ---- Gaussian distribution helpers ----

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Upper tail P(N(0,1) >= x), accurate far into the tail.
inline double normal_tail(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244); }

// log P(N(0,1) >= x); asymptotic series once erfc underflows.
inline double log_normal_tail(double x) {
    if (x < 20.0) {
        const double t = normal_tail(x);
        if (t > 0.0) return std::log(t);
    }
    const double x2 = x * x;
    // log[ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6) ]
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - std::log(x) - 0.91893853320467274178 + std::log(series);
}

// Inverse standard normal CDF (Acklam's rational approximation + one Halley
// polish step); monotone in p.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    // One Halley step on Phi(x) - p.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(6.283185307179586) * std::exp(0.5 * x * x);
    x = x - u / (1 + 0.5 * x * u);
    return x;
}

// ---- Binomial helpers ----

inline double binomial_stderr(double p_hat, std::size_t n) {
    if (n == 0) return kPosInf;
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(n));
}

// One-sided 95% upper bound for p when zero successes were observed.
inline double rule_of_three_upper(std::size_t n) {
    return n > 0 ? 3.0 / static_cast<double>(n) : 1.0;
}

// ---- Order statistics ----

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::domain_error("quantile of empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, q);
}

// One-sample KS statistic against a cdf.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Two-sample KS statistic.
inline double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Split-Rhat over per-chain scalar samples (each chain split in half).
inline double split_rhat(const std::vector<std::vector<double>>& chains) {
    std::vector<RunningMoments> halves;
    for (const auto& c : chains) {
        if (c.size() < 4) continue;
        RunningMoments a, b;
        const std::size_t h = c.size() / 2;
        for (std::size_t i = 0; i < h; ++i) a.add(c[i]);
        for (std::size_t i = h; i < 2 * h; ++i) b.add(c[i]);
        halves.push_back(a);
        halves.push_back(b);
    }
    const std::size_t m = halves.size();
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(halves.front().n);
    RunningMoments grand;
    double w = 0.0;
    for (const auto& h : halves) {
        grand.add(h.mean);
        w += h.variance();
    }
    w /= static_cast<double>(m);
    const double b = n * grand.variance();
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

// Lag-k autocorrelation-based effective sample size of a scalar series.
inline double effective_sample_size(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 8) return static_cast<double>(n);
    RunningMoments m;
    for (double x : xs) m.add(x);
    const double var = m.variance();
    if (var <= 0.0) return static_cast<double>(n);
    double sum_rho = 0.0;
    for (std::size_t lag = 1; lag < n / 2; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            acc += (xs[i] - m.mean) * (xs[i + lag] - m.mean);
        const double rho = acc / (static_cast<double>(n - lag) * var);
        if (rho < 0.05) break;
        sum_rho += rho;
    }
    return static_cast<double>(n) / (1.0 + 2.0 * sum_rho);
}

// Least-squares fit y ~ a + b x; returns {a, b}.
inline std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::domain_error("fit_line: bad input");
    RunningMoments mx, my;
    for (double v : x) mx.add(v);
    for (double v : y) my.add(v);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx.mean) * (y[i] - my.mean);
        sxx += (x[i] - mx.mean) * (x[i] - mx.mean);
    }
    const double b = sxy / sxx;
    return {my.mean - b * mx.mean, b};
}

} // namespace linens
