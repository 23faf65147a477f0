#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linens/bridge.hpp"
#include "oracles.hpp"

using namespace linens;

TEST_CASE("bridge_mean interpolates the endpoints") {
    BridgeSpec flat(-2.0, 2.0, -4.0, -4.0, 2.0);
    CHECK(bridge_mean(flat, 0.0) == -4.0);

    BridgeSpec slope(0.0, 1.0, 0.0, 1.0, 1.0);
    CHECK(bridge_mean(slope, 0.5) == 0.5);

    const double theta = 2.7;
    BridgeSpec sym(-std::sqrt(theta), std::sqrt(theta), -theta, -theta, 2.0);
    CHECK(bridge_mean(sym, -std::sqrt(theta)) == -theta);
    CHECK(bridge_mean(sym, std::sqrt(theta)) == -theta);

    CHECK_THROWS_AS(bridge_mean(slope, 1.5), std::domain_error);
}

TEST_CASE("bridge_variance matches the closed form") {
    BridgeSpec s(-2.0, 2.0, -4.0, -4.0, 2.0);
    CHECK(bridge_variance(s, 0.0) == Catch::Approx(2.0)); // theta^(1/2) with theta = 4

    BridgeSpec unit(0.0, 1.0, 0.0, 0.0, 1.0);
    CHECK(bridge_variance(unit, 0.5) == Catch::Approx(0.25)); // |I|/4 at rate 1

    CHECK(bridge_variance(s, -2.0) == 0.0);
    CHECK_THROWS_AS(bridge_variance(s, 3.0), std::domain_error);
}

TEST_CASE("sample_bridge has the exact marginal law") {
    BridgeSpec s(0.0, 2.0, 1.0, -0.5, 2.0);
    const Grid grid = make_grid(0.0, 2.0, 0.25);
    const std::size_t mid = grid.size() / 2;

    Rng rng(RngHandle{12345, 1});
    RunningMoments mom;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        SampledPath p = sample_bridge(s, grid, rng);
        mom.add(p.values[mid]);
    }
    const double want_mean = bridge_mean(s, grid[mid]);
    const double want_var = bridge_variance(s, grid[mid]);
    CHECK(std::abs(mom.mean - want_mean) <= 4.0 * mom.stderr_mean());
    CHECK(std::abs(mom.variance() - want_var) <= 4.0 * mom.stderr_variance());
}

TEST_CASE("sample_bridge on a two-point grid returns the endpoints") {
    BridgeSpec s(0.0, 1.0, 3.0, -7.0, 2.0);
    Rng rng(RngHandle{7, 0});
    SampledPath p = sample_bridge(s, Grid{0.0, 1.0}, rng);
    CHECK(p.values == std::vector<double>{3.0, -7.0});
}

TEST_CASE("time reversal leaves the bridge law unchanged") {
    BridgeSpec fwd(0.0, 1.0, 2.0, -1.0, 1.5);
    BridgeSpec rev = fwd.reversed();
    const Grid gf = make_grid(0.0, 1.0, 0.05);
    const Grid gr = make_grid(-1.0, 0.0, 0.05);
    const double x0 = 0.3;
    const std::size_t i_f = grid_index_of(gf, x0);
    const std::size_t i_r = grid_index_of(gr, -x0);

    const std::size_t n = 4000;
    std::vector<double> a(n), b(n);
    Rng r1(RngHandle{99, 1}), r2(RngHandle{99, 2});
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = sample_bridge(fwd, gf, r1).values[i_f];
        b[i] = sample_bridge(rev, gr, r2).values[i_r];
    }
    const double d = ks_statistic_two_sample(a, b);
    // alpha ~ 0.001 two-sample threshold: 1.95 sqrt(2/n)
    CHECK(d < 1.95 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("bridge_of detrends exactly") {
    const Grid g = make_grid(0.0, 2.0, 0.25);
    SampledPath linear = sample_function(g, [](double x) { return 3.0 * x - 1.0; });
    SampledPath d = bridge_of(linear, 0.0, 2.0);
    for (double v : d.values) CHECK(v == Catch::Approx(0.0).margin(1e-14));

    BridgeSpec s(0.0, 2.0, 0.7, 0.7, 2.0);
    Rng rng(RngHandle{4, 4});
    SampledPath p = sample_bridge(s, g, rng);
    SampledPath db = bridge_of(p, 0.0, 2.0);
    for (std::size_t j = 0; j < p.size(); ++j)
        CHECK(db.values[j] == Catch::Approx(p.values[j] - 0.7).margin(1e-12));

    // Reconstruction: detrended + affine part = original to 1e-12.
    SampledPath sub = bridge_of(p, 0.5, 1.5);
    SampledPath back = reconstruct_from_bridge(sub, p.values[grid_index_of(g, 0.5)],
                                               p.values[grid_index_of(g, 1.5)]);
    for (std::size_t j = 0; j < sub.size(); ++j)
        CHECK(back.values[j] == Catch::Approx(p.values[grid_index_of(g, 0.5) + j]).margin(1e-12));

    CHECK_THROWS_AS(bridge_of(p, 0.51, 1.5), std::domain_error);
}

TEST_CASE("exact sup law of the zero bridge") {
    CHECK(sup_tail_exact(0.0) == 1.0);
    CHECK(sup_tail_exact(std::sqrt(2.0 * std::log(2.0))) == Catch::Approx(0.5).epsilon(1e-12));

    // Empirical with exact per-cell maxima: rate-1 bridge on [0,1], sigma_I = 1/2.
    BridgeSpec s(0.0, 1.0, 0.0, 0.0, 1.0);
    const Grid g = make_grid(0.0, 1.0, 0.01);
    const double sigma_i = 0.5;
    const std::size_t n = 100000;
    Rng rng(RngHandle{2024, 3});
    std::vector<double> sups(n);
    for (std::size_t i = 0; i < n; ++i) {
        SampledPath p = sample_bridge(s, g, rng);
        sups[i] = path_sup_exact(p, s.rate, rng);
    }
    for (double m : {0.5, 1.0, 2.0}) {
        std::size_t hits = 0;
        for (double v : sups)
            if (v >= m * sigma_i) ++hits;
        const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
        const double want = sup_tail_exact(m);
        CHECK(std::abs(p_hat - want) <= 4.0 * binomial_stderr(want, n));
    }
}

TEST_CASE("restricted sup tail bound holds on the left quarter") {
    BridgeSpec s(0.0, 1.0, 0.0, 0.0, 1.0);
    const Grid g = make_grid(0.0, 1.0, 0.01);
    const double sigma_j = std::sqrt(bridge_variance(s, 0.25)); // max over [0, 1/4]
    const std::size_t n = 100000;
    Rng rng(RngHandle{2024, 4});
    std::vector<double> sups(n);
    for (std::size_t i = 0; i < n; ++i) {
        SampledPath p = sample_bridge(s, g, rng);
        sups[i] = path_sup_exact_on(p, 0.0, 0.25, s.rate, rng);
    }
    for (double m : {1.0, 2.0, 3.0}) {
        std::size_t hits = 0;
        for (double v : sups)
            if (v >= m * sigma_j) ++hits;
        const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
        const double bound = 3.0 * std::exp(-m * m / 8.0);
        CHECK(p_hat <= bound + 3.0 * binomial_stderr(p_hat, n));
    }
}

TEST_CASE("gaussian tail sandwich") {
    const auto s1 = gaussian_tail_sandwich(2.0, 1.0);
    CHECK(s1.lower == Catch::Approx(0.0067493).epsilon(1e-4));
    CHECK(s1.upper == Catch::Approx(0.1353353).epsilon(1e-6));
    const double truth = oracles::normal_tail(2.0);
    CHECK(truth == Catch::Approx(0.0227501).epsilon(1e-4));
    CHECK(s1.lower <= truth);
    CHECK(truth <= s1.upper);

    const auto s2 = gaussian_tail_sandwich(4.0, 2.0);
    CHECK(s2.lower == Catch::Approx(s1.lower).epsilon(1e-14));
    CHECK(s2.upper == Catch::Approx(s1.upper).epsilon(1e-14));

    CHECK_THROWS_AS(gaussian_tail_sandwich(1.0, 1.0), std::domain_error);
}

TEST_CASE("variance of the integrated zero bridge") {
    CHECK(bridge_integral_variance(1.0) == Catch::Approx(4.0 / 3.0));
    CHECK(bridge_integral_variance(2.0) == Catch::Approx(32.0 / 3.0));

    const double z = 1.0;
    BridgeSpec s(-z, z, 0.0, 0.0, 2.0);
    const Grid g = make_grid(-z, z, 0.01);
    Rng rng(RngHandle{5150, 0});
    RunningMoments mom;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) mom.add(trapezoid(sample_bridge(s, g, rng)));
    CHECK(std::abs(mom.variance() - 4.0 / 3.0) <= 4.0 * mom.stderr_variance());
}

TEST_CASE("shifted sampling reweights without bias") {
    // P(B(1/2) > 0.8) for the rate-1 zero bridge on [0,1]: exact Gaussian tail.
    BridgeSpec s(0.0, 1.0, 0.0, 0.0, 1.0);
    const Grid g = make_grid(0.0, 1.0, 0.05);
    const std::size_t mid = grid_index_of(g, 0.5);
    const double truth = oracles::normal_tail(0.8 / 0.5);

    std::vector<double> shift(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) shift[j] = 1.6 * std::min(g[j], 1.0 - g[j]);

    Rng rng(RngHandle{11, 11});
    LogWeightedMean acc;
    const std::size_t n = 200000;
    for (std::size_t i = 0; i < n; ++i) {
        const ShiftedDraw d = sample_bridge_shifted(s, g, shift, rng);
        acc.add(d.path.values[mid] > 0.8 ? d.log_lr : kNegInf);
    }
    const double est = std::exp(acc.log_mean());
    CHECK(std::abs(est - truth) <= 4.0 * est * acc.stderr_log());

    // And the likelihood ratio itself averages to one.
    Rng rng2(RngHandle{11, 12});
    LogWeightedMean one;
    for (std::size_t i = 0; i < 200000; ++i)
        one.add(sample_bridge_shifted(s, g, shift, rng2).log_lr);
    CHECK(std::abs(one.log_mean()) <= 4.0 * one.stderr_log());
}

TEST_CASE("line avoidance tail estimates") {
    // Large K: the event is unobservable; reported as zero successes with a
    // rule-of-three upper CI.
    Rng rng(RngHandle{31, 0});
    TailEstimate big = line_avoidance_tail(8.0, 4.0, 1.0, 100000, rng, 0.05);
    CHECK(big.successes == 0);
    CHECK(big.degenerate());
    CHECK(big.log_p_upper_ci == Catch::Approx(std::log(3.0 / 100000.0)));

    // Exact level-crossing law from the reflection principle:
    // P(inf < -eta K) = exp(-eta K^2 (1 + eta/r)).
    Rng rng2(RngHandle{31, 1});
    TailEstimate mid = line_avoidance_tail(2.0, 4.0, 1.0, 100000, rng2, 0.05);
    const double want = std::exp(-1.0 * 4.0 * (1.0 + 1.0 / 4.0));
    const double p_hat = std::exp(mid.log_p);
    CHECK(std::abs(p_hat - want) <= 4.0 * binomial_stderr(want, mid.n));

    // Nondegenerate at the smallest admissible K.
    Rng rng3(RngHandle{31, 2});
    TailEstimate low = line_avoidance_tail(0.5, 4.0, 1.0, 20000, rng3, 0.05);
    CHECK(low.successes > 0);
    CHECK(low.log_p < 0.0);

    // r-independence at K = 2: log estimates differ by a bounded amount.
    Rng rng4(RngHandle{31, 3});
    TailEstimate wide = line_avoidance_tail(2.0, 64.0, 1.0, 100000, rng4, 0.05);
    CHECK(std::abs(wide.log_p - mid.log_p) < 1.5);

    CHECK_THROWS_AS(line_avoidance_tail(0.4, 4.0, 1.0, 10, rng, 0.05), std::domain_error);
}

TEST_CASE("monotonicity of K for the line avoidance tail") {
    Rng rng(RngHandle{32, 0});
    double prev = 0.0;
    bool first = true;
    for (double k : {1.0, 1.5, 2.0, 2.5}) {
        TailEstimate e = line_avoidance_tail(k, 4.0, 1.0, 40000, rng, 0.05);
        if (!first) CHECK(e.log_p < prev);
        prev = e.log_p;
        first = false;
    }
}

TEST_CASE("identical rng handles give bit-identical paths") {
    BridgeSpec s(0.0, 1.0, 0.5, -0.5, 2.0);
    const Grid g = make_grid(0.0, 1.0, 0.01);
    Rng a(RngHandle{77, 3}), b(RngHandle{77, 3});
    SampledPath pa = sample_bridge(s, g, a), pb = sample_bridge(s, g, b);
    CHECK(pa.values == pb.values);
    Rng c(RngHandle{77, 4});
    SampledPath pc = sample_bridge(s, g, c);
    CHECK(pa.values != pc.values);
}
