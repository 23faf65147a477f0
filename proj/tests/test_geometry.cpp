#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linens/geometry.hpp"
#include "linens/rng.hpp"

using namespace linens;
using namespace linens::geometry;

TEST_CASE("tri tent function") {
    CHECK(tri(4.0, 0.0) == 4.0);
    CHECK(tri(4.0, 2.0) == -4.0);  // tangency with -x^2 at x = sqrt(theta)
    CHECK(tri(4.0, 1.0) == 0.0);   // zero at sqrt(theta)/2
    CHECK(tri(4.0, -1.0) == 0.0);
}

TEST_CASE("tangency points") {
    TwoPointSpec s(1.0, 0.0, 0.0);
    auto [xl, xr] = tangency_points(s);
    CHECK(xl == Catch::Approx(-2.0));
    CHECK(xr == Catch::Approx(2.0));

    TwoPointSpec s2(1.0, 3.0, 0.0);
    CHECK(tangency_points(s2).first == Catch::Approx(-3.0));

    // Defining property: the tangent at x_ell with slope -2 x_ell passes
    // through (-sqrt(theta), a theta).
    Rng rng(RngHandle{404, 0});
    for (int i = 0; i < 100; ++i) {
        const double theta = 0.25 + 4.0 * rng.uniform01();
        const double b = -0.99 + 3.0 * rng.uniform01();
        const double a = b + 3.0 * rng.uniform01();
        TwoPointSpec sp(theta, a, b);
        auto [xe, xrr] = tangency_points(sp);
        const double at_left = -xe * xe - 2.0 * xe * (-std::sqrt(theta) - xe);
        CHECK(at_left == Catch::Approx(a * theta).margin(1e-10));
        const double at_right = -xrr * xrr - 2.0 * xrr * (std::sqrt(theta) - xrr);
        CHECK(at_right == Catch::Approx(b * theta).margin(1e-10));
    }
}

TEST_CASE("three-way classification") {
    CHECK(classify(TwoPointSpec(1.0, 1.0, 1.0)) == CaseLabel::TwoExtreme);
    CHECK(classify(TwoPointSpec(1.0, 9.0, 0.0)) == CaseLabel::OneExtreme);
    CHECK(classify(TwoPointSpec(1.0, 0.5, -0.9)) == CaseLabel::InfinitelyMany);

    // Chord-parabola roots for a = 9, b = 0 are 1.5 and 3 (both outside).
    auto [u1, u2] = chord_parabola_roots_scaled(9.0, 0.0);
    CHECK(u1 == Catch::Approx(1.5));
    CHECK(u2 == Catch::Approx(3.0));

    auto [v1, v2] = chord_parabola_roots_scaled(0.5, -0.9);
    CHECK(v1 == Catch::Approx(-0.2179).margin(1e-3));
    CHECK(v2 == Catch::Approx(0.9179).margin(1e-3));
}

TEST_CASE("classification is theta-invariant") {
    Rng rng(RngHandle{404, 1});
    for (int i = 0; i < 1000; ++i) {
        const double b = -0.99 + 4.0 * rng.uniform01();
        const double a = b + 5.0 * rng.uniform01();
        const double t1 = 0.1 + 10.0 * rng.uniform01();
        const double t2 = 0.1 + 10.0 * rng.uniform01();
        CHECK(classify(TwoPointSpec(t1, a, b)) == classify(TwoPointSpec(t2, a, b)));
    }
}

TEST_CASE("two-point rate function") {
    // a = b = 0: the TwoExtreme formula gives 8/3, and the product formula
    // agrees at this boundary point.
    CHECK(two_point_log_rate(TwoPointSpec(1.0, 0.0, 0.0)) == Catch::Approx(8.0 / 3.0));
    CHECK(4.0 / 3.0 * 2.0 == Catch::Approx(8.0 / 3.0));

    // Tangent pair z = 0.5: bracket equals 96 z^2 + 32 = 56.
    auto tp = fkg_tangent_pair(0.5);
    CHECK(tp.a == Catch::Approx(1.25));
    CHECK(tp.b == Catch::Approx(-0.75));
    const double rate = two_point_log_rate(TwoPointSpec(1.0, tp.a, tp.b));
    CHECK(rate == Catch::Approx(56.0 / 24.0).epsilon(1e-12));
    // Bracket check, written out: rate = theta^(3/2)/24 * bracket.
    CHECK(rate * 24.0 == Catch::Approx(3.0 * 4.0 + 24.0 * 0.5 + 16.0 * (std::pow(2.25, 1.5) + std::pow(0.25, 1.5)) + 32.0));
    CHECK(rate * 24.0 == Catch::Approx(96.0 * 0.25 + 32.0).margin(1e-10));

    CHECK(two_point_log_rate(TwoPointSpec(1.0, 9.0, 0.0)) ==
          Catch::Approx(4.0 / 3.0 * std::pow(10.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("one-point rate and the collapse identity") {
    CHECK(one_point_log_rate(1.0) == Catch::Approx(4.0 / 3.0));
    CHECK(one_point_log_rate(4.0) == Catch::Approx(32.0 / 3.0));

    // InfinitelyMany rate with the b term dropped equals the one-point rate
    // after the (1+a) theta rescaling.
    const double theta = 2.0, a = 3.0;
    const double single = 4.0 / 3.0 * std::pow(theta, 1.5) * std::pow(1.0 + a, 1.5);
    CHECK(single == Catch::Approx(one_point_log_rate((1.0 + a) * theta)).epsilon(1e-12));
}

TEST_CASE("tangent-pair locus") {
    auto z0 = fkg_tangent_pair(0.0);
    CHECK(z0.a == 0.0);
    CHECK(z0.b == 0.0);
    CHECK_FALSE(z0.boundary);

    auto z1 = fkg_tangent_pair(1.0);
    CHECK(z1.b == Catch::Approx(-1.0));
    CHECK(z1.boundary);

    for (int i = 0; i <= 100; ++i) {
        const double z = static_cast<double>(i) / 100.0;
        auto p = fkg_tangent_pair(z);
        CHECK(std::abs((p.a - p.b) * (p.a - p.b) - 8.0 * (p.a + p.b)) < 1e-12);
    }
}

TEST_CASE("case-1 and case-2 formulas agree exactly on the tangent locus") {
    for (double z : {0.0, 0.25, 0.5, 0.75}) {
        auto p = fkg_tangent_pair(z);
        for (double theta : {1.0, 2.5, 9.0}) {
            const double th32 = std::pow(theta, 1.5);
            const double case1 =
                th32 / 24.0 * (3.0 * (p.a - p.b) * (p.a - p.b) + 24.0 * (p.a + p.b) +
                               16.0 * (std::pow(1.0 + p.a, 1.5) + std::pow(1.0 + p.b, 1.5)) + 32.0);
            const double case2 =
                4.0 / 3.0 * th32 * (std::pow(1.0 + p.a, 1.5) + std::pow(1.0 + p.b, 1.5));
            CHECK(std::abs(case1 - case2) < 1e-12 * std::max(1.0, std::abs(case1)));
        }
    }
}

TEST_CASE("rate symmetry in a and b") {
    for (double v : {0.3, 1.0, 2.0}) {
        TwoPointSpec s(2.0, v, v);
        const double r1 = two_point_log_rate(s);
        // With a = b the formula is symmetric under exchange by inspection;
        // recompute with the roles swapped explicitly.
        const double th32 = std::pow(2.0, 1.5);
        double r2;
        if (classify(s) == CaseLabel::TwoExtreme)
            r2 = th32 / 24.0 * (3.0 * 0.0 + 24.0 * (v + v) + 16.0 * 2.0 * std::pow(1.0 + v, 1.5) + 32.0);
        else
            r2 = 4.0 / 3.0 * th32 * 2.0 * std::pow(1.0 + v, 1.5);
        CHECK(r1 == Catch::Approx(r2).epsilon(1e-14));
    }
}

TEST_CASE("hull construction") {
    // a = b = 0, theta = 1: kinks at (+-1, 0), tangencies at -2 and 2.
    Hull h = hull(TwoPointSpec(1.0, 0.0, 0.0));
    CHECK(h.label == CaseLabel::TwoExtreme);
    REQUIRE(h.i_lin.size() == 1);
    CHECK(h.i_lin[0].first == Catch::Approx(-2.0));
    CHECK(h.i_lin[0].second == Catch::Approx(2.0));
    CHECK(h.value(-1.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(h.value(1.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(h.value(-3.0) == Catch::Approx(-9.0));

    // TwoExtreme: hull passes through the conditioning points.
    Hull h2 = hull(TwoPointSpec(4.0, 1.0, 0.5));
    CHECK(h2.value(-2.0) == Catch::Approx(4.0).margin(1e-10));
    CHECK(h2.value(2.0) == Catch::Approx(2.0).margin(1e-10));

    // InfinitelyMany: two disjoint pieces.
    Hull h3 = hull(TwoPointSpec(4.0, 0.5, -0.9));
    CHECK(h3.label == CaseLabel::InfinitelyMany);
    REQUIRE(h3.i_lin.size() == 2);
    CHECK(h3.i_lin[0].second < h3.i_lin[1].first);

    // OneExtreme: single interval, single kink at the left point.
    Hull h4 = hull(TwoPointSpec(1.0, 9.0, 0.0));
    CHECK(h4.label == CaseLabel::OneExtreme);
    REQUIRE(h4.i_lin.size() == 1);
    CHECK(h4.value(-1.0) == Catch::Approx(9.0).margin(1e-10));
    // The right conditioning point lies strictly below this hull.
    CHECK(h4.value(1.0) > 0.0);
}

TEST_CASE("hull majorizes the parabola") {
    Rng rng(RngHandle{404, 2});
    for (int i = 0; i < 100; ++i) {
        const double theta = 0.25 + 4.0 * rng.uniform01();
        const double b = -0.95 + 3.0 * rng.uniform01();
        const double a = b + 3.0 * rng.uniform01();
        Hull h = hull(TwoPointSpec(theta, a, b));
        const auto [xl, xr] = tangency_points(TwoPointSpec(theta, a, b));
        for (int j = 0; j < 1000; ++j) {
            const double x = xl - 1.0 + (xr - xl + 2.0) * rng.uniform01();
            CHECK(h.value(x) >= -x * x - 1e-9);
        }
        // Hull touches or exceeds both conditioning points.
        CHECK(h.value(-std::sqrt(theta)) >= a * theta - 1e-9);
        CHECK(h.value(std::sqrt(theta)) >= b * theta - 1e-9);
    }
}

TEST_CASE("tri is the hull of the single point (0, theta)") {
    // Degenerate one-point construction: tangents from (0, theta) touch at
    // +-sqrt(theta); compare against tri on the whole tent interval.
    const double theta = 2.3;
    const double rt = std::sqrt(theta);
    for (int j = 0; j <= 100; ++j) {
        const double x = -rt + 2.0 * rt * static_cast<double>(j) / 100.0;
        // Tangent at -sqrt(theta) (left half) or sqrt(theta) (right half).
        const double s = x <= 0.0 ? -rt : rt;
        const double tangent = -s * s - 2.0 * s * (x - s);
        CHECK(tangent == Catch::Approx(tri(theta, x)).margin(1e-12));
    }
}

TEST_CASE("lower-bound recursion closed forms") {
    auto s0 = lower_bound_recursion(0);
    CHECK(s0.c == 5.0);
    CHECK(s0.gamma == 0.0);
    CHECK(s0.theta_ratio == 1.0);

    auto s1 = lower_bound_recursion(1);
    CHECK(s1.c == Catch::Approx(2.25));
    CHECK(s1.gamma == 1.0);

    for (unsigned n = 0; n <= 20; ++n) {
        auto s = lower_bound_recursion(n);
        CHECK(std::abs(s.c - 4.0 / 3.0 * (1.0 + 11.0 * std::pow(4.0, -(static_cast<double>(n) + 1.0)))) < 1e-9);
        CHECK(s.gamma == Catch::Approx(std::pow(2.0, n) - 1.0));
        CHECK(s.theta_ratio == Catch::Approx(std::pow(4.0, n)));
    }
    CHECK(std::abs(lower_bound_recursion(20).c - 4.0 / 3.0) < 1e-9);
}
