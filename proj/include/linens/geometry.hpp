// Tangent-method geometry: the tent function, convex hulls over the parabola
// -x^2, case classification, and the closed-form tail rate functions.
// Everything here is deterministic and pure.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace linens::geometry {

// (theta, a, b) parametrizing the two-point event at (-sqrt(theta), a theta)
// and (sqrt(theta), b theta).
struct TwoPointSpec {
    double theta;
    double a;
    double b;

    TwoPointSpec(double th, double a_, double b_) : theta(th), a(a_), b(b_) {
        if (!(theta > 0.0)) throw std::domain_error("TwoPointSpec: need theta > 0");
        if (!(a >= b && b > -1.0)) throw std::domain_error("TwoPointSpec: need a >= b > -1");
    }
};

// Number of extreme points of the hull inside [-sqrt(theta), sqrt(theta)].
enum class CaseLabel { TwoExtreme, InfinitelyMany, OneExtreme };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::TwoExtreme: return "TwoExtreme";
        case CaseLabel::InfinitelyMany: return "InfinitelyMany";
        case CaseLabel::OneExtreme: return "OneExtreme";
    }
    return "?";
}

// Tent over the parabola through (0, theta): -2 sqrt(theta) |x| + theta.
// Defined on all of R as the extended tangent pair.
inline double tri(double theta, double x) {
    if (!(theta > 0.0)) throw std::domain_error("tri: need theta > 0");
    return -2.0 * std::sqrt(theta) * std::abs(x) + theta;
}

// Abscissae where the outer tangents from the two conditioning points touch
// the parabola: x_ell = -(1+sqrt(1+a)) sqrt(theta), x_r = (1+sqrt(1+b)) sqrt(theta).
inline std::pair<double, double> tangency_points(const TwoPointSpec& s) {
    const double rt = std::sqrt(s.theta);
    return {-(1.0 + std::sqrt(1.0 + s.a)) * rt, (1.0 + std::sqrt(1.0 + s.b)) * rt};
}

// Scaled roots u of the chord-parabola equation u^2 + (b-a)/2 u + (a+b)/2 = 0
// (x = u sqrt(theta)); only meaningful when (a-b)^2 > 8(a+b).
inline std::pair<double, double> chord_parabola_roots_scaled(double a, double b) {
    const double half_p = 0.25 * (b - a);      // -p/2 with p = (b-a)/2
    const double disc = (a - b) * (a - b) / 16.0 - 0.5 * (a + b);
    const double s = std::sqrt(std::max(disc, 0.0));
    return {-half_p - s, -half_p + s};
}

// Three-way classification. Ties at the hull-has-both-points boundary go to
// TwoExtreme; the root-inside test uses relative tolerance 1e-12. The result
// depends only on (a, b).
inline CaseLabel classify(const TwoPointSpec& s) {
    const double lhs = (s.a - s.b) * (s.a - s.b);
    const double rhs = 8.0 * (s.a + s.b);
    if (lhs <= rhs) return CaseLabel::TwoExtreme;
    const auto [u1, u2] = chord_parabola_roots_scaled(s.a, s.b);
    const double tol = 1e-12 * std::max(1.0, std::max(std::abs(u1), std::abs(u2)));
    const bool inside = (u1 >= -1.0 - tol) && (u2 <= 1.0 + tol);
    return inside ? CaseLabel::InfinitelyMany : CaseLabel::OneExtreme;
}

// Leading exponent of the two-point tail: probability ~ exp(-rate).
inline double two_point_log_rate(const TwoPointSpec& s) {
    const double th32 = std::pow(s.theta, 1.5);
    const double pa = std::pow(1.0 + s.a, 1.5);
    const double pb = std::pow(1.0 + s.b, 1.5);
    switch (classify(s)) {
        case CaseLabel::TwoExtreme:
            return th32 / 24.0 *
                   (3.0 * (s.a - s.b) * (s.a - s.b) + 24.0 * (s.a + s.b) + 16.0 * (pa + pb) + 32.0);
        case CaseLabel::InfinitelyMany:
            return 4.0 / 3.0 * th32 * (pa + pb);
        case CaseLabel::OneExtreme:
            return 4.0 / 3.0 * th32 * pa;
    }
    return 0.0;
}

// Leading exponent of the one-point tail: (4/3) theta^(3/2).
inline double one_point_log_rate(double theta) {
    if (!(theta > 0.0)) throw std::domain_error("one_point_log_rate: need theta > 0");
    return 4.0 / 3.0 * std::pow(theta, 1.5);
}

// (a, b) for which the chord is tangent to the parabola: a = z^2 + 2z,
// b = z^2 - 2z, z in [0,1]. At z = 1, b hits the -1 boundary and the pair is
// flagged rather than rejected.
struct TangentPair {
    double a;
    double b;
    bool boundary;
};

inline TangentPair fkg_tangent_pair(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("fkg_tangent_pair: need z in [0,1]");
    return TangentPair{z * z + 2.0 * z, z * z - 2.0 * z, z == 1.0};
}

// One linear piece of the hull: y = slope * x + intercept on [x_lo, x_hi].
struct HullSegment {
    double slope;
    double intercept;
    double x_lo;
    double x_hi;

    double at(double x) const { return slope * x + intercept; }
};

// Piecewise description of the convex hull of -x^2 and the two conditioning
// points. Outside i_lin the hull equals -x^2.
struct Hull {
    CaseLabel label;
    std::vector<double> tangency_xs;                    // abscissae touching -x^2
    std::vector<HullSegment> segments;                  // linear pieces, left to right
    std::vector<std::pair<double, double>> i_lin;       // one or two closed intervals

    double value(double x) const {
        for (const auto& seg : segments)
            if (x >= seg.x_lo && x <= seg.x_hi) return seg.at(x);
        return -x * x;
    }
};

namespace detail {
// Tangent line to -x^2 at abscissa s, restricted to [lo, hi].
inline HullSegment tangent_segment(double s, double lo, double hi) {
    return HullSegment{-2.0 * s, s * s, lo, hi};
}
// Line through two points, restricted to [lo, hi].
inline HullSegment chord_segment(double x0, double y0, double x1, double y1, double lo, double hi) {
    const double slope = (y1 - y0) / (x1 - x0);
    return HullSegment{slope, y0 - slope * x0, lo, hi};
}
} // namespace detail

inline Hull hull(const TwoPointSpec& s) {
    const double rt = std::sqrt(s.theta);
    const auto [x_ell, x_r] = tangency_points(s);
    const double ya = s.a * s.theta, yb = s.b * s.theta;
    Hull h;
    h.label = classify(s);
    switch (h.label) {
        case CaseLabel::TwoExtreme: {
            h.tangency_xs = {x_ell, x_r};
            h.segments = {detail::tangent_segment(x_ell, x_ell, -rt),
                          detail::chord_segment(-rt, ya, rt, yb, -rt, rt),
                          detail::tangent_segment(x_r, rt, x_r)};
            h.i_lin = {{x_ell, x_r}};
            break;
        }
        case CaseLabel::OneExtreme: {
            // Only the left point is extreme; the hull is that of -x^2 and
            // (-sqrt(theta), a theta) alone.
            const double s_ar = rt * (std::sqrt(1.0 + s.a) - 1.0);
            h.tangency_xs = {x_ell, s_ar};
            h.segments = {detail::tangent_segment(x_ell, x_ell, -rt),
                          detail::tangent_segment(s_ar, -rt, s_ar)};
            h.i_lin = {{x_ell, s_ar}};
            break;
        }
        case CaseLabel::InfinitelyMany: {
            // Two linear caps separated by a parabola arc.
            const double s_ar = rt * (std::sqrt(1.0 + s.a) - 1.0);
            const double s_bl = rt * (1.0 - std::sqrt(1.0 + s.b));
            h.tangency_xs = {x_ell, s_ar, s_bl, x_r};
            h.segments = {detail::tangent_segment(x_ell, x_ell, -rt),
                          detail::tangent_segment(s_ar, -rt, s_ar),
                          detail::tangent_segment(s_bl, s_bl, rt),
                          detail::tangent_segment(x_r, rt, x_r)};
            h.i_lin = {{x_ell, s_ar}, {s_bl, x_r}};
            break;
        }
    }
    return h;
}

// C_{n+1} = 1 + C_n/4, gamma_{n+1} = 2 gamma_n + 1, theta ratio quadruples;
// started from C_0 = 5, gamma_0 = 0, ratio 1.
struct RecursionState {
    double c;
    double gamma;
    double theta_ratio;
};

inline RecursionState lower_bound_recursion(unsigned n) {
    RecursionState st{5.0, 0.0, 1.0};
    for (unsigned i = 0; i < n; ++i) {
        st.c = 1.0 + st.c / 4.0;
        st.gamma = 2.0 * st.gamma + 1.0;
        st.theta_ratio *= 4.0;
    }
    return st;
}

} // namespace linens::geometry
