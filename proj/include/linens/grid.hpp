// Grids and sampled paths: the discrete carriers of all curves.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace linens {

// Strictly increasing abscissae with both endpoints included.
using Grid = std::vector<double>;

// Uniform grid from a to b with target step; endpoints exact.
inline Grid make_grid(double a, double b, double step) {
    if (!(a < b)) throw std::domain_error("make_grid: need a < b");
    if (!(step > 0.0)) throw std::domain_error("make_grid: need step > 0");
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((b - a) / step)));
    Grid g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = a + (b - a) * (static_cast<double>(i) / static_cast<double>(n));
    g.front() = a;
    g.back() = b;
    return g;
}

// Uniform-per-segment grid through the given anchors (each anchor lands
// exactly on the grid).
inline Grid make_grid_through(const std::vector<double>& anchors, double step) {
    if (anchors.size() < 2) throw std::domain_error("make_grid_through: need >= 2 anchors");
    Grid g;
    for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
        Grid part = make_grid(anchors[s], anchors[s + 1], step);
        if (s > 0) part.erase(part.begin());
        g.insert(g.end(), part.begin(), part.end());
    }
    return g;
}

inline void check_grid(const Grid& g) {
    if (g.size() < 2) throw std::domain_error("grid: need >= 2 points");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw std::domain_error("grid: not strictly increasing");
}

// Index of x in g (exact up to a small relative tolerance); throws if absent.
inline std::size_t grid_index_of(const Grid& g, double x) {
    const double span = g.back() - g.front();
    const double tol = 1e-9 * std::max(1.0, span);
    auto it = std::lower_bound(g.begin(), g.end(), x - tol);
    if (it == g.end() || std::abs(*it - x) > tol)
        throw std::domain_error("grid_index_of: x is not a grid point");
    return static_cast<std::size_t>(it - g.begin());
}

// A curve recorded on a grid.
struct SampledPath {
    Grid grid;
    std::vector<double> values;

    SampledPath() = default;
    SampledPath(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        validate();
    }

    void validate() const {
        check_grid(grid);
        if (grid.size() != values.size())
            throw std::domain_error("SampledPath: grid/values length mismatch");
    }

    std::size_t size() const { return grid.size(); }
    double x_left() const { return grid.front(); }
    double x_right() const { return grid.back(); }
};

// Tabulate f on g.
inline SampledPath sample_function(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g[i]);
    return SampledPath{g, std::move(v)};
}

// Trapezoid rule over the whole path.
inline double trapezoid(const SampledPath& p) {
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i)
        acc += 0.5 * (p.values[i] + p.values[i - 1]) * (p.grid[i] - p.grid[i - 1]);
    return acc;
}

// Trapezoid weight of node i (half the adjacent cell widths).
inline double trapezoid_weight(const Grid& g, std::size_t i) {
    double w = 0.0;
    if (i > 0) w += 0.5 * (g[i] - g[i - 1]);
    if (i + 1 < g.size()) w += 0.5 * (g[i + 1] - g[i]);
    return w;
}

} // namespace linens
