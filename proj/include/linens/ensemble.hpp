// Ordered curve ensembles on a shared grid, with optional boundary curves.
#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace linens {

// k curves on one grid, ordered top (index 0) to bottom, with entrance/exit
// values and optional lower/upper boundary curves on the same grid.
struct EnsembleState {
    Grid grid;
    std::vector<std::vector<double>> curves;   // k x n, top to bottom
    std::vector<double> left_values;           // w, per curve
    std::vector<double> right_values;          // z, per curve
    std::optional<std::vector<double>> lower_boundary;
    std::optional<std::vector<double>> upper_boundary;
    double rate = 2.0;

    std::size_t k() const { return curves.size(); }
    std::size_t n() const { return grid.size(); }

    void validate() const {
        check_grid(grid);
        if (curves.empty()) throw std::domain_error("EnsembleState: no curves");
        if (left_values.size() != k() || right_values.size() != k())
            throw std::domain_error("EnsembleState: boundary vector size mismatch");
        for (std::size_t i = 0; i < k(); ++i) {
            if (curves[i].size() != n())
                throw std::domain_error("EnsembleState: curve/grid length mismatch");
            if (curves[i].front() != left_values[i] || curves[i].back() != right_values[i])
                throw std::domain_error("EnsembleState: curve endpoints disagree with w/z");
        }
        if (lower_boundary && lower_boundary->size() != n())
            throw std::domain_error("EnsembleState: lower boundary length mismatch");
        if (upper_boundary && upper_boundary->size() != n())
            throw std::domain_error("EnsembleState: upper boundary length mismatch");
        if (!(rate > 0.0)) throw std::domain_error("EnsembleState: need rate > 0");
    }

    // Strict ordering upper > c_1 > ... > c_k > lower at every grid point.
    bool strictly_ordered() const {
        for (std::size_t j = 0; j < n(); ++j) {
            if (upper_boundary && !((*upper_boundary)[j] > curves.front()[j])) return false;
            for (std::size_t i = 1; i < k(); ++i)
                if (!(curves[i - 1][j] > curves[i][j])) return false;
            if (lower_boundary && !(curves.back()[j] > (*lower_boundary)[j])) return false;
        }
        return true;
    }

    SampledPath curve(std::size_t i) const { return SampledPath{grid, curves.at(i)}; }
};

// Snapshot rows: curve_index, x, value.
inline void write_ensemble_csv(std::ostream& os, const EnsembleState& st) {
    os << "curve_index,x,value\n";
    char buf[64];
    for (std::size_t i = 0; i < st.k(); ++i) {
        for (std::size_t j = 0; j < st.n(); ++j) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g", i + 1, st.grid[j], st.curves[i][j]);
            os << buf << '\n';
        }
    }
}

// Dominance of boundary data and curves, used as the coupling precondition.
inline bool dominates(const EnsembleState& hi, const EnsembleState& lo) {
    if (hi.k() != lo.k() || hi.n() != lo.n() || hi.grid != lo.grid) return false;
    for (std::size_t i = 0; i < hi.k(); ++i)
        for (std::size_t j = 0; j < hi.n(); ++j)
            if (!(hi.curves[i][j] >= lo.curves[i][j])) return false;
    // Lower boundaries: need lower_hi >= lower_lo (absent means -inf).
    if (lo.lower_boundary) {
        if (!hi.lower_boundary) return false;
        for (std::size_t j = 0; j < hi.n(); ++j)
            if (!((*hi.lower_boundary)[j] >= (*lo.lower_boundary)[j])) return false;
    }
    // Upper boundaries: need upper_hi >= upper_lo (absent means +inf).
    if (hi.upper_boundary) {
        if (!lo.upper_boundary) return false;
        for (std::size_t j = 0; j < hi.n(); ++j)
            if (!((*hi.upper_boundary)[j] >= (*lo.upper_boundary)[j])) return false;
    }
    return true;
}

} // namespace linens
