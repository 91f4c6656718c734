#ifndef EULER1D_GRID_HPP
#define EULER1D_GRID_HPP

#include <stdexcept>

namespace euler1d {

/// Uniform cell-centered grid in the Lagrangian (mass) coordinate.
/// Nodes sit at x_i = x_min + (i + 1/2) h.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n = 0;

    Grid1D() = default;
    Grid1D(double x_min_, double x_max_, int n_) : x_min(x_min_), x_max(x_max_), n(n_) {
        if (n < 16) {
            throw std::invalid_argument("Grid1D: need n >= 16");
        }
        if (!(x_max > x_min)) {
            throw std::invalid_argument("Grid1D: need x_max > x_min");
        }
    }

    double h() const { return (x_max - x_min) / n; }
    double node(int i) const { return x_min + (i + 0.5) * h(); }
};

} // namespace euler1d

#endif
