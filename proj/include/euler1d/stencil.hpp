#ifndef EULER1D_STENCIL_HPP
#define EULER1D_STENCIL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "euler1d/grid.hpp"

namespace euler1d {

/// Constant far-field states used to fill ghost nodes on each side.
/// Scenarios are compact-support perturbations of these states, so a
/// constant extension emulates the whole-line setting on a finite box.
struct FarField {
    double u_left = 0.0, eta_left = 1.0, m_left = 1.0;
    double u_right = 0.0, eta_right = 1.0, m_right = 1.0;
};

/// Value at node index i of the ghost-extended array: inside the grid the
/// stored value, outside the constant far-field value for that side.
inline double ghosted(std::span<const double> f, int i, double left, double right) {
    if (i < 0) return left;
    if (i >= static_cast<int>(f.size())) return right;
    return f[static_cast<size_t>(i)];
}

/// Fourth-order central first derivative at node i,
/// (f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) / (12 h), with ghost closure.
inline double deriv4_at(std::span<const double> f, int i, double h, double left, double right) {
    const double fm2 = ghosted(f, i - 2, left, right);
    const double fm1 = ghosted(f, i - 1, left, right);
    const double fp1 = ghosted(f, i + 1, left, right);
    const double fp2 = ghosted(f, i + 2, left, right);
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

/// Whole-array fourth-order derivative with ghost closure.
inline std::vector<double> deriv4(std::span<const double> f, double h, double left, double right) {
    std::vector<double> d(f.size());
    for (int i = 0; i < static_cast<int>(f.size()); ++i) {
        d[static_cast<size_t>(i)] = deriv4_at(f, i, h, left, right);
    }
    return d;
}

/// Four-point Lagrange interpolation on a uniform grid with nodes at
/// x0 + i*h (O(h^4) on smooth data, exact on cubics). Queries outside the
/// node range fall back onto ghost values.
inline double interp4_uniform(std::span<const double> f, double x0, double h, double x,
                              double left, double right) {
    // Base index so that x lies in [x_j, x_{j+1}).
    int j = static_cast<int>(std::floor((x - x0) / h));
    const double t = (x - (x0 + j * h)) / h; // in [0,1) for interior queries
    const double fm1 = ghosted(f, j - 1, left, right);
    const double f0 = ghosted(f, j, left, right);
    const double f1 = ghosted(f, j + 1, left, right);
    const double f2 = ghosted(f, j + 2, left, right);
    // Lagrange weights for nodes at t = -1, 0, 1, 2.
    const double wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return wm1 * fm1 + w0 * f0 + w1 * f1 + w2 * f2;
}

/// interp4_uniform over a cell-centered grid.
inline double interp4(std::span<const double> f, const Grid1D& grid, double x, double left,
                      double right) {
    return interp4_uniform(f, grid.node(0), grid.h(), x, left, right);
}

/// Trapezoidal quadrature of nodal values over the grid.
inline double trapezoid(std::span<const double> f, double h) {
    if (f.empty()) return 0.0;
    double sum = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * h;
}

} // namespace euler1d

#endif
