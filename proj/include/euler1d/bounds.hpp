#pragma once

#include <span>

#include "euler1d/gas_model.hpp"

namespace euler1d {

/// A-priori bounds valid for the whole lifetime of a classical solution,
/// computed from initial data only: Riemann-invariant extremes closed under a
/// Gronwall argument in the entropy variation.  For constant m the formulas
/// collapse to the invariant-region box of the isentropic system.
struct UniformBounds {
    double M_s = 0.0;       ///< sup |u + m*eta| at t = 0
    double M_r = 0.0;       ///< sup |u - m*eta| at t = 0
    double M_L = 0.0;       ///< inf m
    double M_U = 0.0;       ///< sup m
    double V = 0.0;         ///< integral of |m'|/m (entropy variation)
    double Vbar = 0.0;      ///< V / (2*gamma)
    double L1 = 0.0;        ///< forward-invariant envelope constant
    double L2 = 0.0;        ///< backward-invariant envelope constant
    double u_bound = 0.0;   ///< sup over space-time of |u|
    double eta_bound = 0.0; ///< sup over space-time of eta
    double c_bound = 0.0;   ///< sup over space-time of the wave speed
    double rho_bound = 0.0; ///< sup over space-time of the density

    /// Sharper reach estimates used for domain sizing only.  For constant m
    /// the forward invariant through (x,t) originates left of the backward
    /// one, so eta <= max over ordered pairs x1 <= x2 of (s(x1) - r(x2))/2;
    /// this is far tighter than the envelope above for expansive data.  With
    /// varying m they fall back to the envelope values.
    double eta_reach = 0.0;
    double u_reach = 0.0;
    double c_reach = 0.0;
};

/// Computes the envelope above from sampled initial data.  h is the uniform
/// sample spacing (used for the entropy-variation quadrature).
UniformBounds uniform_bounds(const GasModel& model, std::span<const double> u,
                             std::span<const double> eta, std::span<const double> m,
                             std::span<const double> m_x, double h);

} // namespace euler1d
