#include "euler1d/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "euler1d/snapshot.hpp"

namespace euler1d {

UniformBounds uniform_bounds(const GasModel& model, std::span<const double> u,
                             std::span<const double> eta, std::span<const double> m,
                             std::span<const double> m_x, double h) {
    const size_t n = u.size();
    if (n < 2 || eta.size() != n || m.size() != n || m_x.size() != n) {
        throw std::invalid_argument("uniform_bounds: arrays must share a size >= 2");
    }
    UniformBounds b;
    b.M_L = m[0];
    b.M_U = m[0];
    std::vector<double> var_density(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(eta[i] > 0.0) || !(m[i] > 0.0)) {
            throw std::domain_error("uniform_bounds: eta and m must be positive");
        }
        b.M_s = std::max(b.M_s, std::abs(riemann_s(u[i], eta[i], m[i])));
        b.M_r = std::max(b.M_r, std::abs(riemann_r(u[i], eta[i], m[i])));
        b.M_L = std::min(b.M_L, m[i]);
        b.M_U = std::max(b.M_U, m[i]);
        var_density[i] = std::abs(m_x[i]) / m[i];
    }
    b.V = trapezoid(var_density, h);
    const double gamma = model.gamma();
    b.Vbar = b.V / (2.0 * gamma);
    const double vb = b.Vbar;
    const double grow = std::exp(vb * vb);
    b.L1 = b.M_s + vb * b.M_r + vb * (vb * b.M_s + vb * vb * b.M_r) * grow;
    b.L2 = b.M_r + vb * b.M_s + vb * (vb * b.M_r + vb * vb * b.M_s) * grow;
    const double half_sum = 0.5 * (b.L1 + b.L2);
    b.u_bound = half_sum * std::pow(b.M_U, 1.0 / (2.0 * gamma));
    b.eta_bound = half_sum * std::pow(b.M_L, 1.0 / (2.0 * gamma) - 1.0);
    b.c_bound = model.wave_speed(b.eta_bound, b.M_U);
    b.rho_bound = 1.0 / model.tau_from_eta(b.eta_bound);

    b.eta_reach = b.eta_bound;
    b.u_reach = b.u_bound;
    if (b.V == 0.0) {
        // Invariants are transported exactly; the forward one reaching (x,t)
        // starts weakly left of the backward one, so only ordered pairs of
        // initial values can meet.
        double s_run_max = -std::numeric_limits<double>::infinity();
        double s_run_min = std::numeric_limits<double>::infinity();
        double eta_pair = 0.0, u_hi = -std::numeric_limits<double>::infinity(),
               u_lo = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i) {
            const double s = riemann_s(u[i], eta[i], m[i]);
            const double r = riemann_r(u[i], eta[i], m[i]);
            s_run_max = std::max(s_run_max, s);
            s_run_min = std::min(s_run_min, s);
            eta_pair = std::max(eta_pair, 0.5 * (s_run_max - r));
            u_hi = std::max(u_hi, 0.5 * (s_run_max + r));
            u_lo = std::min(u_lo, 0.5 * (s_run_min + r));
        }
        b.eta_reach = std::min(b.eta_bound, eta_pair);
        b.u_reach = std::min(b.u_bound, std::max(std::abs(u_hi), std::abs(u_lo)));
    }
    b.c_reach = model.wave_speed(b.eta_reach, b.M_U);
    return b;
}

} // namespace euler1d
