#ifndef EULER1D_SNAPSHOT_HPP
#define EULER1D_SNAPSHOT_HPP

#include <memory>
#include <mutex>
#include <vector>

#include "euler1d/gas_model.hpp"
#include "euler1d/grid.hpp"
#include "euler1d/stencil.hpp"

namespace euler1d {

/// Derived per-node arrays of a snapshot. Computed once on demand and
/// cached; monitors and characteristic tracing reuse them repeatedly.
struct DerivedFields {
    std::vector<double> s, r;         // Riemann invariants u +- m eta
    std::vector<double> ux, eta_x;    // fourth-order spatial derivatives
    std::vector<double> alpha, beta;  // gradient variables
    std::vector<double> tau, rho, p, c;
};

/// Grid-sampled (u, eta, m) state at one time. Immutable once published by
/// the solver; derived arrays are computed lazily under a once-flag so
/// concurrent readers are safe.
class FieldSnapshot {
  public:
    FieldSnapshot(double t, Grid1D grid, GasModel model, FarField far,
                  std::vector<double> u, std::vector<double> eta,
                  std::shared_ptr<const std::vector<double>> m,
                  std::shared_ptr<const std::vector<double>> m_x);

    // Movable (the once-flag restarts; a recompute of the cache is harmless),
    // not copyable.
    FieldSnapshot(FieldSnapshot&& other) noexcept
        : t_(other.t_), grid_(other.grid_), model_(other.model_), far_(other.far_),
          u_(std::move(other.u_)), eta_(std::move(other.eta_)), m_(std::move(other.m_)),
          m_x_(std::move(other.m_x_)), derived_(std::move(other.derived_)) {}
    FieldSnapshot(const FieldSnapshot&) = delete;
    FieldSnapshot& operator=(const FieldSnapshot&) = delete;
    FieldSnapshot& operator=(FieldSnapshot&&) = delete;

    double t() const { return t_; }
    const Grid1D& grid() const { return grid_; }
    const GasModel& model() const { return model_; }
    const FarField& far_field() const { return far_; }
    int n() const { return grid_.n; }

    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& eta() const { return eta_; }
    const std::vector<double>& m() const { return *m_; }
    const std::vector<double>& m_x() const { return *m_x_; }
    std::shared_ptr<const std::vector<double>> m_shared() const { return m_; }
    std::shared_ptr<const std::vector<double>> m_x_shared() const { return m_x_; }

    bool positive() const; // eta > 0 and m > 0 at every node

    const DerivedFields& derived() const;

    /// Entropy-weighted gradients alpha_eps = eta^(2 eps/(gamma-1)) * alpha,
    /// same for beta. Requires 0 < eps < 1/4.
    std::pair<std::vector<double>, std::vector<double>> scaled_gradients(double epsilon) const;

  private:
    double t_;
    Grid1D grid_;
    GasModel model_;
    FarField far_;
    std::vector<double> u_;
    std::vector<double> eta_;
    std::shared_ptr<const std::vector<double>> m_;
    std::shared_ptr<const std::vector<double>> m_x_;

    mutable std::once_flag derived_once_;
    mutable std::unique_ptr<DerivedFields> derived_;
};

/// s = u + m eta, r = u - m eta at one node.
inline double riemann_s(double u, double eta, double m) { return u + m * eta; }
inline double riemann_r(double u, double eta, double m) { return u - m * eta; }

/// Gradient variables at one node from the pointwise values and spatial
/// derivatives:
///   alpha = u_x + m eta_x + ((gamma-1)/gamma) m_x eta
///   beta  = u_x - m eta_x - ((gamma-1)/gamma) m_x eta
double gradient_alpha(double ux, double eta, double eta_x, double m, double m_x, double gamma);
double gradient_beta(double ux, double eta, double eta_x, double m, double m_x, double gamma);

/// eta^(2 eps/(gamma-1)), the weight that turns alpha into alpha_eps.
double eps_weight(double eta, double epsilon, double gamma);

/// Throws unless 0 < epsilon < 1/4.
void require_valid_epsilon(double epsilon);

} // namespace euler1d

#endif
