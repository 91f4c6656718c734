#ifndef EULER1D_GAS_MODEL_HPP
#define EULER1D_GAS_MODEL_HPP

#include <cmath>

namespace euler1d {

/// Derived pressure-law constants for a gamma-law gas written in the
/// (eta, m) working variables:
///
///   K_tau = (2 sqrt(K*gamma) / (gamma-1))^(2/(gamma-1))
///   K_p   = K * K_tau^(-gamma)
///   K_c   = sqrt(K*gamma) * K_tau^(-(gamma+1)/2)
///
/// They satisfy K_p = ((gamma-1)/(2 gamma)) K_c and K_tau*K_c = (gamma-1)/2.
struct GasConstants {
    double K_tau;
    double K_p;
    double K_c;
};

GasConstants derive_constants(double K, double gamma);

/// gamma-law thermodynamic closure. Immutable after construction; the two
/// algebraic identities between K_tau, K_p, K_c are checked at construction
/// to 1e-12 relative, so an inconsistent model cannot exist.
class GasModel {
  public:
    GasModel(double K, double gamma, double c_v = 1.0);

    double K() const { return K_; }
    double gamma() const { return gamma_; }
    double c_v() const { return c_v_; }
    double K_tau() const { return k_.K_tau; }
    double K_p() const { return k_.K_p; }
    double K_c() const { return k_.K_c; }

    // Exponents of eta that appear throughout: tau ~ eta^exp_tau(),
    // p ~ eta^exp_p(), c ~ eta^exp_c().
    double exp_tau() const { return -2.0 / (gamma_ - 1.0); }
    double exp_p() const { return 2.0 * gamma_ / (gamma_ - 1.0); }
    double exp_c() const { return (gamma_ + 1.0) / (gamma_ - 1.0); }

    /// eta = (2 sqrt(K gamma)/(gamma-1)) tau^(-(gamma-1)/2), tau > 0.
    double eta_from_tau(double tau) const;
    /// tau = K_tau eta^(-2/(gamma-1)), eta > 0.
    double tau_from_eta(double eta) const;

    /// p = K_p m^2 eta^(2 gamma/(gamma-1)).
    double pressure(double eta, double m) const;
    /// Lagrangian wave speed c = K_c m eta^((gamma+1)/(gamma-1)) = sqrt(-p_tau).
    double wave_speed(double eta, double m) const;
    /// e = p tau / (gamma - 1).
    double internal_energy(double p, double tau) const;

    /// m = exp(S / (2 c_v)).
    static double m_from_entropy(double S, double c_v);
    /// S = 2 c_v ln m, m > 0.
    double entropy_from_m(double m) const;

  private:
    double K_;
    double gamma_;
    double c_v_;
    double eta_coef_; // 2 sqrt(K gamma)/(gamma-1)
    GasConstants k_;
};

/// Point state in the (u, eta, m) variables with every derived quantity
/// evaluated once.
struct ThermoState {
    double u;
    double eta;
    double m;
    double tau;
    double rho;
    double p;
    double c;
    double S;
    double e;
};

ThermoState make_state(double u, double eta, double m, const GasModel& model);

} // namespace euler1d

#endif
