#include "euler1d/gas_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace euler1d {

namespace {

double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

} // namespace

GasConstants derive_constants(double K, double gamma) {
    if (!(K > 0.0)) {
        throw std::domain_error("derive_constants: K must be > 0, got " + std::to_string(K));
    }
    if (!(gamma > 1.0)) {
        throw std::domain_error("derive_constants: gamma must be > 1, got " + std::to_string(gamma));
    }
    const double root = std::sqrt(K * gamma);
    const double base = 2.0 * root / (gamma - 1.0);
    GasConstants k;
    k.K_tau = std::pow(base, 2.0 / (gamma - 1.0));
    k.K_p = K * std::pow(k.K_tau, -gamma);
    k.K_c = root * std::pow(k.K_tau, -(gamma + 1.0) / 2.0);
    if (!std::isfinite(k.K_tau) || !std::isfinite(k.K_p) || !std::isfinite(k.K_c) ||
        k.K_tau <= 0.0 || k.K_p <= 0.0 || k.K_c <= 0.0) {
        throw std::domain_error("derive_constants: constants not finite and positive for K=" +
                                std::to_string(K) + ", gamma=" + std::to_string(gamma));
    }
    return k;
}

GasModel::GasModel(double K, double gamma, double c_v)
    : K_(K), gamma_(gamma), c_v_(c_v), k_(derive_constants(K, gamma)) {
    if (!(c_v > 0.0)) {
        throw std::domain_error("GasModel: c_v must be > 0");
    }
    eta_coef_ = 2.0 * std::sqrt(K * gamma) / (gamma - 1.0);
    // K_p = ((gamma-1)/(2 gamma)) K_c and K_tau K_c = (gamma-1)/2.
    const double id1 = rel_err(k_.K_p, (gamma - 1.0) / (2.0 * gamma) * k_.K_c);
    const double id2 = rel_err(k_.K_tau * k_.K_c, (gamma - 1.0) / 2.0);
    if (id1 > 1e-12 || id2 > 1e-12) {
        throw std::domain_error("GasModel: derived-constant identities violated (rel err " +
                                std::to_string(id1) + ", " + std::to_string(id2) + ")");
    }
}

double GasModel::eta_from_tau(double tau) const {
    if (!(tau > 0.0)) {
        throw std::domain_error("eta_from_tau: tau must be > 0");
    }
    return eta_coef_ * std::pow(tau, -(gamma_ - 1.0) / 2.0);
}

double GasModel::tau_from_eta(double eta) const {
    if (!(eta > 0.0)) {
        throw std::domain_error("tau_from_eta: eta must be > 0");
    }
    return k_.K_tau * std::pow(eta, exp_tau());
}

double GasModel::pressure(double eta, double m) const {
    if (!(eta > 0.0) || !(m > 0.0)) {
        throw std::domain_error("pressure: eta and m must be > 0");
    }
    return k_.K_p * m * m * std::pow(eta, exp_p());
}

double GasModel::wave_speed(double eta, double m) const {
    if (!(eta > 0.0) || !(m > 0.0)) {
        throw std::domain_error("wave_speed: eta and m must be > 0");
    }
    return k_.K_c * m * std::pow(eta, exp_c());
}

double GasModel::internal_energy(double p, double tau) const {
    return p * tau / (gamma_ - 1.0);
}

double GasModel::m_from_entropy(double S, double c_v) {
    if (!(c_v > 0.0)) {
        throw std::domain_error("m_from_entropy: c_v must be > 0");
    }
    return std::exp(S / (2.0 * c_v));
}

double GasModel::entropy_from_m(double m) const {
    if (!(m > 0.0)) {
        throw std::domain_error("entropy_from_m: m must be > 0");
    }
    return 2.0 * c_v_ * std::log(m);
}

ThermoState make_state(double u, double eta, double m, const GasModel& model) {
    ThermoState st;
    st.u = u;
    st.eta = eta;
    st.m = m;
    st.tau = model.tau_from_eta(eta);
    st.rho = 1.0 / st.tau;
    st.p = model.pressure(eta, m);
    st.c = model.wave_speed(eta, m);
    st.S = model.entropy_from_m(m);
    st.e = model.internal_energy(st.p, st.tau);
    return st;
}

} // namespace euler1d
