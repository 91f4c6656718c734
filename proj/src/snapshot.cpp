#include "euler1d/snapshot.hpp"

#include <cmath>
#include <stdexcept>

namespace euler1d {

double gradient_alpha(double ux, double eta, double eta_x, double m, double m_x, double gamma) {
    return ux + m * eta_x + (gamma - 1.0) / gamma * m_x * eta;
}

double gradient_beta(double ux, double eta, double eta_x, double m, double m_x, double gamma) {
    return ux - m * eta_x - (gamma - 1.0) / gamma * m_x * eta;
}

double eps_weight(double eta, double epsilon, double gamma) {
    return std::pow(eta, 2.0 * epsilon / (gamma - 1.0));
}

void require_valid_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 0.25)) {
        throw std::domain_error("epsilon must lie in (0, 1/4)");
    }
}

FieldSnapshot::FieldSnapshot(double t, Grid1D grid, GasModel model, FarField far,
                             std::vector<double> u, std::vector<double> eta,
                             std::shared_ptr<const std::vector<double>> m,
                             std::shared_ptr<const std::vector<double>> m_x)
    : t_(t),
      grid_(grid),
      model_(std::move(model)),
      far_(far),
      u_(std::move(u)),
      eta_(std::move(eta)),
      m_(std::move(m)),
      m_x_(std::move(m_x)) {
    const size_t n = static_cast<size_t>(grid_.n);
    if (u_.size() != n || eta_.size() != n || !m_ || m_->size() != n || !m_x_ ||
        m_x_->size() != n) {
        throw std::invalid_argument("FieldSnapshot: array sizes must match the grid");
    }
    if (!positive()) {
        throw std::domain_error("FieldSnapshot: eta and m must be positive at every node");
    }
}

bool FieldSnapshot::positive() const {
    for (size_t i = 0; i < eta_.size(); ++i) {
        if (!(eta_[i] > 0.0) || !((*m_)[i] > 0.0)) return false;
    }
    return true;
}

const DerivedFields& FieldSnapshot::derived() const {
    std::call_once(derived_once_, [this] {
        auto d = std::make_unique<DerivedFields>();
        const size_t n = u_.size();
        const double h = grid_.h();
        const double gamma = model_.gamma();
        d->ux = deriv4(u_, h, far_.u_left, far_.u_right);
        d->eta_x = deriv4(eta_, h, far_.eta_left, far_.eta_right);
        d->s.resize(n);
        d->r.resize(n);
        d->alpha.resize(n);
        d->beta.resize(n);
        d->tau.resize(n);
        d->rho.resize(n);
        d->p.resize(n);
        d->c.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const double m = (*m_)[i];
            const double mx = (*m_x_)[i];
            d->s[i] = riemann_s(u_[i], eta_[i], m);
            d->r[i] = riemann_r(u_[i], eta_[i], m);
            d->alpha[i] = gradient_alpha(d->ux[i], eta_[i], d->eta_x[i], m, mx, gamma);
            d->beta[i] = gradient_beta(d->ux[i], eta_[i], d->eta_x[i], m, mx, gamma);
            d->tau[i] = model_.tau_from_eta(eta_[i]);
            d->rho[i] = 1.0 / d->tau[i];
            d->p[i] = model_.pressure(eta_[i], m);
            d->c[i] = model_.wave_speed(eta_[i], m);
        }
        derived_ = std::move(d);
    });
    return *derived_;
}

std::pair<std::vector<double>, std::vector<double>> FieldSnapshot::scaled_gradients(
    double epsilon) const {
    require_valid_epsilon(epsilon);
    const DerivedFields& d = derived();
    const double gamma = model_.gamma();
    std::vector<double> ae(u_.size()), be(u_.size());
    for (size_t i = 0; i < u_.size(); ++i) {
        const double w = eps_weight(eta_[i], epsilon, gamma);
        ae[i] = w * d.alpha[i];
        be[i] = w * d.beta[i];
    }
    return {std::move(ae), std::move(be)};
}

} // namespace euler1d
