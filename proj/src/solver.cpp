#include "euler1d/solver.hpp"

#include <algorithm>
#include <cmath>

#include "euler1d/stencil.hpp"

namespace euler1d {

std::string to_string(SystemKind kind) {
    return kind == SystemKind::PSystem ? "p_system" : "full_euler";
}

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::HorizonReached: return "horizon_reached";
    case StopReason::BlowupSuspected: return "blowup_suspected";
    case StopReason::DensityFloorReached: return "density_floor_reached";
    }
    return "unknown";
}

SystemKind system_kind_from_string(const std::string& s) {
    if (s == "p_system") return SystemKind::PSystem;
    if (s == "full_euler") return SystemKind::FullEuler;
    throw std::invalid_argument("unknown system kind: " + s);
}

StopReason stop_reason_from_string(const std::string& s) {
    if (s == "horizon_reached") return StopReason::HorizonReached;
    if (s == "blowup_suspected") return StopReason::BlowupSuspected;
    if (s == "density_floor_reached") return StopReason::DensityFloorReached;
    throw std::invalid_argument("unknown stop reason: " + s);
}

void SolverConfig::validate() const {
    if (!(cfl > 0.0) || !(cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0, 1)");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    if (stride < 1) throw std::invalid_argument("stride must be at least 1");
    if (!(ux_blowup_factor > 0.0) || !(rho_floor_factor > 0.0)) {
        throw std::invalid_argument("stop thresholds must be positive");
    }
    if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
}

namespace {

/// Core right-hand side on raw arrays; used for every Runge-Kutta stage.
void rhs_into(const GasModel& model, const FarField& far, double h, SystemKind kind, double t,
              std::span<const double> u, std::span<const double> eta, std::span<const double> m,
              std::span<const double> m_x, std::vector<double>& du, std::vector<double>& deta) {
    const size_t n = u.size();
    for (size_t i = 0; i < n; ++i) {
        if (!(eta[i] > 0.0) || !std::isfinite(eta[i]) || !std::isfinite(u[i])) {
            throw PositivityLoss(t);
        }
    }
    du.resize(n);
    deta.resize(n);
    const double Kc = model.K_c();
    const double Kp = model.K_p();
    const double ec = model.exp_c();
    const double ep = model.exp_p();
    if (kind == SystemKind::PSystem) {
        for (size_t i = 0; i < n; ++i) {
            const int j = static_cast<int>(i);
            const double ux = deriv4_at(u, j, h, far.u_left, far.u_right);
            const double etax = deriv4_at(eta, j, h, far.eta_left, far.eta_right);
            const double c = Kc * std::pow(eta[i], ec);
            deta[i] = -c * ux;
            du[i] = -c * etax;
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            const int j = static_cast<int>(i);
            const double ux = deriv4_at(u, j, h, far.u_left, far.u_right);
            const double etax = deriv4_at(eta, j, h, far.eta_left, far.eta_right);
            const double c = Kc * m[i] * std::pow(eta[i], ec);
            const double p = Kp * m[i] * m[i] * std::pow(eta[i], ep);
            deta[i] = -(c / m[i]) * ux;
            du[i] = -(m[i] * c * etax + 2.0 * (p / m[i]) * m_x[i]);
        }
    }
}

} // namespace

Rhs evaluate_rhs(const FieldSnapshot& snap, SystemKind kind) {
    Rhs out;
    rhs_into(snap.model(), snap.far_field(), snap.grid().h(), kind, snap.t(), snap.u(),
             snap.eta(), snap.m(), snap.m_x(), out.du, out.deta);
    return out;
}

double max_wave_speed(const FieldSnapshot& snap, SystemKind kind) {
    const GasModel& model = snap.model();
    const auto& eta = snap.eta();
    double cmax = 0.0;
    if (kind == SystemKind::PSystem) {
        double eta_max = 0.0;
        for (double e : eta) {
            if (!(e > 0.0)) throw PositivityLoss(snap.t());
            eta_max = std::max(eta_max, e);
        }
        cmax = model.K_c() * std::pow(eta_max, model.exp_c());
    } else {
        const auto& m = snap.m();
        for (size_t i = 0; i < eta.size(); ++i) {
            if (!(eta[i] > 0.0)) throw PositivityLoss(snap.t());
            cmax = std::max(cmax, m[i] * std::pow(eta[i], model.exp_c()));
        }
        cmax *= model.K_c();
    }
    return cmax;
}

FieldSnapshot step(const FieldSnapshot& snap, double dt, const SolverConfig& config) {
    config.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("step: dt must be positive and finite");
    }
    const double budget = config.cfl * snap.grid().h() / max_wave_speed(snap, config.system);
    if (dt > budget * (1.0 + 1e-9)) {
        throw std::invalid_argument("step: dt exceeds the CFL budget of the current state");
    }

    const GasModel& model = snap.model();
    const FarField& far = snap.far_field();
    const double h = snap.grid().h();
    const auto& m = snap.m();
    const auto& m_x = snap.m_x();
    const size_t n = snap.u().size();
    const double t = snap.t();

    std::vector<double> ku1, ke1, ku2, ke2, ku3, ke3, ku4, ke4;
    std::vector<double> us(n), es(n);

    rhs_into(model, far, h, config.system, t, snap.u(), snap.eta(), m, m_x, ku1, ke1);
    for (size_t i = 0; i < n; ++i) {
        us[i] = snap.u()[i] + 0.5 * dt * ku1[i];
        es[i] = snap.eta()[i] + 0.5 * dt * ke1[i];
    }
    rhs_into(model, far, h, config.system, t, us, es, m, m_x, ku2, ke2);
    for (size_t i = 0; i < n; ++i) {
        us[i] = snap.u()[i] + 0.5 * dt * ku2[i];
        es[i] = snap.eta()[i] + 0.5 * dt * ke2[i];
    }
    rhs_into(model, far, h, config.system, t, us, es, m, m_x, ku3, ke3);
    for (size_t i = 0; i < n; ++i) {
        us[i] = snap.u()[i] + dt * ku3[i];
        es[i] = snap.eta()[i] + dt * ke3[i];
    }
    rhs_into(model, far, h, config.system, t, us, es, m, m_x, ku4, ke4);

    std::vector<double> u_new(n), eta_new(n);
    const double w = dt / 6.0;
    for (size_t i = 0; i < n; ++i) {
        u_new[i] = snap.u()[i] + w * (ku1[i] + 2.0 * ku2[i] + 2.0 * ku3[i] + ku4[i]);
        eta_new[i] = snap.eta()[i] + w * (ke1[i] + 2.0 * ke2[i] + 2.0 * ke3[i] + ke4[i]);
        if (!(eta_new[i] > 0.0) || !std::isfinite(eta_new[i]) || !std::isfinite(u_new[i])) {
            throw PositivityLoss(t + dt);
        }
    }
    return FieldSnapshot(t + dt, snap.grid(), model, far, std::move(u_new), std::move(eta_new),
                         snap.m_shared(), snap.m_x_shared());
}

size_t SolutionHistory::index_at_or_before(double t) const {
    if (snapshots_.empty()) throw std::out_of_range("history is empty");
    size_t k = 0;
    while (k + 1 < snapshots_.size() && snapshots_[k + 1]->t() <= t) ++k;
    return k;
}

void SolutionHistory::append(std::shared_ptr<const FieldSnapshot> snap) {
    if (!snap) throw std::invalid_argument("null snapshot");
    if (!snapshots_.empty() && !(snap->t() > snapshots_.back()->t())) {
        throw std::invalid_argument("stored times must be strictly increasing");
    }
    snapshots_.push_back(std::move(snap));
}

SolutionHistory run_from(FieldSnapshot initial, const SolverConfig& config) {
    config.validate();
    if (config.system == SystemKind::PSystem) {
        for (double mi : initial.m()) {
            if (mi != 1.0) {
                throw std::invalid_argument(
                    "the isentropic path requires m identically 1; use the full system");
            }
        }
    }

    SolutionHistory hist(initial.model(), initial.grid(), initial.far_field(), config);
    auto cur = std::make_shared<const FieldSnapshot>(std::move(initial));
    hist.append(cur);

    const auto& d0 = cur->derived();
    double ux_scale = 0.0;
    for (double v : d0.ux) ux_scale = std::max(ux_scale, std::abs(v));
    if (ux_scale <= 0.0) ux_scale = 1.0;
    double rho_min0 = d0.rho[0];
    for (double v : d0.rho) rho_min0 = std::min(rho_min0, v);
    const double ux_limit = config.ux_blowup_factor * ux_scale;
    const double rho_limit = config.rho_floor_factor * rho_min0;

    const double t_end = config.t_end;
    const double tiny = 1e-12 * std::max(1.0, t_end);
    double t = cur->t();
    long steps = 0;
    bool cur_stored = true;

    while (t < t_end - tiny) {
        if (steps >= config.max_steps) {
            throw std::runtime_error("run: step limit exceeded; check configuration");
        }
        double cmax = 0.0;
        try {
            cmax = max_wave_speed(*cur, config.system);
        } catch (const PositivityLoss&) {
            hist.set_stop(StopReason::BlowupSuspected);
            break;
        }
        double dt = config.cfl * cur->grid().h() / cmax;
        bool final_step = false;
        if (t + dt >= t_end - tiny) {
            dt = t_end - t;
            final_step = true;
        }
        if (!(dt > 0.0)) break;

        std::shared_ptr<const FieldSnapshot> next;
        try {
            next = std::make_shared<const FieldSnapshot>(step(*cur, dt, config));
        } catch (const PositivityLoss&) {
            if (!cur_stored) hist.append(cur);
            hist.set_stop(StopReason::BlowupSuspected);
            cur_stored = true;
            break;
        }
        ++steps;
        t = next->t();

        const bool store = final_step || (steps % config.stride == 0);
        if (store) {
            const auto& d = next->derived();
            double ux_max = 0.0, rho_min = d.rho[0];
            for (double v : d.ux) ux_max = std::max(ux_max, std::abs(v));
            for (double v : d.rho) rho_min = std::min(rho_min, v);
            hist.append(next);
            cur_stored = true;
            if (ux_max > ux_limit) {
                hist.set_stop(StopReason::BlowupSuspected);
                break;
            }
            if (rho_min < rho_limit) {
                hist.set_stop(StopReason::DensityFloorReached);
                break;
            }
            if (final_step) break;
        } else {
            cur_stored = false;
        }
        cur = std::move(next);
    }
    if (!cur_stored) hist.append(cur);
    hist.set_steps(steps);
    return hist;
}

SolutionHistory run(const Scenario& scenario, const Grid1D& grid, const SolverConfig& config) {
    return run_from(scenario.initial_snapshot(grid), config);
}

} // namespace euler1d
