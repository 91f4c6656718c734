#include "euler1d/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "euler1d/stencil.hpp"

namespace euler1d {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

RiccatiCoefficients riccati_coefficients(const GasModel& model, double eta, double m_x,
                                         double epsilon) {
    if (!(eta > 0.0)) throw std::domain_error("riccati_coefficients: eta must be positive");
    if (epsilon != 0.0) require_valid_epsilon(epsilon);
    const double gamma = model.gamma();
    const double lead = (gamma + 1.0) * model.K_c() / (2.0 * (gamma - 1.0));
    const double low = (gamma - 1.0) / (gamma * (gamma + 1.0));
    RiccatiCoefficients k;
    k.k1 = lead * std::pow(eta, 2.0 / (gamma - 1.0));
    k.k2 = low * eta * m_x;
    k.k1_eps = lead * std::pow(eta, 2.0 / (gamma - 1.0) * (1.0 - epsilon));
    k.k2_eps = low * std::pow(eta, 1.0 + 2.0 * epsilon / (gamma - 1.0)) * m_x;
    return k;
}

std::string to_string(Family f) { return f == Family::Forward ? "forward" : "backward"; }

HistoryInterpolant::HistoryInterpolant(const SolutionHistory& history) : hist_(history) {
    if (hist_.size() == 0) throw std::invalid_argument("HistoryInterpolant: empty history");
    const SystemKind kind = hist_.config().system;
    times_.reserve(hist_.size());
    layers_.reserve(hist_.size());
    for (size_t k = 0; k < hist_.size(); ++k) {
        const FieldSnapshot& s = hist_.at(k);
        times_.push_back(s.t());
        Layer layer;
        layer.snap = &s;
        Rhs rhs = evaluate_rhs(s, kind);
        layer.du = std::move(rhs.du);
        layer.deta = std::move(rhs.deta);
        // The far field is constant in time, so time derivatives vanish there.
        layer.dux = deriv4(layer.du, s.grid().h(), 0.0, 0.0);
        layer.detax = deriv4(layer.deta, s.grid().h(), 0.0, 0.0);
        layers_.push_back(std::move(layer));
    }
}

bool HistoryInterpolant::inside(double x, double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(times_.back()));
    return t >= times_.front() - tol && t <= times_.back() + tol && x >= grid().x_min &&
           x <= grid().x_max;
}

void HistoryInterpolant::locate(double t, size_t& k, double& theta) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(times_.back()));
    if (t < times_.front() - tol || t > times_.back() + tol) {
        throw std::out_of_range("HistoryInterpolant: time outside the stored history");
    }
    if (times_.size() == 1) {
        k = 0;
        theta = 0.0;
        return;
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    size_t idx = static_cast<size_t>(it - times_.begin());
    k = idx == 0 ? 0 : idx - 1;
    if (k > times_.size() - 2) k = times_.size() - 2;
    theta = (t - times_[k]) / (times_[k + 1] - times_[k]);
    theta = std::clamp(theta, 0.0, 1.0);
}

double HistoryInterpolant::hermite(double y0, double s0, double y1, double s1, double theta,
                                   double dt) const {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + theta;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y0 + h10 * dt * s0 + h01 * y1 + h11 * dt * s1;
}

double HistoryInterpolant::u(double x, double t) const {
    size_t k;
    double theta;
    locate(t, k, theta);
    const FarField& far = hist_.far_field();
    const Layer& a = layers_[k];
    const double y0 = interp4(a.snap->u(), grid(), x, far.u_left, far.u_right);
    if (times_.size() == 1) return y0;
    const Layer& b = layers_[k + 1];
    const double dt = times_[k + 1] - times_[k];
    const double s0 = interp4(a.du, grid(), x, 0.0, 0.0);
    const double y1 = interp4(b.snap->u(), grid(), x, far.u_left, far.u_right);
    const double s1 = interp4(b.du, grid(), x, 0.0, 0.0);
    return hermite(y0, s0, y1, s1, theta, dt);
}

double HistoryInterpolant::eta(double x, double t) const {
    size_t k;
    double theta;
    locate(t, k, theta);
    const FarField& far = hist_.far_field();
    const Layer& a = layers_[k];
    const double y0 = interp4(a.snap->eta(), grid(), x, far.eta_left, far.eta_right);
    if (times_.size() == 1) return y0;
    const Layer& b = layers_[k + 1];
    const double dt = times_[k + 1] - times_[k];
    const double s0 = interp4(a.deta, grid(), x, 0.0, 0.0);
    const double y1 = interp4(b.snap->eta(), grid(), x, far.eta_left, far.eta_right);
    const double s1 = interp4(b.deta, grid(), x, 0.0, 0.0);
    return hermite(y0, s0, y1, s1, theta, dt);
}

double HistoryInterpolant::ux(double x, double t) const {
    size_t k;
    double theta;
    locate(t, k, theta);
    const Layer& a = layers_[k];
    const double y0 = interp4(a.snap->derived().ux, grid(), x, 0.0, 0.0);
    if (times_.size() == 1) return y0;
    const Layer& b = layers_[k + 1];
    const double dt = times_[k + 1] - times_[k];
    const double s0 = interp4(a.dux, grid(), x, 0.0, 0.0);
    const double y1 = interp4(b.snap->derived().ux, grid(), x, 0.0, 0.0);
    const double s1 = interp4(b.dux, grid(), x, 0.0, 0.0);
    return hermite(y0, s0, y1, s1, theta, dt);
}

double HistoryInterpolant::eta_x(double x, double t) const {
    size_t k;
    double theta;
    locate(t, k, theta);
    const Layer& a = layers_[k];
    const double y0 = interp4(a.snap->derived().eta_x, grid(), x, 0.0, 0.0);
    if (times_.size() == 1) return y0;
    const Layer& b = layers_[k + 1];
    const double dt = times_[k + 1] - times_[k];
    const double s0 = interp4(a.detax, grid(), x, 0.0, 0.0);
    const double y1 = interp4(b.snap->derived().eta_x, grid(), x, 0.0, 0.0);
    const double s1 = interp4(b.detax, grid(), x, 0.0, 0.0);
    return hermite(y0, s0, y1, s1, theta, dt);
}

double HistoryInterpolant::m(double x) const {
    const FarField& far = hist_.far_field();
    return interp4(layers_.front().snap->m(), grid(), x, far.m_left, far.m_right);
}

double HistoryInterpolant::m_x(double x) const {
    return interp4(layers_.front().snap->m_x(), grid(), x, 0.0, 0.0);
}

double HistoryInterpolant::wave_speed(double x, double t) const {
    return model().wave_speed(eta(x, t), m(x));
}

double HistoryInterpolant::alpha(double x, double t) const {
    return gradient_alpha(ux(x, t), eta(x, t), eta_x(x, t), m(x), m_x(x), model().gamma());
}

double HistoryInterpolant::beta(double x, double t) const {
    return gradient_beta(ux(x, t), eta(x, t), eta_x(x, t), m(x), m_x(x), model().gamma());
}

double HistoryInterpolant::scaled_alpha(double x, double t, double epsilon) const {
    require_valid_epsilon(epsilon);
    return eps_weight(eta(x, t), epsilon, model().gamma()) * alpha(x, t);
}

double HistoryInterpolant::scaled_beta(double x, double t, double epsilon) const {
    require_valid_epsilon(epsilon);
    return eps_weight(eta(x, t), epsilon, model().gamma()) * beta(x, t);
}

double CharacteristicPath::x_at(double t) const {
    if (samples.empty()) throw std::logic_error("empty path");
    if (samples.size() == 1) return samples.front().x;
    const double tol = 1e-9 * std::max(1.0, std::abs(samples.back().t));
    if (t < samples.front().t - tol || t > samples.back().t + tol) {
        throw std::out_of_range("path query outside the traced time range");
    }
    size_t k = 0;
    size_t lo = 0, hi = samples.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (samples[mid].t <= t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    k = lo;
    const PathSample& a = samples[k];
    const PathSample& b = samples[k + 1];
    const double dt = b.t - a.t;
    double theta = std::clamp((t - a.t) / dt, 0.0, 1.0);
    const double sgn = family_sign(family);
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + theta;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * a.x + h10 * dt * sgn * a.c + h01 * b.x + h11 * dt * sgn * b.c;
}

namespace {

PathSample make_sample(const HistoryInterpolant& h, double t, double x, Family family,
                       double epsilon) {
    PathSample p;
    p.t = t;
    p.x = x;
    p.eta = h.eta(x, t);
    p.m = h.m(x);
    p.c = h.model().wave_speed(p.eta, p.m);
    p.coeff = riccati_coefficients(h.model(), p.eta, h.m_x(x), epsilon);
    const double a = h.alpha(x, t);
    const double b = h.beta(x, t);
    const double w = epsilon == 0.0 ? 1.0 : eps_weight(p.eta, epsilon, h.model().gamma());
    if (family == Family::Forward) {
        p.field_value = w * a;
        p.partner = w * b;
    } else {
        p.field_value = w * b;
        p.partner = w * a;
    }
    p.carried = kNaN;
    return p;
}

} // namespace

CharacteristicPath trace(const HistoryInterpolant& h, double x0, double t0, Family family,
                         bool forward_in_time, const TraceOptions& options) {
    if (options.substeps_per_interval < 1) {
        throw std::invalid_argument("trace: substeps_per_interval must be at least 1");
    }
    if (options.epsilon != 0.0) require_valid_epsilon(options.epsilon);
    if (!h.inside(x0, t0)) {
        throw std::out_of_range("trace: start point outside the stored history");
    }

    const double sgn = family_sign(family);
    const auto& ts = h.stored_times();
    const double t_target = forward_in_time ? ts.back() : ts.front();
    const double tol = 1e-12 * std::max(1.0, std::abs(ts.back()));

    // Knot times from t0 toward the target, splitting at stored snapshots.
    std::vector<double> knots;
    knots.push_back(t0);
    if (forward_in_time) {
        for (double t : ts) {
            if (t > t0 + tol && t < t_target - tol) knots.push_back(t);
        }
    } else {
        for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
            if (*it < t0 - tol && *it > t_target + tol) knots.push_back(*it);
        }
    }
    if (std::abs(t_target - knots.back()) > tol) knots.push_back(t_target);

    CharacteristicPath path;
    path.family = family;
    path.epsilon = options.epsilon;
    path.samples.push_back(make_sample(h, t0, x0, family, options.epsilon));

    double x = x0;
    const double x_lo = h.grid().x_min;
    const double x_hi = h.grid().x_max;
    bool stopped = false;
    for (size_t seg = 0; seg + 1 < knots.size() && !stopped; ++seg) {
        const int nsub = options.substeps_per_interval;
        const double dt = (knots[seg + 1] - knots[seg]) / nsub;
        double t = knots[seg];
        for (int s = 0; s < nsub; ++s) {
            const double t1 = (s == nsub - 1) ? knots[seg + 1] : t + dt;
            try {
                const double k1 = sgn * h.wave_speed(x, t);
                const double k2 = sgn * h.wave_speed(x + 0.5 * dt * k1, t + 0.5 * dt);
                const double k3 = sgn * h.wave_speed(x + 0.5 * dt * k2, t + 0.5 * dt);
                const double k4 = sgn * h.wave_speed(x + dt * k3, t1);
                x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t = t1;
                if (x < x_lo || x > x_hi) {
                    stopped = true;
                    break;
                }
                path.samples.push_back(make_sample(h, t, x, family, options.epsilon));
            } catch (const std::exception&) {
                // Interpolated state no longer trustworthy (e.g. positivity
                // lost near blowup): terminate the path at the last sample.
                stopped = true;
                break;
            }
        }
    }

    if (!forward_in_time) {
        std::reverse(path.samples.begin(), path.samples.end());
    }
    return path;
}

namespace {

/// Integrates d a/dt = f(t, a) across the path samples with per-interval
/// sub-stepping scaled to the local Riccati stiffness; fills carried values.
template <typename F>
std::vector<double> integrate_along(CharacteristicPath& path, double a0, F&& f) {
    const size_t n = path.samples.size();
    std::vector<double> carried(n, kNaN);
    double a = a0;
    carried[0] = a;
    path.samples[0].carried = a;
    bool dead = false;
    for (size_t i = 0; i + 1 < n; ++i) {
        if (dead) {
            path.samples[i + 1].carried = kNaN;
            continue;
        }
        const double ta = path.samples[i].t;
        const double tb = path.samples[i + 1].t;
        const double k1_local = path.samples[i].coeff.k1;
        const double stiffness = std::abs(a) * std::max(k1_local, path.samples[i].coeff.k1_eps);
        int nsub = 1 + static_cast<int>(stiffness * (tb - ta) / 0.05);
        nsub = std::clamp(nsub, 1, 256);
        const double dt = (tb - ta) / nsub;
        double t = ta;
        for (int s = 0; s < nsub && !dead; ++s) {
            try {
                const double q1 = f(t, a);
                const double q2 = f(t + 0.5 * dt, a + 0.5 * dt * q1);
                const double q3 = f(t + 0.5 * dt, a + 0.5 * dt * q2);
                const double q4 = f(t + dt, a + dt * q3);
                a += dt / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
                t += dt;
                if (!std::isfinite(a)) dead = true;
            } catch (const std::exception&) {
                dead = true;
            }
        }
        carried[i + 1] = dead ? kNaN : a;
        path.samples[i + 1].carried = carried[i + 1];
    }
    return carried;
}

void require_constant_entropy(const HistoryInterpolant& h) {
    for (double v : h.history().front().m_x()) {
        if (v != 0.0) {
            throw std::invalid_argument(
                "isentropic Riccati integration requires constant m; use the full-system form");
        }
    }
}

} // namespace

std::vector<double> integrate_riccati_psystem(CharacteristicPath& path,
                                              const HistoryInterpolant& h) {
    if (path.samples.empty()) throw std::invalid_argument("empty path");
    require_constant_entropy(h);
    const Family fam = path.family;
    const GasModel& model = h.model();
    const double expo = 2.0 / (model.gamma() - 1.0);
    const double lead = (model.gamma() + 1.0) * model.K_c() / (2.0 * (model.gamma() - 1.0));
    const double t0 = path.samples.front().t;
    const double x0 = path.samples.front().x;
    const double a0 = fam == Family::Forward ? h.alpha(x0, t0) : h.beta(x0, t0);
    auto f = [&](double t, double a) {
        const double x = path.x_at(t);
        const double k1 = lead * std::pow(h.eta(x, t), expo);
        const double b = fam == Family::Forward ? h.beta(x, t) : h.alpha(x, t);
        return k1 * (a * b - a * a);
    };
    return integrate_along(path, a0, f);
}

std::vector<double> integrate_riccati_full(CharacteristicPath& path, const HistoryInterpolant& h,
                                           double epsilon) {
    if (path.samples.empty()) throw std::invalid_argument("empty path");
    if (epsilon != 0.0) require_valid_epsilon(epsilon);
    const Family fam = path.family;
    const GasModel& model = h.model();
    const double gamma = model.gamma();
    const double t0 = path.samples.front().t;
    const double x0 = path.samples.front().x;

    if (epsilon == 0.0) {
        const double a0 = fam == Family::Forward ? h.alpha(x0, t0) : h.beta(x0, t0);
        auto f = [&](double t, double a) {
            const double x = path.x_at(t);
            const RiccatiCoefficients k =
                riccati_coefficients(model, h.eta(x, t), h.m_x(x), 0.0);
            const double b = fam == Family::Forward ? h.beta(x, t) : h.alpha(x, t);
            const double entropy_term = fam == Family::Forward ? k.k2 * (3.0 * a + b)
                                                               : -k.k2 * (b + 3.0 * a);
            return k.k1 * (entropy_term + a * b - a * a);
        };
        return integrate_along(path, a0, f);
    }

    const double cross = 1.0 - 4.0 * epsilon / (gamma + 1.0);
    const double a0 = fam == Family::Forward ? h.scaled_alpha(x0, t0, epsilon)
                                             : h.scaled_beta(x0, t0, epsilon);
    auto f = [&](double t, double a) {
        const double x = path.x_at(t);
        const RiccatiCoefficients k =
            riccati_coefficients(model, h.eta(x, t), h.m_x(x), epsilon);
        const double b = fam == Family::Forward ? h.scaled_beta(x, t, epsilon)
                                                : h.scaled_alpha(x, t, epsilon);
        const double entropy_term = fam == Family::Forward
                                        ? k.k2_eps * (3.0 * a - 4.0 * epsilon * a + b)
                                        : -k.k2_eps * (b + 3.0 * a - 4.0 * epsilon * a);
        return k.k1_eps * (entropy_term + cross * a * b - a * a);
    };
    return integrate_along(path, a0, f);
}

double eta_transport_residual(const CharacteristicPath& path, const HistoryInterpolant& h) {
    if (path.samples.size() < 3) return 0.0;
    const GasModel& model = h.model();
    const double Kc = model.K_c();
    const double ec = model.exp_c();
    const double ep = model.exp_p();
    const double entropy_sign = path.family == Family::Forward ? -1.0 : 1.0;
    double worst = 0.0;
    for (size_t i = 1; i + 1 < path.samples.size(); ++i) {
        const PathSample& a = path.samples[i - 1];
        const PathSample& b = path.samples[i];
        const PathSample& c = path.samples[i + 1];
        const double hm = b.t - a.t;
        const double hp = c.t - b.t;
        // Second-order derivative on (possibly) non-uniform sample times.
        const double detadt = -hp / (hm * (hm + hp)) * a.eta +
                              (hp - hm) / (hm * hp) * b.eta +
                              hm / (hp * (hm + hp)) * c.eta;
        const double partner = path.family == Family::Forward ? h.beta(b.x, b.t)
                                                              : h.alpha(b.x, b.t);
        const double mx = h.m_x(b.x);
        const double rhs = -Kc * std::pow(b.eta, ec) * partner +
                           entropy_sign * (model.gamma() - 1.0) / model.gamma() * Kc *
                               std::pow(b.eta, ep) * mx;
        worst = std::max(worst, std::abs(detadt - rhs));
    }
    return worst;
}

double logistic_reference(double k, double M, double a0, double t) {
    if (!(k > 0.0)) throw std::domain_error("logistic_reference: k must be positive");
    if (!(a0 > 0.0) || !(a0 < M)) {
        throw std::domain_error("logistic_reference: a0 must lie in (0, M)");
    }
    return M / (1.0 + std::exp(-k * M * t) * (M / a0 - 1.0));
}

double integrate_frozen_riccati(double k, double M, double a0, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    auto f = [&](double a) { return k * (M * a - a * a); };
    const long n = std::lround(std::ceil(t_end / dt - 1e-12));
    const double step = n > 0 ? t_end / static_cast<double>(n) : 0.0;
    double a = a0;
    for (long i = 0; i < n; ++i) {
        const double q1 = f(a);
        const double q2 = f(a + 0.5 * step * q1);
        const double q3 = f(a + 0.5 * step * q2);
        const double q4 = f(a + step * q3);
        a += step / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
    }
    return a;
}

double frozen_blowup_time(double k, double M, double a0) {
    if (!(k > 0.0)) throw std::domain_error("frozen_blowup_time: k must be positive");
    if (!(a0 < 0.0)) throw std::domain_error("frozen_blowup_time: needs a0 < 0");
    auto f = [&](double a) { return k * (M * a - a * a); };
    double a = a0;
    double t = 0.0;
    const double escape = 1e10 * (std::abs(a0) + std::abs(M) + 1.0);
    const double t_cap = 1e6 / (k * std::abs(a0));
    while (std::abs(a) < escape && t < t_cap) {
        const double dt = 0.02 / (k * (std::abs(M) + 2.0 * std::abs(a)));
        const double q1 = f(a);
        const double q2 = f(a + 0.5 * dt * q1);
        const double q3 = f(a + 0.5 * dt * q2);
        const double q4 = f(a + dt * q3);
        a += dt / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
        t += dt;
        if (!std::isfinite(a)) break;
    }
    // Quadratic asymptote: 1/a hits zero at t* = t - 1/(k a).
    return t - 1.0 / (k * a);
}

std::optional<BlowupEstimate> estimate_blowup_time(const HistoryInterpolant& h,
                                                   std::span<const double> seeds) {
    const SolutionHistory& hist = h.history();
    const DerivedFields& d0 = hist.front().derived();
    double g_min = 0.0, g_scale = 0.0;
    for (size_t i = 0; i < d0.alpha.size(); ++i) {
        g_min = std::min({g_min, d0.alpha[i], d0.beta[i]});
        g_scale = std::max({g_scale, std::abs(d0.alpha[i]), std::abs(d0.beta[i])});
    }
    if (g_min >= 0.0) return std::nullopt; // nothing compressive anywhere
    const double threshold = -25.0 * std::max(g_scale, 1e-300);
    const bool full = hist.config().system == SystemKind::FullEuler;
    const double t0 = h.t_min();

    std::optional<BlowupEstimate> best;
    for (double x0 : seeds) {
        for (Family fam : {Family::Forward, Family::Backward}) {
            if (!h.inside(x0, t0)) continue;
            CharacteristicPath path = trace(h, x0, t0, fam);
            std::vector<double> carried = full ? integrate_riccati_full(path, h)
                                               : integrate_riccati_psystem(path, h);
            for (size_t i = carried.size(); i-- > 0;) {
                if (!std::isfinite(carried[i]) || carried[i] >= threshold) continue;
                const double k1 = path.samples[i].coeff.k1;
                const double t_star = path.samples[i].t - 1.0 / (k1 * carried[i]);
                if (!best || t_star < best->t_star) {
                    best = BlowupEstimate{t_star, x0, fam};
                }
                break;
            }
        }
    }
    return best;
}

} // namespace euler1d
