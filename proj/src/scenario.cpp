#include "euler1d/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "euler1d/stencil.hpp"

namespace euler1d {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Half-widths beyond which the profile tails drop under ~1e-14 of amplitude.
constexpr double kTanhSupportWidths = 17.0;
constexpr double kGaussSupportWidths = 6.0;

} // namespace

Scenario::Scenario(ScenarioSpec spec)
    : spec_(std::move(spec)), model_(spec_.K, spec_.gamma, spec_.c_v) {
    if (spec_.name == "double_rarefaction") {
        kind_ = Kind::DoubleRarefaction;
    } else if (spec_.name == "compressive_pulse") {
        kind_ = Kind::CompressivePulse;
    } else if (spec_.name == "smooth_periodicish_bump") {
        kind_ = Kind::SmoothBump;
    } else if (spec_.name == "entropy_bump") {
        kind_ = Kind::EntropyBump;
    } else if (spec_.name == "user_defined") {
        kind_ = Kind::UserDefined;
    } else {
        throw std::invalid_argument("unknown scenario: " + spec_.name);
    }

    if (kind_ != Kind::UserDefined) {
        if (!(spec_.width > 0.0) || !(spec_.entropy_width > 0.0)) {
            throw std::invalid_argument("scenario widths must be positive");
        }
        if (!(spec_.amplitude >= 0.0)) {
            throw std::invalid_argument("scenario amplitude must be non-negative");
        }
        if (!(spec_.entropy_amplitude > -1.0)) {
            throw std::invalid_argument("entropy amplitude must exceed -1 to keep m positive");
        }
        eta0_ = spec_.eta0 > 0.0 ? spec_.eta0 : model_.eta_from_tau(spec_.tau0);
    }

    switch (kind_) {
    case Kind::DoubleRarefaction:
        support_half_width_ = kTanhSupportWidths * spec_.width;
        far_ = {-spec_.amplitude, eta0_, 1.0, spec_.amplitude, eta0_, 1.0};
        break;
    case Kind::CompressivePulse:
        support_half_width_ = kTanhSupportWidths * spec_.width;
        far_ = {spec_.amplitude, eta0_, 1.0, -spec_.amplitude, eta0_, 1.0};
        break;
    case Kind::SmoothBump:
        support_half_width_ = kGaussSupportWidths * spec_.width;
        far_ = {0.0, eta0_, 1.0, 0.0, eta0_, 1.0};
        break;
    case Kind::EntropyBump:
        support_half_width_ = kGaussSupportWidths * spec_.entropy_width;
        far_ = {0.0, eta0_, 1.0, 0.0, eta0_, 1.0};
        break;
    case Kind::UserDefined: {
        const size_t n = spec_.user_u.size();
        if (n < 16 || spec_.user_eta.size() != n || spec_.user_m.size() != n) {
            throw std::invalid_argument(
                "user_defined scenario needs u/eta/m arrays of equal size >= 16");
        }
        if (!(spec_.user_x_max > spec_.user_x_min)) {
            throw std::invalid_argument("user_defined scenario needs x_max > x_min");
        }
        for (size_t i = 0; i < n; ++i) {
            if (!(spec_.user_eta[i] > 0.0) || !(spec_.user_m[i] > 0.0)) {
                throw std::invalid_argument("user_defined fields must keep eta and m positive");
            }
        }
        user_h_ = (spec_.user_x_max - spec_.user_x_min) / static_cast<double>(n - 1);
        far_ = {spec_.user_u.front(), spec_.user_eta.front(), spec_.user_m.front(),
                spec_.user_u.back(),  spec_.user_eta.back(),  spec_.user_m.back()};
        user_m_x_ = deriv4(spec_.user_m, user_h_, far_.m_left, far_.m_right);
        support_half_width_ = std::max(std::abs(spec_.user_x_min), std::abs(spec_.user_x_max));
        eta0_ = spec_.user_eta.front();
        break;
    }
    }

    // A-priori envelope from a fine sampling of the analytic profiles; this is
    // what sizes the domain so waves never reach the boundary closure.
    const size_t n_sample = 8193;
    const double span = support_half_width_;
    const double hs = 2.0 * span / static_cast<double>(n_sample - 1);
    std::vector<double> su(n_sample), se(n_sample), sm(n_sample), smx(n_sample);
    for (size_t i = 0; i < n_sample; ++i) {
        const double x = -span + static_cast<double>(i) * hs;
        su[i] = u_at(x);
        se[i] = eta_at(x);
        sm[i] = m_at(x);
        smx[i] = m_x_at(x);
    }
    bounds_ = uniform_bounds(model_, su, se, sm, smx, hs);
}

double Scenario::u_at(double x) const {
    const double A = spec_.amplitude;
    const double w = spec_.width;
    switch (kind_) {
    case Kind::DoubleRarefaction:
        return A * std::tanh(x / w);
    case Kind::CompressivePulse:
        return -A * std::tanh(x / w);
    case Kind::SmoothBump:
        return A * std::sin(2.0 * kPi * spec_.cycles * x / w) * std::exp(-(x / w) * (x / w));
    case Kind::EntropyBump:
        return 0.0;
    case Kind::UserDefined:
        if (x <= spec_.user_x_min) return far_.u_left;
        if (x >= spec_.user_x_max) return far_.u_right;
        return interp4_uniform(spec_.user_u, spec_.user_x_min, user_h_, x, far_.u_left,
                               far_.u_right);
    }
    return 0.0;
}

double Scenario::eta_at(double x) const {
    if (kind_ == Kind::UserDefined) {
        if (x <= spec_.user_x_min) return far_.eta_left;
        if (x >= spec_.user_x_max) return far_.eta_right;
        return interp4_uniform(spec_.user_eta, spec_.user_x_min, user_h_, x, far_.eta_left,
                               far_.eta_right);
    }
    return eta0_;
}

double Scenario::m_at(double x) const {
    switch (kind_) {
    case Kind::EntropyBump: {
        const double z = x / spec_.entropy_width;
        return 1.0 + spec_.entropy_amplitude * std::exp(-z * z);
    }
    case Kind::UserDefined:
        if (x <= spec_.user_x_min) return far_.m_left;
        if (x >= spec_.user_x_max) return far_.m_right;
        return interp4_uniform(spec_.user_m, spec_.user_x_min, user_h_, x, far_.m_left,
                               far_.m_right);
    default:
        return 1.0;
    }
}

double Scenario::m_x_at(double x) const {
    switch (kind_) {
    case Kind::EntropyBump: {
        const double w = spec_.entropy_width;
        const double z = x / w;
        return spec_.entropy_amplitude * std::exp(-z * z) * (-2.0 * z / w);
    }
    case Kind::UserDefined:
        if (x <= spec_.user_x_min || x >= spec_.user_x_max) return 0.0;
        return interp4_uniform(user_m_x_, spec_.user_x_min, user_h_, x, 0.0, 0.0);
    default:
        return 0.0;
    }
}

Grid1D Scenario::make_grid(double t_end, int n) const {
    if (t_end < 0.0) throw std::invalid_argument("t_end must be non-negative");
    const double half = support_half_width_ + 1.05 * bounds_.c_reach * t_end + 1.0;
    return Grid1D(-half, half, n);
}

FieldSnapshot Scenario::initial_snapshot(const Grid1D& grid) const {
    const size_t n = static_cast<size_t>(grid.n);
    std::vector<double> u(n), eta(n);
    auto m = std::make_shared<std::vector<double>>(n);
    auto m_x = std::make_shared<std::vector<double>>(n);
    for (size_t i = 0; i < n; ++i) {
        const double x = grid.node(i);
        u[i] = u_at(x);
        eta[i] = eta_at(x);
        (*m)[i] = m_at(x);
        (*m_x)[i] = m_x_at(x);
    }
    return FieldSnapshot(0.0, grid, model_, far_, std::move(u), std::move(eta), std::move(m),
                         std::move(m_x));
}

const std::vector<std::string>& Scenario::builtin_names() {
    static const std::vector<std::string> names = {
        "double_rarefaction", "compressive_pulse", "smooth_periodicish_bump", "entropy_bump",
        "user_defined"};
    return names;
}

} // namespace euler1d
