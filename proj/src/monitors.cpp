#include "euler1d/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "euler1d/characteristics.hpp"
#include "euler1d/num_format.hpp"

namespace euler1d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Margin added to observed maxima so the theorem-side strict inequalities
/// hold at t = 0.
constexpr double kBoundMargin = 1e-9;

double span_max(std::span<const double> v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    return m;
}

double span_min(std::span<const double> v) {
    double m = kInf;
    for (double x : v) m = std::min(m, x);
    return m;
}

double span_max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

double weighted_bound_threshold(double gamma, double epsilon, double K2_hat) {
    if (!(gamma > 1.0)) throw std::domain_error("weighted_bound_threshold: gamma must exceed 1");
    require_valid_epsilon(epsilon);
    if (!(K2_hat >= 0.0)) throw std::domain_error("weighted_bound_threshold: K2_hat must be >= 0");
    const double first = 4.0 * (gamma + 1.0) * K2_hat / epsilon;
    const double second = 2.0 * K2_hat / (1.0 - 4.0 * epsilon / (gamma + 1.0));
    return std::max(first, second);
}

TheoremConstants theorem_constants(const FieldSnapshot& initial, double epsilon) {
    const GasModel& model = initial.model();
    const DerivedFields& d = initial.derived();

    TheoremConstants c;
    c.gamma = model.gamma();
    c.epsilon = epsilon;
    c.envelope = uniform_bounds(model, initial.u(), initial.eta(), initial.m(), initial.m_x(),
                                initial.grid().h());
    if (!std::isfinite(c.envelope.L1) || !std::isfinite(c.envelope.L2))
        throw std::domain_error("theorem_constants: initial data violates the bounded-variation "
                                "hypothesis");

    c.M = std::max(span_max(d.alpha), span_max(d.beta)) + kBoundMargin;
    c.tau_max0 = span_max(d.tau);
    c.M1 = 1.0 / c.M;
    c.M2 = c.tau_max0 / c.M;
    c.max_abs_mx = span_max_abs(initial.m_x());
    c.isentropic = (c.max_abs_mx == 0.0);

    // The coefficient suprema are attained at the eta upper bound (every
    // exponent involved is positive), with |m_x| at its grid maximum.
    const RiccatiCoefficients rc =
        riccati_coefficients(model, c.envelope.eta_bound, c.max_abs_mx, epsilon);
    c.K1 = rc.k1;

    if (epsilon > 0.0) {
        require_valid_epsilon(epsilon);
        c.delta = epsilon / (1.0 - epsilon);
        c.K1_hat = rc.k1_eps;
        c.K2_hat = std::abs(rc.k2_eps);
        const auto [ae, be] = initial.scaled_gradients(epsilon);
        const double initial_max = std::max(span_max(ae), span_max(be));
        c.N = std::max(weighted_bound_threshold(c.gamma, epsilon, c.K2_hat), initial_max) +
              kBoundMargin;
        // The invariant bound constrains eta^{2 eps/(gamma-1)} u_x; expressed
        // against rho^eps u_x it picks up the factor K_tau^{-eps}.
        c.Nprime = c.N * std::pow(model.K_tau(), -epsilon);
        c.N0 = c.Nprime;
        const double rate = (1.0 - epsilon) * c.Nprime;
        c.N1 = 1.0 / rate;
        c.N2 = std::pow(c.tau_max0, 1.0 - epsilon) / rate;
    }
    return c;
}

double psystem_floor(double tau_max0, double rate, double t) {
    if (!(tau_max0 > 0.0)) throw std::domain_error("psystem_floor: tau_max0 must be positive");
    if (!(t >= 0.0)) throw std::domain_error("psystem_floor: t must be >= 0");
    const double denom = tau_max0 + rate * t;
    // A non-positive denominator means the guaranteed-classical window has
    // ended; the infinite floor makes any later comparison fail loudly.
    if (denom <= 0.0) return kInf;
    return 1.0 / denom;
}

double full_floor(double tau_max0, double rate, double epsilon, double t) {
    if (!(tau_max0 > 0.0)) throw std::domain_error("full_floor: tau_max0 must be positive");
    if (!(rate > 0.0)) throw std::domain_error("full_floor: rate must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("full_floor: epsilon must lie in (0, 1)");
    if (!(t >= 0.0)) throw std::domain_error("full_floor: t must be >= 0");
    const double base = std::pow(tau_max0, 1.0 - epsilon) + (1.0 - epsilon) * rate * t;
    return std::pow(base, -1.0 / (1.0 - epsilon));
}

double compute_density_floor(const TheoremConstants& constants, SystemKind system, double t) {
    if (system == SystemKind::PSystem)
        return psystem_floor(constants.tau_max0, constants.M, t);
    if (constants.epsilon > 0.0)
        return full_floor(constants.tau_max0, constants.Nprime, constants.epsilon, t);
    // Variable entropy without a weight exponent: no floor is claimed.  When
    // m is constant the isentropic formula still applies verbatim.
    if (constants.isentropic) return psystem_floor(constants.tau_max0, constants.M, t);
    return 0.0;
}

std::vector<TimeVerdict> check_invariant_domain(const SolutionHistory& history,
                                                const TheoremConstants& constants,
                                                const MonitorSlack& slack) {
    const double eps = constants.epsilon;
    std::vector<TimeVerdict> rows;
    rows.reserve(history.size());

    double running = -kInf;
    for (size_t k = 0; k < history.size(); ++k) {
        const FieldSnapshot& snap = history.at(k);
        const DerivedFields& d = snap.derived();

        TimeVerdict row;
        row.t = snap.t();
        row.min_rho = span_min(d.rho);
        row.max_alpha = span_max(d.alpha);
        row.max_beta = span_max(d.beta);
        row.max_ux = span_max(d.ux);
        if (eps > 0.0) {
            const auto [ae, be] = snap.scaled_gradients(eps);
            row.max_alpha_eps = span_max(ae);
            row.max_beta_eps = span_max(be);
            double w = -kInf;
            for (size_t i = 0; i < d.rho.size(); ++i)
                w = std::max(w, std::pow(d.rho[i], eps) * d.ux[i]);
            row.max_rho_eps_ux = w;
        } else {
            row.max_alpha_eps = row.max_alpha;
            row.max_beta_eps = row.max_beta;
            row.max_rho_eps_ux = row.max_ux;
        }
        row.eta_bound = constants.envelope.eta_bound;
        row.u_bound = constants.envelope.u_bound;

        row.verdict_bits = kAllChecks;
        const double cur = std::max(row.max_alpha, row.max_beta);
        if (!(cur <= constants.M + slack.gradient)) row.verdict_bits &= ~kGradientBound;
        // Monotonicity of the running max is a constant-entropy statement
        // (with varying m only the fixed bound N is claimed).
        if (constants.isentropic && running > -kInf && !(cur <= running + slack.gradient))
            row.verdict_bits &= ~kRunningMax;
        running = std::max(running, cur);
        if (eps > 0.0 &&
            !(std::max(row.max_alpha_eps, row.max_beta_eps) <= constants.N + slack.gradient))
            row.verdict_bits &= ~kWeightedBound;

        rows.push_back(row);
    }
    return rows;
}

MonitorReport check_bounds(const SolutionHistory& history, const TheoremConstants& constants,
                           const MonitorSlack& slack) {
    const SystemKind system = history.config().system;
    const double eps = constants.epsilon;

    MonitorReport report;
    report.constants = constants;
    report.slack = slack;
    report.rows = check_invariant_domain(history, constants, slack);
    report.observed_max_eta = -kInf;
    report.observed_max_abs_u = 0.0;
    report.observed_max_uy = -kInf;

    // Which slope bound applies: the plain one for constant entropy, the
    // weighted one when an exponent is set, nothing otherwise.
    const bool plain_slope = (system == SystemKind::PSystem) || constants.isentropic;
    const bool weighted_slope = (system == SystemKind::FullEuler) && eps > 0.0;
    const double eulerian_bound =
        weighted_slope ? constants.N0 * std::pow(constants.envelope.rho_bound, 1.0 - eps)
                       : constants.M * constants.envelope.rho_bound;

    for (size_t k = 0; k < report.rows.size(); ++k) {
        TimeVerdict& row = report.rows[k];
        const FieldSnapshot& snap = history.at(k);
        const DerivedFields& d = snap.derived();

        row.floor = compute_density_floor(constants, system, row.t);
        if (!(row.min_rho >= row.floor - slack.density)) row.verdict_bits &= ~kDensityFloor;

        if (weighted_slope) {
            if (!(row.max_rho_eps_ux <= constants.N0 + slack.slope))
                row.verdict_bits &= ~kSlopeBound;
        } else if (plain_slope) {
            if (!(row.max_ux <= constants.M + slack.slope)) row.verdict_bits &= ~kSlopeBound;
        }

        const double max_eta = span_max(snap.eta());
        const double max_abs_u = span_max_abs(snap.u());
        double max_uy = -kInf;
        for (size_t i = 0; i < d.rho.size(); ++i) max_uy = std::max(max_uy, d.rho[i] * d.ux[i]);
        report.observed_max_eta = std::max(report.observed_max_eta, max_eta);
        report.observed_max_abs_u = std::max(report.observed_max_abs_u, max_abs_u);
        report.observed_max_uy = std::max(report.observed_max_uy, max_uy);

        if (!(max_abs_u <= constants.envelope.u_bound + slack.upper))
            row.verdict_bits &= ~kVelocityBound;
        if (!(max_eta <= constants.envelope.eta_bound + slack.upper))
            row.verdict_bits &= ~kEtaBound;
        if ((plain_slope || weighted_slope) && eulerian_bound > 0.0 &&
            !(max_uy <= eulerian_bound + slack.upper))
            row.verdict_bits &= ~kEulerianSlope;
    }

    report.all_pass = true;
    for (size_t k = 0; k < report.rows.size(); ++k) {
        if (report.rows[k].verdict_bits != kAllChecks) {
            report.all_pass = false;
            report.first_violation_row = static_cast<long>(k);
            report.first_violation_fail = kAllChecks & ~report.rows[k].verdict_bits;
            break;
        }
    }
    return report;
}

DecayFit fit_decay_exponent(std::span<const double> t, std::span<const double> min_rho,
                            double t_a, double t_b) {
    if (t.size() != min_rho.size())
        throw std::invalid_argument("fit_decay_exponent: series size mismatch");
    if (!(t_a >= 1.0)) throw std::invalid_argument("fit_decay_exponent: window start must be >= 1");
    if (!(t_b >= 10.0 * t_a - 1e-12))
        throw std::invalid_argument("fit_decay_exponent: window must span at least a decade");

    std::vector<double> xs, ys;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_a || t[i] > t_b) continue;
        if (!(min_rho[i] > 0.0))
            throw std::invalid_argument("fit_decay_exponent: series must be positive");
        xs.push_back(std::log1p(t[i]));
        ys.push_back(std::log(min_rho[i]));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("fit_decay_exponent: fewer than 3 samples in the window");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (!(det > 0.0)) throw std::invalid_argument("fit_decay_exponent: degenerate abscissas");

    DecayFit fit;
    fit.points = xs.size();
    fit.exponent = (n * sxy - sx * sy) / det;
    const double intercept = (sy - fit.exponent * sx) / n;
    for (size_t i = 0; i < xs.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::abs(ys[i] - (intercept + fit.exponent * xs[i])));
    return fit;
}

DecayFit fit_decay_exponent(const SolutionHistory& history, double t_a, double t_b) {
    std::vector<double> ts, rhos;
    ts.reserve(history.size());
    rhos.reserve(history.size());
    for (size_t k = 0; k < history.size(); ++k) {
        ts.push_back(history.at(k).t());
        rhos.push_back(span_min(history.at(k).derived().rho));
    }
    return fit_decay_exponent(ts, rhos, t_a, t_b);
}

MonitorSlack measure_slack(const Scenario& scenario, const SolverConfig& config, int n_coarse,
                           int levels) {
    if (levels < 1) throw std::invalid_argument("measure_slack: need at least one level");
    if (n_coarse < 16) throw std::invalid_argument("measure_slack: coarse grid too small");

    double over_gradient = 0.0, over_density = 0.0, over_slope = 0.0, over_upper = 0.0;
    double scale_slope = 1.0, scale_upper = 1.0, scale_density = 1.0, scale_gradient = 1.0;

    for (int lvl = 0; lvl < levels; ++lvl) {
        const int n = n_coarse << lvl;
        const Grid1D grid = scenario.make_grid(config.t_end, n);
        const SolutionHistory history = run(scenario, grid, config);
        const TheoremConstants constants =
            theorem_constants(history.front(), scenario.spec().epsilon);
        const MonitorSlack zero{0.0, 0.0, 0.0, 0.0};
        const MonitorReport report = check_bounds(history, constants, zero);

        const bool weighted = (history.config().system == SystemKind::FullEuler) &&
                              constants.epsilon > 0.0;
        const double slope_bound = weighted ? constants.N0 : constants.M;
        const double eulerian_bound =
            weighted ? constants.N0 * std::pow(constants.envelope.rho_bound, 1.0 - constants.epsilon)
                     : constants.M * constants.envelope.rho_bound;

        double running = -kInf;
        for (const TimeVerdict& row : report.rows) {
            const double cur = std::max(row.max_alpha, row.max_beta);
            over_gradient = std::max(over_gradient, cur - constants.M);
            if (constants.isentropic && running > -kInf)
                over_gradient = std::max(over_gradient, cur - running);
            running = std::max(running, cur);
            if (constants.epsilon > 0.0)
                over_gradient = std::max(
                    over_gradient, std::max(row.max_alpha_eps, row.max_beta_eps) - constants.N);
            over_density = std::max(over_density, row.floor - row.min_rho);
            over_slope = std::max(over_slope,
                                  (weighted ? row.max_rho_eps_ux : row.max_ux) - slope_bound);
        }
        over_upper = std::max(over_upper,
                              report.observed_max_eta - constants.envelope.eta_bound);
        over_upper = std::max(over_upper,
                              report.observed_max_abs_u - constants.envelope.u_bound);
        if (eulerian_bound > 0.0)
            over_upper = std::max(over_upper, report.observed_max_uy - eulerian_bound);

        scale_gradient = std::max(1.0, std::abs(constants.M));
        scale_slope = std::max(1.0, std::abs(slope_bound));
        scale_upper = std::max(1.0, constants.envelope.eta_bound + constants.envelope.u_bound);
        scale_density = std::max(1e-3, 1.0 / constants.tau_max0);
    }

    MonitorSlack slack;
    slack.gradient = 3.0 * std::max(0.0, over_gradient) + 1e-9 * scale_gradient;
    slack.density = 3.0 * std::max(0.0, over_density) + 1e-9 * scale_density;
    slack.slope = 3.0 * std::max(0.0, over_slope) + 1e-9 * scale_slope;
    slack.upper = 3.0 * std::max(0.0, over_upper) + 1e-9 * scale_upper;
    return slack;
}

void write_report_csv(std::ostream& os, const MonitorReport& report) {
    os << "t,min_rho,floor,max_alpha,max_beta,max_alpha_eps,max_beta_eps,max_ux,"
          "max_rho_eps_ux,eta_bound,u_bound,verdict_bits\n";
    for (const TimeVerdict& row : report.rows) {
        os << g17(row.t) << ',' << g17(row.min_rho) << ',' << g17(row.floor) << ','
           << g17(row.max_alpha) << ',' << g17(row.max_beta) << ',' << g17(row.max_alpha_eps)
           << ',' << g17(row.max_beta_eps) << ',' << g17(row.max_ux) << ','
           << g17(row.max_rho_eps_ux) << ',' << g17(row.eta_bound) << ',' << g17(row.u_bound)
           << ',' << row.verdict_bits << '\n';
    }
}

namespace {

void describe_bits(std::ostream& os, uint32_t fail) {
    const struct {
        uint32_t bit;
        const char* name;
    } names[] = {
        {kGradientBound, "gradient-bound"}, {kRunningMax, "running-max"},
        {kWeightedBound, "weighted-bound"}, {kDensityFloor, "density-floor"},
        {kSlopeBound, "slope-bound"},       {kVelocityBound, "velocity-bound"},
        {kEtaBound, "eta-bound"},           {kEulerianSlope, "eulerian-slope"},
    };
    bool first = true;
    for (const auto& entry : names) {
        if (!(fail & entry.bit)) continue;
        os << (first ? "" : ", ") << entry.name;
        first = false;
    }
}

} // namespace

void write_report_text(std::ostream& os, const MonitorReport& report,
                       const std::string& scenario_name) {
    const TheoremConstants& c = report.constants;
    os << "verification report: " << scenario_name << "\n";
    os << "  gamma = " << g17(c.gamma) << ", epsilon = " << g17(c.epsilon) << "\n";
    os << "  M = " << g17(c.M) << "  (tau_max(0) = " << g17(c.tau_max0) << ")\n";
    if (c.epsilon > 0.0) {
        os << "  N = " << g17(c.N) << ", N0 = " << g17(c.N0) << ", delta = " << g17(c.delta)
           << "\n";
        os << "  K1_hat = " << g17(c.K1_hat) << ", K2_hat = " << g17(c.K2_hat) << "\n";
    }
    os << "  envelope: |u| <= " << g17(c.envelope.u_bound) << ", eta <= "
       << g17(c.envelope.eta_bound) << ", V = " << g17(c.envelope.V) << "\n";
    os << "  slack: gradient " << g17(report.slack.gradient) << ", density "
       << g17(report.slack.density) << ", slope " << g17(report.slack.slope) << ", upper "
       << g17(report.slack.upper) << "\n";
    os << "  observed: max eta " << g17(report.observed_max_eta) << ", max |u| "
       << g17(report.observed_max_abs_u) << ", max u_y " << g17(report.observed_max_uy) << "\n";
    os << "  times checked: " << report.rows.size() << "\n";
    if (report.has_fit)
        os << "  decay fit: exponent " << g17(report.fit.exponent) << " over "
           << report.fit.points << " samples (max residual " << g17(report.fit.max_residual)
           << ")\n";
    if (report.all_pass) {
        os << "  result: PASS (all checks at all stored times)\n";
    } else {
        const TimeVerdict& row = report.rows[static_cast<size_t>(report.first_violation_row)];
        os << "  result: FAIL at t = " << g17(row.t) << " (";
        describe_bits(os, report.first_violation_fail);
        os << ")\n";
    }
}

void write_report_json(std::ostream& os, const MonitorReport& report,
                       const std::string& scenario_name) {
    nlohmann::json j;
    j["scenario"] = scenario_name;
    j["gamma"] = report.constants.gamma;
    j["epsilon"] = report.constants.epsilon;
    if (report.has_fit)
        j["exponent"] = report.fit.exponent;
    else
        j["exponent"] = nullptr;
    j["all_pass"] = report.all_pass;
    os << j.dump() << "\n";
}

} // namespace euler1d
