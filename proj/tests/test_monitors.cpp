#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "euler1d/characteristics.hpp"
#include "euler1d/monitors.hpp"
#include "euler1d/scenario.hpp"
#include "euler1d/solver.hpp"
#include "test_support.hpp"

using namespace euler1d;
using testsupport::rel_err;

namespace {

SolutionHistory rarefaction_run(double t_end, int n) {
    ScenarioSpec spec;
    spec.name = "double_rarefaction";
    spec.gamma = 3.0;
    spec.amplitude = 0.5;
    const Scenario scenario(spec);
    SolverConfig config;
    config.system = SystemKind::PSystem;
    config.t_end = t_end;
    return run(scenario, scenario.make_grid(t_end, n), config);
}

/// Copy of a history with the last snapshot transformed node-by-node.
SolutionHistory mutate_last(const SolutionHistory& hist, auto mutate_u, auto mutate_eta) {
    SolutionHistory out(hist.model(), hist.grid(), hist.far_field(), hist.config());
    for (size_t k = 0; k + 1 < hist.size(); ++k) out.append(hist.share(k));
    const FieldSnapshot& last = hist.back();
    std::vector<double> u = last.u(), eta = last.eta();
    for (double& v : u) v = mutate_u(v);
    for (double& v : eta) v = mutate_eta(v);
    // Transform the ghost states the same way so the corruption does not
    // additionally manufacture boundary gradients.
    FarField far = last.far_field();
    far.u_left = mutate_u(far.u_left);
    far.u_right = mutate_u(far.u_right);
    far.eta_left = mutate_eta(far.eta_left);
    far.eta_right = mutate_eta(far.eta_right);
    out.append(std::make_shared<const FieldSnapshot>(last.t(), last.grid(), last.model(), far,
                                                     std::move(u), std::move(eta),
                                                     last.m_shared(), last.m_x_shared()));
    out.set_stop(hist.stop_reason());
    out.set_steps(hist.steps_taken());
    return out;
}

} // namespace

TEST_CASE("weighted bound threshold: worked value and scaling") {
    // gamma = 3, eps = 0.2, K2_hat = 1: max{4*4*1/0.2, 2/(1 - 0.8/4)} = 80.
    CHECK(weighted_bound_threshold(3.0, 0.2, 1.0) == 80.0);
    CHECK(weighted_bound_threshold(3.0, 0.2, 2.5) == 200.0); // linear in K2_hat
    CHECK(weighted_bound_threshold(1.4, 0.1, 1.0) == doctest::Approx(96.0).epsilon(1e-12));
}

TEST_CASE("density floor formulas") {
    CHECK(psystem_floor(1.0, 0.5, 0.0) == 1.0);
    CHECK(psystem_floor(1.0, 0.5, 2.0) == 0.5);
    CHECK(psystem_floor(2.0, 0.25, 4.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // Closed form of the weighted floor, and its limit back to the plain one.
    CHECK(rel_err(full_floor(1.0, 1.0, 0.2, 1.0), std::pow(1.8, -1.25)) < 1e-14);
    for (double t : {0.0, 1.0, 7.0, 40.0}) {
        CHECK(rel_err(full_floor(1.3, 0.7, 1e-8, t), psystem_floor(1.3, 0.7, t)) < 1e-6);
    }

    // Scaling sanity: the reciprocal floor grows linearly at exactly the
    // gradient-bound rate, so doubling the rate doubles the slope.
    const double slope1 = 1.0 / psystem_floor(1.3, 0.7, 5.0) - 1.0 / psystem_floor(1.3, 0.7, 1.0);
    const double slope2 = 1.0 / psystem_floor(1.3, 1.4, 5.0) - 1.0 / psystem_floor(1.3, 1.4, 1.0);
    CHECK(rel_err(slope1, 0.7 * 4.0) < 1e-14);
    CHECK(rel_err(slope2, 2.0 * slope1) < 1e-14);

    // Both floors decrease monotonically in time.
    double prev_p = 2.0, prev_f = 2.0;
    for (double t = 0.0; t <= 20.0; t += 0.5) {
        const double fp = psystem_floor(0.9, 0.6, t);
        const double ff = full_floor(0.9, 0.6, 0.2, t);
        CHECK(fp < prev_p);
        CHECK(ff < prev_f);
        prev_p = fp;
        prev_f = ff;
    }

    CHECK_THROWS_AS(psystem_floor(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(psystem_floor(1.0, 1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(full_floor(1.0, 0.0, 0.2, 1.0), std::domain_error);
    CHECK_THROWS_AS(full_floor(1.0, 1.0, 1.5, 1.0), std::domain_error);

    // A spent classical window reports an unbeatable floor rather than lying.
    CHECK(std::isinf(psystem_floor(1.0, -2.0, 1.0)));
}

TEST_CASE("theorem constants from an isentropic snapshot") {
    ScenarioSpec spec;
    spec.name = "double_rarefaction";
    spec.gamma = 3.0;
    spec.amplitude = 0.5;
    const Scenario scenario(spec);
    const FieldSnapshot snap = scenario.initial_snapshot(scenario.make_grid(0.0, 1024));
    const TheoremConstants tc = theorem_constants(snap, 0.0);

    CHECK(tc.gamma == 3.0);
    CHECK(tc.isentropic);
    CHECK(tc.epsilon == 0.0);
    CHECK(tc.N == 0.0); // weighted family unset

    const DerivedFields& d = snap.derived();
    double g = -1.0;
    for (size_t i = 0; i < d.alpha.size(); ++i) g = std::max({g, d.alpha[i], d.beta[i]});
    CHECK(tc.M > g);
    CHECK(tc.M - g < 1e-8); // only the tiny safety margin above the data
    CHECK(rel_err(tc.tau_max0, 1.0) < 1e-13); // eta0 = sqrt(3) => tau = 1
    CHECK(tc.M1 == 1.0 / tc.M);
    CHECK(tc.M2 == tc.tau_max0 / tc.M);

    // K1 is the k1 supremum over the a-priori eta range.
    const double k1_top =
        riccati_coefficients(snap.model(), tc.envelope.eta_bound, 0.0, 0.0).k1;
    CHECK(rel_err(tc.K1, k1_top) < 1e-14);
}

TEST_CASE("theorem constants with a weight exponent") {
    ScenarioSpec spec;
    spec.name = "entropy_bump";
    spec.gamma = 1.4;
    spec.entropy_amplitude = 0.1;
    const Scenario scenario(spec);
    const FieldSnapshot snap = scenario.initial_snapshot(scenario.make_grid(0.0, 1024));
    const double eps = 0.2;
    const TheoremConstants tc = theorem_constants(snap, eps);

    CHECK(!tc.isentropic);
    CHECK(tc.epsilon == eps);
    CHECK(rel_err(tc.delta, 0.25) < 1e-15); // eps/(1-eps)

    // N clears both the coefficient threshold and the initial data.
    CHECK(tc.N >= weighted_bound_threshold(1.4, eps, tc.K2_hat));
    const auto [ae, be] = snap.scaled_gradients(eps);
    for (size_t i = 0; i < ae.size(); ++i) {
        CHECK(tc.N >= ae[i]);
        CHECK(tc.N >= be[i]);
    }

    // Exact relations among the derived floor constants.
    CHECK(rel_err(tc.N0, tc.N * std::pow(snap.model().K_tau(), -eps)) < 1e-14);
    CHECK(tc.Nprime == tc.N0);
    const double rate = (1.0 - eps) * tc.Nprime;
    CHECK(rel_err(tc.N1, 1.0 / rate) < 1e-14);
    CHECK(rel_err(tc.N2, std::pow(tc.tau_max0, 1.0 - eps) / rate) < 1e-14);
    CHECK(tc.K2_hat > 0.0);
    CHECK(tc.max_abs_mx > 0.0);

    // The floor equals its (N1/(N2+t))^(1+delta) presentation.
    for (double t : {0.0, 2.0, 11.0}) {
        const double direct = compute_density_floor(tc, SystemKind::FullEuler, t);
        const double packaged = std::pow(tc.N1 / (tc.N2 + t), 1.0 + tc.delta);
        CHECK(rel_err(direct, packaged) < 1e-12);
    }

    CHECK_THROWS_AS(theorem_constants(snap, 0.3), std::domain_error);
    CHECK_THROWS_AS(theorem_constants(snap, -0.1), std::domain_error);
}

TEST_CASE("a clean rarefaction run passes every check") {
    const SolutionHistory hist = rarefaction_run(1.0, 512);
    const TheoremConstants tc = theorem_constants(hist.front(), 0.0);
    const MonitorReport report = check_bounds(hist, tc, MonitorSlack{});

    CHECK(report.all_pass);
    CHECK(report.first_violation_row == -1);
    CHECK(report.rows.size() == hist.size());
    for (size_t k = 0; k < report.rows.size(); ++k) {
        CHECK(report.rows[k].verdict_bits == kAllChecks);
        CHECK(report.rows[k].t == hist.at(k).t());
        CHECK(report.rows[k].min_rho >= report.rows[k].floor);
        CHECK(report.rows[k].floor > 0.0);
    }
    CHECK(report.observed_max_eta <= tc.envelope.eta_bound);
    CHECK(report.observed_max_abs_u <= tc.envelope.u_bound);

    // Eulerian slope column u_y = rho u_x, computed independently here.
    const DerivedFields& d = hist.back().derived();
    double uy = -1e300;
    for (size_t i = 0; i < d.rho.size(); ++i) uy = std::max(uy, d.rho[i] * d.ux[i]);
    CHECK(report.observed_max_uy >= uy);
    CHECK(report.observed_max_uy <= tc.M * tc.envelope.rho_bound);
}

TEST_CASE("each corruption trips exactly its own monitor") {
    const SolutionHistory hist = rarefaction_run(1.0, 256);
    const TheoremConstants tc = theorem_constants(hist.front(), 0.0);
    const MonitorSlack slack{};

    SUBCASE("doubling u breaks the gradient bound") {
        const SolutionHistory bad = mutate_last(
            hist, [](double u) { return 2.0 * u; }, [](double e) { return e; });
        const MonitorReport report = check_bounds(bad, tc, slack);
        CHECK(!report.all_pass);
        CHECK(report.first_violation_row + 1 == static_cast<long>(report.rows.size()));
        CHECK((report.first_violation_fail & kGradientBound) != 0);
    }
    SUBCASE("crushing eta breaks the density floor") {
        const SolutionHistory bad = mutate_last(
            hist, [](double u) { return u; }, [](double e) { return 0.25 * e; });
        const MonitorReport report = check_bounds(bad, tc, slack);
        CHECK(!report.all_pass);
        CHECK((report.first_violation_fail & kDensityFloor) != 0);
    }
    SUBCASE("a velocity offset leaves gradients alone but breaks the u bound") {
        const SolutionHistory bad = mutate_last(
            hist, [](double u) { return u + 3.0; }, [](double e) { return e; });
        const MonitorReport report = check_bounds(bad, tc, slack);
        CHECK(!report.all_pass);
        CHECK((report.first_violation_fail & kVelocityBound) != 0);
        const TimeVerdict& row = report.rows.back();
        CHECK((row.verdict_bits & kGradientBound) != 0); // derivatives unchanged
        CHECK((row.verdict_bits & kDensityFloor) != 0);
    }
}

TEST_CASE("running-max monotonicity is only enforced for constant entropy") {
    ScenarioSpec spec;
    spec.name = "entropy_bump";
    spec.gamma = 1.4;
    spec.entropy_amplitude = 0.1;
    const Scenario scenario(spec);
    SolverConfig config;
    config.system = SystemKind::FullEuler;
    config.t_end = 0.5;
    const SolutionHistory hist = run(scenario, scenario.make_grid(0.5, 256), config);
    const TheoremConstants tc = theorem_constants(hist.front(), 0.2);
    CHECK(!tc.isentropic);

    // Force an artificial bump in the gradient street: still no running-max
    // verdict because the premise (m constant) does not hold.
    const SolutionHistory bumped = mutate_last(
        hist, [](double u) { return 1.05 * u; }, [](double e) { return e; });
    const std::vector<TimeVerdict> rows = check_invariant_domain(bumped, tc, MonitorSlack{});
    for (const TimeVerdict& row : rows) CHECK((row.verdict_bits & kRunningMax) != 0);
}

TEST_CASE("decay exponent fitting recovers exact power laws") {
    std::vector<double> ts, r1, r54;
    for (double t = 0.0; t <= 60.0; t += 0.5) {
        ts.push_back(t);
        r1.push_back(1.0 / (1.0 + t));
        r54.push_back(std::pow(1.0 + t, -1.25));
    }
    const DecayFit f1 = fit_decay_exponent(ts, r1, 5.0, 50.0);
    CHECK(rel_err(f1.exponent, -1.0) < 1e-12);
    CHECK(f1.max_residual < 1e-12);
    CHECK(f1.points >= 80);

    const DecayFit f54 = fit_decay_exponent(ts, r54, 5.0, 50.0);
    CHECK(rel_err(f54.exponent, -1.25) < 1e-12);

    CHECK_THROWS_AS(fit_decay_exponent(ts, r1, 0.5, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay_exponent(ts, r1, 5.0, 20.0), std::invalid_argument);
    std::vector<double> short_t{5.0, 6.0, 60.0}, short_r{1.0, 0.9, 0.5};
    CHECK(fit_decay_exponent(short_t, short_r, 5.0, 60.0).points == 3);
    std::vector<double> two_t{5.0, 60.0}, two_r{1.0, 0.5};
    CHECK_THROWS_AS(fit_decay_exponent(two_t, two_r, 5.0, 60.0), std::invalid_argument);
    std::vector<double> neg = r1;
    neg[20] = -1.0;
    CHECK_THROWS_AS(fit_decay_exponent(ts, neg, 5.0, 50.0), std::invalid_argument);
}

TEST_CASE("report writers") {
    const SolutionHistory hist = rarefaction_run(0.5, 256);
    const TheoremConstants tc = theorem_constants(hist.front(), 0.0);
    const MonitorReport report = check_bounds(hist, tc, MonitorSlack{});

    std::ostringstream csv;
    write_report_csv(csv, report);
    const std::string header = csv.str().substr(0, csv.str().find('\n'));
    CHECK(header ==
          "t,min_rho,floor,max_alpha,max_beta,max_alpha_eps,max_beta_eps,max_ux,"
          "max_rho_eps_ux,eta_bound,u_bound,verdict_bits");

    std::ostringstream text;
    write_report_text(text, report, "double_rarefaction");
    CHECK(text.str().find("result: PASS") != std::string::npos);

    std::ostringstream json;
    write_report_json(json, report, "double_rarefaction");
    CHECK(json.str().find("\"scenario\":\"double_rarefaction\"") != std::string::npos);
    CHECK(json.str().find("\"all_pass\":true") != std::string::npos);
    CHECK(json.str().find("\"exponent\":null") != std::string::npos);

    const SolutionHistory bad = mutate_last(
        hist, [](double u) { return u + 3.0; }, [](double e) { return e; });
    const MonitorReport failing = check_bounds(bad, tc, MonitorSlack{});
    std::ostringstream bad_text;
    write_report_text(bad_text, failing, "double_rarefaction");
    CHECK(bad_text.str().find("result: FAIL at t") != std::string::npos);
    CHECK(bad_text.str().find("velocity-bound") != std::string::npos);
}

TEST_CASE("measured slack is tiny on convergent runs") {
    ScenarioSpec spec;
    spec.name = "double_rarefaction";
    spec.gamma = 3.0;
    spec.amplitude = 0.5;
    const Scenario scenario(spec);
    SolverConfig config;
    config.system = SystemKind::PSystem;
    config.t_end = 0.5;
    const MonitorSlack slack = measure_slack(scenario, config, 128, 2);

    CHECK(slack.gradient > 0.0);
    CHECK(slack.gradient < 1e-2);
    CHECK(slack.density > 0.0);
    CHECK(slack.density < 1e-2);
    CHECK(slack.slope > 0.0);
    CHECK(slack.slope < 1e-2);
    CHECK(slack.upper > 0.0);
    CHECK(slack.upper < 1e-2);

    // Slack must actually cover the coarse runs it was measured from.
    const SolutionHistory hist = run(scenario, scenario.make_grid(0.5, 128), config);
    const MonitorReport report =
        check_bounds(hist, theorem_constants(hist.front(), 0.0), slack);
    CHECK(report.all_pass);
}
