#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "euler1d/bounds.hpp"
#include "euler1d/scenario.hpp"
#include "euler1d/solver.hpp"

namespace euler1d {

/// Every constant the theorem statements need, computed from one initial
/// snapshot.  Weighted (epsilon) fields are zero when epsilon is unset.
struct TheoremConstants {
    double gamma = 0.0;
    double M = 0.0;       ///< grid max of {alpha, beta}(0) plus margin
    double tau_max0 = 0.0;///< grid max of the initial specific volume
    double M1 = 0.0;      ///< p-system floor numerator 1/M
    double M2 = 0.0;      ///< p-system floor shift tau_max0/M
    double K1 = 0.0;      ///< sup of k1 over the a-priori eta range

    double epsilon = 0.0;
    double delta = 0.0;   ///< epsilon/(1-epsilon)
    double N = 0.0;       ///< weighted invariant bound
    double N0 = 0.0;      ///< bound on rho^eps * u_x (= N * K_tau^{-eps})
    double Nprime = 0.0;  ///< same constant, used as the floor growth rate
    double N1 = 0.0;      ///< full floor numerator
    double N2 = 0.0;      ///< full floor shift
    double K1_hat = 0.0;  ///< sup |k1_eps|
    double K2_hat = 0.0;  ///< sup |k2_eps|
    double max_abs_mx = 0.0;

    bool isentropic = false; ///< m_x identically zero at t = 0
    UniformBounds envelope;  ///< M_s, M_r, M_L, M_U, V, L1, L2 and the bounds
};

/// The two lower thresholds the weighted bound N must clear:
/// max{4 (gamma+1) K2_hat / eps, 2 K2_hat / (1 - 4 eps/(gamma+1))}.
double weighted_bound_threshold(double gamma, double epsilon, double K2_hat);

/// Computes all constants from the initial snapshot; epsilon = 0 skips the
/// weighted family, otherwise 0 < epsilon < 1/4 is required.
TheoremConstants theorem_constants(const FieldSnapshot& initial, double epsilon);

/// Discretization envelopes added to each bound before comparing.  The
/// theorems hold for exact solutions; these absorb truncation error.
struct MonitorSlack {
    double gradient = 1e-6;       ///< alpha/beta (and weighted) bound checks
    double density = 1e-9;        ///< min rho vs floor
    double slope = 1e-6;          ///< u_x / weighted-slope bound checks
    double upper = 1e-6;          ///< eta, |u| and Eulerian-slope bounds
};

/// Which checks a stored time passed (1 = pass).  Checks that do not apply
/// to a run are reported as passing.
enum VerdictBit : uint32_t {
    kGradientBound = 1u << 0, ///< max{alpha,beta} <= M + slack
    kRunningMax = 1u << 1,    ///< running max non-increasing (isentropic)
    kWeightedBound = 1u << 2, ///< max{alpha_eps,beta_eps} <= N + slack
    kDensityFloor = 1u << 3,  ///< min rho >= floor(t) - slack
    kSlopeBound = 1u << 4,    ///< max u_x <= M (resp. rho^eps u_x <= N0) + slack
    kVelocityBound = 1u << 5, ///< |u| within the a-priori envelope
    kEtaBound = 1u << 6,      ///< eta within the a-priori envelope
    kEulerianSlope = 1u << 7, ///< u_y = rho u_x under the transformed bound
    kAllChecks = 0xFFu,
};

struct TimeVerdict {
    double t = 0.0;
    double min_rho = 0.0;
    double floor = 0.0;
    double max_alpha = 0.0, max_beta = 0.0;
    double max_alpha_eps = 0.0, max_beta_eps = 0.0;
    double max_ux = 0.0;
    double max_rho_eps_ux = 0.0;
    double eta_bound = 0.0, u_bound = 0.0; ///< the bound values checked against
    uint32_t verdict_bits = 0;
};

struct DecayFit {
    double exponent = 0.0;
    double max_residual = 0.0;
    size_t points = 0;
};

struct MonitorReport {
    TheoremConstants constants;
    MonitorSlack slack;
    std::vector<TimeVerdict> rows;
    bool all_pass = false;
    long first_violation_row = -1;     ///< index into rows, -1 when none
    uint32_t first_violation_fail = 0; ///< failed bits at that row
    double observed_max_eta = 0.0;
    double observed_max_abs_u = 0.0;
    double observed_max_uy = 0.0;
    bool has_fit = false;
    DecayFit fit;
};

/// Grid maxima of the (weighted) gradient variables per stored time with the
/// invariant-domain verdict bits filled in (other bits preset to pass).
std::vector<TimeVerdict> check_invariant_domain(const SolutionHistory& history,
                                                const TheoremConstants& constants,
                                                const MonitorSlack& slack);

/// Time-dependent density floor at time t for the given system.  Full-system
/// histories with unset epsilon fall back to the isentropic formula when m is
/// constant and otherwise claim nothing (floor 0).
double compute_density_floor(const TheoremConstants& constants, SystemKind system, double t);

/// Floor formulas on raw parameters (exposed for limit/identity tests).
double psystem_floor(double tau_max0, double rate, double t);
double full_floor(double tau_max0, double rate, double epsilon, double t);

/// Runs every per-time check and aggregates the report.
MonitorReport check_bounds(const SolutionHistory& history, const TheoremConstants& constants,
                           const MonitorSlack& slack);

/// Least-squares slope of log(min rho) against log(1+t) over [t_a, t_b].
/// Requires t_a >= 1, t_b >= 10 t_a and a positive series.
DecayFit fit_decay_exponent(std::span<const double> t, std::span<const double> min_rho,
                            double t_a, double t_b);

/// Convenience: fit over the stored history min-density series.
DecayFit fit_decay_exponent(const SolutionHistory& history, double t_a, double t_b);

/// Runs the scenario at n, 2n, ... (levels grids) and returns 3x the largest
/// bound overshoot seen anywhere, per check family, plus a tiny floor: the
/// measured discretization envelope used by the acceptance checks.
MonitorSlack measure_slack(const Scenario& scenario, const SolverConfig& config, int n_coarse,
                           int levels);

void write_report_csv(std::ostream& os, const MonitorReport& report);
void write_report_text(std::ostream& os, const MonitorReport& report,
                       const std::string& scenario_name);
/// One-line JSON summary {scenario, gamma, epsilon, exponent, all_pass}.
void write_report_json(std::ostream& os, const MonitorReport& report,
                       const std::string& scenario_name);

} // namespace euler1d
