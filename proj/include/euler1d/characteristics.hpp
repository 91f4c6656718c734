#pragma once

#include <optional>
#include <span>
#include <vector>

#include "euler1d/solver.hpp"

namespace euler1d {

/// Local coefficients of the Riccati equations along characteristics:
///   k1     = ((gamma+1) K_c / (2 (gamma-1))) * eta^(2/(gamma-1))
///   k2     = ((gamma-1) / (gamma (gamma+1))) * eta * m_x
///   k1_eps = ((gamma+1) K_c / (2 (gamma-1))) * eta^((2/(gamma-1))(1-eps))
///   k2_eps = ((gamma-1) / (gamma (gamma+1))) * eta^(1+2 eps/(gamma-1)) * m_x
/// At eps = 0 the weighted pair coincides with the unweighted one.
struct RiccatiCoefficients {
    double k1 = 0.0, k2 = 0.0, k1_eps = 0.0, k2_eps = 0.0;
};

RiccatiCoefficients riccati_coefficients(const GasModel& model, double eta, double m_x,
                                         double epsilon);

/// Space-time interpolation over a stored history: fourth-order Lagrange in
/// space, cubic Hermite in time with slopes supplied by the semi-discrete
/// right-hand side at each stored snapshot.  All caches are built eagerly so
/// concurrent read-only queries are safe.
class HistoryInterpolant {
  public:
    explicit HistoryInterpolant(const SolutionHistory& history);

    const SolutionHistory& history() const { return hist_; }
    const GasModel& model() const { return hist_.model(); }
    const Grid1D& grid() const { return hist_.grid(); }
    double t_min() const { return times_.front(); }
    double t_max() const { return times_.back(); }
    const std::vector<double>& stored_times() const { return times_; }

    bool inside(double x, double t) const;

    double u(double x, double t) const;
    double eta(double x, double t) const;
    double ux(double x, double t) const;
    double eta_x(double x, double t) const;
    double m(double x) const;
    double m_x(double x) const;

    double wave_speed(double x, double t) const;
    double alpha(double x, double t) const;
    double beta(double x, double t) const;
    /// alpha or beta weighted by eta^(2 eps/(gamma-1)).
    double scaled_alpha(double x, double t, double epsilon) const;
    double scaled_beta(double x, double t, double epsilon) const;

  private:
    struct Layer {
        const FieldSnapshot* snap;
        std::vector<double> du, deta;     // time derivatives of u, eta
        std::vector<double> dux, detax;   // their spatial derivatives
    };

    // Bracket t between stored snapshots: index k and theta in [0, 1].
    void locate(double t, size_t& k, double& theta) const;
    double hermite(double y0, double s0, double y1, double s1, double theta, double dt) const;

    const SolutionHistory& hist_;
    std::vector<double> times_;
    std::vector<Layer> layers_;
};

enum class Family { Forward, Backward };

inline double family_sign(Family f) { return f == Family::Forward ? 1.0 : -1.0; }
std::string to_string(Family f);

struct PathSample {
    double t = 0.0, x = 0.0;
    double eta = 0.0, m = 0.0, c = 0.0;
    RiccatiCoefficients coeff;
    double partner = 0.0;     ///< field value of the opposite-family gradient
    double field_value = 0.0; ///< field value of the carried quantity
    double carried = 0.0;     ///< Riccati-integrated value (NaN until integrated)
};

/// A characteristic curve dx/dt = +-c through the stored space-time box,
/// sampled at strictly increasing times.
struct CharacteristicPath {
    Family family = Family::Forward;
    double epsilon = 0.0; ///< weight used for field_value/partner (0 = unweighted)
    std::vector<PathSample> samples;

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }
    /// Path position at time t (cubic Hermite between samples; the sampled
    /// slope is the family-signed wave speed).
    double x_at(double t) const;
};

struct TraceOptions {
    int substeps_per_interval = 4; ///< path RK4 steps per stored interval
    double epsilon = 0.0;          ///< fill the weighted coefficient/field columns
};

/// Integrates dx/dt = +-c from (x0, t0) to the edge of the stored box (both
/// time directions supported; samples are reported in increasing time).
CharacteristicPath trace(const HistoryInterpolant& h, double x0, double t0, Family family,
                         bool forward_in_time = true, const TraceOptions& options = {});

/// Integrates the isentropic Riccati equation d a/dt = k1 (a b - a^2) along
/// the path (a is the family's own gradient, b the interpolated partner).
/// Fills and returns the carried samples.  Requires m identically constant.
std::vector<double> integrate_riccati_psystem(CharacteristicPath& path,
                                              const HistoryInterpolant& h);

/// Same along a full-system history.  With epsilon = 0 integrates the
/// unweighted pair (reduces to the isentropic equation when m_x = 0); with
/// 0 < epsilon < 1/4 integrates the weighted variables.
std::vector<double> integrate_riccati_full(CharacteristicPath& path, const HistoryInterpolant& h,
                                           double epsilon = 0.0);

/// Max absolute residual of the transport identity for eta along the path:
///   d eta/dt on a forward path = -K_c eta^((gamma+1)/(gamma-1)) beta
///                                - ((gamma-1)/gamma) K_c eta^(2 gamma/(gamma-1)) m_x
/// (mirrored sign of the entropy term on a backward path).
double eta_transport_residual(const CharacteristicPath& path, const HistoryInterpolant& h);

/// Exact solution a(t) = M / (1 + e^(-k M t) (M/a0 - 1)) of the comparison
/// equation da/dt = k (M a - a^2); requires 0 < a0 < M, k > 0.
double logistic_reference(double k, double M, double a0, double t);

/// Fixed-step RK4 for da/dt = k (M a - a^2) with constant coefficients.
double integrate_frozen_riccati(double k, double M, double a0, double t_end, double dt);

/// Blowup time of da/dt = k (M a - a^2) from a0 < 0, found by adaptive
/// integration plus the quadratic-asymptote extrapolation t* = t - 1/(k a).
double frozen_blowup_time(double k, double M, double a0);

struct BlowupEstimate {
    double t_star = 0.0;
    double x_seed = 0.0;
    Family family = Family::Forward;
};

/// Traces candidate characteristics from the given seed positions at the
/// first stored time, integrates the appropriate Riccati equation, and
/// extrapolates the blowup time where a carried value escapes downward.
/// Returns the earliest estimate, or nullopt when nothing indicates blowup.
std::optional<BlowupEstimate> estimate_blowup_time(const HistoryInterpolant& h,
                                                   std::span<const double> seeds);

} // namespace euler1d
