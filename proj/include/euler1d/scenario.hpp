#pragma once

#include <string>
#include <vector>

#include "euler1d/bounds.hpp"
#include "euler1d/gas_model.hpp"
#include "euler1d/grid.hpp"
#include "euler1d/snapshot.hpp"

namespace euler1d {

/// Parameters describing an initial condition family.  All built-in profiles
/// are smooth perturbations of a constant far-field state, so a finite domain
/// sized from the a-priori wave speed emulates the whole line.
struct ScenarioSpec {
    std::string name = "double_rarefaction";

    double gamma = 3.0;
    double K = 1.0;
    double c_v = 1.0;

    double amplitude = 0.5; ///< velocity amplitude A
    double width = 1.0;     ///< velocity profile width w
    double tau0 = 1.0;      ///< background specific volume
    double eta0 = 0.0;      ///< if > 0, overrides tau0 as the background

    double entropy_amplitude = 0.1; ///< a in m = 1 + a*exp(-(x/w_m)^2)
    double entropy_width = 1.0;     ///< w_m above
    double cycles = 2.0;            ///< oscillation count of the sinusoidal bump

    double epsilon = 0.0; ///< scaled-gradient exponent for full-system monitors (0 = unset)

    /// user_defined only: fields sampled on a uniform grid over [x_min, x_max]
    double user_x_min = 0.0;
    double user_x_max = 0.0;
    std::vector<double> user_u, user_eta, user_m;
};

/// A validated scenario: gas model, pointwise closures, far-field state and
/// the a-priori envelope needed to size a domain that waves cannot leave.
class Scenario {
  public:
    explicit Scenario(ScenarioSpec spec);

    const ScenarioSpec& spec() const { return spec_; }
    const GasModel& model() const { return model_; }
    const FarField& far_field() const { return far_; }
    double eta0() const { return eta0_; }
    double support_half_width() const { return support_half_width_; }
    const UniformBounds& initial_bounds() const { return bounds_; }

    /// Initial profiles as functions of the material coordinate.
    double u_at(double x) const;
    double eta_at(double x) const;
    double m_at(double x) const;
    double m_x_at(double x) const;

    /// Domain sized as support + a-priori wave travel, so the constant-state
    /// boundary closure is never reached by the solution.
    Grid1D make_grid(double t_end, int n) const;

    /// Samples the closures at the grid nodes (t = 0 snapshot).
    FieldSnapshot initial_snapshot(const Grid1D& grid) const;

    static const std::vector<std::string>& builtin_names();

  private:
    enum class Kind { DoubleRarefaction, CompressivePulse, SmoothBump, EntropyBump, UserDefined };

    ScenarioSpec spec_;
    Kind kind_;
    GasModel model_;
    FarField far_{};
    double eta0_ = 0.0;
    double support_half_width_ = 0.0;
    UniformBounds bounds_{};
    double user_h_ = 0.0;             // spacing of the user sample grid
    std::vector<double> user_m_x_;    // numerically differentiated user entropy profile
};

} // namespace euler1d
