#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "euler1d/scenario.hpp"
#include "euler1d/snapshot.hpp"

namespace euler1d {

/// Which first-order system the method-of-lines right-hand side encodes.
/// PSystem is the isentropic pair (requires m identically 1); FullEuler is
/// the (eta, u) form with stationary entropy variable m.
enum class SystemKind { PSystem, FullEuler };

enum class StopReason { HorizonReached, BlowupSuspected, DensityFloorReached };

std::string to_string(SystemKind kind);
std::string to_string(StopReason reason);
SystemKind system_kind_from_string(const std::string& s);
StopReason stop_reason_from_string(const std::string& s);

struct SolverConfig {
    SystemKind system = SystemKind::PSystem;
    double cfl = 0.4;   ///< dt = cfl * h / max wave speed, recomputed per step
    double t_end = 1.0; ///< horizon (runs may stop earlier)
    int stride = 16;    ///< snapshots stored every this many steps

    /// Stop thresholds marking loss of the classical regime: max |u_x|
    /// exceeding this factor times its initial scale, or min density
    /// dropping under this factor times its initial minimum.
    double ux_blowup_factor = 1e3;
    double rho_floor_factor = 1e-6;

    long max_steps = 5'000'000; ///< hard safety limit; exceeding it throws

    void validate() const;
};

/// Thrown when an update would leave the positivity region (eta <= 0 or
/// non-finite); the driver records it as a blowup-suspected stop.
struct PositivityLoss : std::runtime_error {
    explicit PositivityLoss(double t)
        : std::runtime_error("state left the positivity region at t = " + std::to_string(t)),
          t_event(t) {}
    double t_event;
};

/// Time derivatives of (u, eta) for the chosen system at a frozen state.
struct Rhs {
    std::vector<double> du, deta;
};

/// Semi-discrete right-hand side: fourth-order central differences with a
/// constant far-field ghost closure.  Throws PositivityLoss if eta is not
/// uniformly positive.
Rhs evaluate_rhs(const FieldSnapshot& snap, SystemKind kind);

/// Largest wave speed on the grid (full system uses the nodal m).
double max_wave_speed(const FieldSnapshot& snap, SystemKind kind);

/// One classic fourth-order Runge-Kutta step.  Requires dt within the CFL
/// budget of the input state; m is carried through unchanged.
FieldSnapshot step(const FieldSnapshot& snap, double dt, const SolverConfig& config);

/// Solver output: snapshots at strictly increasing stored times sharing one
/// m array, plus how and when the run ended.
class SolutionHistory {
  public:
    SolutionHistory(GasModel model, Grid1D grid, FarField far, SolverConfig config)
        : model_(model), grid_(grid), far_(far), config_(config) {}

    const GasModel& model() const { return model_; }
    const Grid1D& grid() const { return grid_; }
    const FarField& far_field() const { return far_; }
    const SolverConfig& config() const { return config_; }

    size_t size() const { return snapshots_.size(); }
    const FieldSnapshot& at(size_t k) const { return *snapshots_.at(k); }
    std::shared_ptr<const FieldSnapshot> share(size_t k) const { return snapshots_.at(k); }
    const FieldSnapshot& front() const { return *snapshots_.front(); }
    const FieldSnapshot& back() const { return *snapshots_.back(); }

    StopReason stop_reason() const { return stop_reason_; }
    double t_stop() const { return snapshots_.empty() ? 0.0 : back().t(); }
    long steps_taken() const { return steps_taken_; }

    /// Index of the last stored time <= t (clamped to the ends).
    size_t index_at_or_before(double t) const;

    void append(std::shared_ptr<const FieldSnapshot> snap);
    void set_stop(StopReason reason) { stop_reason_ = reason; }
    void set_steps(long steps) { steps_taken_ = steps; }

  private:
    GasModel model_;
    Grid1D grid_;
    FarField far_;
    SolverConfig config_;
    std::vector<std::shared_ptr<const FieldSnapshot>> snapshots_;
    StopReason stop_reason_ = StopReason::HorizonReached;
    long steps_taken_ = 0;
};

/// Time loop from an arbitrary initial snapshot.
SolutionHistory run_from(FieldSnapshot initial, const SolverConfig& config);

/// Time loop for a scenario on a grid sized by the caller.
SolutionHistory run(const Scenario& scenario, const Grid1D& grid, const SolverConfig& config);

} // namespace euler1d
