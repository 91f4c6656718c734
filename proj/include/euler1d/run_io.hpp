#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "euler1d/characteristics.hpp"
#include "euler1d/scenario.hpp"
#include "euler1d/solver.hpp"

namespace euler1d {

/// Flat "key = value" text file: the format of both run manifests and user
/// config files.  Keys keep insertion order on write; '#' starts a comment.
class KeyValueFile {
  public:
    static KeyValueFile parse(std::istream& is);
    static KeyValueFile parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const; ///< throws if missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long value);

    void write(std::ostream& os) const;
    void write_file(const std::filesystem::path& path) const;

    const std::vector<std::string>& keys() const { return order_; }

  private:
    std::vector<std::string> order_;
    std::map<std::string, std::string> values_;
};

/// One snapshot as CSV.  Columns: x,u,eta,m,tau,rho,p,c,s,r,alpha,beta and,
/// when epsilon > 0, alpha_eps,beta_eps.  Values carry 17 significant digits
/// so a read-back is bit-exact.
void write_snapshot_csv(std::ostream& os, const FieldSnapshot& snap, double epsilon);

/// A traced characteristic with its Riccati data, one row per sample:
/// t,x,eta,m,c,k1,k2,k1_eps,k2_eps,carried_value,field_value.
void write_path_csv(std::ostream& os, const CharacteristicPath& path);

/// Everything simulate knows that the snapshots alone do not carry.
struct RunMetadata {
    ScenarioSpec scenario;
    SolverConfig config;
    StopReason stop_reason = StopReason::HorizonReached;
    long steps_taken = 0;
};

/// Writes manifest.txt, entropy.csv (x, m, m_x once for the whole run) and
/// one numbered snapshot CSV per stored time into dir (created if needed).
void save_run(const std::filesystem::path& dir, const SolutionHistory& history,
              const ScenarioSpec& spec);

/// Rebuilds the history (and optionally the metadata) from a run directory.
/// The shared m and m_x arrays come from entropy.csv, so derived quantities
/// recompute bit-identically to the original run.
SolutionHistory load_run(const std::filesystem::path& dir, RunMetadata* metadata = nullptr);

/// Scenario parameters <-> flat keys (used by manifests and config files).
void spec_to_keys(const ScenarioSpec& spec, KeyValueFile& kv);
ScenarioSpec spec_from_keys(const KeyValueFile& kv);
void config_to_keys(const SolverConfig& config, KeyValueFile& kv);
SolverConfig config_from_keys(const KeyValueFile& kv);

} // namespace euler1d
