#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gflow/grid_measures.hpp"

namespace gflow {

inline constexpr const char* kToolName = "gflow";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by all commands.
enum ExitCode : int {
    kExitPass = 0,
    kExitCheckFailure = 1,
    kExitSolverFailure = 2,
    kExitConfigError = 3,
};

/// Flat key=value configuration with defaults, command-line overrides and a
/// deterministic hash of the fully resolved state.
class ExperimentConfig {
public:
    ExperimentConfig() = default;

    /// Parses `key = value` lines; '#' starts a comment.
    static ExperimentConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t def) const;
    std::vector<double> get_list(const std::string& key, const std::string& def) const;

    /// Copy with defaults filled in for missing keys.
    ExperimentConfig resolved(
        const std::vector<std::pair<std::string, std::string>>& defaults) const;

    /// Sorted `key=value` lines.
    std::string canonical() const;
    /// FNV-1a over the canonical form, as 16 hex digits.
    std::string hash() const;

private:
    std::map<std::string, std::string> kv_;
};

/// Built-in density catalog: "uniform", "cosine" (1 + amp cos(2 pi x/L))/L,
/// "tilt" (1 + slope (2x/L - 1))/L.
GridDensity catalog_density(const std::string& name, int n_cells, double L, double amp);

/// Smooth random density in the A_delta window: a few low Fourier modes with
/// sup-norm 0.85 delta, deterministic per seed.
GridDensity random_smooth_density(int n_cells, double L, double delta, std::uint64_t seed);

int cmd_gamma_sweep(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_bridge_solve(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_jko_run(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_particles_run(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_seminorm_check(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_tildeq_report(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Dispatch by command name with exception-to-exit-code mapping.
int run_command(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir,
                std::ostream& log);

}  // namespace gflow
