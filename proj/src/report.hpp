#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace injlock {

inline constexpr const char* kToolName = "injlock";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kManifestName = "manifest";

struct CommandResult {
  std::filesystem::path directory;
  std::vector<std::string> files;  // relative to directory, manifest last
  std::string summary;
};

// Either reads config.curve.import_csv or simulates the configured grid.
TransmittanceCurve obtain_curve(const RunConfig& config);

// Every command writes into config.output_dir; on failure any file it created
// is removed again.
CommandResult cmd_dynamics(const RunConfig& config, double amplitude, double detuning_hz);
// An empty grid means config.curve.
CommandResult cmd_locking_curve(const RunConfig& config, std::span<const double> power_grid);
CommandResult cmd_attack(const RunConfig& config);
CommandResult cmd_isolation_sweep(const RunConfig& config, std::span<const double> isolation_db);
// protocol == nullopt runs all three source models.
CommandResult cmd_security(const RunConfig& config, std::optional<Protocol> protocol,
                           std::span<const double> powers);
// An empty grid means the curve's own grid.
CommandResult cmd_success_vs_power(const RunConfig& config, std::span<const double> power_grid);

// target: fig2, fig3, fig5, fig6, table2, or all. Output goes to
// <output_dir>/<target>.
CommandResult cmd_reproduce(const RunConfig& config, std::string_view target);

}  // namespace injlock
