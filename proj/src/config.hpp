#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "attack_sim.hpp"
#include "locking_response.hpp"
#include "qkd_security.hpp"

namespace injlock {

struct CurveGridSettings {
  double power_min = 0.0;       // W
  double power_max = 200e-9;    // W
  double power_step = 2.5e-9;   // W
  std::string import_csv;       // when set, the curve is read instead of simulated

  std::vector<double> grid() const { return linear_grid(power_min, power_max, power_step); }
};

struct DistanceGridSettings {
  double max_km = 150.0;
  double step_km = 1.0;

  std::vector<double> grid() const { return linear_grid(0.0, max_km, step_km); }
};

// Aggregate run configuration. Defaults are the shipped laser and link
// parameters.
struct RunConfig {
  LaserParams laser;  // laser.photon_energy is derived from photon_energy_ev
  double photon_energy_ev = 1.456;
  SimGrid grid;
  double detuning_hz = 251e6;
  FilterModel filter;
  PowerCalibration calibration;
  CurveGridSettings curve;
  ChannelParams channel;
  SourceParams sources;
  AttackConfig attack;
  DistanceGridSettings distances;
  unsigned threads = 1;
  std::string output_dir = "out";

  LaserParams laser_params() const;
  LockingSetup locking_setup() const;

  // Throws ConfigError(Validation) naming the offending dotted key.
  void validate() const;
};

// JSON with one object per section. An empty (or whitespace-only) file yields
// the defaults; unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
std::string dump_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::filesystem::path& path);

// Numeric access by dotted key ("attack.seed"). Setting re-validates and
// leaves the config untouched on failure.
void set_config_number(RunConfig& config, std::string_view key, double value);
double get_config_number(const RunConfig& config, std::string_view key);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace injlock
