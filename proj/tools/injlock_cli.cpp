// Command-line front end. Talks to the simulator only through the C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "injlock/injlock.h"

namespace {

struct ConfigDeleter {
  void operator()(injlock_config* c) const { injlock_config_free(c); }
};
using ConfigPtr = std::unique_ptr<injlock_config, ConfigDeleter>;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::string curve_csv;
  std::uint64_t seed = 0;
  std::uint64_t pulses = 0;
  unsigned threads = 0;
};

int report(injlock_status status) {
  if (status != INJLOCK_OK) {
    std::fprintf(stderr, "injlock: %s\n", injlock_last_error());
    return static_cast<int>(status);
  }
  std::fputs(injlock_last_summary(), stdout);
  return 0;
}

// Either an explicit list or lo,hi,step expanded inclusively.
std::vector<double> expand(const std::vector<double>& list, const std::vector<double>& range) {
  if (!list.empty()) return list;
  std::vector<double> out;
  if (range.size() == 3 && range[2] > 0.0) {
    for (double v = range[0]; v <= range[1] * (1.0 + 1e-12); v += range[2]) out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Injection-locking attack simulator for QKD transmitters"};
  app.set_version_flag("--version", std::string(injlock_version()));
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file (empty file = defaults)");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--seed", g.seed, "Monte Carlo seed");
  app.add_option("--pulses", g.pulses, "Monte Carlo pulse count")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--curve", g.curve_csv, "Read the transmittance curve from CSV instead of simulating it");
  bool seed_set = false;

  double amplitude = 1.7;
  double detuning_hz = 251e6;
  auto* dynamics = app.add_subcommand("dynamics", "Integrate the injected laser and export trajectory + spectrum");
  dynamics->add_option("--amplitude", amplitude, "Normalized injection amplitude E_x");
  dynamics->add_option("--detuning-hz", detuning_hz, "Master minus slave frequency (Hz)");

  std::vector<double> powers;
  std::vector<double> power_range;
  auto* curve = app.add_subcommand("locking-curve", "Simulate the transmittance curve eta(p)");
  curve->add_option("--powers", powers, "Injection powers (W)")->delimiter(',');
  curve->add_option("--range", power_range, "LO HI STEP in W")->expected(3);

  double attack_power = -1.0;
  double attack_isolation = -1.0;
  double background = -1.0;
  auto* attack = app.add_subcommand("attack", "Monte Carlo of the 16 Alice/Eve combinations");
  attack->add_option("--power", attack_power, "Injection power at the chip (W)");
  attack->add_option("--isolation-db", attack_isolation, "Added isolation (dB)");
  attack->add_option("--background", background, "Per-pulse background count probability");

  std::vector<double> db_list{0.0, 1.0, 3.0};
  auto* isolation = app.add_subcommand("isolation-sweep", "Attack rates versus added isolation");
  isolation->add_option("--db", db_list, "Isolation settings (dB)")->delimiter(',');
  isolation->add_option("--power", attack_power, "Injection power at the chip (W)");
  isolation->add_option("--background", background, "Per-pulse background count probability");

  std::string protocol = "all";
  std::vector<double> security_powers{50e-9, 100e-9, 150e-9, 200e-9};
  auto* security = app.add_subcommand("security", "QBER and key rate versus distance");
  security->add_option("--protocol", protocol, "bb84, decoy, sps or all")
      ->check(CLI::IsMember({"bb84", "decoy", "sps", "all"}));
  security->add_option("--powers", security_powers, "Injection powers (W)")->delimiter(',');

  auto* success = app.add_subcommand("success-vs-power", "Analytic success rate and eta_total versus power");
  success->add_option("--powers", powers, "Injection powers (W)")->delimiter(',');
  success->add_option("--range", power_range, "LO HI STEP in W")->expected(3);

  std::string target;
  auto* reproduce = app.add_subcommand("reproduce", "Regenerate a figure or table dataset");
  reproduce->add_option("target", target, "fig2, fig3, fig5, fig6, table2 or all")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig5", "fig6", "table2", "all"}));

  std::string save_path;
  auto* show = app.add_subcommand("config", "Write the effective configuration as JSON");
  show->add_option("path", save_path, "Destination (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  seed_set = app.count("--seed") > 0;

  injlock_config* raw = nullptr;
  injlock_status st = g.config_path.empty() ? injlock_config_default(&raw)
                                            : injlock_config_load(g.config_path.c_str(), &raw);
  if (st != INJLOCK_OK) return report(st);
  ConfigPtr cfg(raw);

  auto apply = [&](injlock_status s) {
    if (st == INJLOCK_OK) st = s;
  };
  if (!g.out_dir.empty()) apply(injlock_config_set_output_dir(cfg.get(), g.out_dir.c_str()));
  if (seed_set) apply(injlock_config_set_seed(cfg.get(), g.seed));
  if (g.pulses > 0) apply(injlock_config_set_pulses(cfg.get(), g.pulses));
  if (g.threads > 0) apply(injlock_config_set_threads(cfg.get(), g.threads));
  if (!g.curve_csv.empty()) apply(injlock_config_set_curve_csv(cfg.get(), g.curve_csv.c_str()));
  if (attack_power >= 0.0) apply(injlock_config_set_number(cfg.get(), "attack.injection_power_w", attack_power));
  if (attack_isolation >= 0.0) apply(injlock_config_set_number(cfg.get(), "attack.isolation_db", attack_isolation));
  if (background >= 0.0) apply(injlock_config_set_number(cfg.get(), "attack.background_rate", background));
  if (st != INJLOCK_OK) return report(st);

  if (*dynamics) return report(injlock_cmd_dynamics(cfg.get(), amplitude, detuning_hz));
  if (*curve) {
    const auto grid = expand(powers, power_range);
    return report(injlock_cmd_locking_curve(cfg.get(), grid.data(), grid.size()));
  }
  if (*attack) return report(injlock_cmd_attack(cfg.get()));
  if (*isolation) return report(injlock_cmd_isolation_sweep(cfg.get(), db_list.data(), db_list.size()));
  if (*security) {
    injlock_protocol p = INJLOCK_PROTOCOL_ALL;
    if (protocol == "bb84") p = INJLOCK_PROTOCOL_BB84;
    if (protocol == "decoy") p = INJLOCK_PROTOCOL_DECOY;
    if (protocol == "sps") p = INJLOCK_PROTOCOL_SPS;
    return report(injlock_cmd_security(cfg.get(), p, security_powers.data(), security_powers.size()));
  }
  if (*success) {
    const auto grid = expand(powers, power_range);
    return report(injlock_cmd_success_vs_power(cfg.get(), grid.data(), grid.size()));
  }
  if (*reproduce) return report(injlock_cmd_reproduce(cfg.get(), target.c_str()));
  if (*show) {
    const char* dest = save_path.empty() ? "/dev/stdout" : save_path.c_str();
    const injlock_status s = injlock_config_save(cfg.get(), dest);
    if (s != INJLOCK_OK) std::fprintf(stderr, "injlock: %s\n", injlock_last_error());
    return static_cast<int>(s);
  }
  return 1;
}
