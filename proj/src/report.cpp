#include "report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv_io.hpp"
#include "errors.hpp"

namespace injlock {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Collects artifacts of one command. Files written before a failure are
// deleted when the writer is destroyed uncommitted.
class ArtifactWriter {
 public:
  ArtifactWriter(fs::path dir, std::string command, const RunConfig& config, Json parameters)
      : dir_(std::move(dir)), command_(std::move(command)), config_(config), parameters_(std::move(parameters)) {
    std::error_code ec;
    if (!fs::exists(dir_, ec)) {
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
      created_dirs_.push_back(dir_);
    } else if (!fs::is_directory(dir_, ec)) {
      throw IoError("output path '" + dir_.string() + "' is not a directory");
    }
  }

  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  ~ArtifactWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& name : files_) fs::remove(dir_ / name, ec);
    for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

  void write(const std::string& name, const std::string& content) {
    files_.push_back(name);
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  }

  CommandResult commit(std::string summary) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config_)));
    Json manifest = {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"command", command_},
        {"config_hash", hash},
        {"seed", config_.attack.seed},
        {"num_pulses", config_.attack.num_pulses},
        {"parameters", parameters_},
        {"files", files_},
    };
    write(kManifestName, manifest.dump(2) + "\n");
    committed_ = true;
    return {dir_, files_, std::move(summary)};
  }

 private:
  fs::path dir_;
  std::string command_;
  const RunConfig& config_;
  Json parameters_;
  std::vector<std::string> files_;
  std::vector<fs::path> created_dirs_;
  bool committed_ = false;
};

std::string nano_label(double watts) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%gnW", watts * 1e9);
  return buf;
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
  return buf;
}

std::string describe(const AttackRates& r) {
  return "success " + percent(r.success_rate) + ", error " + percent(r.error_rate) + ", loss " +
         percent(r.loss_rate) + ", kept-data error " + percent(r.kept_error_rate);
}

Json double_list(std::span<const double> xs) { return Json(std::vector<double>(xs.begin(), xs.end())); }

void require_non_empty(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw InvalidArgument(std::string(what) + " list is empty");
}

CommandResult locking_curve_in(const fs::path& dir, const RunConfig& config, std::span<const double> grid) {
  require_non_empty(grid, "power grid");
  ArtifactWriter out(dir, "locking-curve", config, {{"power_grid_w", double_list(grid)}});
  const TransmittanceCurve curve = build_curve(grid, config.locking_setup(), config.threads);
  out.write("curve.csv", csv::curve_csv(curve));
  return out.commit("transition power " + nano_label(curve.transition_power()) + " over " +
                    std::to_string(curve.size()) + " grid points\n");
}

CommandResult attack_in(const fs::path& dir, const RunConfig& config, const TransmittanceCurve& curve) {
  ArtifactWriter out(dir, "attack", config,
                     {{"injection_power_w", config.attack.injection_power},
                      {"isolation_db", config.attack.isolation_db}});
  const MonteCarloResult mc = run_monte_carlo(config.attack, curve, config.threads);
  out.write("histogram.csv", csv::histogram_csv(mc.histogram));
  const csv::RatesRow row{config.attack.injection_power, config.attack.isolation_db, mc.rates};
  out.write("rates.csv", csv::rates_csv(std::span(&row, 1)));
  return out.commit("attack at " + nano_label(config.attack.injection_power) + ": " + describe(mc.rates) + " (" +
                    std::to_string(mc.histogram.transmitted()) + " of " +
                    std::to_string(mc.histogram.emitted()) + " pulses transmitted)\n");
}

CommandResult isolation_in(const fs::path& dir, const RunConfig& config, const TransmittanceCurve& curve,
                           std::span<const double> db) {
  require_non_empty(db, "isolation");
  ArtifactWriter out(dir, "isolation-sweep", config,
                     {{"injection_power_w", config.attack.injection_power}, {"isolation_db", double_list(db)}});
  const auto sweep = isolation_sweep(config.attack, curve, db, config.threads);
  std::vector<csv::RatesRow> rows;
  std::string summary;
  for (const auto& pt : sweep) {
    rows.push_back({config.attack.injection_power, pt.isolation_db, pt.rates});
    char head[48];
    std::snprintf(head, sizeof head, "%g dB: ", pt.isolation_db);
    summary += head + describe(pt.rates) + "\n";
  }
  out.write("rates.csv", csv::rates_csv(rows));
  return out.commit(summary);
}

CommandResult security_in(const fs::path& dir, const RunConfig& config, const TransmittanceCurve& curve,
                          std::optional<Protocol> protocol, std::span<const double> powers) {
  require_non_empty(powers, "injection power");
  std::vector<Protocol> protocols;
  if (protocol) {
    protocols.push_back(*protocol);
  } else {
    protocols = {Protocol::Bb84Wcp, Protocol::DecoyBb84, Protocol::Sps};
  }
  Json proto_names = Json::array();
  for (Protocol p : protocols) proto_names.push_back(std::string(to_string(p)));
  ArtifactWriter out(dir, "security", config,
                     {{"protocols", proto_names}, {"injection_powers_w", double_list(powers)}});

  const std::vector<double> distances = config.distances.grid();
  std::string ranges = std::string(csv::kInsecureRangeHeader) + "\n";
  std::string summary;
  for (Protocol p : protocols) {
    SourceParams source = config.sources;
    source.protocol = p;
    const std::string name(to_string(p));
    const auto baseline = security_curve(source, distances, config.channel, AttackContext{});
    out.write("security_" + name + "_baseline.csv", csv::security_csv(baseline));
    for (double power : powers) {
      const AttackContext ctx = make_attack_context(power, curve, config.filter.peak_transmittance);
      const auto attacked = security_curve(source, distances, config.channel, ctx);
      out.write("security_" + name + "_" + nano_label(power) + ".csv", csv::security_csv(attacked));
      const auto spans = insecure_range(attacked);
      summary += name + " @ " + nano_label(power) + ": eta_total " + csv::format_number(ctx.eta_attack) +
                 ", eve_info " + percent(ctx.eve_info) + ", insecure";
      if (spans.empty()) summary += " none";
      for (const auto& [lo, hi] : spans) {
        ranges += name + "," + csv::format_number(power) + "," + csv::format_number(lo) + "," +
                  csv::format_number(hi) + "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, " [%g, %g] km", lo, hi);
        summary += buf;
      }
      summary += "\n";
    }
  }
  out.write("insecure_ranges.csv", ranges);
  return out.commit(summary);
}

CommandResult success_in(const fs::path& dir, const RunConfig& config, const TransmittanceCurve& curve,
                         std::span<const double> powers) {
  require_non_empty(powers, "power grid");
  ArtifactWriter out(dir, "success-vs-power", config, {{"power_grid_w", double_list(powers)}});
  std::string success = std::string(csv::kSuccessHeader) + "\n";
  std::string transmittance = std::string(csv::kTransmittanceHeader) + "\n";
  double best_rate = -1.0;
  double best_power = 0.0;
  for (double p : powers) {
    const double s = success_rate_analytic(p, curve);
    const double t = eta_total(p, curve);
    success += csv::format_number(p) + "," + csv::format_number(s) + "\n";
    transmittance += csv::format_number(p) + "," + csv::format_number(t) + "\n";
    if (s > best_rate) {
      best_rate = s;
      best_power = p;
    }
  }
  out.write("success_rate.csv", success);
  out.write("transmittance.csv", transmittance);
  return out.commit("peak success rate " + percent(best_rate) + " at " + nano_label(best_power) + "\n");
}

std::vector<double> nano_grid(double lo_nw, double hi_nw, double step_w) {
  return linear_grid(lo_nw * 1e-9, hi_nw * 1e-9, step_w);
}

}  // namespace

TransmittanceCurve obtain_curve(const RunConfig& config) {
  if (!config.curve.import_csv.empty()) return csv::read_curve(config.curve.import_csv);
  return build_curve(config.curve.grid(), config.locking_setup(), config.threads);
}

CommandResult cmd_dynamics(const RunConfig& config, double amplitude, double detuning_hz) {
  config.validate();
  ArtifactWriter out(config.output_dir, "dynamics", config,
                     {{"amplitude", amplitude}, {"detuning_hz", detuning_hz}});
  const LockingSetup setup = config.locking_setup();
  const InjectionDrive drive{amplitude, kTwoPi * detuning_hz};
  const FieldTrajectory traj = integrate_lk(setup.laser, drive, setup.grid);
  const Spectrum spec = analyze_spectrum(traj, setup.grid.settle_time);
  out.write("trajectory.csv", csv::trajectory_csv(traj));
  out.write("spectrum.csv", csv::spectrum_csv(spec));
  const double in_band = locked_power(spec, detuning_hz, config.filter.fwhm) / spec.total();
  const double eta = filter_transmission(spec, config.filter) / setup.laser.steady_photon_number;
  return out.commit("E_x " + csv::format_number(amplitude) + ": in-band fraction " + percent(in_band) +
                    ", filter transmittance " + csv::format_number(eta) + "\n");
}

CommandResult cmd_locking_curve(const RunConfig& config, std::span<const double> power_grid) {
  config.validate();
  if (power_grid.empty()) {
    const auto grid = config.curve.grid();
    return locking_curve_in(config.output_dir, config, grid);
  }
  return locking_curve_in(config.output_dir, config, power_grid);
}

CommandResult cmd_attack(const RunConfig& config) {
  config.validate();
  return attack_in(config.output_dir, config, obtain_curve(config));
}

CommandResult cmd_isolation_sweep(const RunConfig& config, std::span<const double> isolation_db) {
  config.validate();
  return isolation_in(config.output_dir, config, obtain_curve(config), isolation_db);
}

CommandResult cmd_security(const RunConfig& config, std::optional<Protocol> protocol,
                           std::span<const double> powers) {
  config.validate();
  return security_in(config.output_dir, config, obtain_curve(config), protocol, powers);
}

CommandResult cmd_success_vs_power(const RunConfig& config, std::span<const double> power_grid) {
  config.validate();
  const TransmittanceCurve curve = obtain_curve(config);
  if (power_grid.empty()) return success_in(config.output_dir, config, curve, curve.powers());
  return success_in(config.output_dir, config, curve, power_grid);
}

CommandResult cmd_reproduce(const RunConfig& config, std::string_view target) {
  config.validate();
  static constexpr std::string_view kTargets[] = {"fig2", "fig3", "fig5", "fig6", "table2"};
  bool known = target == "all";
  for (auto t : kTargets) known = known || t == target;
  if (!known) {
    throw InvalidArgument("unknown reproduce target '" + std::string(target) +
                          "' (expected fig2, fig3, fig5, fig6, table2 or all)");
  }

  RunConfig nominal = config;
  nominal.attack.injection_power = 110e-9;
  nominal.attack.isolation_db = 0.0;
  nominal.distances = DistanceGridSettings{150.0, 1.0};

  const fs::path root = config.output_dir;
  std::optional<TransmittanceCurve> curve;
  auto shared_curve = [&]() -> const TransmittanceCurve& {
    if (!curve) curve = obtain_curve(nominal);
    return *curve;
  };

  const std::vector<double> fig2_grid = nano_grid(0.0, 200.0, config.curve.power_step);
  const std::vector<double> fig6_grid = nano_grid(50.0, 200.0, config.curve.power_step);
  const std::vector<double> fig5_powers = {50e-9, 100e-9, 150e-9, 200e-9};
  const std::vector<double> table2_db = {0.0, 1.0, 3.0};

  auto run = [&](std::string_view t) -> CommandResult {
    const fs::path dir = root / std::string(t);
    if (t == "fig2") return locking_curve_in(dir, nominal, fig2_grid);
    if (t == "fig3") return attack_in(dir, nominal, shared_curve());
    if (t == "fig5") return security_in(dir, nominal, shared_curve(), std::nullopt, fig5_powers);
    if (t == "fig6") return success_in(dir, nominal, shared_curve(), fig6_grid);
    return isolation_in(dir, nominal, shared_curve(), table2_db);
  };

  if (target != "all") {
    CommandResult r = run(target);
    r.summary = std::string(target) + ":\n" + r.summary;
    return r;
  }
  CommandResult combined;
  combined.directory = root;
  for (auto t : kTargets) {
    CommandResult r = run(t);
    for (const auto& f : r.files) combined.files.push_back(std::string(t) + "/" + f);
    combined.summary += std::string(t) + ":\n" + r.summary;
  }
  return combined;
}

}  // namespace injlock
