#include "config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace injlock {

namespace {

using Json = nlohmann::json;
using FieldRef = std::variant<double*, std::uint64_t*, unsigned*, std::string*>;
static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t fields share the uint64 slot");

struct Field {
  std::string_view section;  // empty for top-level keys
  std::string_view key;
  std::function<FieldRef(RunConfig&)> ref;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"laser", "alpha", [](RunConfig& c) -> FieldRef { return &c.laser.alpha; }},
      {"laser", "gain_coeff", [](RunConfig& c) -> FieldRef { return &c.laser.gain_coeff; }},
      {"laser", "feed_in_rate", [](RunConfig& c) -> FieldRef { return &c.laser.feed_in_rate; }},
      {"laser", "carrier_lifetime", [](RunConfig& c) -> FieldRef { return &c.laser.carrier_lifetime; }},
      {"laser", "photon_lifetime", [](RunConfig& c) -> FieldRef { return &c.laser.photon_lifetime; }},
      {"laser", "steady_photon_number", [](RunConfig& c) -> FieldRef { return &c.laser.steady_photon_number; }},
      {"laser", "facet_loss", [](RunConfig& c) -> FieldRef { return &c.laser.facet_loss; }},
      {"laser", "group_velocity", [](RunConfig& c) -> FieldRef { return &c.laser.group_velocity; }},
      {"laser", "photon_energy_ev", [](RunConfig& c) -> FieldRef { return &c.photon_energy_ev; }},
      {"simulation", "dt", [](RunConfig& c) -> FieldRef { return &c.grid.dt; }},
      {"simulation", "duration", [](RunConfig& c) -> FieldRef { return &c.grid.duration; }},
      {"simulation", "settle_time", [](RunConfig& c) -> FieldRef { return &c.grid.settle_time; }},
      {"simulation", "sample_stride", [](RunConfig& c) -> FieldRef { return &c.grid.sample_stride; }},
      {"simulation", "detuning_hz", [](RunConfig& c) -> FieldRef { return &c.detuning_hz; }},
      {"filter", "center_hz", [](RunConfig& c) -> FieldRef { return &c.filter.center; }},
      {"filter", "fwhm_hz", [](RunConfig& c) -> FieldRef { return &c.filter.fwhm; }},
      {"filter", "peak_transmittance", [](RunConfig& c) -> FieldRef { return &c.filter.peak_transmittance; }},
      {"calibration", "watts_per_unit_amplitude_sq",
       [](RunConfig& c) -> FieldRef { return &c.calibration.watts_per_unit_amplitude_sq; }},
      {"curve", "power_min_w", [](RunConfig& c) -> FieldRef { return &c.curve.power_min; }},
      {"curve", "power_max_w", [](RunConfig& c) -> FieldRef { return &c.curve.power_max; }},
      {"curve", "power_step_w", [](RunConfig& c) -> FieldRef { return &c.curve.power_step; }},
      {"curve", "import_csv", [](RunConfig& c) -> FieldRef { return &c.curve.import_csv; }},
      {"channel", "loss_db_per_km", [](RunConfig& c) -> FieldRef { return &c.channel.loss_coeff; }},
      {"channel", "dark_count", [](RunConfig& c) -> FieldRef { return &c.channel.dark_count; }},
      {"channel", "detector_error", [](RunConfig& c) -> FieldRef { return &c.channel.detector_error; }},
      {"channel", "detector_eff", [](RunConfig& c) -> FieldRef { return &c.channel.detector_eff; }},
      {"channel", "ec_efficiency", [](RunConfig& c) -> FieldRef { return &c.channel.ec_efficiency; }},
      {"channel", "dark_error", [](RunConfig& c) -> FieldRef { return &c.channel.dark_error; }},
      {"sources", "mu1", [](RunConfig& c) -> FieldRef { return &c.sources.mu1; }},
      {"sources", "mu2", [](RunConfig& c) -> FieldRef { return &c.sources.mu2; }},
      {"sources", "nu2", [](RunConfig& c) -> FieldRef { return &c.sources.nu2; }},
      {"attack", "injection_power_w", [](RunConfig& c) -> FieldRef { return &c.attack.injection_power; }},
      {"attack", "isolation_db", [](RunConfig& c) -> FieldRef { return &c.attack.isolation_db; }},
      {"attack", "num_pulses", [](RunConfig& c) -> FieldRef { return &c.attack.num_pulses; }},
      {"attack", "seed", [](RunConfig& c) -> FieldRef { return &c.attack.seed; }},
      {"attack", "background_rate", [](RunConfig& c) -> FieldRef { return &c.attack.background_rate; }},
      {"security", "distance_max_km", [](RunConfig& c) -> FieldRef { return &c.distances.max_km; }},
      {"security", "distance_step_km", [](RunConfig& c) -> FieldRef { return &c.distances.step_km; }},
      {"", "threads", [](RunConfig& c) -> FieldRef { return &c.threads; }},
      {"", "output_dir", [](RunConfig& c) -> FieldRef { return &c.output_dir; }},
  };
  return table;
}

std::string dotted(std::string_view section, std::string_view key) {
  return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw ConfigError(ConfigError::Kind::Validation, key, key + ": " + what);
}

template <typename Int>
void assign_integer(Int* dst, const Json& v, const std::string& key) {
  if (!v.is_number_unsigned()) invalid(key, "expected a non-negative integer");
  const auto raw = v.get<std::uint64_t>();
  if (raw > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) invalid(key, "value out of range");
  *dst = static_cast<Int>(raw);
}

void assign(const Field& f, RunConfig& cfg, const Json& v) {
  const std::string key = dotted(f.section, f.key);
  std::visit(
      [&](auto* dst) {
        using T = std::remove_pointer_t<decltype(dst)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) invalid(key, "expected a number");
          *dst = v.get<double>();
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) invalid(key, "expected a string");
          *dst = v.get<std::string>();
        } else {
          assign_integer(dst, v, key);
        }
      },
      f.ref(cfg));
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const Field& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

bool is_section(std::string_view name) {
  for (const Field& f : fields()) {
    if (!f.section.empty() && f.section == name) return true;
  }
  return false;
}

Json to_json(const RunConfig& config) {
  RunConfig copy = config;
  Json j = Json::object();
  for (const Field& f : fields()) {
    Json value;
    std::visit([&](auto* src) { value = *src; }, f.ref(copy));
    if (f.section.empty()) {
      j[std::string(f.key)] = value;
    } else {
      j[std::string(f.section)][std::string(f.key)] = value;
    }
  }
  return j;
}

void positive(const std::string& key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(key, "must be finite and strictly positive");
}

void non_negative(const std::string& key, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) invalid(key, "must be finite and non-negative");
}

void probability(const std::string& key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) invalid(key, "must lie in [0, 1]");
}

}  // namespace

LaserParams RunConfig::laser_params() const {
  LaserParams p = laser;
  p.photon_energy = photon_energy_ev * kElectronVolt;
  return p;
}

LockingSetup RunConfig::locking_setup() const {
  LockingSetup s;
  s.laser = laser_params();
  s.filter = filter;
  s.calibration = calibration;
  s.grid = grid;
  s.detuning = kTwoPi * detuning_hz;
  return s;
}

void RunConfig::validate() const {
  positive("laser.alpha", laser.alpha);
  positive("laser.gain_coeff", laser.gain_coeff);
  positive("laser.feed_in_rate", laser.feed_in_rate);
  positive("laser.carrier_lifetime", laser.carrier_lifetime);
  positive("laser.photon_lifetime", laser.photon_lifetime);
  positive("laser.steady_photon_number", laser.steady_photon_number);
  positive("laser.facet_loss", laser.facet_loss);
  positive("laser.group_velocity", laser.group_velocity);
  positive("laser.photon_energy_ev", photon_energy_ev);
  if (!(laser.carrier_lifetime > laser.photon_lifetime)) {
    invalid("laser.carrier_lifetime", "must exceed laser.photon_lifetime");
  }

  positive("simulation.dt", grid.dt);
  positive("simulation.duration", grid.duration);
  non_negative("simulation.settle_time", grid.settle_time);
  if (!(grid.settle_time < grid.duration)) invalid("simulation.settle_time", "must be less than duration");
  if (grid.sample_stride == 0) invalid("simulation.sample_stride", "must be at least 1");
  if (!std::isfinite(detuning_hz)) invalid("simulation.detuning_hz", "must be finite");
  if (detuning_hz != 0.0 && grid.dt > 1.0 / (20.0 * std::abs(detuning_hz))) {
    invalid("simulation.dt", "does not resolve the detuning (need dt <= 1/(20 f))");
  }

  if (!std::isfinite(filter.center)) invalid("filter.center_hz", "must be finite");
  positive("filter.fwhm_hz", filter.fwhm);
  if (!(filter.peak_transmittance > 0.0 && filter.peak_transmittance <= 1.0)) {
    invalid("filter.peak_transmittance", "must lie in (0, 1]");
  }
  positive("calibration.watts_per_unit_amplitude_sq", calibration.watts_per_unit_amplitude_sq);

  non_negative("curve.power_min_w", curve.power_min);
  non_negative("curve.power_max_w", curve.power_max);
  if (curve.power_max < curve.power_min) invalid("curve.power_max_w", "must not be below power_min_w");
  positive("curve.power_step_w", curve.power_step);

  positive("channel.loss_db_per_km", channel.loss_coeff);
  probability("channel.dark_count", channel.dark_count);
  probability("channel.detector_error", channel.detector_error);
  probability("channel.detector_eff", channel.detector_eff);
  probability("channel.dark_error", channel.dark_error);
  if (!(channel.ec_efficiency >= 1.0) || !std::isfinite(channel.ec_efficiency)) {
    invalid("channel.ec_efficiency", "must be at least 1");
  }

  positive("sources.mu1", sources.mu1);
  positive("sources.mu2", sources.mu2);
  positive("sources.nu2", sources.nu2);
  if (!(sources.nu2 < sources.mu2)) invalid("sources.nu2", "must be smaller than sources.mu2");

  non_negative("attack.injection_power_w", attack.injection_power);
  non_negative("attack.isolation_db", attack.isolation_db);
  if (attack.num_pulses < 1) invalid("attack.num_pulses", "must be at least 1");
  if (!(attack.background_rate >= 0.0 && attack.background_rate < 1.0)) {
    invalid("attack.background_rate", "must lie in [0, 1)");
  }

  non_negative("security.distance_max_km", distances.max_km);
  positive("security.distance_step_km", distances.step_km);

  if (threads < 1) invalid("threads", "must be at least 1");
  if (output_dir.empty()) invalid("output_dir", "must not be empty");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    cfg.validate();
    return cfg;
  }

  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Syntax, "", std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError(ConfigError::Kind::Syntax, "", "config root must be a JSON object");

  for (const auto& [name, value] : j.items()) {
    if (const Field* f = find_field("", name)) {
      assign(*f, cfg, value);
      continue;
    }
    if (!is_section(name)) invalid(name, "unknown key");
    if (!value.is_object()) invalid(name, "section must be an object");
    for (const auto& [key, inner] : value.items()) {
      const Field* f = find_field(name, key);
      if (f == nullptr) invalid(dotted(name, key), "unknown key");
      assign(*f, cfg, inner);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(ConfigError::Kind::MissingFile, "", "cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write config file '" + path.string() + "'");
  out << dump_config(config);
  if (!out) throw IoError("failed writing config file '" + path.string() + "'");
}

namespace {

const Field& field_for(std::string_view key) {
  const auto dot = key.find('.');
  const std::string_view section = dot == std::string_view::npos ? std::string_view{} : key.substr(0, dot);
  const std::string_view name = dot == std::string_view::npos ? key : key.substr(dot + 1);
  const Field* f = find_field(section, name);
  if (f == nullptr) invalid(std::string(key), "unknown key");
  return *f;
}

}  // namespace

void set_config_number(RunConfig& config, std::string_view key, double value) {
  const Field& f = field_for(key);
  RunConfig copy = config;
  const std::string name(key);
  std::visit(
      [&](auto* dst) {
        using T = std::remove_pointer_t<decltype(dst)>;
        if constexpr (std::is_same_v<T, double>) {
          *dst = value;
        } else if constexpr (std::is_same_v<T, std::string>) {
          invalid(name, "is not numeric");
        } else {
          if (!(value >= 0.0) || value != std::floor(value) ||
              value > static_cast<double>(std::numeric_limits<T>::max())) {
            invalid(name, "expected a non-negative integer");
          }
          *dst = static_cast<T>(value);
        }
      },
      f.ref(copy));
  copy.validate();
  config = std::move(copy);
}

double get_config_number(const RunConfig& config, std::string_view key) {
  const Field& f = field_for(key);
  RunConfig copy = config;
  const std::string name(key);
  return std::visit(
      [&](auto* src) -> double {
        using T = std::remove_pointer_t<decltype(src)>;
        if constexpr (std::is_same_v<T, std::string>) {
          invalid(name, "is not numeric");
        } else {
          return static_cast<double>(*src);
        }
      },
      f.ref(copy));
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string canonical = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace injlock
