#include "injlock/injlock.h"

#include <cstdio>
#include <exception>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "csv_io.hpp"
#include "errors.hpp"
#include "report.hpp"

using namespace injlock;

struct injlock_config {
  RunConfig value;
};

struct injlock_curve {
  TransmittanceCurve value;
};

struct injlock_trajectory {
  FieldTrajectory value;
};

struct injlock_spectrum {
  Spectrum value;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_summary;

injlock_status fail(injlock_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Translates the library's exceptions into status codes.
template <typename Fn>
injlock_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return INJLOCK_OK;
  } catch (const ConfigError& e) {
    switch (e.kind()) {
      case ConfigError::Kind::MissingFile: return fail(INJLOCK_ERR_CONFIG_MISSING, e.what());
      case ConfigError::Kind::Syntax: return fail(INJLOCK_ERR_CONFIG_SYNTAX, e.what());
      case ConfigError::Kind::Validation: return fail(INJLOCK_ERR_CONFIG, e.what());
    }
    return fail(INJLOCK_ERR_CONFIG, e.what());
  } catch (const DivergedIntegration& e) {
    return fail(INJLOCK_ERR_NUMERIC, e.what());
  } catch (const UndefinedRate& e) {
    return fail(INJLOCK_ERR_NUMERIC, e.what());
  } catch (const InvalidArgument& e) {
    return fail(INJLOCK_ERR_USAGE, e.what());
  } catch (const IoError& e) {
    return fail(INJLOCK_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(INJLOCK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(INJLOCK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(INJLOCK_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw InvalidArgument(std::string(name) + " must not be NULL");
}

std::span<const double> view(const double* data, std::size_t count) {
  if (count > 0) require(data, "array argument");
  return {data, count};
}

Protocol to_protocol(injlock_protocol p) {
  switch (p) {
    case INJLOCK_PROTOCOL_BB84: return Protocol::Bb84Wcp;
    case INJLOCK_PROTOCOL_DECOY: return Protocol::DecoyBb84;
    case INJLOCK_PROTOCOL_SPS: return Protocol::Sps;
    default: break;
  }
  throw InvalidArgument("unknown protocol");
}

injlock_rates to_c(const AttackRates& r) {
  return {r.success_rate, r.error_rate, r.loss_rate, r.kept_error_rate};
}

template <typename Fn>
injlock_status command(Fn&& fn) noexcept {
  return guarded([&] { last_summary = fn().summary; });
}

}  // namespace

extern "C" {

const char* injlock_version(void) { return kToolVersion; }
const char* injlock_last_error(void) { return last_error.c_str(); }
const char* injlock_last_summary(void) { return last_summary.c_str(); }

injlock_status injlock_config_default(injlock_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new injlock_config{RunConfig{}};
  });
}

injlock_status injlock_config_load(const char* path, injlock_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new injlock_config{load_config(path)};
  });
}

injlock_status injlock_config_save(const injlock_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "cfg");
    require(path, "path");
    save_config(cfg->value, path);
  });
}

void injlock_config_free(injlock_config* cfg) { delete cfg; }

injlock_status injlock_config_hash(const injlock_config* cfg, uint64_t* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = config_hash(cfg->value);
  });
}

injlock_status injlock_config_set_number(injlock_config* cfg, const char* key, double value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    set_config_number(cfg->value, key, value);
  });
}

injlock_status injlock_config_get_number(const injlock_config* cfg, const char* key, double* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(out, "out");
    *out = get_config_number(cfg->value, key);
  });
}

injlock_status injlock_config_set_seed(injlock_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->value.attack.seed = seed;
  });
}

injlock_status injlock_config_set_pulses(injlock_config* cfg, uint64_t pulses) {
  return guarded([&] {
    require(cfg, "cfg");
    if (pulses < 1) throw ConfigError(ConfigError::Kind::Validation, "attack.num_pulses",
                                      "attack.num_pulses: must be at least 1");
    cfg->value.attack.num_pulses = pulses;
  });
}

injlock_status injlock_config_set_threads(injlock_config* cfg, unsigned threads) {
  return guarded([&] {
    require(cfg, "cfg");
    if (threads < 1) throw ConfigError(ConfigError::Kind::Validation, "threads", "threads: must be at least 1");
    cfg->value.threads = threads;
  });
}

injlock_status injlock_config_set_output_dir(injlock_config* cfg, const char* dir) {
  return guarded([&] {
    require(cfg, "cfg");
    require(dir, "dir");
    if (*dir == '\0') throw ConfigError(ConfigError::Kind::Validation, "output_dir", "output_dir: must not be empty");
    cfg->value.output_dir = dir;
  });
}

injlock_status injlock_config_set_curve_csv(injlock_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->value.curve.import_csv = path ? path : "";
  });
}

injlock_status injlock_integrate(const injlock_config* cfg, double amplitude, double detuning_hz,
                                 injlock_trajectory** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const LockingSetup setup = cfg->value.locking_setup();
    auto traj = integrate_lk(setup.laser, InjectionDrive{amplitude, kTwoPi * detuning_hz}, setup.grid);
    *out = new injlock_trajectory{std::move(traj)};
  });
}

void injlock_trajectory_free(injlock_trajectory* traj) { delete traj; }

size_t injlock_trajectory_size(const injlock_trajectory* traj) { return traj ? traj->value.size() : 0; }

injlock_status injlock_trajectory_sample(const injlock_trajectory* traj, size_t index, double* t_s, double* re_e,
                                         double* im_e, double* delta_n) {
  return guarded([&] {
    require(traj, "traj");
    const FieldTrajectory& v = traj->value;
    if (index >= v.size()) throw InvalidArgument("trajectory index out of range");
    if (t_s) *t_s = v.times[index];
    if (re_e) *re_e = v.field[index].real();
    if (im_e) *im_e = v.field[index].imag();
    if (delta_n) *delta_n = v.carrier_dev[index];
  });
}

injlock_status injlock_spectrum_analyze(const injlock_trajectory* traj, double settle_time_s,
                                        injlock_spectrum** out) {
  return guarded([&] {
    require(traj, "traj");
    require(out, "out");
    *out = new injlock_spectrum{analyze_spectrum(traj->value, settle_time_s)};
  });
}

void injlock_spectrum_free(injlock_spectrum* spec) { delete spec; }

size_t injlock_spectrum_size(const injlock_spectrum* spec) { return spec ? spec->value.size() : 0; }

injlock_status injlock_spectrum_bin(const injlock_spectrum* spec, size_t index, double* freq_hz, double* power) {
  return guarded([&] {
    require(spec, "spec");
    if (index >= spec->value.size()) throw InvalidArgument("spectrum index out of range");
    if (freq_hz) *freq_hz = spec->value.freqs[index];
    if (power) *power = spec->value.power[index];
  });
}

injlock_status injlock_spectrum_locked_power(const injlock_spectrum* spec, double center_hz, double bandwidth_hz,
                                             double* out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = locked_power(spec->value, center_hz, bandwidth_hz);
  });
}

injlock_status injlock_photon_number_to_power(const injlock_config* cfg, double photons, double* watts) {
  return guarded([&] {
    require(cfg, "cfg");
    require(watts, "watts");
    *watts = photon_number_to_power(photons, cfg->value.laser_params());
  });
}

injlock_status injlock_curve_build(const injlock_config* cfg, const double* powers, size_t count,
                                   injlock_curve** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    if (count == 0) {
      *out = new injlock_curve{obtain_curve(cfg->value)};
    } else {
      *out = new injlock_curve{build_curve(view(powers, count), cfg->value.locking_setup(), cfg->value.threads)};
    }
  });
}

injlock_status injlock_curve_from_points(const double* powers, const double* eta, size_t count,
                                         injlock_curve** out) {
  return guarded([&] {
    require(out, "out");
    const auto p = view(powers, count);
    const auto e = view(eta, count);
    *out = new injlock_curve{TransmittanceCurve({p.begin(), p.end()}, {e.begin(), e.end()})};
  });
}

injlock_status injlock_curve_read_csv(const char* path, injlock_curve** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new injlock_curve{csv::read_curve(path)};
  });
}

injlock_status injlock_curve_write_csv(const injlock_curve* curve, const char* path) {
  return guarded([&] {
    require(curve, "curve");
    require(path, "path");
    std::FILE* f = std::fopen(path, "wb");
    if (f == nullptr) throw IoError(std::string("cannot write '") + path + "'");
    const std::string text = csv::curve_csv(curve->value);
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) throw IoError(std::string("failed writing '") + path + "'");
  });
}

void injlock_curve_free(injlock_curve* curve) { delete curve; }

size_t injlock_curve_size(const injlock_curve* curve) { return curve ? curve->value.size() : 0; }

injlock_status injlock_curve_point(const injlock_curve* curve, size_t index, double* power_w, double* eta) {
  return guarded([&] {
    require(curve, "curve");
    if (index >= curve->value.size()) throw InvalidArgument("curve index out of range");
    if (power_w) *power_w = curve->value.powers()[index];
    if (eta) *eta = curve->value.eta()[index];
  });
}

injlock_status injlock_curve_eval(const injlock_curve* curve, double power_w, double* eta) {
  return guarded([&] {
    require(curve, "curve");
    require(eta, "eta");
    *eta = curve->value(power_w);
  });
}

injlock_status injlock_curve_transition(const injlock_curve* curve, double* power_w) {
  return guarded([&] {
    require(curve, "curve");
    require(power_w, "power_w");
    *power_w = curve->value.transition_power();
  });
}

injlock_status injlock_apply_isolation(double power_w, double isolation_db, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = apply_isolation(power_w, isolation_db);
  });
}

injlock_event_class injlock_classify_event(injlock_state alice, injlock_state eve) {
  const auto a = static_cast<unsigned>(alice);
  const auto e = static_cast<unsigned>(eve);
  if (a > 3 || e > 3) return INJLOCK_NULL;
  switch (classify_event(static_cast<BB84State>(a), static_cast<BB84State>(e))) {
    case EventClass::Success: return INJLOCK_SUCCESS;
    case EventClass::Error: return INJLOCK_ERROR;
    case EventClass::Null: return INJLOCK_NULL;
  }
  return INJLOCK_NULL;
}

injlock_status injlock_eta_total(const injlock_curve* curve, double power_w, double* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    *out = eta_total(power_w, curve->value);
  });
}

injlock_status injlock_rates_analytic(const injlock_curve* curve, double power_w, double background_rate,
                                      injlock_rates* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    *out = to_c(analytic_rates(power_w, curve->value, background_rate));
  });
}

injlock_status injlock_monte_carlo(const injlock_config* cfg, const injlock_curve* curve, injlock_histogram* hist,
                                   injlock_rates* rates) {
  return guarded([&] {
    require(cfg, "cfg");
    require(curve, "curve");
    const MonteCarloResult mc = run_monte_carlo(cfg->value.attack, curve->value, cfg->value.threads);
    if (hist) {
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t e = 0; e < 4; ++e) {
          hist->transmitted[a][e] = mc.histogram.counts[a][e];
          hist->emitted[a][e] = mc.histogram.totals[a][e];
        }
      }
    }
    if (rates) *rates = to_c(mc.rates);
  });
}

injlock_status injlock_security_point_eval(const injlock_config* cfg, injlock_protocol protocol,
                                           const injlock_curve* curve, double injection_power_w,
                                           double distance_km, injlock_security_point* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    SourceParams source = cfg->value.sources;
    source.protocol = to_protocol(protocol);
    const AttackContext ctx = curve ? make_attack_context(injection_power_w, curve->value,
                                                          cfg->value.filter.peak_transmittance)
                                    : AttackContext{};
    const SecurityPoint pt = skr(source, distance_km, cfg->value.channel, ctx);
    *out = {pt.distance, pt.qber, pt.skr_naive, pt.skr_corrected, pt.insecure ? 1 : 0};
  });
}

injlock_status injlock_cmd_dynamics(const injlock_config* cfg, double amplitude, double detuning_hz) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  return command([&] { return cmd_dynamics(cfg->value, amplitude, detuning_hz); });
}

injlock_status injlock_cmd_locking_curve(const injlock_config* cfg, const double* powers, size_t count) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  return command([&] { return cmd_locking_curve(cfg->value, view(powers, count)); });
}

injlock_status injlock_cmd_attack(const injlock_config* cfg) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  return command([&] { return cmd_attack(cfg->value); });
}

injlock_status injlock_cmd_isolation_sweep(const injlock_config* cfg, const double* isolation_db, size_t count) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  return command([&] { return cmd_isolation_sweep(cfg->value, view(isolation_db, count)); });
}

injlock_status injlock_cmd_security(const injlock_config* cfg, injlock_protocol protocol, const double* powers,
                                    size_t count) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  return command([&] {
    const std::optional<Protocol> p =
        protocol == INJLOCK_PROTOCOL_ALL ? std::nullopt : std::optional<Protocol>(to_protocol(protocol));
    return cmd_security(cfg->value, p, view(powers, count));
  });
}

injlock_status injlock_cmd_success_vs_power(const injlock_config* cfg, const double* powers, size_t count) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  return command([&] { return cmd_success_vs_power(cfg->value, view(powers, count)); });
}

injlock_status injlock_cmd_reproduce(const injlock_config* cfg, const char* target) {
  if (cfg == nullptr) return fail(INJLOCK_ERR_USAGE, "cfg must not be NULL");
  if (target == nullptr) return fail(INJLOCK_ERR_USAGE, "target must not be NULL");
  return command([&] { return cmd_reproduce(cfg->value, target); });
}

}  // extern "C"
