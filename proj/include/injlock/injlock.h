/*
 * injlock: injection-locking attack simulator for QKD transmitters.
 *
 * C interface to the simulation library. All objects are opaque handles
 * created and destroyed through this API. Every fallible function returns an
 * injlock_status; on failure a description is available from
 * injlock_last_error() on the calling thread until the next failing call.
 */
#ifndef INJLOCK_INJLOCK_H
#define INJLOCK_INJLOCK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(INJLOCK_BUILDING)
#    define INJLOCK_API __declspec(dllexport)
#  else
#    define INJLOCK_API __declspec(dllimport)
#  endif
#else
#  define INJLOCK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum injlock_status {
  INJLOCK_OK = 0,
  INJLOCK_ERR_USAGE = 1,          /* invalid argument */
  INJLOCK_ERR_CONFIG = 2,         /* config validation (bad value, unknown key) */
  INJLOCK_ERR_NUMERIC = 3,        /* diverged integration, undefined rate */
  INJLOCK_ERR_IO = 4,             /* output could not be written */
  INJLOCK_ERR_CONFIG_MISSING = 5, /* config file not found */
  INJLOCK_ERR_CONFIG_SYNTAX = 6,  /* config file is not valid JSON */
  INJLOCK_ERR_INTERNAL = 7
} injlock_status;

typedef enum injlock_state { INJLOCK_H = 0, INJLOCK_V = 1, INJLOCK_D = 2, INJLOCK_A = 3 } injlock_state;

typedef enum injlock_event_class {
  INJLOCK_SUCCESS = 0,
  INJLOCK_ERROR = 1,
  INJLOCK_NULL = 2
} injlock_event_class;

typedef enum injlock_protocol {
  INJLOCK_PROTOCOL_BB84 = 0,
  INJLOCK_PROTOCOL_DECOY = 1,
  INJLOCK_PROTOCOL_SPS = 2,
  INJLOCK_PROTOCOL_ALL = -1 /* accepted by injlock_cmd_security only */
} injlock_protocol;

typedef struct injlock_config injlock_config;
typedef struct injlock_curve injlock_curve;
typedef struct injlock_trajectory injlock_trajectory;
typedef struct injlock_spectrum injlock_spectrum;

typedef struct injlock_rates {
  double success_rate;
  double error_rate;
  double loss_rate;
  double kept_error_rate;
} injlock_rates;

typedef struct injlock_histogram {
  uint64_t transmitted[4][4]; /* [alice][eve] */
  uint64_t emitted[4][4];
} injlock_histogram;

typedef struct injlock_security_point {
  double distance_km;
  double qber;
  double skr_naive;
  double skr_corrected;
  int insecure;
} injlock_security_point;

INJLOCK_API const char* injlock_version(void);
INJLOCK_API const char* injlock_last_error(void);
/* Human-readable summary of the last successful injlock_cmd_* on this thread. */
INJLOCK_API const char* injlock_last_summary(void);

/* ---- configuration ---- */

INJLOCK_API injlock_status injlock_config_default(injlock_config** out);
INJLOCK_API injlock_status injlock_config_load(const char* path, injlock_config** out);
INJLOCK_API injlock_status injlock_config_save(const injlock_config* cfg, const char* path);
INJLOCK_API void injlock_config_free(injlock_config* cfg);
INJLOCK_API injlock_status injlock_config_hash(const injlock_config* cfg, uint64_t* out);

/* Dotted keys as in the config file, e.g. "attack.injection_power_w". */
INJLOCK_API injlock_status injlock_config_set_number(injlock_config* cfg, const char* key, double value);
INJLOCK_API injlock_status injlock_config_get_number(const injlock_config* cfg, const char* key, double* out);
INJLOCK_API injlock_status injlock_config_set_seed(injlock_config* cfg, uint64_t seed);
INJLOCK_API injlock_status injlock_config_set_pulses(injlock_config* cfg, uint64_t pulses);
INJLOCK_API injlock_status injlock_config_set_threads(injlock_config* cfg, unsigned threads);
INJLOCK_API injlock_status injlock_config_set_output_dir(injlock_config* cfg, const char* dir);
INJLOCK_API injlock_status injlock_config_set_curve_csv(injlock_config* cfg, const char* path);

/* ---- laser dynamics ---- */

INJLOCK_API injlock_status injlock_integrate(const injlock_config* cfg, double amplitude, double detuning_hz,
                                             injlock_trajectory** out);
INJLOCK_API void injlock_trajectory_free(injlock_trajectory* traj);
INJLOCK_API size_t injlock_trajectory_size(const injlock_trajectory* traj);
INJLOCK_API injlock_status injlock_trajectory_sample(const injlock_trajectory* traj, size_t index, double* t_s,
                                                     double* re_e, double* im_e, double* delta_n);

INJLOCK_API injlock_status injlock_spectrum_analyze(const injlock_trajectory* traj, double settle_time_s,
                                                    injlock_spectrum** out);
INJLOCK_API void injlock_spectrum_free(injlock_spectrum* spec);
INJLOCK_API size_t injlock_spectrum_size(const injlock_spectrum* spec);
INJLOCK_API injlock_status injlock_spectrum_bin(const injlock_spectrum* spec, size_t index, double* freq_hz,
                                                double* power);
INJLOCK_API injlock_status injlock_spectrum_locked_power(const injlock_spectrum* spec, double center_hz,
                                                         double bandwidth_hz, double* out);
INJLOCK_API injlock_status injlock_photon_number_to_power(const injlock_config* cfg, double photons,
                                                          double* watts);

/* ---- transmittance curve ---- */

/* powers == NULL with count == 0 uses the configured grid (or import_csv). */
INJLOCK_API injlock_status injlock_curve_build(const injlock_config* cfg, const double* powers, size_t count,
                                               injlock_curve** out);
INJLOCK_API injlock_status injlock_curve_from_points(const double* powers, const double* eta, size_t count,
                                                     injlock_curve** out);
INJLOCK_API injlock_status injlock_curve_read_csv(const char* path, injlock_curve** out);
INJLOCK_API injlock_status injlock_curve_write_csv(const injlock_curve* curve, const char* path);
INJLOCK_API void injlock_curve_free(injlock_curve* curve);
INJLOCK_API size_t injlock_curve_size(const injlock_curve* curve);
INJLOCK_API injlock_status injlock_curve_point(const injlock_curve* curve, size_t index, double* power_w,
                                               double* eta);
INJLOCK_API injlock_status injlock_curve_eval(const injlock_curve* curve, double power_w, double* eta);
INJLOCK_API injlock_status injlock_curve_transition(const injlock_curve* curve, double* power_w);
INJLOCK_API injlock_status injlock_apply_isolation(double power_w, double isolation_db, double* out);

/* ---- attack ---- */

INJLOCK_API injlock_event_class injlock_classify_event(injlock_state alice, injlock_state eve);
INJLOCK_API injlock_status injlock_eta_total(const injlock_curve* curve, double power_w, double* out);
INJLOCK_API injlock_status injlock_rates_analytic(const injlock_curve* curve, double power_w,
                                                  double background_rate, injlock_rates* out);
/* Uses the attack section of cfg (power, isolation, pulses, seed, background). */
INJLOCK_API injlock_status injlock_monte_carlo(const injlock_config* cfg, const injlock_curve* curve,
                                               injlock_histogram* hist, injlock_rates* rates);

/* ---- security ---- */

/* curve == NULL evaluates without attack. */
INJLOCK_API injlock_status injlock_security_point_eval(const injlock_config* cfg, injlock_protocol protocol,
                                                       const injlock_curve* curve, double injection_power_w,
                                                       double distance_km, injlock_security_point* out);

/* ---- report commands: write CSV artifacts plus a manifest ---- */

INJLOCK_API injlock_status injlock_cmd_dynamics(const injlock_config* cfg, double amplitude, double detuning_hz);
INJLOCK_API injlock_status injlock_cmd_locking_curve(const injlock_config* cfg, const double* powers,
                                                     size_t count);
INJLOCK_API injlock_status injlock_cmd_attack(const injlock_config* cfg);
INJLOCK_API injlock_status injlock_cmd_isolation_sweep(const injlock_config* cfg, const double* isolation_db,
                                                       size_t count);
INJLOCK_API injlock_status injlock_cmd_security(const injlock_config* cfg, injlock_protocol protocol,
                                                const double* powers, size_t count);
INJLOCK_API injlock_status injlock_cmd_success_vs_power(const injlock_config* cfg, const double* powers,
                                                        size_t count);
INJLOCK_API injlock_status injlock_cmd_reproduce(const injlock_config* cfg, const char* target);

#ifdef __cplusplus
}
#endif

#endif /* INJLOCK_INJLOCK_H */
