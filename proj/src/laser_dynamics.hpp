#pragma once

// Single-mode semiconductor laser under external optical injection.
//
// The slave field E is carried in the rotating frame of the free-running
// slave frequency and normalized so |E|^2 is the intracavity photon number.
// The carrier deviation dN is measured from its free-running value.
//
//   dE/dt  = 1/2 (1 + i alpha) G_N dN E + kappa E_x exp(i nu t)
//   ddN/dt = -(1/T_S + G_N P_0) dN - (1/T_P + G_N dN)(|E|^2 - P_0)

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace injlock {

using Complex = std::complex<double>;

inline constexpr double kElectronVolt = 1.602176634e-19;  // J
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct LaserParams {
  double alpha = 4.5;                  // linewidth enhancement factor
  double gain_coeff = 5e3;             // G_N, 1/s
  double feed_in_rate = 1.2136e11;     // kappa, 1/s
  double carrier_lifetime = 0.8059e-9; // T_S, s
  double photon_lifetime = 1.1628e-12; // T_P, s
  double steady_photon_number = 3.5183e5;  // P_0
  double facet_loss = 3896.0;          // alpha_m, 1/m
  double group_velocity = 7.5e7;       // v_g, m/s
  double photon_energy = 1.456 * kElectronVolt;  // hbar omega, J

  // Throws InvalidArgument naming the first offending field.
  void validate() const;
};

struct InjectionDrive {
  double amplitude = 0.0;  // E_x, sqrt(photon number)
  double detuning = kTwoPi * 251e6;  // nu, rad/s (master minus slave)

  void validate() const;
};

struct SimGrid {
  double dt = 1.1628e-12 / 20.0;
  double duration = 180e-9;
  double settle_time = 100e-9;
  // Only every sample_stride-th integration step is recorded.
  std::size_t sample_stride = 10;

  void validate(double detuning) const;
  std::size_t step_count() const;
};

struct FieldState {
  Complex field;
  double carrier_dev = 0.0;
};

struct FieldTrajectory {
  std::vector<double> times;
  std::vector<Complex> field;
  std::vector<double> carrier_dev;

  std::size_t size() const noexcept { return times.size(); }
  double sample_interval() const;
};

// Frequencies are ascending and relative to the free-running slave line.
struct Spectrum {
  std::vector<double> freqs;  // Hz
  std::vector<double> power;  // photon number per bin

  std::size_t size() const noexcept { return freqs.size(); }
  double total() const;
  double bin_width() const;
};

// Free-running fixed point: |E|^2 = P_0, dN = 0, zero phase.
FieldState free_running_state(const LaserParams& params);

FieldTrajectory integrate_lk(const LaserParams& params, const InjectionDrive& drive,
                             const SimGrid& grid,
                             std::optional<FieldState> initial = std::nullopt);

inline constexpr std::size_t kMinSpectralSamples = 1024;

// DFT of the field samples with t >= settle_time, scaled so the bins sum to
// the mean |E|^2 over the window.
Spectrum analyze_spectrum(const FieldTrajectory& traj, double settle_time);

// Sum of bins whose frequency lies within center +/- bandwidth/2.
double locked_power(const Spectrum& spec, double center, double bandwidth);

// Output optical power (W) for an intracavity photon number.
double photon_number_to_power(double photons, const LaserParams& params);

}  // namespace injlock
