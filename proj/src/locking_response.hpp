#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "laser_dynamics.hpp"

namespace injlock {

// Lorentzian passband of Eve's Fabry-Perot cavity, centred on the master line.
struct FilterModel {
  double center = 251e6;  // Hz, offset from the free-running slave line
  double fwhm = 15e6;     // Hz
  double peak_transmittance = 0.8;

  void validate() const;
  double weight(double freq_hz) const;
};

// Maps injected optical power onto the normalized drive: |E_x|^2 = p / scale.
struct PowerCalibration {
  // Calibrated so the default curve's steepest rise sits at 100 nW: the
  // locking threshold amplitude times 1.01 maps to 100 nW.
  double watts_per_unit_amplitude_sq = 3.5126e-8;

  void validate() const;
  double amplitude_for(double power_w) const;
};

// Everything eta_of_power needs besides the power itself.
struct LockingSetup {
  LaserParams laser;
  FilterModel filter;
  PowerCalibration calibration;
  SimGrid grid;
  double detuning = kTwoPi * 251e6;  // rad/s

  void validate() const;
};

// Sampled eta(p) with linear interpolation inside the grid, clamped outside.
class TransmittanceCurve {
 public:
  TransmittanceCurve(std::vector<double> powers, std::vector<double> eta);

  const std::vector<double>& powers() const noexcept { return powers_; }
  const std::vector<double>& eta() const noexcept { return eta_; }
  double transition_power() const noexcept { return transition_power_; }
  std::size_t size() const noexcept { return powers_.size(); }

  double operator()(double power_w) const;

 private:
  std::vector<double> powers_;
  std::vector<double> eta_;
  double transition_power_ = 0.0;
};

// Lorentzian-weighted spectral power passing the filter.
double filter_transmission(const Spectrum& spec, const FilterModel& filter);

// Probability that a slave pulse passes the filter at injected power p_in.
double eta_of_power(double p_in, const LockingSetup& setup);

// Grid points are evaluated on up to `threads` workers; the result does not
// depend on the thread count.
TransmittanceCurve build_curve(std::span<const double> power_grid, const LockingSetup& setup,
                               unsigned threads = 1);

// Evenly spaced grid [lo, hi] with the given step, endpoints included.
std::vector<double> linear_grid(double lo, double hi, double step);

double apply_isolation(double p_in, double isolation_db);

// Fraction of the post-settle spectral power within fwhm/2 of the filter
// centre, at normalized drive amplitude e_x.
double in_band_fraction(double e_x, const LockingSetup& setup);

// Smallest amplitude in [lo, hi] whose in-band fraction reaches `fraction`,
// by bisection to `tol`. Requires the bracket to straddle the threshold.
double locking_threshold_amplitude(const LockingSetup& setup, double lo, double hi,
                                   double fraction = 0.9, double tol = 1e-9);

// Calibration putting the amplitude margin * threshold at target_power.
PowerCalibration calibrate_transition(double threshold_amplitude, double target_power, double margin);

}  // namespace injlock
