#include "locking_response.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "parallel.hpp"

namespace injlock {

void FilterModel::validate() const {
  if (!std::isfinite(center)) throw InvalidArgument("filter center must be finite");
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) throw InvalidArgument("filter fwhm must be positive");
  if (!(peak_transmittance > 0.0 && peak_transmittance <= 1.0)) {
    throw InvalidArgument("peak_transmittance must lie in (0, 1]");
  }
}

double FilterModel::weight(double freq_hz) const {
  const double x = 2.0 * (freq_hz - center) / fwhm;
  return peak_transmittance / (1.0 + x * x);
}

void PowerCalibration::validate() const {
  if (!(watts_per_unit_amplitude_sq > 0.0) || !std::isfinite(watts_per_unit_amplitude_sq)) {
    throw InvalidArgument("watts_per_unit_amplitude_sq must be finite and strictly positive");
  }
}

double PowerCalibration::amplitude_for(double power_w) const {
  return std::sqrt(power_w / watts_per_unit_amplitude_sq);
}

void LockingSetup::validate() const {
  laser.validate();
  filter.validate();
  calibration.validate();
  grid.validate(detuning);
}

TransmittanceCurve::TransmittanceCurve(std::vector<double> powers, std::vector<double> eta)
    : powers_(std::move(powers)), eta_(std::move(eta)) {
  if (powers_.empty()) throw InvalidArgument("transmittance curve needs at least one point");
  if (powers_.size() != eta_.size()) {
    throw InvalidArgument("transmittance curve power and eta lengths differ");
  }
  for (std::size_t i = 0; i < powers_.size(); ++i) {
    if (!std::isfinite(powers_[i]) || powers_[i] < 0.0) {
      throw InvalidArgument("curve powers must be finite and non-negative");
    }
    if (i > 0 && !(powers_[i] > powers_[i - 1])) {
      throw InvalidArgument("curve powers must be strictly increasing");
    }
    if (!(eta_[i] >= 0.0 && eta_[i] <= 1.0)) {
      throw InvalidArgument("curve eta values must lie in [0, 1]");
    }
  }
  // Upper end of the steepest forward difference.
  transition_power_ = powers_.front();
  double best = -1.0;
  for (std::size_t i = 0; i + 1 < powers_.size(); ++i) {
    const double rise = eta_[i + 1] - eta_[i];
    if (rise > best) {
      best = rise;
      transition_power_ = powers_[i + 1];
    }
  }
}

double TransmittanceCurve::operator()(double power_w) const {
  if (power_w <= powers_.front()) return eta_.front();
  if (power_w >= powers_.back()) return eta_.back();
  const auto hi = std::upper_bound(powers_.begin(), powers_.end(), power_w);
  const auto j = static_cast<std::size_t>(hi - powers_.begin());
  const double x0 = powers_[j - 1];
  const double x1 = powers_[j];
  const double w = (power_w - x0) / (x1 - x0);
  return eta_[j - 1] + w * (eta_[j] - eta_[j - 1]);
}

double filter_transmission(const Spectrum& spec, const FilterModel& filter) {
  filter.validate();
  double sum = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) sum += filter.weight(spec.freqs[j]) * spec.power[j];
  return sum;
}

double eta_of_power(double p_in, const LockingSetup& setup) {
  if (!(p_in >= 0.0) || !std::isfinite(p_in)) {
    throw InvalidArgument("injection power must be finite and non-negative");
  }
  setup.validate();
  const InjectionDrive drive{setup.calibration.amplitude_for(p_in), setup.detuning};
  const FieldTrajectory traj = integrate_lk(setup.laser, drive, setup.grid);
  const Spectrum spec = analyze_spectrum(traj, setup.grid.settle_time);
  const double passed = filter_transmission(spec, setup.filter);
  const double eta = passed / setup.laser.steady_photon_number;
  return std::clamp(eta, 0.0, setup.filter.peak_transmittance);
}

TransmittanceCurve build_curve(std::span<const double> power_grid, const LockingSetup& setup,
                               unsigned threads) {
  if (power_grid.empty()) throw InvalidArgument("power grid is empty");
  for (std::size_t i = 0; i < power_grid.size(); ++i) {
    if (!(power_grid[i] >= 0.0)) throw InvalidArgument("power grid must be non-negative");
    if (i > 0 && !(power_grid[i] > power_grid[i - 1])) {
      throw InvalidArgument("power grid must be strictly increasing");
    }
  }
  setup.validate();
  std::vector<double> eta(power_grid.size());
  parallel_for(power_grid.size(), threads, [&](std::size_t i) { eta[i] = eta_of_power(power_grid[i], setup); });
  return TransmittanceCurve(std::vector<double>(power_grid.begin(), power_grid.end()), std::move(eta));
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw InvalidArgument("grid needs finite lo <= hi and a positive step");
  }
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

double apply_isolation(double p_in, double isolation_db) {
  if (!(isolation_db >= 0.0) || !std::isfinite(isolation_db)) {
    throw InvalidArgument("isolation must be finite and non-negative (dB)");
  }
  return p_in * std::pow(10.0, -isolation_db / 10.0);
}

double in_band_fraction(double e_x, const LockingSetup& setup) {
  if (!(e_x >= 0.0) || !std::isfinite(e_x)) throw InvalidArgument("amplitude must be finite and non-negative");
  setup.validate();
  const FieldTrajectory traj = integrate_lk(setup.laser, {e_x, setup.detuning}, setup.grid);
  const Spectrum spec = analyze_spectrum(traj, setup.grid.settle_time);
  return locked_power(spec, setup.filter.center, setup.filter.fwhm) / spec.total();
}

double locking_threshold_amplitude(const LockingSetup& setup, double lo, double hi, double fraction,
                                   double tol) {
  if (!(lo >= 0.0 && hi > lo && tol > 0.0)) throw InvalidArgument("threshold bracket needs 0 <= lo < hi");
  if (in_band_fraction(lo, setup) >= fraction || in_band_fraction(hi, setup) < fraction) {
    throw InvalidArgument("threshold bracket does not straddle the locking transition");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (in_band_fraction(mid, setup) >= fraction ? hi : lo) = mid;
  }
  return hi;
}

PowerCalibration calibrate_transition(double threshold_amplitude, double target_power, double margin) {
  if (!(threshold_amplitude > 0.0 && target_power > 0.0 && margin > 0.0)) {
    throw InvalidArgument("calibration inputs must be positive");
  }
  const double a = margin * threshold_amplitude;
  PowerCalibration cal{target_power / (a * a)};
  cal.validate();
  return cal;
}

}  // namespace injlock
