#include "laser_dynamics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace injlock {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be finite and strictly positive");
  }
}

struct Derivative {
  Complex field;
  double carrier_dev;
};

class RateEquations {
 public:
  RateEquations(const LaserParams& p, const InjectionDrive& d)
      : gain_(0.5 * p.gain_coeff * Complex(1.0, p.alpha)),
        forcing_(p.feed_in_rate * d.amplitude),
        detuning_(d.detuning),
        carrier_decay_(1.0 / p.carrier_lifetime + p.gain_coeff * p.steady_photon_number),
        photon_decay_(1.0 / p.photon_lifetime),
        gain_coeff_(p.gain_coeff),
        p0_(p.steady_photon_number) {}

  Derivative operator()(double t, Complex e, double dn) const {
    Derivative d;
    d.field = gain_ * dn * e;
    if (forcing_ != 0.0) d.field += forcing_ * std::polar(1.0, detuning_ * t);
    d.carrier_dev = -carrier_decay_ * dn - (photon_decay_ + gain_coeff_ * dn) * (std::norm(e) - p0_);
    return d;
  }

 private:
  Complex gain_;
  double forcing_;
  double detuning_;
  double carrier_decay_;
  double photon_decay_;
  double gain_coeff_;
  double p0_;
};

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

void LaserParams::validate() const {
  require_positive(alpha, "alpha");
  require_positive(gain_coeff, "gain_coeff");
  require_positive(feed_in_rate, "feed_in_rate");
  require_positive(carrier_lifetime, "carrier_lifetime");
  require_positive(photon_lifetime, "photon_lifetime");
  require_positive(steady_photon_number, "steady_photon_number");
  require_positive(facet_loss, "facet_loss");
  require_positive(group_velocity, "group_velocity");
  require_positive(photon_energy, "photon_energy");
  if (!(carrier_lifetime > photon_lifetime)) {
    throw InvalidArgument("carrier_lifetime must exceed photon_lifetime");
  }
}

void InjectionDrive::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw InvalidArgument("injection amplitude must be finite and non-negative");
  }
  if (!std::isfinite(detuning)) throw InvalidArgument("detuning must be finite");
}

void SimGrid::validate(double detuning) const {
  require_positive(dt, "dt");
  require_positive(duration, "duration");
  if (!(settle_time >= 0.0) || !(settle_time < duration)) {
    throw InvalidArgument("settle_time must lie in [0, duration)");
  }
  if (sample_stride == 0) throw InvalidArgument("sample_stride must be at least 1");
  if (detuning != 0.0) {
    const double beat_hz = std::abs(detuning) / kTwoPi;
    if (dt > 1.0 / (20.0 * beat_hz)) {
      throw InvalidArgument("dt does not resolve the detuning (need dt <= 1/(20 f))");
    }
  }
}

std::size_t SimGrid::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

double FieldTrajectory::sample_interval() const {
  if (times.size() < 2) return 0.0;
  return times[1] - times[0];
}

double Spectrum::total() const { return std::accumulate(power.begin(), power.end(), 0.0); }

double Spectrum::bin_width() const {
  if (freqs.size() < 2) return 0.0;
  return freqs[1] - freqs[0];
}

FieldState free_running_state(const LaserParams& params) {
  return {Complex(std::sqrt(params.steady_photon_number), 0.0), 0.0};
}

FieldTrajectory integrate_lk(const LaserParams& params, const InjectionDrive& drive,
                             const SimGrid& grid, std::optional<FieldState> initial) {
  params.validate();
  drive.validate();
  grid.validate(drive.detuning);

  const RateEquations rhs(params, drive);
  const std::size_t steps = grid.step_count();
  const double h = grid.dt;

  FieldState s = initial.value_or(free_running_state(params));
  if (!std::isfinite(s.field.real()) || !std::isfinite(s.field.imag()) ||
      !std::isfinite(s.carrier_dev)) {
    throw InvalidArgument("initial state must be finite");
  }

  FieldTrajectory traj;
  const std::size_t samples = steps / grid.sample_stride + 1;
  traj.times.reserve(samples);
  traj.field.reserve(samples);
  traj.carrier_dev.reserve(samples);

  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * h;
    if (i % grid.sample_stride == 0) {
      traj.times.push_back(t);
      traj.field.push_back(s.field);
      traj.carrier_dev.push_back(s.carrier_dev);
    }
    if (i == steps) break;

    const Derivative k1 = rhs(t, s.field, s.carrier_dev);
    const Derivative k2 =
        rhs(t + 0.5 * h, s.field + 0.5 * h * k1.field, s.carrier_dev + 0.5 * h * k1.carrier_dev);
    const Derivative k3 =
        rhs(t + 0.5 * h, s.field + 0.5 * h * k2.field, s.carrier_dev + 0.5 * h * k2.carrier_dev);
    const Derivative k4 = rhs(t + h, s.field + h * k3.field, s.carrier_dev + h * k3.carrier_dev);

    s.field += (h / 6.0) * (k1.field + 2.0 * k2.field + 2.0 * k3.field + k4.field);
    s.carrier_dev +=
        (h / 6.0) * (k1.carrier_dev + 2.0 * k2.carrier_dev + 2.0 * k3.carrier_dev + k4.carrier_dev);

    if (!std::isfinite(s.field.real()) || !std::isfinite(s.field.imag()) ||
        !std::isfinite(s.carrier_dev)) {
      throw DivergedIntegration(i + 1);
    }
  }
  return traj;
}

Spectrum analyze_spectrum(const FieldTrajectory& traj, double settle_time) {
  if (traj.size() < 2) throw InvalidArgument("trajectory has fewer than two samples");
  if (!(settle_time < traj.times.back())) {
    throw InvalidArgument("settle_time must precede the end of the trajectory");
  }
  const auto first = std::lower_bound(traj.times.begin(), traj.times.end(), settle_time);
  const auto offset = static_cast<std::size_t>(first - traj.times.begin());
  const std::size_t n = traj.size() - offset;
  if (n < kMinSpectralSamples) {
    throw InvalidArgument("need at least " + std::to_string(kMinSpectralSamples) +
                          " post-settle samples, got " + std::to_string(n));
  }

  std::unique_ptr<fftw_complex[], FftwFree> in(fftw_alloc_complex(n));
  std::unique_ptr<fftw_complex[], FftwFree> out(fftw_alloc_complex(n));
  if (!in || !out) throw Error("fftw allocation failed");

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw planning failed");
  for (std::size_t k = 0; k < n; ++k) {
    in[k][0] = traj.field[offset + k].real();
    in[k][1] = traj.field[offset + k].imag();
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double ds = traj.sample_interval();
  const double df = 1.0 / (static_cast<double>(n) * ds);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));

  // Reorder bins so frequencies ascend: negative half first.
  Spectrum spec;
  spec.freqs.resize(n);
  spec.power.resize(n);
  const std::size_t negatives = n / 2;
  const std::size_t positives = n - negatives;  // includes DC
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j < negatives) ? positives + j : j - negatives;
    const long long signed_k =
        (k < positives) ? static_cast<long long>(k) : static_cast<long long>(k) - static_cast<long long>(n);
    spec.freqs[j] = static_cast<double>(signed_k) * df;
    spec.power[j] = (out[k][0] * out[k][0] + out[k][1] * out[k][1]) * norm;
  }
  return spec;
}

double locked_power(const Spectrum& spec, double center, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("bandwidth must be finite and strictly positive");
  }
  if (!std::isfinite(center)) throw InvalidArgument("center frequency must be finite");
  const double half = 0.5 * bandwidth;
  double sum = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (std::abs(spec.freqs[j] - center) <= half) sum += spec.power[j];
  }
  return sum;
}

double photon_number_to_power(double photons, const LaserParams& params) {
  if (!(photons >= 0.0) || !std::isfinite(photons)) {
    throw InvalidArgument("photon number must be finite and non-negative");
  }
  return 0.5 * params.facet_loss * params.group_velocity * params.photon_energy * photons;
}

}  // namespace injlock
