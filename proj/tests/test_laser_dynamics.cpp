#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "laser_dynamics.hpp"

using namespace injlock;

namespace {

const double kNu = kTwoPi * 251e6;

FieldTrajectory synthetic(std::size_t n, double ds, auto&& field_at) {
  FieldTrajectory t;
  for (std::size_t k = 0; k < n; ++k) {
    const double time = static_cast<double>(k) * ds;
    t.times.push_back(time);
    t.field.push_back(field_at(time));
    t.carrier_dev.push_back(0.0);
  }
  return t;
}

double window_mean_square(const FieldTrajectory& t, double settle) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t.times[k] < settle) continue;
    sum += std::norm(t.field[k]);
    ++n;
  }
  return sum / static_cast<double>(n);
}

// Direct bin summation, independent of locked_power.
double in_band(const Spectrum& s, double center, double width) {
  double in = 0.0;
  double all = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    all += s.power[j];
    if (std::abs(s.freqs[j] - center) <= width / 2) in += s.power[j];
  }
  return in / all;
}

struct Run {
  FieldTrajectory traj;
  Spectrum spec;
};

Run run(double amplitude) {
  SimGrid g;
  Run r{integrate_lk(LaserParams{}, {amplitude, kNu}, g), {}};
  r.spec = analyze_spectrum(r.traj, g.settle_time);
  return r;
}

const Run& run_cached(double amplitude) {
  static const Run a = run(0.3), b = run(1.2), c = run(1.7);
  if (amplitude == 0.3) return a;
  if (amplitude == 1.2) return b;
  return c;
}

std::vector<std::size_t> lines_above(const Spectrum& s, double fraction) {
  const double floor = fraction * s.total();
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j + 1 < s.size(); ++j) {
    if (s.power[j] >= floor && s.power[j] > s.power[j - 1] && s.power[j] >= s.power[j + 1]) out.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("free-running fixed point holds for dt up to T_P/10") {
  LaserParams p;
  for (int div : {10, 20, 40}) {
    SimGrid g;
    g.dt = p.photon_lifetime / div;
    g.duration = 50e-9;
    g.settle_time = 0.0;
    const auto t = integrate_lk(p, {0.0, kNu}, g);
    REQUIRE(t.size() > 1000);
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(std::abs(std::norm(t.field[k]) / p.steady_photon_number - 1.0) < 1e-6);
      CHECK(std::abs(t.carrier_dev[k]) < 1e-6 * p.steady_photon_number);
    }
    CHECK(t.times.back() == doctest::Approx(50e-9).epsilon(1e-12));
  }
}

TEST_CASE("sampling keeps every stride-th step") {
  SimGrid g;
  g.duration = 2e-9;
  g.settle_time = 0.0;
  g.sample_stride = 7;
  const auto t = integrate_lk(LaserParams{}, {0.5, kNu}, g);
  CHECK(t.size() == g.step_count() / 7 + 1);
  CHECK(t.sample_interval() == doctest::Approx(7 * g.dt));
}

TEST_CASE("halving dt moves the windowed mean power by less than 1e-3") {
  for (double ex : {0.3, 1.7}) {
    SimGrid coarse;
    SimGrid fine = coarse;
    fine.dt = coarse.dt / 2;
    fine.sample_stride = coarse.sample_stride * 2;
    const double a = window_mean_square(integrate_lk(LaserParams{}, {ex, kNu}, coarse), coarse.settle_time);
    const double b = window_mean_square(integrate_lk(LaserParams{}, {ex, kNu}, fine), fine.settle_time);
    CAPTURE(ex);
    CHECK(std::abs(a - b) / b < 1e-3);
  }
}

TEST_CASE("spectrum obeys Parseval on simulated trajectories") {
  for (double ex : {0.3, 1.2, 1.7}) {
    const Run& r = run_cached(ex);
    const double ms = window_mean_square(r.traj, SimGrid{}.settle_time);
    CAPTURE(ex);
    CHECK(std::abs(r.spec.total() - ms) / ms < 1e-9);
    CHECK(r.spec.size() == static_cast<std::size_t>(std::count_if(
                               r.traj.times.begin(), r.traj.times.end(),
                               [](double t) { return t >= SimGrid{}.settle_time; })));
    CHECK(std::all_of(r.spec.power.begin(), r.spec.power.end(), [](double v) { return v >= 0.0; }));
    CHECK(std::is_sorted(r.spec.freqs.begin(), r.spec.freqs.end()));
  }
}

TEST_CASE("DFT of a constant puts everything in the zero bin") {
  const Complex c(3.0, -4.0);
  const auto t = synthetic(2048, 1e-11, [&](double) { return c; });
  const auto s = analyze_spectrum(t, 0.0);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s.freqs[j] == 0.0) {
      CHECK(s.power[j] == doctest::Approx(25.0).epsilon(1e-12));
    } else {
      CHECK(s.power[j] < 1e-20);
    }
  }
}

TEST_CASE("DFT of a pure tone lands in the matching bin") {
  const std::size_t n = 4000;
  const double ds = 1e-11;
  const double df = 1.0 / (n * ds);
  for (int bin : {100, -37, 1}) {
    const double f = bin * df;
    const auto t = synthetic(n, ds, [&](double time) { return 2.0 * std::polar(1.0, kTwoPi * f * time); });
    const auto s = analyze_spectrum(t, 0.0);
    const auto peak = std::max_element(s.power.begin(), s.power.end()) - s.power.begin();
    CHECK(s.freqs[peak] == doctest::Approx(f).epsilon(1e-9));
    CHECK(s.power[peak] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(locked_power(s, f, df / 2) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(locked_power(s, f + 10 * df, 2 * df) < 1e-18);
  }
}

TEST_CASE("locked_power is bounded by the total and rejects bad bandwidth") {
  const Run& r = run_cached(1.2);
  CHECK(locked_power(r.spec, 251e6, 4.0 * r.spec.freqs.back()) == doctest::Approx(r.spec.total()).epsilon(1e-12));
  CHECK(locked_power(r.spec, 251e6, 15e6) <= r.spec.total());
  CHECK_THROWS_AS(locked_power(r.spec, 251e6, 0.0), InvalidArgument);
  CHECK_THROWS_AS(locked_power(r.spec, 251e6, -1.0), InvalidArgument);
}

TEST_CASE("strong injection locks onto a single line at the detuning") {
  const Run& r = run_cached(1.7);
  const auto peak = std::max_element(r.spec.power.begin(), r.spec.power.end()) - r.spec.power.begin();
  CHECK(std::abs(r.spec.freqs[peak] - 251e6) <= r.spec.bin_width());
  CHECK(in_band(r.spec, 251e6, 15e6) >= 0.9);
  CHECK(lines_above(r.spec, 0.01).size() == 1);
}

TEST_CASE("weak injection produces several mixing lines") {
  const Run& r = run_cached(0.3);
  CHECK(in_band(r.spec, 251e6, 15e6) < 0.5);
  const auto lines = lines_above(r.spec, 1e-3);
  REQUIRE(lines.size() >= 3);
  bool below = false, near_detuning = false;
  for (auto j : lines) {
    below |= r.spec.freqs[j] < -100e6;
    near_detuning |= std::abs(r.spec.freqs[j] - 251e6) <= 2 * r.spec.bin_width();
  }
  CHECK(below);
  CHECK(near_detuning);
}

TEST_CASE("locked power grows through the three regimes") {
  const double a = locked_power(run_cached(0.3).spec, 251e6, 15e6);
  const double b = locked_power(run_cached(1.2).spec, 251e6, 15e6);
  const double c = locked_power(run_cached(1.7).spec, 251e6, 15e6);
  CHECK(a < b);
  CHECK(b < c);
  const double fb = in_band(run_cached(1.2).spec, 251e6, 15e6);
  CHECK(fb > in_band(run_cached(0.3).spec, 251e6, 15e6));
  CHECK(fb < in_band(run_cached(1.7).spec, 251e6, 15e6));
}

TEST_CASE("photon number to output power") {
  LaserParams p;
  CHECK(photon_number_to_power(0.0, p) == 0.0);
  // 0.5 * 3896 m^-1 * 7.5e7 m/s * (1.456 eV) * 3.5183e5, evaluated by hand.
  CHECK(photon_number_to_power(p.steady_photon_number, p) == doctest::Approx(0.011990984813951583).epsilon(1e-12));
  CHECK(photon_number_to_power(2e5, p) == doctest::Approx(2 * photon_number_to_power(1e5, p)).epsilon(1e-15));
  CHECK_THROWS_AS(photon_number_to_power(-1.0, p), InvalidArgument);
}

TEST_CASE("parameter and grid validation") {
  LaserParams p;
  p.photon_lifetime = -1e-12;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("photon_lifetime"), InvalidArgument);
  p = LaserParams{};
  p.carrier_lifetime = 1e-13;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);

  SimGrid g;
  CHECK_THROWS_AS(integrate_lk(LaserParams{}, {-0.1, kNu}, g), InvalidArgument);
  g.dt = 1e-9;  // far coarser than 1/(20 * 251 MHz)
  CHECK_THROWS_AS(integrate_lk(LaserParams{}, {0.3, kNu}, g), InvalidArgument);
  g = SimGrid{};
  g.settle_time = g.duration;
  CHECK_THROWS_AS(integrate_lk(LaserParams{}, {0.3, kNu}, g), InvalidArgument);
  g = SimGrid{};
  g.sample_stride = 0;
  CHECK_THROWS_AS(integrate_lk(LaserParams{}, {0.3, kNu}, g), InvalidArgument);
}

TEST_CASE("too few post-settle samples is rejected") {
  const auto t = synthetic(2000, 1e-11, [](double) { return Complex(1.0, 0.0); });
  CHECK_NOTHROW(analyze_spectrum(t, 0.0));
  CHECK_THROWS_AS(analyze_spectrum(t, t.times[1500]), InvalidArgument);
  CHECK_THROWS_AS(analyze_spectrum(t, 1.0), InvalidArgument);
}

TEST_CASE("divergence reports the step index") {
  SimGrid g;
  g.duration = 1e-10;
  g.settle_time = 0.0;
  try {
    integrate_lk(LaserParams{}, {1e300, kNu}, g);
    FAIL("expected divergence");
  } catch (const DivergedIntegration& e) {
    CHECK(e.step() == 1);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("integration is reproducible") {
  SimGrid g;
  g.duration = 5e-9;
  g.settle_time = 0.0;
  const auto a = integrate_lk(LaserParams{}, {1.2, kNu}, g);
  const auto b = integrate_lk(LaserParams{}, {1.2, kNu}, g);
  CHECK(a.field == b.field);
  CHECK(a.carrier_dev == b.carrier_dev);
}
