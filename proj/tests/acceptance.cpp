// Acceptance run: one pass/fail line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attack_sim.hpp"
#include "config.hpp"
#include "csv_io.hpp"
#include "locking_response.hpp"
#include "qkd_security.hpp"
#include "report.hpp"

using namespace injlock;
namespace fs = std::filesystem;

namespace {

int failed = 0;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

void criterion(int n, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs >= limit_s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "took %.1f s, limit %.0f s", secs, limit_s);
    o.require(false, buf);
  }
  std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", n, title, secs,
              o.detail.empty() ? "" : " -- ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.ok) ++failed;
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("injlock_accept_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Every non-manifest file in a and b exists in both with identical bytes.
bool same_csvs(const fs::path& a, const fs::path& b, std::size_t& compared) {
  std::vector<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a)) na.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) nb.push_back(e.path().filename().string());
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  if (na != nb) return false;
  for (const auto& n : na) {
    if (n == kManifestName) continue;
    if (slurp(a / n) != slurp(b / n)) return false;
    ++compared;
  }
  return true;
}

}  // namespace

int main() {
  const RunConfig defaults;
  TransmittanceCurve live({0.0, 1.0}, {0.0, 0.0});
  bool have_live = false;

  criterion(1, "zero-injection fixed point holds over 50 ns", 5.0, [&](Outcome& o) {
    SimGrid g = defaults.grid;
    g.duration = 50e-9;
    g.settle_time = 0.0;
    const auto p = defaults.laser_params();
    const auto traj = integrate_lk(p, {0.0, kTwoPi * defaults.detuning_hz}, g);
    double worst_e = 0.0, worst_n = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      worst_e = std::max(worst_e, std::abs(std::norm(traj.field[i]) / p.steady_photon_number - 1.0));
      worst_n = std::max(worst_n, std::abs(traj.carrier_dev[i]) / p.steady_photon_number);
    }
    o.require(worst_e <= 1e-6, fmt("max | |E|^2/P0 - 1 | = %.3g", worst_e));
    o.require(worst_n < 1e-6, fmt("max |dN|/P0 = %.3g", worst_n));
    o.detail += fmt("max |E|^2 drift %.2g", worst_e);
  });

  criterion(2, "spectral regimes separate at E_x 0.3 / 1.2 / 1.7", 30.0, [&](Outcome& o) {
    const auto setup = defaults.locking_setup();
    const double weak = in_band_fraction(0.3, setup);
    const double mid = in_band_fraction(1.2, setup);
    const double strong = in_band_fraction(1.7, setup);
    o.require(weak < 0.5, fmt("fraction(0.3) = %.4f", weak));
    o.require(strong >= 0.9, fmt("fraction(1.7) = %.4f", strong));
    o.require(weak < mid && mid < strong, fmt("fraction(1.2) = %.4f not between", mid));
    if (o.ok) o.detail = fmt("%.4f", weak) + " / " + fmt("%.4f", mid) + " / " + fmt("%.4f", strong);
  });

  criterion(3, "closed-form rates on step and constant curves", 0.0, [&](Outcome& o) {
    const TransmittanceCurve step({0.0, 100e-9 - 1e-15, 100e-9, 1e-3}, {0.0, 0.0, 1.0, 1.0});
    const TransmittanceCurve flat({0.0, 1e-3}, {1.0, 1.0});
    o.require(eta_total(150e-9, step) == 0.25, "step eta_total != 0.25");
    o.require(success_rate_analytic(150e-9, step) == 1.0, "step success != 1");
    const auto r = analytic_rates(150e-9, flat);
    o.require(r.success_rate == 0.25 && r.error_rate == 0.25 && r.loss_rate == 0.5,
              "constant curve rates != 0.25 / 0.25 / 0.5");
  });

  criterion(4, "Monte Carlo within 3 sigma of analytic at 1e6 pulses", 60.0, [&](Outcome& o) {
    const TransmittanceCurve step({0.0, 100e-9 - 1e-15, 100e-9, 1e-3}, {0.0, 0.0, 1.0, 1.0});
    const TransmittanceCurve flat({0.0, 1e-3}, {0.3, 0.3});
    struct Setting {
      double power;
      const TransmittanceCurve* curve;
      double background;
    };
    const TransmittanceCurve ramp({0.0, 200e-9}, {0.0, 0.8});
    const std::vector<Setting> settings = {{110e-9, &flat, 0.0}, {150e-9, &step, 0.01}, {50e-9, &ramp, 0.0},
                                           {110e-9, &ramp, 0.0}, {150e-9, &ramp, 0.0}, {200e-9, &ramp, 0.02}};
    o.require(settings.size() >= 5, "fewer than 5 settings");
    int good = 0;
    for (const auto& s : settings) {
      AttackConfig cfg;
      cfg.num_pulses = 1'000'000;
      cfg.injection_power = s.power;
      cfg.background_rate = s.background;
      const auto mc = run_monte_carlo(cfg, *s.curve);
      const auto exact = analytic_rates(s.power, *s.curve, s.background);
      const double n = static_cast<double>(mc.histogram.transmitted());
      bool within = n > 0.0;
      for (auto [got, want] : {std::pair{mc.rates.success_rate, exact.success_rate},
                               std::pair{mc.rates.error_rate, exact.error_rate},
                               std::pair{mc.rates.loss_rate, exact.loss_rate}}) {
        within = within && std::abs(got - want) <= 3.0 * std::sqrt(want * (1.0 - want) / n) + 1e-15;
      }
      if (within) ++good;
      o.require(within, fmt("mismatch at %.4g W", s.power));
    }
    if (o.ok) o.detail = std::to_string(good) + " settings";
  });

  criterion(5, "post-selection table, 16 combinations", 0.0, [&](Outcome& o) {
    const BB84State all[] = {BB84State::H, BB84State::V, BB84State::D, BB84State::A};
    int matched = 0;
    for (BB84State a : all) {
      for (BB84State e : all) {
        EventClass want = EventClass::Null;
        if ((index_of(a) < 2) == (index_of(e) < 2)) want = a == e ? EventClass::Success : EventClass::Error;
        if (classify_event(a, e) == want) ++matched;
      }
    }
    o.require(matched == 16, std::to_string(matched) + "/16");
    if (o.ok) o.detail = "16/16";
  });

  criterion(6, "success-rate optimum on the default calibration", 300.0, [&](Outcome& o) {
    live = build_curve(defaults.curve.grid(), defaults.locking_setup());
    have_live = true;
    const auto& p = live.powers();
    std::size_t best = 0;
    double peak = -1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double s = success_rate_analytic(p[i], live);
      if (s > peak) {
        peak = s;
        best = i;
      }
    }
    o.require(best > 0 && best + 1 < p.size(), "maximum sits on the grid edge");
    o.require(p[best] >= 50e-9 && p[best] <= 200e-9, fmt("peak at %.4g W outside [50, 200] nW", p[best]));
    o.require(p[best] / 100e-9 >= 0.5 && p[best] / 100e-9 <= 2.0, "peak not within a factor 2 of 100 nW");
    o.require(peak >= 0.45, fmt("peak success %.4f < 0.45", peak));
    if (o.ok) o.detail = fmt("peak %.4f", peak) + fmt(" at %.1f nW", p[best] * 1e9);
  });

  criterion(7, "isolation trend at 110 nW over 0 / 1 / 3 dB", 0.0, [&](Outcome& o) {
    o.require(have_live, "default curve unavailable");
    if (!have_live) return;
    const double bg = 0.02;
    double prev_s = 2.0, prev_e = -1.0, prev_e_bg = -1.0;
    std::string trail;
    for (double db : {0.0, 1.0, 3.0}) {
      const double p = apply_isolation(110e-9, db);
      const double s = success_rate_analytic(p, live);
      const double s_bg = success_rate_analytic(p, live, bg);
      const double e_bg = error_rate_analytic(p, live, bg);
      const double e = error_rate_analytic(p, live);
      o.require(s < prev_s, fmt("success does not fall at %g dB", db));
      o.require(e_bg >= prev_e_bg, fmt("error with background falls at %g dB", db));
      o.require(e >= prev_e, fmt("error without background falls at %g dB", db));
      (void)s_bg;
      prev_s = s;
      prev_e = e;
      prev_e_bg = e_bg;
      trail += fmt("%g dB: ", db) + fmt("S %.4f ", s) + fmt("E_bg %.4f  ", e_bg);
    }
    if (o.ok) o.detail = trail;
  });

  criterion(8, "security properties of the decoy protocol under attack", 60.0, [&](Outcome& o) {
    o.require(have_live, "default curve unavailable");
    if (!have_live) return;
    const auto& ch = defaults.channel;
    SourceParams src = defaults.sources;
    src.protocol = Protocol::DecoyBb84;
    const auto grid = defaults.distances.grid();
    const auto base = security_curve(src, grid, ch, AttackContext{});
    o.require(base.front().skr_naive > 0.0, "SKR at L = 0 not positive");
    for (std::size_t i = 1; i < base.size(); ++i) {
      if (base[i].skr_naive > base[i - 1].skr_naive) {
        o.require(false, fmt("SKR rises at %g km", base[i].distance));
        break;
      }
    }
    // The default 150 km grid stops short of the decoy cutoff; extend it.
    const auto wide = security_curve(src, linear_grid(0.0, 300.0, 0.5), ch, AttackContext{});
    double cutoff = -1.0;
    for (const auto& pt : wide) {
      if (pt.skr_naive <= 0.0) {
        cutoff = pt.distance;
        break;
      }
    }
    o.require(cutoff > 0.0, "no sign change within 300 km");
    const auto qber_grid = linear_grid(0.0, 1000.0, 1.0);
    const auto far = security_curve(src, qber_grid, ch, AttackContext{});
    for (std::size_t i = 1; i < far.size(); ++i) {
      if (far[i].qber < far[i - 1].qber) {
        o.require(false, fmt("QBER falls at %g km", far[i].distance));
        break;
      }
    }
    o.require(std::abs(skr(src, 1e5, ch, AttackContext{}).qber - 0.5) < 1e-9, "QBER does not approach 0.5");
    o.require(gain_and_qber(src.mu2, 0.0, ch).qber == 0.5, "zero-transmittance QBER != 0.5");

    const auto ctx = make_attack_context(50e-9, live, defaults.filter.peak_transmittance);
    const auto hit = security_curve(src, grid, ch, ctx);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(hit[i].skr_naive < base[i].skr_naive)) {
        o.require(false, fmt("attack does not lower SKR at %g km", grid[i]));
        break;
      }
    }
    o.require(insecure_range(base).empty(), "insecure range without attack");
    AttackContext blind = ctx;
    blind.eve_info = 0.0;
    o.require(insecure_range(security_curve(src, grid, ch, blind)).empty(), "insecure range with eve_info = 0");
    const auto spans = insecure_range(hit);
    o.require(!spans.empty(), "no insecure range at 50 nW");
    if (o.ok) {
      o.detail = fmt("cutoff %.1f km", cutoff) + fmt(", insecure [%g", spans.front().first) +
                 fmt(", %g] km", spans.front().second) + fmt(", eve_info %.4f", ctx.eve_info);
    }
  });

  criterion(9, "entropy, zero-transmittance and isolation unit checks", 0.0, [&](Outcome& o) {
    o.require(binary_entropy(0.5) == 1.0, "H2(0.5) != 1");
    o.require(binary_entropy(0.0) == 0.0, "H2(0) != 0");
    const auto g = gain_and_qber(defaults.sources.mu2, 0.0, defaults.channel);
    o.require(g.gain == defaults.channel.dark_count && g.qber == 0.5, "gain_and_qber(eta = 0) != (Y0, 0.5)");
    double worst = 0.0;
    for (double p : {1e-9, 110e-9, 3e-6}) {
      for (double a : {0.0, 0.5, 1.0, 3.0}) {
        for (double b : {0.25, 2.0, 7.5}) {
          const double split = apply_isolation(apply_isolation(p, a), b);
          const double once = apply_isolation(p, a + b);
          worst = std::max(worst, std::abs(split - once) / once);
        }
      }
    }
    o.require(worst <= 1e-12, fmt("isolation additivity error %.3g", worst));
  });

  criterion(10, "byte-identical CSVs across reruns and thread counts", 0.0, [&](Outcome& o) {
    TempDir tmp;
    RunConfig c;
    if (have_live) {
      std::ofstream(tmp.path / "curve.csv", std::ios::binary) << csv::curve_csv(live);
      c.curve.import_csv = (tmp.path / "curve.csv").string();
    }
    c.attack.num_pulses = 300'000;
    c.grid.duration = 60e-9;
    c.grid.settle_time = 30e-9;
    const std::vector<double> powers{50e-9, 150e-9};
    const std::vector<double> db{0.0, 1.0, 3.0};
    const std::vector<double> coarse{0.0, 100e-9, 200e-9};
    std::size_t compared = 0;
    const std::vector<std::pair<std::string, std::function<void(const RunConfig&)>>> commands = {
        {"attack", [](const RunConfig& r) { cmd_attack(r); }},
        {"isolation", [&](const RunConfig& r) { cmd_isolation_sweep(r, db); }},
        {"security", [&](const RunConfig& r) { cmd_security(r, std::nullopt, powers); }},
        {"success", [](const RunConfig& r) { cmd_success_vs_power(r, {}); }},
        {"curve", [&](const RunConfig& r) { cmd_locking_curve(r, coarse); }},
        {"dynamics", [](const RunConfig& r) { cmd_dynamics(r, 1.2, 251e6); }},
    };
    for (const auto& [name, run] : commands) {
      RunConfig a = c, b = c, par = c;
      a.output_dir = (tmp.path / (name + "_a")).string();
      b.output_dir = (tmp.path / (name + "_b")).string();
      par.output_dir = (tmp.path / (name + "_par")).string();
      par.threads = 4;
      run(a);
      const std::string manifest = slurp(fs::path(a.output_dir) / kManifestName);
      run(b);
      run(par);
      o.require(same_csvs(a.output_dir, b.output_dir, compared), name + " rerun differs");
      // The manifest hashes the output directory too, so it is compared on a rerun in place.
      run(a);
      o.require(slurp(fs::path(a.output_dir) / kManifestName) == manifest, name + " manifest differs on rerun");
      o.require(same_csvs(a.output_dir, par.output_dir, compared), name + " differs with 4 threads");
    }
    if (o.ok) o.detail = std::to_string(compared) + " file comparisons";
  });

  std::printf("%s: %d criteria failed\n", failed == 0 ? "ACCEPTED" : "REJECTED", failed);
  return failed == 0 ? 0 : 1;
}
