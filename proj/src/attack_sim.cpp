#include "attack_sim.hpp"

#include <cmath>
#include <string>

#include "counter_rng.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace injlock {

namespace {

constexpr std::uint64_t kChunkPulses = 1u << 16;

// Draw streams; each pulse consumes one value from each.
constexpr std::uint64_t kStreamStates = 0;
constexpr std::uint64_t kStreamSignal = 1;
constexpr std::uint64_t kStreamBackground = 2;

double with_background(double eta, double background_rate) {
  if (background_rate == 0.0) return eta;
  return 1.0 - (1.0 - eta) * (1.0 - background_rate);
}

void check_background(double background_rate) {
  if (!(background_rate >= 0.0 && background_rate < 1.0)) {
    throw InvalidArgument("background_rate must lie in [0, 1)");
  }
}

}  // namespace

std::string_view to_string(BB84State s) noexcept {
  switch (s) {
    case BB84State::H: return "H";
    case BB84State::V: return "V";
    case BB84State::D: return "D";
    case BB84State::A: return "A";
  }
  return "?";
}

std::string_view to_string(EventClass c) noexcept {
  switch (c) {
    case EventClass::Success: return "SUCCESS";
    case EventClass::Error: return "ERROR";
    case EventClass::Null: return "NULL";
  }
  return "?";
}

BB84State parse_state(std::string_view name) {
  for (BB84State s : kAllStates) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown BB84 state '" + std::string(name) + "'");
}

EventClass parse_event_class(std::string_view name) {
  for (EventClass c : {EventClass::Success, EventClass::Error, EventClass::Null}) {
    if (to_string(c) == name) return c;
  }
  throw InvalidArgument("unknown event class '" + std::string(name) + "'");
}

double polarization_overlap(BB84State alice, BB84State eve) noexcept {
  if (alice == eve) return 1.0;
  if (basis_of(alice) == basis_of(eve)) return 0.0;
  return 0.5;
}

double received_power(BB84State alice, BB84State eve, double p_in) {
  if (!(p_in >= 0.0)) throw InvalidArgument("injection power must be non-negative");
  return p_in * polarization_overlap(alice, eve);
}

EventClass classify_event(BB84State alice, BB84State eve) noexcept {
  if (basis_of(alice) != basis_of(eve)) return EventClass::Null;
  return alice == eve ? EventClass::Success : EventClass::Error;
}

void AttackConfig::validate() const {
  if (!(injection_power >= 0.0) || !std::isfinite(injection_power)) {
    throw InvalidArgument("injection_power must be finite and non-negative");
  }
  if (!(isolation_db >= 0.0) || !std::isfinite(isolation_db)) {
    throw InvalidArgument("isolation_db must be finite and non-negative");
  }
  if (num_pulses < 1) throw InvalidArgument("num_pulses must be at least 1");
  check_background(background_rate);
}

std::uint64_t TallyHistogram::transmitted() const noexcept {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::uint64_t TallyHistogram::emitted() const noexcept {
  std::uint64_t n = 0;
  for (const auto& row : totals)
    for (auto c : row) n += c;
  return n;
}

TallyHistogram& TallyHistogram::operator+=(const TallyHistogram& other) noexcept {
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t e = 0; e < 4; ++e) {
      counts[a][e] += other.counts[a][e];
      totals[a][e] += other.totals[a][e];
    }
  }
  return *this;
}

double eta_total(double p_in, const TransmittanceCurve& curve) {
  if (!(p_in >= 0.0)) throw InvalidArgument("injection power must be non-negative");
  const double matched = curve(p_in);
  const double orthogonal = curve(0.0);
  const double half = curve(0.5 * p_in);
  return 0.25 * (matched + orthogonal + half + half);
}

AttackRates analytic_rates(double p_in, const TransmittanceCurve& curve, double background_rate) {
  if (!(p_in >= 0.0)) throw InvalidArgument("injection power must be non-negative");
  check_background(background_rate);
  const double matched = with_background(curve(p_in), background_rate);
  const double orthogonal = with_background(curve(0.0), background_rate);
  const double half = with_background(curve(0.5 * p_in), background_rate);
  const double denom = matched + orthogonal + half + half;
  if (!(denom > 0.0)) throw UndefinedRate("no transmitted photons: rate is undefined");
  AttackRates r;
  r.success_rate = matched / denom;
  r.error_rate = orthogonal / denom;
  r.loss_rate = (half + half) / denom;
  const double kept = matched + orthogonal;
  r.kept_error_rate = kept > 0.0 ? orthogonal / kept : 0.0;
  return r;
}

double success_rate_analytic(double p_in, const TransmittanceCurve& curve, double background_rate) {
  return analytic_rates(p_in, curve, background_rate).success_rate;
}

double error_rate_analytic(double p_in, const TransmittanceCurve& curve, double background_rate) {
  return analytic_rates(p_in, curve, background_rate).error_rate;
}

double loss_rate_analytic(double p_in, const TransmittanceCurve& curve, double background_rate) {
  return analytic_rates(p_in, curve, background_rate).loss_rate;
}

AttackRates rates_from_tally(const TallyHistogram& hist) {
  std::uint64_t by_class[3] = {0, 0, 0};
  for (BB84State a : kAllStates) {
    for (BB84State e : kAllStates) {
      by_class[static_cast<int>(classify_event(a, e))] += hist.counts[index_of(a)][index_of(e)];
    }
  }
  const std::uint64_t total = by_class[0] + by_class[1] + by_class[2];
  if (total == 0) throw UndefinedRate("no transmitted events: rate is undefined");
  const double n = static_cast<double>(total);
  AttackRates r;
  r.success_rate = static_cast<double>(by_class[0]) / n;
  r.error_rate = static_cast<double>(by_class[1]) / n;
  r.loss_rate = static_cast<double>(by_class[2]) / n;
  const std::uint64_t kept = by_class[0] + by_class[1];
  r.kept_error_rate = kept > 0 ? static_cast<double>(by_class[1]) / static_cast<double>(kept) : 0.0;
  return r;
}

MonteCarloResult run_monte_carlo(const AttackConfig& config, const TransmittanceCurve& curve,
                                 unsigned threads) {
  config.validate();
  const double p_chip = apply_isolation(config.injection_power, config.isolation_db);

  std::array<std::array<double, 4>, 4> pass{};
  for (BB84State a : kAllStates) {
    for (BB84State e : kAllStates) pass[index_of(a)][index_of(e)] = curve(received_power(a, e, p_chip));
  }

  const CounterRng rng(config.seed);
  const double background = config.background_rate;
  const std::uint64_t chunks = (config.num_pulses + kChunkPulses - 1) / kChunkPulses;
  std::vector<TallyHistogram> partial(chunks);

  parallel_for(chunks, threads, [&](std::size_t c) {
    TallyHistogram& h = partial[c];
    const std::uint64_t begin = c * kChunkPulses;
    const std::uint64_t end = std::min(config.num_pulses, begin + kChunkPulses);
    for (std::uint64_t pulse = begin; pulse < end; ++pulse) {
      const std::uint64_t draw = rng.bits(pulse, kStreamStates);
      const std::size_t a = draw & 3u;
      const std::size_t e = (draw >> 2) & 3u;
      ++h.totals[a][e];
      const bool signal = rng.uniform(pulse, kStreamSignal) < pass[a][e];
      const bool noise = background > 0.0 && rng.uniform(pulse, kStreamBackground) < background;
      if (signal || noise) ++h.counts[a][e];
    }
  });

  MonteCarloResult result;
  for (const auto& h : partial) result.histogram += h;
  result.rates = rates_from_tally(result.histogram);
  return result;
}

std::vector<IsolationPoint> isolation_sweep(const AttackConfig& config, const TransmittanceCurve& curve,
                                            std::span<const double> isolation_db, unsigned threads) {
  std::vector<IsolationPoint> out;
  out.reserve(isolation_db.size());
  for (double db : isolation_db) {
    AttackConfig c = config;
    c.isolation_db = db;
    out.push_back({db, run_monte_carlo(c, curve, threads).rates});
  }
  return out;
}

}  // namespace injlock
