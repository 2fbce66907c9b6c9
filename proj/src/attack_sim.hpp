#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "locking_response.hpp"

namespace injlock {

enum class BB84State : std::uint8_t { H = 0, V = 1, D = 2, A = 3 };
enum class Basis : std::uint8_t { Rectilinear, Diagonal };
enum class EventClass : std::uint8_t { Success, Error, Null };

inline constexpr std::array<BB84State, 4> kAllStates = {BB84State::H, BB84State::V, BB84State::D,
                                                        BB84State::A};

constexpr Basis basis_of(BB84State s) noexcept {
  return (s == BB84State::H || s == BB84State::V) ? Basis::Rectilinear : Basis::Diagonal;
}

constexpr std::size_t index_of(BB84State s) noexcept { return static_cast<std::size_t>(s); }

std::string_view to_string(BB84State s) noexcept;
std::string_view to_string(EventClass c) noexcept;
BB84State parse_state(std::string_view name);
EventClass parse_event_class(std::string_view name);

// |<eve|alice>|^2.
double polarization_overlap(BB84State alice, BB84State eve) noexcept;

double received_power(BB84State alice, BB84State eve, double p_in);

// Eve keeps matched-basis rounds; within those, the same state is a hit.
EventClass classify_event(BB84State alice, BB84State eve) noexcept;

struct AttackConfig {
  double injection_power = 110e-9;  // W, at the slave chip
  double isolation_db = 0.0;
  std::uint64_t num_pulses = 1'000'000;
  std::uint64_t seed = 20190101;
  double background_rate = 0.0;  // per-pulse probability of a spurious count

  void validate() const;
};

struct TallyHistogram {
  using Grid = std::array<std::array<std::uint64_t, 4>, 4>;
  Grid counts{};  // transmitted, indexed [alice][eve]
  Grid totals{};  // emitted

  std::uint64_t transmitted() const noexcept;
  std::uint64_t emitted() const noexcept;
  TallyHistogram& operator+=(const TallyHistogram& other) noexcept;
  friend bool operator==(const TallyHistogram&, const TallyHistogram&) = default;
};

// Fractions of transmitted events. success + error + loss = 1; kept_error is
// the error share of the rounds Eve keeps.
struct AttackRates {
  double success_rate = 0.0;
  double error_rate = 0.0;
  double loss_rate = 0.0;
  double kept_error_rate = 0.0;
};

// Mean filter transmittance over Eve's four equally likely states, seen from
// one Alice state (by symmetry every Alice state gives the same value).
double eta_total(double p_in, const TransmittanceCurve& curve);

// Closed-form rates; background_rate mixes a uniform spurious count into every
// cell as 1 - (1 - eta)(1 - b).
AttackRates analytic_rates(double p_in, const TransmittanceCurve& curve, double background_rate = 0.0);
double success_rate_analytic(double p_in, const TransmittanceCurve& curve, double background_rate = 0.0);
double error_rate_analytic(double p_in, const TransmittanceCurve& curve, double background_rate = 0.0);
double loss_rate_analytic(double p_in, const TransmittanceCurve& curve, double background_rate = 0.0);

AttackRates rates_from_tally(const TallyHistogram& hist);

struct MonteCarloResult {
  TallyHistogram histogram;
  AttackRates rates;
};

MonteCarloResult run_monte_carlo(const AttackConfig& config, const TransmittanceCurve& curve,
                                 unsigned threads = 1);

struct IsolationPoint {
  double isolation_db;
  AttackRates rates;
};

// config.isolation_db is ignored; every entry reuses config.seed.
std::vector<IsolationPoint> isolation_sweep(const AttackConfig& config, const TransmittanceCurve& curve,
                                            std::span<const double> isolation_db, unsigned threads = 1);

}  // namespace injlock
