#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "attack_sim.hpp"

namespace injlock {

struct ChannelParams {
  double loss_coeff = 0.2;        // dB/km
  double dark_count = 2.6e-5;     // Y_0, per gate
  double detector_error = 0.015;  // e_d
  double detector_eff = 0.5;      // eta_d
  double ec_efficiency = 1.12;    // f_e
  double dark_error = 0.5;        // e_0

  void validate() const;
};

enum class Protocol { Bb84Wcp, DecoyBb84, Sps };

std::string_view to_string(Protocol p) noexcept;
Protocol parse_protocol(std::string_view name);

struct SourceParams {
  Protocol protocol = Protocol::DecoyBb84;
  double mu1 = 0.002;  // BB84-WCP signal mean
  double mu2 = 0.4;    // decoy-state signal mean
  double nu2 = 0.1;    // decoy mean

  void validate() const;
};

struct AttackContext {
  bool enabled = false;
  double injection_power = 0.0;  // W
  double eta_attack = 1.0;
  double eta_filter = 0.8;
  double eve_info = 0.0;  // fraction of sifted bits Eve holds

  void validate() const;
};

// Eve's view of a power setting, derived from the transmittance curve.
AttackContext make_attack_context(double injection_power, const TransmittanceCurve& curve,
                                  double eta_filter);

struct SecurityPoint {
  double distance = 0.0;  // km
  double qber = 0.0;
  double skr_naive = 0.0;      // bits per pulse
  double skr_corrected = 0.0;  // bits per pulse, after Eve's share
  bool insecure = false;
};

struct GainQber {
  double gain;
  double qber;
};

struct DecoyEstimate {
  double yield1;  // lower bound on Y_1
  double error1;  // upper bound on e_1
};

inline constexpr double kSiftingFactor = 0.5;

double binary_entropy(double x);

double system_transmittance(double distance_km, const ChannelParams& channel, const AttackContext& attack);

GainQber gain_and_qber(double mu, double eta, const ChannelParams& channel);

// Vacuum + weak decoy bounds on the single-photon yield and error rate.
DecoyEstimate decoy_estimate(double mu, double nu, double eta, const ChannelParams& channel);

SecurityPoint skr(const SourceParams& source, double distance_km, const ChannelParams& channel,
                  const AttackContext& attack);

std::vector<SecurityPoint> security_curve(const SourceParams& source, std::span<const double> distances,
                                          const ChannelParams& channel, const AttackContext& attack);

// Maximal runs of consecutive insecure points, as [first, last] distances.
std::vector<std::pair<double, double>> insecure_range(std::span<const SecurityPoint> curve);

}  // namespace injlock
