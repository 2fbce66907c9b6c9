#include "qkd_security.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace injlock {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void ChannelParams::validate() const {
  if (!(loss_coeff > 0.0) || !std::isfinite(loss_coeff)) throw InvalidArgument("loss_coeff must be positive");
  if (!is_probability(dark_count)) throw InvalidArgument("dark_count must lie in [0, 1]");
  if (!is_probability(detector_error)) throw InvalidArgument("detector_error must lie in [0, 1]");
  if (!is_probability(detector_eff)) throw InvalidArgument("detector_eff must lie in [0, 1]");
  if (!is_probability(dark_error)) throw InvalidArgument("dark_error must lie in [0, 1]");
  if (!(ec_efficiency >= 1.0) || !std::isfinite(ec_efficiency)) {
    throw InvalidArgument("ec_efficiency must be at least 1");
  }
}

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::Bb84Wcp: return "bb84";
    case Protocol::DecoyBb84: return "decoy";
    case Protocol::Sps: return "sps";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::Bb84Wcp, Protocol::DecoyBb84, Protocol::Sps}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown protocol '" + std::string(name) + "' (expected bb84, decoy or sps)");
}

void SourceParams::validate() const {
  if (!(mu1 > 0.0)) throw InvalidArgument("mu1 must be positive");
  if (!(mu2 > 0.0)) throw InvalidArgument("mu2 must be positive");
  if (!(nu2 > 0.0)) throw InvalidArgument("nu2 must be positive");
  if (!(nu2 < mu2)) throw InvalidArgument("nu2 must be smaller than mu2");
}

void AttackContext::validate() const {
  if (!is_probability(eta_attack)) throw InvalidArgument("eta_attack must lie in [0, 1]");
  if (!is_probability(eta_filter)) throw InvalidArgument("eta_filter must lie in [0, 1]");
  if (!is_probability(eve_info)) throw InvalidArgument("eve_info must lie in [0, 1]");
}

AttackContext make_attack_context(double injection_power, const TransmittanceCurve& curve,
                                  double eta_filter) {
  AttackContext ctx;
  ctx.enabled = true;
  ctx.injection_power = injection_power;
  ctx.eta_attack = eta_total(injection_power, curve);
  ctx.eta_filter = eta_filter;
  ctx.eve_info = success_rate_analytic(injection_power, curve);
  ctx.validate();
  return ctx;
}

double binary_entropy(double x) {
  if (!is_probability(x)) throw InvalidArgument("binary_entropy argument must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double system_transmittance(double distance_km, const ChannelParams& channel, const AttackContext& attack) {
  if (!(distance_km >= 0.0)) throw InvalidArgument("distance must be non-negative");
  double eta = channel.detector_eff * std::pow(10.0, -channel.loss_coeff * distance_km / 10.0);
  if (attack.enabled) eta *= attack.eta_attack * attack.eta_filter;
  return eta;
}

GainQber gain_and_qber(double mu, double eta, const ChannelParams& channel) {
  if (!(mu > 0.0)) throw InvalidArgument("mean photon number must be positive");
  if (!is_probability(eta)) throw InvalidArgument("transmittance must lie in [0, 1]");
  const double clicks = -std::expm1(-eta * mu);
  const double gain = channel.dark_count + clicks;
  if (!(gain > 0.0)) return {0.0, channel.dark_error};
  const double qber = (channel.dark_error * channel.dark_count + channel.detector_error * clicks) / gain;
  return {gain, qber};
}

DecoyEstimate decoy_estimate(double mu, double nu, double eta, const ChannelParams& channel) {
  const GainQber sig = gain_and_qber(mu, eta, channel);
  const GainQber dec = gain_and_qber(nu, eta, channel);
  const double y0 = channel.dark_count;
  const double ratio = (nu * nu) / (mu * mu);
  const double y1 = mu / (mu * nu - nu * nu) *
                    (dec.gain * std::exp(nu) - sig.gain * std::exp(mu) * ratio - (1.0 - ratio) * y0);
  if (!(y1 > 0.0)) return {0.0, 0.5};
  const double e1 = (dec.qber * dec.gain * std::exp(nu) - channel.dark_error * y0) / (y1 * nu);
  return {y1, std::clamp(e1, 0.0, 0.5)};
}

SecurityPoint skr(const SourceParams& source, double distance_km, const ChannelParams& channel,
                  const AttackContext& attack) {
  source.validate();
  channel.validate();
  attack.validate();
  const double eta = system_transmittance(distance_km, channel, attack);
  const double q = kSiftingFactor;
  const double fe = channel.ec_efficiency;

  SecurityPoint pt;
  pt.distance = distance_km;
  double gain = 0.0;

  switch (source.protocol) {
    case Protocol::Sps: {
      gain = channel.dark_count + eta;
      const double e1 =
          gain > 0.0 ? (channel.dark_error * channel.dark_count + channel.detector_error * eta) / gain
                     : channel.dark_error;
      const double h = binary_entropy(e1);
      pt.qber = e1;
      pt.skr_naive = q * gain * (1.0 - h - fe * h);
      break;
    }
    case Protocol::Bb84Wcp: {
      const GainQber g = gain_and_qber(source.mu1, eta, channel);
      gain = g.gain;
      pt.qber = g.qber;
      const double mu = source.mu1;
      const double multi = -std::expm1(-mu) - mu * std::exp(-mu);
      const double delta = multi / g.gain;
      const double leak = fe * binary_entropy(g.qber);
      if (1.0 - delta <= 0.0) {
        pt.skr_naive = -q * g.gain * leak;
      } else {
        const double e_single = std::min(g.qber / (1.0 - delta), 0.5);
        pt.skr_naive = q * g.gain * (-leak + (1.0 - delta) * (1.0 - binary_entropy(e_single)));
      }
      break;
    }
    case Protocol::DecoyBb84: {
      const GainQber g = gain_and_qber(source.mu2, eta, channel);
      gain = g.gain;
      pt.qber = g.qber;
      const DecoyEstimate est = decoy_estimate(source.mu2, source.nu2, eta, channel);
      const double q1 = est.yield1 * source.mu2 * std::exp(-source.mu2);
      pt.skr_naive = q * (-g.gain * fe * binary_entropy(g.qber) + q1 * (1.0 - binary_entropy(est.error1)));
      break;
    }
  }

  pt.skr_corrected = attack.enabled ? pt.skr_naive - q * gain * attack.eve_info : pt.skr_naive;
  pt.insecure = pt.skr_naive > 0.0 && pt.skr_corrected < 0.0;
  return pt;
}

std::vector<SecurityPoint> security_curve(const SourceParams& source, std::span<const double> distances,
                                          const ChannelParams& channel, const AttackContext& attack) {
  if (distances.empty()) throw InvalidArgument("distance list is empty");
  for (std::size_t i = 1; i < distances.size(); ++i) {
    if (distances[i] < distances[i - 1]) throw InvalidArgument("distances must be sorted ascending");
  }
  std::vector<SecurityPoint> out;
  out.reserve(distances.size());
  for (double d : distances) out.push_back(skr(source, d, channel, attack));
  return out;
}

std::vector<std::pair<double, double>> insecure_range(std::span<const SecurityPoint> curve) {
  std::vector<std::pair<double, double>> ranges;
  bool open = false;
  for (const SecurityPoint& pt : curve) {
    if (pt.insecure) {
      if (!open) ranges.emplace_back(pt.distance, pt.distance);
      ranges.back().second = pt.distance;
      open = true;
    } else {
      open = false;
    }
  }
  return ranges;
}

}  // namespace injlock
