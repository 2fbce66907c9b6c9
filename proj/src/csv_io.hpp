#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "attack_sim.hpp"
#include "laser_dynamics.hpp"
#include "locking_response.hpp"
#include "qkd_security.hpp"

namespace injlock::csv {

// Header rows of every emitted schema.
inline constexpr const char* kTrajectoryHeader = "t_s,re_E,im_E,deltaN";
inline constexpr const char* kSpectrumHeader = "freq_hz,power";
inline constexpr const char* kCurveHeader = "power_w,eta";
inline constexpr const char* kHistogramHeader = "alice_state,eve_state,emitted,transmitted,class";
inline constexpr const char* kRatesHeader =
    "injection_power_w,isolation_db,success_rate,error_rate,loss_rate,kept_error_rate";
inline constexpr const char* kSecurityHeader = "distance_km,qber,skr_naive,skr_corrected,insecure";
inline constexpr const char* kSuccessHeader = "injection_power_w,success_rate";
inline constexpr const char* kTransmittanceHeader = "injection_power_w,eta_total";
inline constexpr const char* kInsecureRangeHeader = "protocol,injection_power_w,start_km,end_km";

// Scientific notation, 17 significant digits.
std::string format_number(double v);

struct RatesRow {
  double injection_power;
  double isolation_db;
  AttackRates rates;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string trajectory_csv(const FieldTrajectory& traj);
std::string spectrum_csv(const Spectrum& spec);
std::string curve_csv(const TransmittanceCurve& curve);
std::string histogram_csv(const TallyHistogram& hist);
std::string rates_csv(std::span<const RatesRow> rows);
std::string security_csv(std::span<const SecurityPoint> points);

// Strict parsing: the header must match and every row must have its width.
Table parse(const std::string& text, const std::string& expected_header);
std::vector<double> numeric_column(const Table& table, std::size_t column);

FieldTrajectory parse_trajectory(const std::string& text);
Spectrum parse_spectrum(const std::string& text);
TransmittanceCurve parse_curve(const std::string& text);
TallyHistogram parse_histogram(const std::string& text);
std::vector<RatesRow> parse_rates(const std::string& text);
std::vector<SecurityPoint> parse_security(const std::string& text);

std::string read_file(const std::filesystem::path& path);
TransmittanceCurve read_curve(const std::filesystem::path& path);

}  // namespace injlock::csv
