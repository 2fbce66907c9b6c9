#include "csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace injlock::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double to_double(const std::string& s) {
  if (s.empty()) throw InvalidArgument("empty numeric CSV cell");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw InvalidArgument("malformed numeric CSV cell '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidArgument("malformed integer CSV cell '" + s + "'");
  }
  return std::stoull(s);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string trajectory_csv(const FieldTrajectory& traj) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  out.reserve(traj.size() * 96);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_number(traj.times[i]) + "," + format_number(traj.field[i].real()) + "," +
           format_number(traj.field[i].imag()) + "," + format_number(traj.carrier_dev[i]) + "\n";
  }
  return out;
}

std::string spectrum_csv(const Spectrum& spec) {
  std::string out = std::string(kSpectrumHeader) + "\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out += format_number(spec.freqs[i]) + "," + format_number(spec.power[i]) + "\n";
  }
  return out;
}

std::string curve_csv(const TransmittanceCurve& curve) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += format_number(curve.powers()[i]) + "," + format_number(curve.eta()[i]) + "\n";
  }
  return out;
}

std::string histogram_csv(const TallyHistogram& hist) {
  std::string out = std::string(kHistogramHeader) + "\n";
  for (BB84State a : kAllStates) {
    for (BB84State e : kAllStates) {
      out += std::string(to_string(a)) + "," + std::string(to_string(e)) + "," +
             std::to_string(hist.totals[index_of(a)][index_of(e)]) + "," +
             std::to_string(hist.counts[index_of(a)][index_of(e)]) + "," +
             std::string(to_string(classify_event(a, e))) + "\n";
    }
  }
  return out;
}

std::string rates_csv(std::span<const RatesRow> rows) {
  std::string out = std::string(kRatesHeader) + "\n";
  for (const RatesRow& r : rows) {
    out += format_number(r.injection_power) + "," + format_number(r.isolation_db) + "," +
           format_number(r.rates.success_rate) + "," + format_number(r.rates.error_rate) + "," +
           format_number(r.rates.loss_rate) + "," + format_number(r.rates.kept_error_rate) + "\n";
  }
  return out;
}

std::string security_csv(std::span<const SecurityPoint> points) {
  std::string out = std::string(kSecurityHeader) + "\n";
  for (const SecurityPoint& p : points) {
    out += format_number(p.distance) + "," + format_number(p.qber) + "," + format_number(p.skr_naive) + "," +
           format_number(p.skr_corrected) + "," + (p.insecure ? "1" : "0") + "\n";
  }
  return out;
}

Table parse(const std::string& text, const std::string& expected_header) {
  Table t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV is empty");
  if (line != expected_header) {
    throw InvalidArgument("CSV header '" + line + "' does not match '" + expected_header + "'");
  }
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw InvalidArgument("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<double> numeric_column(const Table& table, std::size_t column) {
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(to_double(row.at(column)));
  return out;
}

FieldTrajectory parse_trajectory(const std::string& text) {
  const Table t = parse(text, kTrajectoryHeader);
  FieldTrajectory traj;
  traj.times = numeric_column(t, 0);
  const auto re = numeric_column(t, 1);
  const auto im = numeric_column(t, 2);
  traj.carrier_dev = numeric_column(t, 3);
  traj.field.resize(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) traj.field[i] = Complex(re[i], im[i]);
  return traj;
}

Spectrum parse_spectrum(const std::string& text) {
  const Table t = parse(text, kSpectrumHeader);
  return {numeric_column(t, 0), numeric_column(t, 1)};
}

TransmittanceCurve parse_curve(const std::string& text) {
  const Table t = parse(text, kCurveHeader);
  return TransmittanceCurve(numeric_column(t, 0), numeric_column(t, 1));
}

TallyHistogram parse_histogram(const std::string& text) {
  const Table t = parse(text, kHistogramHeader);
  if (t.rows.size() != 16) throw InvalidArgument("histogram CSV must have 16 rows");
  TallyHistogram h;
  for (const auto& row : t.rows) {
    const BB84State a = parse_state(row[0]);
    const BB84State e = parse_state(row[1]);
    if (parse_event_class(row[4]) != classify_event(a, e)) {
      throw InvalidArgument("histogram CSV class column disagrees with the state pair");
    }
    h.totals[index_of(a)][index_of(e)] = to_u64(row[2]);
    h.counts[index_of(a)][index_of(e)] = to_u64(row[3]);
  }
  return h;
}

std::vector<RatesRow> parse_rates(const std::string& text) {
  const Table t = parse(text, kRatesHeader);
  std::vector<RatesRow> out;
  for (const auto& row : t.rows) {
    RatesRow r{};
    r.injection_power = to_double(row[0]);
    r.isolation_db = to_double(row[1]);
    r.rates.success_rate = to_double(row[2]);
    r.rates.error_rate = to_double(row[3]);
    r.rates.loss_rate = to_double(row[4]);
    r.rates.kept_error_rate = to_double(row[5]);
    out.push_back(r);
  }
  return out;
}

std::vector<SecurityPoint> parse_security(const std::string& text) {
  const Table t = parse(text, kSecurityHeader);
  std::vector<SecurityPoint> out;
  for (const auto& row : t.rows) {
    SecurityPoint p;
    p.distance = to_double(row[0]);
    p.qber = to_double(row[1]);
    p.skr_naive = to_double(row[2]);
    p.skr_corrected = to_double(row[3]);
    if (row[4] != "0" && row[4] != "1") throw InvalidArgument("insecure column must be 0 or 1");
    p.insecure = row[4] == "1";
    out.push_back(p);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TransmittanceCurve read_curve(const std::filesystem::path& path) { return parse_curve(read_file(path)); }

}  // namespace injlock::csv
