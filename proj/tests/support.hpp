#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "csv_io.hpp"
#include "locking_response.hpp"

namespace test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(INJLOCK_TEST_DATA) / name;
}

// Curve simulated on the default config (0-200 nW, 2.5 nW step), frozen.
inline const injlock::TransmittanceCurve& default_curve() {
  static const injlock::TransmittanceCurve curve = injlock::csv::read_curve(data_path("default_curve.csv"));
  return curve;
}

// eta = 1 at and above threshold, 0 below (up to a 1 fW ramp).
inline injlock::TransmittanceCurve step_curve(double threshold) {
  return injlock::TransmittanceCurve({0.0, threshold - 1e-15, threshold, 1e-3}, {0.0, 0.0, 1.0, 1.0});
}

inline injlock::TransmittanceCurve constant_curve(double c) {
  return injlock::TransmittanceCurve({0.0, 1e-3}, {c, c});
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("injlock_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace test
