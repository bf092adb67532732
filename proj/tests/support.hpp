// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <span>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "mocha/random.hpp"
#include "mocha/tensor.hpp"

namespace mocha::test {

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(MOCHA_GOLDEN_DIR) / name;
}

/// Golden files hold one hex float ("%a") per line so replays are exact.
inline void write_golden(const std::filesystem::path& p, std::span<const float> values) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  char buf[64];
  for (float v : values) {
    std::snprintf(buf, sizeof buf, "%a\n", static_cast<double>(v));
    os << buf;
  }
}

inline std::vector<float> read_golden(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("missing golden file " + p.string());
  std::vector<float> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(static_cast<float>(std::strtod(line.c_str(), nullptr)));
  }
  return out;
}

inline Tensor3 random_tensor(std::uint64_t seed, std::size_t c, std::size_t h, std::size_t w,
                             double bound = 1.0) {
  SeededGenerator g(seed);
  return seeded_uniform(g, c, h, w, bound);
}

inline Tensor2 random_plane(std::uint64_t seed, std::size_t h, std::size_t w, double bound = 1.0) {
  return random_tensor(seed, 1, h, w, bound).channel(0);
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::fabs(static_cast<double>(a[i]) - b[i]));
  return e;
}

inline bool bit_equal(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
  return true;
}

// True when cur is prev + delta up to the float rounding of both endpoints.
inline bool step_consistent(float prev, float delta, float cur) {
  const double ulp = std::nextafter(std::max(std::fabs(prev), std::fabs(cur)), INFINITY) -
                     std::max(std::fabs(prev), std::fabs(cur));
  return std::fabs(double(cur) - double(prev) - double(delta)) <= ulp;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mocha_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace mocha::test
