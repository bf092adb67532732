// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mocha::selftest {

struct Options {
  std::size_t trials = 100;  ///< Random instances per suite.
  std::uint64_t seed = 0x5eedULL;
  /// Name of a property to sabotage (test-only negative control). The
  /// named check perturbs its implementation output before comparing.
  std::string inject_fault;
  /// Suites to run ("wavelet", "mcg", "correlation", "warp", "loss", "io");
  /// empty runs all of them.
  std::vector<std::string> suites;
};

struct PropertyResult {
  std::string suite;
  std::string property;
  bool passed = true;
  std::size_t checks = 0;
  double worst = 0.0;  ///< Largest observed error for tolerance checks.
  std::string detail;  ///< First failure, if any.
};

struct Report {
  std::vector<PropertyResult> properties;
  double seconds = 0.0;
  bool passed() const;
  std::vector<std::string> failing() const;
  std::string to_json() const;
  std::string table() const;
};

/// Every property name run_selftest checks, in order.
std::vector<std::string> property_names();

Report run(const Options& opt);

}  // namespace mocha::selftest
