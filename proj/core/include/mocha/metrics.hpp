// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mocha/tensor.hpp"

namespace mocha::metrics {

inline constexpr double kDefaultGamma = 0.9;

using Mask = std::vector<std::uint8_t>;

/// Pixels valid in both maps.
Mask joint_mask(const DisparityMap& d, const DisparityMap& gt);
/// Additionally drops ground-truth values <= 0 (sparse benchmark convention).
Mask positive_gt_mask(const DisparityMap& d, const DisparityMap& gt);

/// Mean |d - gt| over the mask.
double epe(const Tensor2& d, const Tensor2& gt, const Mask& mask);
/// 100 * fraction of masked pixels with |d - gt| > delta.
double bad_ratio(const Tensor2& d, const Tensor2& gt, double delta, const Mask& mask);

/// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
double smooth_l1(double x);
/// Mean smooth_l1(d - gt) over the mask.
double smooth_l1_mean(const Tensor2& d, const Tensor2& gt, const Mask& mask);

/// L = mean smooth_l1(d_0 - gt) + Σ_{k=1..n} gamma^{n-k} mean |d_k - gt|.
double sequence_loss(const Tensor2& d0, std::span<const Tensor2> seq, const Tensor2& gt,
                     const Mask& mask, double gamma = kDefaultGamma);

struct EvalReport {
  double epe = 0.0;
  std::map<double, double> bad;  ///< threshold -> percentage
  std::size_t valid_count = 0;
  std::optional<double> loss;

  /// {"epe": .., "bad": {"1.0": ..}, "valid": n[, "loss": ..]}
  std::string to_json() const;
};

EvalReport evaluate(const Tensor2& d, const Tensor2& gt, const Mask& mask,
                    std::span<const double> thresholds);

/// Threshold key as used in the JSON report: one decimal place minimum
/// ("1.0", "2.0", "0.5", "1.25").
std::string threshold_key(double delta);

}  // namespace mocha::metrics
