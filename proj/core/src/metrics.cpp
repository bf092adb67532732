// SPDX-License-Identifier: Apache-2.0
#include "mocha/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>

#include "mocha/error.hpp"

namespace mocha::metrics {

namespace {

std::size_t check(const Tensor2& d, const Tensor2& gt, const Mask& mask) {
  if (d.height() != gt.height() || d.width() != gt.width()) {
    throw DimensionError("metrics: disparity " + d.shape_string() + " vs ground truth " +
                         gt.shape_string());
  }
  if (mask.size() != d.size()) throw DimensionError("metrics: mask size mismatch");
  std::size_t n = 0;
  for (auto m : mask) n += m ? 1 : 0;
  if (n == 0) throw EvaluationError("metrics: evaluation mask is empty");
  return n;
}

template <typename F>
double masked_mean(const Tensor2& d, const Tensor2& gt, const Mask& mask, F term) {
  const std::size_t n = check(d, gt, mask);
  auto a = d.data();
  auto b = gt.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask[i]) acc += term(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  }
  return acc / static_cast<double>(n);
}

}  // namespace

Mask joint_mask(const DisparityMap& d, const DisparityMap& gt) {
  if (d.height() != gt.height() || d.width() != gt.width()) {
    throw DimensionError("metrics: disparity " + d.values.shape_string() +
                         " vs ground truth " + gt.values.shape_string());
  }
  Mask m(d.valid.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (d.valid[i] && gt.valid[i]) ? 1 : 0;
  return m;
}

Mask positive_gt_mask(const DisparityMap& d, const DisparityMap& gt) {
  Mask m = joint_mask(d, gt);
  auto g = gt.values.data();
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!(g[i] > 0.0f)) m[i] = 0;
  return m;
}

double epe(const Tensor2& d, const Tensor2& gt, const Mask& mask) {
  return masked_mean(d, gt, mask, [](double e) { return std::fabs(e); });
}

double bad_ratio(const Tensor2& d, const Tensor2& gt, double delta, const Mask& mask) {
  return 100.0 * masked_mean(d, gt, mask, [delta](double e) { return std::fabs(e) > delta ? 1.0 : 0.0; });
}

double smooth_l1(double x) {
  const double a = std::fabs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_mean(const Tensor2& d, const Tensor2& gt, const Mask& mask) {
  return masked_mean(d, gt, mask, [](double e) { return smooth_l1(e); });
}

double sequence_loss(const Tensor2& d0, std::span<const Tensor2> seq, const Tensor2& gt,
                     const Mask& mask, double gamma) {
  if (seq.empty()) throw PreconditionError("sequence_loss: need at least one iteration");
  const std::size_t n = seq.size();
  double loss = smooth_l1_mean(d0, gt, mask);
  for (std::size_t k = 1; k <= n; ++k) {
    loss += std::pow(gamma, static_cast<double>(n - k)) * epe(seq[k - 1], gt, mask);
  }
  return loss;
}

std::string threshold_key(double delta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", delta);
  if (std::strtod(buf, nullptr) != delta) std::snprintf(buf, sizeof buf, "%.17g", delta);
  return buf;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["epe"] = epe;
  nlohmann::ordered_json b = nlohmann::ordered_json::object();
  for (const auto& [delta, pct] : bad) b[threshold_key(delta)] = pct;
  j["bad"] = b;
  j["valid"] = valid_count;
  if (loss) j["loss"] = *loss;
  return j.dump();
}

EvalReport evaluate(const Tensor2& d, const Tensor2& gt, const Mask& mask,
                    std::span<const double> thresholds) {
  EvalReport r;
  r.valid_count = check(d, gt, mask);
  r.epe = epe(d, gt, mask);
  for (double t : thresholds) r.bad[t] = bad_ratio(d, gt, t, mask);
  return r;
}

}  // namespace mocha::metrics
