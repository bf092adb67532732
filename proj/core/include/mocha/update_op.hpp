// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "mocha/conv.hpp"
#include "mocha/tensor.hpp"

namespace mocha::update {

/// Number of LSTM stages per iteration: 1/16, 1/8 and 1/4 resolution.
inline constexpr std::size_t kStages = 3;
/// Scale divisor of stage t (0-based): 16, 8, 4.
inline constexpr std::array<std::uint8_t, kStages> kStageDivisor{16, 8, 4};

struct UpdateConfig {
  std::size_t hidden_channels = 64;
  std::size_t context_channels = 16;
  std::size_t lookup_radius = 4;

  /// Input channels of x_t for stage t; the last stage also receives the
  /// correlation lookup and the current disparity.
  std::size_t input_channels(std::size_t stage) const;
};

/// Gate convolutions for one stage. The four gates (forget, input, candidate,
/// output) have separate 3x3 kernels over [h, x]; they are stored stacked in
/// one Conv2d with output blocks in that order.
struct StageWeights {
  nn::Conv2d gates;
};

struct UpdateWeights {
  UpdateConfig config;
  std::array<StageWeights, kStages> stages;
  nn::Conv2d head;  ///< 1x1, hidden -> 1

  static UpdateWeights seeded(std::uint64_t seed, const UpdateConfig& cfg);
  static UpdateWeights zeros(const UpdateConfig& cfg);
};

struct LstmState {
  Tensor3 h;
  Tensor3 c;
};

/// Extremes observed in one lstm_step, for invariant checks.
struct StepTrace {
  float forget_min = 1, forget_max = 0;
  float input_min = 1, input_max = 0;
  float output_min = 1, output_max = 0;
  float candidate_abs_max = 0;
  double cell_prev_inf = 0;  ///< ||C_{t-1}||_inf
  double cell_inf = 0;       ///< ||C_t||_inf
};

/// f, i, o = σ(conv([h, x])); C' = tanh(conv([h, x]));
/// C_t = f ⊙ C_{t-1} + i ⊙ C'; h_t = o ⊙ tanh(C_t).
LstmState lstm_step(const LstmState& prev, const Tensor3& x, const StageWeights& w,
                    std::size_t hidden, StepTrace* trace = nullptr);

/// Δd = 1x1 conv of h at scale 4.
Tensor2 predict_delta(const Tensor3& h, const nn::Conv2d& head);

struct RefinementResult {
  std::vector<DisparityMap> sequence;  ///< d_1 .. d_n at scale 4
  std::vector<Tensor2> deltas;         ///< Δd_1 .. Δd_n
  std::vector<StepTrace> traces;       ///< kStages entries per iteration
};

/// Runs `iters` iterations. Within an iteration the state flows
/// 1/16 -> 1/8 -> 1/4 with bilinear x2 upsampling of h and C between stages;
/// the next iteration starts from the 4x4 average pool of the 1/4 state.
/// The first iteration starts from zero state.
///
/// `context` must hold tensors for divisors 16, 8 and 4; `combined` is the
/// D x H/4 x W/4 volume and `d0` the initial disparity at scale 4.
RefinementResult run_refinement(const Tensor3& combined,
                                const std::map<std::uint8_t, Tensor3>& context,
                                const DisparityMap& d0, std::size_t iters,
                                const UpdateWeights& w);

}  // namespace mocha::update
