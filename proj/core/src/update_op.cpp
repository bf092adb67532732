// SPDX-License-Identifier: Apache-2.0
#include "mocha/update_op.hpp"

#include <algorithm>
#include <cmath>

#include "mocha/cost_volume.hpp"
#include "mocha/error.hpp"
#include "mocha/random.hpp"

namespace mocha::update {

std::size_t UpdateConfig::input_channels(std::size_t stage) const {
  std::size_t n = context_channels;
  if (stage == kStages - 1) n += 2 * lookup_radius + 1 + 1;
  return n;
}

UpdateWeights UpdateWeights::seeded(std::uint64_t seed, const UpdateConfig& cfg) {
  if (cfg.hidden_channels == 0) throw ConfigError("update: hidden_channels must be positive");
  UpdateWeights w;
  w.config = cfg;
  SeededGenerator root(seed);
  for (std::size_t t = 0; t < kStages; ++t) {
    auto gen = root.fork(100 + t);
    const std::size_t in = cfg.hidden_channels + cfg.input_channels(t);
    w.stages[t].gates = nn::Conv2d::seeded(gen, in, 4 * cfg.hidden_channels, 3, 1);
    // Small positive forget bias, as is customary for untrained LSTMs.
    for (std::size_t k = 0; k < cfg.hidden_channels; ++k) w.stages[t].gates.bias[k] = 1.0f;
  }
  auto head_gen = root.fork(200);
  w.head = nn::Conv2d::seeded(head_gen, cfg.hidden_channels, 1, 1, 1, 0.1);
  return w;
}

UpdateWeights UpdateWeights::zeros(const UpdateConfig& cfg) {
  UpdateWeights w;
  w.config = cfg;
  for (std::size_t t = 0; t < kStages; ++t) {
    w.stages[t].gates =
        nn::Conv2d(cfg.hidden_channels + cfg.input_channels(t), 4 * cfg.hidden_channels, 3, 1);
  }
  w.head = nn::Conv2d(cfg.hidden_channels, 1, 1, 1);
  return w;
}

LstmState lstm_step(const LstmState& prev, const Tensor3& x, const StageWeights& w,
                    std::size_t hidden, StepTrace* trace) {
  if (prev.h.channels() != hidden || prev.c.channels() != hidden ||
      prev.h.height() != x.height() || prev.h.width() != x.width() ||
      prev.c.height() != x.height() || prev.c.width() != x.width()) {
    throw DimensionError("lstm_step: state h " + prev.h.shape_string() + ", C " +
                         prev.c.shape_string() + " incompatible with x " + x.shape_string());
  }
  if (w.gates.out_channels != 4 * hidden || w.gates.in_channels != hidden + x.channels()) {
    throw DimensionError("lstm_step: gate weights expect " + std::to_string(w.gates.in_channels) +
                         " inputs and " + std::to_string(w.gates.out_channels) + " outputs");
  }
  const Tensor3* parts[] = {&prev.h, &x};
  const Tensor3 pre = w.gates.forward(concat_channels(parts));

  const std::size_t n = prev.h.size();
  auto z = pre.data();
  auto f_pre = z.subspan(0, n);
  auto i_pre = z.subspan(n, n);
  auto c_pre = z.subspan(2 * n, n);
  auto o_pre = z.subspan(3 * n, n);

  LstmState next{Tensor3(hidden, x.height(), x.width()), Tensor3(hidden, x.height(), x.width())};
  auto c_prev = prev.c.data();
  auto c_out = next.c.data();
  auto h_out = next.h.data();
  StepTrace t;
  double cell_inf = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const float f = nn::sigmoid(f_pre[k]);
    const float i = nn::sigmoid(i_pre[k]);
    const float cand = nn::bounded_tanh(c_pre[k]);
    const float o = nn::sigmoid(o_pre[k]);
    const float c = f * c_prev[k] + i * cand;
    c_out[k] = c;
    h_out[k] = o * std::tanh(c);
    if (trace) {
      t.forget_min = std::min(t.forget_min, f);
      t.forget_max = std::max(t.forget_max, f);
      t.input_min = std::min(t.input_min, i);
      t.input_max = std::max(t.input_max, i);
      t.output_min = std::min(t.output_min, o);
      t.output_max = std::max(t.output_max, o);
      t.candidate_abs_max = std::max(t.candidate_abs_max, std::fabs(cand));
      cell_inf = std::max(cell_inf, static_cast<double>(std::fabs(c)));
    }
  }
  if (trace) {
    t.cell_prev_inf = max_abs(prev.c.data());
    t.cell_inf = cell_inf;
    *trace = t;
  }
  return next;
}

Tensor2 predict_delta(const Tensor3& h, const nn::Conv2d& head) {
  if (head.kernel != 1 || head.out_channels != 1) {
    throw DimensionError("predict_delta: head must be a 1x1 convolution with one output");
  }
  const Tensor3 out = head.forward(h);
  return out.channel(0);
}

namespace {

const Tensor3& context_at(const std::map<std::uint8_t, Tensor3>& context, std::uint8_t divisor) {
  auto it = context.find(divisor);
  if (it == context.end()) {
    throw DimensionError("run_refinement: missing context at scale 1/" +
                         std::to_string(divisor));
  }
  return it->second;
}

Tensor3 disparity_plane(const DisparityMap& d) {
  Tensor3 t(1, d.height(), d.width());
  std::ranges::copy(d.values.data(), t.plane(0).begin());
  return t;
}

}  // namespace

RefinementResult run_refinement(const Tensor3& combined,
                                const std::map<std::uint8_t, Tensor3>& context,
                                const DisparityMap& d0, std::size_t iters,
                                const UpdateWeights& w) {
  if (iters == 0) throw PreconditionError("run_refinement: iters must be >= 1");
  const UpdateConfig& cfg = w.config;
  const std::size_t hidden = cfg.hidden_channels;
  const Tensor3& ctx16 = context_at(context, 16);
  const Tensor3& ctx8 = context_at(context, 8);
  const Tensor3& ctx4 = context_at(context, 4);
  if (ctx4.height() != d0.height() || ctx4.width() != d0.width() ||
      combined.height() != d0.height() || combined.width() != d0.width() ||
      ctx8.height() * 2 != ctx4.height() || ctx8.width() * 2 != ctx4.width() ||
      ctx16.height() * 2 != ctx8.height() || ctx16.width() * 2 != ctx8.width()) {
    throw DimensionError("run_refinement: context scales " + ctx16.shape_string() + ", " +
                         ctx8.shape_string() + ", " + ctx4.shape_string() +
                         " inconsistent with disparity " + d0.values.shape_string());
  }

  if (!all_finite(d0.values.data())) throw NumericError("run_refinement: non-finite initial disparity");

  RefinementResult result;
  LstmState state{Tensor3(hidden, ctx16.height(), ctx16.width()),
                  Tensor3(hidden, ctx16.height(), ctx16.width())};
  DisparityMap d = d0;
  // Running sum kept in double; rounding to float each step would drift.
  std::vector<double> acc(d0.values.data().begin(), d0.values.data().end());

  for (std::size_t k = 0; k < iters; ++k) {
    StepTrace trace;
    state = lstm_step(state, ctx16, w.stages[0], hidden, &trace);
    result.traces.push_back(trace);

    state = {upsample_bilinear(state.h, 2), upsample_bilinear(state.c, 2)};
    state = lstm_step(state, ctx8, w.stages[1], hidden, &trace);
    result.traces.push_back(trace);

    state = {upsample_bilinear(state.h, 2), upsample_bilinear(state.c, 2)};
    const Tensor3 lookup = cost::corr_lookup(combined, d, cfg.lookup_radius);
    const Tensor3 disp = disparity_plane(d);
    const Tensor3* parts[] = {&ctx4, &lookup, &disp};
    state = lstm_step(state, concat_channels(parts), w.stages[2], hidden, &trace);
    result.traces.push_back(trace);

    Tensor2 delta = predict_delta(state.h, w.head);
    auto dv = d.values.data();
    auto dd = delta.data();
    for (std::size_t i = 0; i < dv.size(); ++i) {
      acc[i] += static_cast<double>(dd[i]);
      dv[i] = static_cast<float>(acc[i]);
    }
    if (!all_finite(dv)) throw NumericError("run_refinement: non-finite disparity");
    result.sequence.push_back(d);
    result.deltas.push_back(std::move(delta));

    if (k + 1 < iters) state = {avg_pool(state.h, 4), avg_pool(state.c, 4)};
  }
  return result;
}

}  // namespace mocha::update
