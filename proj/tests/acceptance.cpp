// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Criteria 9 and 11 drive the installed CLI binary.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "mocha/bytes.hpp"
#include "mocha/cost_volume.hpp"
#include "mocha/formats.hpp"
#include "mocha/metrics.hpp"
#include "mocha/parallel.hpp"
#include "mocha/pipeline.hpp"
#include "mocha/remp.hpp"
#include "mocha/selftest.hpp"
#include "mocha/synthetic.hpp"
#include "support.hpp"

using namespace mocha;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

selftest::Report suite(const std::string& name, std::size_t trials) {
  selftest::Options o;
  o.trials = trials;
  o.suites = {name};
  return selftest::run(o);
}

const selftest::PropertyResult* find(const selftest::Report& r, const std::string& name) {
  for (const auto& p : r.properties)
    if (p.property == name) return &p;
  return nullptr;
}

void require_props(Outcome& o, const selftest::Report& r, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    const auto* p = find(r, n);
    if (!p) {
      o.require(false, std::string("missing property ") + n);
      continue;
    }
    o.require(p->passed, std::string(n) + ": " + p->detail);
    o.require(p->checks > 0, std::string(n) + ": no checks ran");
  }
}

double worst(const selftest::Report& r, const char* name) {
  const auto* p = find(r, name);
  return p ? p->worst : NAN;
}

// Runs the CLI binary; stdout and stderr go to files under `dir`.
struct Proc {
  int code = -1;
  double seconds = 0.0;
  std::string out, err;
};

Proc run_cli(const std::filesystem::path& dir, const std::vector<std::string>& args) {
  std::string cmd = std::string("'") + MOCHA_CLI_PATH + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  cmd += " >'" + out.string() + "' 2>'" + err.string() + "'";
  const auto t0 = Clock::now();
  const int status = std::system(cmd.c_str());
  Proc p;
  p.seconds = seconds_since(t0);
  p.code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  p.out = test::read_text(out);
  p.err = test::read_text(err);
  return p;
}

std::vector<float> volume_payload(const std::filesystem::path& p) {
  const auto bytes = bytes::read_file(p);
  std::vector<float> v;
  bytes::Reader r(bytes);
  r.skip(32);
  while (r.remaining() >= 4) v.push_back(r.f32_le("volume sample"));
  return v;
}

// ---------------------------------------------------------------------------

Outcome wavelet_roundtrip() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto r = suite("wavelet", 200);
  const double t = seconds_since(t0);
  require_props(o, r, {"wavelet.roundtrip", "wavelet.energy"});
  o.require(t < 5.0, "runtime " + fmt("%.2f s", t));
  if (o.pass)
    o.detail = "200 tensors, worst rel " + fmt("%.2e", worst(r, "wavelet.roundtrip")) + ", energy " +
               fmt("%.2e", worst(r, "wavelet.energy")) + ", " + fmt("%.2f s", t);
  return o;
}

selftest::Report mcg_report;
double mcg_seconds = 0.0;

Outcome mcg_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  mcg_report = suite("mcg", 1000);
  mcg_seconds = seconds_since(t0);
  require_props(o, mcg_report,
                {"mcg.weights_oracle", "mcg.nearest_oracle", "mcg.vote_conservation", "mcg.motif_oracle"});
  o.require(mcg_seconds < 30.0, "runtime " + fmt("%.2f s", mcg_seconds));
  if (o.pass)
    o.detail = "1000 groups, weights " + fmt("%.1e", worst(mcg_report, "mcg.weights_oracle")) + ", motif " +
               fmt("%.1e", worst(mcg_report, "mcg.motif_oracle")) + ", " + fmt("%.2f s", mcg_seconds);
  return o;
}

Outcome mcg_equivariance() {
  Outcome o;
  require_props(o, mcg_report, {"mcg.permutation", "mcg.scale"});
  const auto* p = find(mcg_report, "mcg.permutation");
  o.require(p && p->checks >= 200, "fewer than 200 groups");
  if (o.pass)
    o.detail = std::to_string(p->checks) + " groups, permutation " + fmt("%.1e", p->worst) + ", scale " +
               fmt("%.1e", worst(mcg_report, "mcg.scale"));
  return o;
}

Outcome correlation_oracles() {
  Outcome o;
  const auto r = suite("correlation", 100);
  require_props(o, r, {"corr.group_corr", "corr.motif_identity", "corr.combine", "corr.swap_symmetry"});
  if (o.pass)
    o.detail = "100 instances, group " + fmt("%.1e", worst(r, "corr.group_corr")) + ", combine " +
               fmt("%.1e", worst(r, "corr.combine")) + ", swap exact";
  return o;
}

Outcome soft_argmin_cases() {
  Outcome o;
  for (std::size_t D = 2; D <= 64; ++D) {
    const float v = cost::soft_argmin(Tensor3(D, 1, 1, 0.7f)).values(0, 0);
    o.require(v == static_cast<float>(D - 1) / 2.0f, "uniform logits, D=" + std::to_string(D));
  }
  double hot_err = 0.0;
  for (std::size_t D : {2, 5, 48}) {
    for (std::size_t k = 0; k < D; ++k) {
      Tensor3 hot(D, 1, 1);
      hot(k, 0, 0) = 100.0f;
      hot_err = std::max(hot_err, std::fabs(cost::soft_argmin(hot).values(0, 0) - static_cast<double>(k)));
    }
  }
  o.require(hot_err <= 1e-4, "one-hot error " + fmt("%.2e", hot_err));
  Tensor3 worked(3, 1, 1);
  worked(1, 0, 0) = static_cast<float>(std::log(2.0));
  const double w = cost::soft_argmin(worked).values(0, 0);
  o.require(std::fabs(w - 1.0) <= 1e-6, "[0, ln 2, 0] gave " + fmt("%.9f", w));
  if (o.pass) o.detail = "uniform exact, one-hot " + fmt("%.1e", hot_err) + ", worked " + fmt("%.1e", std::fabs(w - 1.0));
  return o;
}

Outcome update_operator() {
  Outcome o;
  const auto pair = synthetic::textured_plane(64, 96, 8.0, 17);
  PipelineConfig cfg;
  cfg.seed = 23;
  cfg.iterations = 32;
  PipelineOptions po;
  po.keep_refinement = true;

  set_num_threads(1);
  const auto a = run_pipeline(pair.left, pair.right, cfg, po);
  o.require(a.iterations.size() == 32 && a.deltas.size() == 32, "expected 32 iterations");
  o.require(a.traces.size() == 32 * update::kStages, "missing traces");
  for (const auto& t : a.traces) {
    o.require(t.forget_min > 0.0f && t.forget_max < 1.0f, "forget gate left (0, 1)");
    o.require(t.input_min > 0.0f && t.input_max < 1.0f, "input gate left (0, 1)");
    o.require(t.output_min > 0.0f && t.output_max < 1.0f, "output gate left (0, 1)");
    o.require(t.candidate_abs_max < 1.0f, "candidate left (-1, 1)");
    o.require(t.cell_inf <= t.cell_prev_inf + 1.0, "cell grew by more than 1");
  }
  double acc_err = 0.0;
  if (a.iterations.size() == 32 && a.deltas.size() == 32) {
    const auto& d0 = a.initial.values.data();
    for (std::size_t i = 0; i < d0.size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 32; ++k) {
        const float prev = k == 0 ? d0[i] : a.iterations[k - 1].values.data()[i];
        o.require(test::step_consistent(prev, a.deltas[k].data()[i], a.iterations[k].values.data()[i]),
                  "d_k != d_{k-1} + delta_k beyond rounding");
        sum += a.deltas[k].data()[i];
      }
      const double dn = a.iterations.back().values.data()[i];
      acc_err = std::max(acc_err, std::fabs(dn - d0[i] - sum));
    }
  }
  o.require(acc_err <= 1e-5, "accumulation error " + fmt("%.2e", acc_err));

  set_num_threads(3);
  const auto b = run_pipeline(pair.left, pair.right, cfg, po);
  set_num_threads(1);
  bool same = test::bit_equal(a.disparity.values.data(), b.disparity.values.data());
  for (std::size_t k = 0; same && k < a.iterations.size(); ++k)
    same = test::bit_equal(a.iterations[k].values.data(), b.iterations[k].values.data());
  o.require(same, "1 vs 3 threads differ");

  update::UpdateConfig uc;
  uc.hidden_channels = cfg.hidden_channels;
  uc.context_channels = cfg.context_channels;
  uc.lookup_radius = cfg.lookup_radius;
  PipelineOptions zero;
  zero.update_weights = update::UpdateWeights::zeros(uc);
  const auto z = run_pipeline(pair.left, pair.right, cfg, zero);
  for (const auto& d : z.iterations) o.require(d.values == z.initial.values, "zero weights moved d_k");

  if (o.pass) o.detail = "64x96, 32 iterations, accumulation " + fmt("%.1e", acc_err) + ", threads 1/3 identical";
  return o;
}

Outcome remp_warp() {
  Outcome o;
  double shift_err = 0.0;
  for (std::size_t delta : {1, 2, 4}) {
    const std::size_t H = 16, W = 40;
    const Tensor3 right = test::random_tensor(500 + delta, 3, H, W);
    Tensor3 left(3, H, W);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t h = 0; h < H; ++h)
        for (std::size_t w = 0; w < W; ++w) left(c, h, w) = right(c, h, w >= delta ? w - delta : 0);
    const auto E = remp::recon_error(left, right, DisparityMap(H, W, static_cast<float>(delta)));
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t w = delta; w < W; ++w)
        for (std::size_t c = 0; c < 3; ++c) {
          sum += std::fabs(E.error(c, h, w));
          ++n;
        }
    shift_err = std::max(shift_err, sum / static_cast<double>(n));
  }
  o.require(shift_err <= 1e-6, "integer shift mean |E| " + fmt("%.2e", shift_err));
  const auto r = suite("warp", 100);
  require_props(o, r, {"warp.integer_shift", "warp.homography_shortcut", "warp.zero_head"});
  if (o.pass)
    o.detail = "shift " + fmt("%.1e", shift_err) + ", homography vs shortcut " +
               fmt("%.1e", worst(r, "warp.homography_shortcut")) + ", zero head exact";
  return o;
}

Outcome loss_cases() {
  Outcome o;
  const Tensor2 gt(1, 1, 5.0f);
  const std::vector<Tensor2> seq{Tensor2(1, 1, 6.0f), Tensor2(1, 1, 5.0f)};
  const double L = metrics::sequence_loss(Tensor2(1, 1, 5.0f), seq, gt, metrics::Mask{1}, 0.9);
  o.require(std::fabs(L - 0.9) <= 1e-9, "hand case gave " + fmt("%.12f", L));
  o.require(metrics::smooth_l1(0.0) == 0.0, "smooth_l1(0)");
  o.require(metrics::smooth_l1(0.5) == 0.125, "smooth_l1(0.5)");
  o.require(metrics::smooth_l1(1.0) == 0.5, "smooth_l1(1)");
  if (o.pass) o.detail = "hand case " + fmt("%.12f", L) + ", smooth_l1 0/0.125/0.5";
  return o;
}

struct Scene {
  test::TempDir dir;
  std::string left, right, gt;
};

Outcome end_to_end(Scene& s) {
  Outcome o;
  const auto& d = s.dir.path();
  s.left = (d / "left.ppm").string();
  s.right = (d / "right.ppm").string();
  s.gt = (d / "gt.pfm").string();
  Proc p = run_cli(d, {"synth", "--height", "96", "--width", "128", "--disparity", "8", "--seed", "7",
                       "--left", s.left, "--right", s.right, "--gt", s.gt});
  o.require(p.code == 0, "synth exit " + std::to_string(p.code) + ": " + p.err);
  if (!o.pass) return o;

  const std::string out = (d / "disp.pfm").string();
  const std::string vol_on = (d / "vol_on").string(), vol_off = (d / "vol_off").string();
  p = run_cli(d, {"match", "--left", s.left, "--right", s.right, "--out", out, "--seed", "1",
                  "--dump-volumes", vol_on});
  const double t_match = p.seconds;
  o.require(p.code == 0, "match exit " + std::to_string(p.code) + ": " + p.err);
  o.require(t_match < 10.0, "match took " + fmt("%.2f s", t_match));
  if (!o.pass) return o;

  const DisparityMap disp = formats::load_pfm(out);
  o.require(disp.height() == 96 && disp.width() == 128, "output size");
  for (float v : disp.values.data()) o.require(std::isfinite(v) && v >= 0.0f && v <= 192.0f, "disparity out of range");

  p = run_cli(d, {"eval", "--disp", out, "--gt", s.gt});
  o.require(p.code == 0, "eval exit " + std::to_string(p.code) + ": " + p.err);
  double epe = NAN;
  try {
    const auto j = nlohmann::json::parse(p.out);
    epe = j.at("epe").get<double>();
    o.require(j.at("bad").contains("1.0"), "eval report lacks bad[1.0]");
  } catch (const std::exception& e) {
    o.require(false, std::string("eval output: ") + e.what());
  }

  p = run_cli(d, {"match", "--left", s.left, "--right", s.right, "--out", (d / "off.pfm").string(), "--seed",
                  "1", "--toggle", "mcg=off", "--dump-volumes", vol_off});
  o.require(p.code == 0, "mcg=off match exit " + std::to_string(p.code));
  double diff = 0.0;
  if (o.pass) {
    const auto on = volume_payload(std::filesystem::path(vol_on) / "combined.bin");
    const auto off = volume_payload(std::filesystem::path(vol_off) / "combined.bin");
    o.require(on.size() == off.size() && !on.empty(), "combined volume sizes differ");
    if (on.size() == off.size()) diff = test::max_abs_diff(on, off);
    o.require(diff > 0.0, "mcg on/off combined volumes identical");
  }
  if (o.pass)
    o.detail = "96x128 match " + fmt("%.2f s", t_match) + ", eval epe " + fmt("%.3f", epe) +
               ", mcg on/off max diff " + fmt("%.3e", diff);
  return o;
}

Outcome io_exact() {
  Outcome o;
  const auto r = suite("io", 100);
  require_props(o, r, {"io.pfm_roundtrip", "io.pnm_roundtrip"});
  const std::string header = "Pf\n1 1\n-1.0\n";
  std::vector<std::uint8_t> b(header.begin(), header.end());
  for (std::uint8_t x : {0x00, 0x00, 0x20, 0x40}) b.push_back(x);
  const float v = formats::read_pfm(b).values(0, 0);
  o.require(v == 2.5f, "minimal PFM gave " + fmt("%g", v));
  if (o.pass) o.detail = "100 PFM + 100 PNM byte-identical, minimal PFM = 2.5";
  return o;
}

Outcome iteration_sweep(const Scene& s) {
  Outcome o;
  if (s.left.empty()) {
    o.require(false, "no synthetic pair (criterion 9 failed early)");
    return o;
  }
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string summary;
  for (std::size_t k : {1, 2, 4, 8, 16, 32}) {
    const auto out = s.dir.path() / ("sweep_" + std::to_string(k) + ".pfm");
    const Proc p = run_cli(s.dir.path(), {"match", "--left", s.left, "--right", s.right, "--out", out.string(),
                                          "--seed", "1", "--iters", std::to_string(k)});
    o.require(p.code == 0, "k=" + std::to_string(k) + " exit " + std::to_string(p.code));
    nlohmann::ordered_json row;
    row["iters"] = k;
    row["seconds"] = p.seconds;
    row["exit"] = p.code;
    if (p.code == 0) {
      const auto d = formats::load_pfm(out);
      const auto gt = formats::load_pfm(s.gt);
      row["epe"] = metrics::epe(d.values, gt.values, metrics::joint_mask(d, gt));
    }
    rows.push_back(row);
    summary += (summary.empty() ? "" : " ") + std::to_string(k) + ":" + fmt("%.2fs", p.seconds);
  }
  std::ofstream("iteration_sweep.json") << rows.dump(2) << "\n";
  if (o.pass) o.detail = summary + " (iteration_sweep.json)";
  return o;
}

}  // namespace

int main() {
  Scene scene;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"wavelet round-trip", wavelet_roundtrip},
      {"MCG oracle equivalence", mcg_oracle},
      {"MCG equivariances", mcg_equivariance},
      {"correlation oracles", correlation_oracles},
      {"soft-argmin cases", soft_argmin_cases},
      {"update operator invariants", update_operator},
      {"REMP warp", remp_warp},
      {"loss evaluator", loss_cases},
      {"end-to-end smoke", [&] { return end_to_end(scene); }},
      {"IO bit-exactness", io_exact},
      {"iteration sweep", [&] { return iteration_sweep(scene); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %-28s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
