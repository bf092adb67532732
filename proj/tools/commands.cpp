// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "mocha/bytes.hpp"
#include "mocha/error.hpp"
#include "mocha/formats.hpp"
#include "mocha/graph_dump.hpp"
#include "mocha/metrics.hpp"
#include "mocha/parallel.hpp"
#include "mocha/pipeline.hpp"
#include "mocha/selftest.hpp"
#include "mocha/synthetic.hpp"
#include "mocha/wavelet.hpp"

namespace mocha::cli {

namespace fs = std::filesystem;

namespace {

struct MatchArgs {
  std::string left, right, out, config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iters;
  std::optional<std::size_t> max_disparity;
  std::vector<std::string> toggles;
  std::size_t threads = 0;
  std::string graphs_dir, iterations_dir, volumes_dir, viz, timing_json;
  bool distance_matrix = false;
};

struct EvalArgs {
  std::string disp, gt;
  std::vector<double> thresholds{1.0, 2.0, 3.0};
  bool mask_nonpositive = false;
  std::string loss_initial;
  std::vector<std::string> loss_sequence;
  double gamma = metrics::kDefaultGamma;
};

struct SelftestArgs {
  std::size_t trials = 100;
  std::uint64_t seed = selftest::Options{}.seed;
  std::string inject_fault;
};

struct DwtArgs {
  std::string in, out;
  std::size_t levels = 2;
};

struct SynthArgs {
  std::size_t height = 96, width = 128;
  double disparity = 8.0;
  std::uint64_t seed = 7;
  std::string left, right, gt;
};

std::string read_text(const fs::path& p) {
  const auto bytes = bytes::read_file(p);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& p, const std::string& s) {
  bytes::write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("MOCHA_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const char* end = s + std::char_traits<char>::length(s);
  const auto [ptr, ec] = std::from_chars(s, end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string("MOCHA_SEED is not an integer: ") + s);
  return v;
}

std::string iteration_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%03zu.pfm", k);
  return buf;
}

int cmd_match(const MatchArgs& a, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  if (auto s = env_seed()) cfg.seed = *s;
  if (!a.config.empty()) cfg = PipelineConfig::from_json(read_text(a.config), cfg);
  if (a.seed) cfg.seed = *a.seed;
  if (a.iters) cfg.iterations = *a.iters;
  if (a.max_disparity) cfg.max_disparity = *a.max_disparity;
  for (const auto& t : a.toggles) apply_toggle(cfg.toggles, t);
  cfg.validate();
  if (a.threads > 0) set_num_threads(a.threads);

  const auto left = formats::load_pnm(a.left);
  const auto right = formats::load_pnm(a.right);
  PipelineOptions po;
  po.keep_graphs = !a.graphs_dir.empty();
  po.keep_volumes = !a.volumes_dir.empty();
  const PipelineResult r = run_pipeline(left.pixels, right.pixels, cfg, po);

  formats::save_pfm(a.out, r.disparity);
  if (!a.viz.empty()) {
    formats::save_pnm(a.viz, formats::colorize_disparity(r.disparity, static_cast<double>(cfg.max_disparity)));
  }
  if (!a.iterations_dir.empty()) {
    const fs::path dir = a.iterations_dir;
    ensure_dir(dir);
    formats::save_pfm(dir / iteration_name(0), r.initial);
    for (std::size_t k = 0; k < r.iterations.size(); ++k)
      formats::save_pfm(dir / iteration_name(k + 1), r.iterations[k]);
  }
  if (!a.graphs_dir.empty()) {
    const fs::path dir = a.graphs_dir;
    ensure_dir(dir);
    write_text(dir / "left.jsonl", motif::graphs_to_jsonl(r.graphs_left, a.distance_matrix));
    write_text(dir / "right.jsonl", motif::graphs_to_jsonl(r.graphs_right, a.distance_matrix));
    write_text(dir / "left.dot", motif::graphs_to_dot(r.graphs_left, "left"));
    write_text(dir / "right.dot", motif::graphs_to_dot(r.graphs_right, "right"));
  }
  if (!a.volumes_dir.empty() && r.volumes) {
    const fs::path dir = a.volumes_dir;
    ensure_dir(dir);
    cost::dump_volume(dir / "grouped.bin", r.volumes->grouped);
    cost::dump_volume(dir / "motif.bin", r.volumes->motif);
    cost::dump_volume(dir / "combined.bin", r.volumes->combined);
  }
  const auto& t = r.timings;
  if (!a.timing_json.empty()) {
    nlohmann::ordered_json j;
    j["iterations"] = cfg.iterations;
    j["encode_ms"] = t.encode_ms;
    j["mcga_ms"] = t.mcga_ms;
    j["volume_ms"] = t.volume_ms;
    j["refine_ms"] = t.refine_ms;
    j["remp_ms"] = t.remp_ms;
    j["total_ms"] = t.total_ms;
    write_text(a.timing_json, j.dump(2) + "\n");
  }
  char line[160];
  std::snprintf(line, sizeof line, "match: %zux%zu, %zu iterations, %.1f ms\n", r.disparity.height(),
                r.disparity.width(), cfg.iterations, t.total_ms);
  err << line;
  (void)out;
  return kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  const DisparityMap d = formats::load_pfm(a.disp);
  const DisparityMap gt = formats::load_pfm(a.gt);
  const metrics::Mask mask = a.mask_nonpositive ? metrics::positive_gt_mask(d, gt) : metrics::joint_mask(d, gt);
  metrics::EvalReport rep = metrics::evaluate(d.values, gt.values, mask, a.thresholds);
  if (!a.loss_sequence.empty()) {
    if (a.loss_initial.empty()) throw ConfigError("eval: --loss-sequence needs --loss-initial");
    const DisparityMap d0 = formats::load_pfm(a.loss_initial);
    std::vector<Tensor2> seq;
    for (const auto& p : a.loss_sequence) seq.push_back(formats::load_pfm(p).values);
    rep.loss = metrics::sequence_loss(d0.values, seq, gt.values, mask, a.gamma);
  } else if (!a.loss_initial.empty()) {
    throw ConfigError("eval: --loss-initial needs --loss-sequence");
  }
  out << rep.to_json() << '\n';
  return kOk;
}

int cmd_selftest(const SelftestArgs& a, std::ostream& out, std::ostream& err) {
  selftest::Options opt;
  opt.trials = a.trials;
  opt.seed = a.seed;
  opt.inject_fault = a.inject_fault;
  const selftest::Report rep = selftest::run(opt);
  out << rep.to_json() << '\n';
  err << rep.table();
  if (rep.passed()) return kOk;
  err << "selftest: failing properties:";
  for (const auto& name : rep.failing()) err << ' ' << name;
  err << '\n';
  return kFailure;
}

int cmd_dwt(const DwtArgs& a, std::ostream& out, std::ostream&) {
  const auto img = formats::load_pnm(a.in);
  const auto pyramids = wavelet::dwt3(img.pixels, a.levels);
  const Tensor3 back = wavelet::idwt3(pyramids);
  double worst = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i)
    worst = std::max(worst, std::fabs(static_cast<double>(back.data()[i]) - img.pixels.data()[i]));
  if (!a.out.empty()) formats::save_pnm(a.out, back, img.maxval);
  nlohmann::ordered_json j;
  j["levels"] = a.levels;
  j["shape"] = img.pixels.shape_string();
  j["max_abs_error"] = worst;
  out << j.dump() << '\n';
  return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream&, std::ostream&) {
  const auto pair = synthetic::textured_plane(a.height, a.width, a.disparity, a.seed);
  formats::save_pnm(a.left, pair.left);
  formats::save_pnm(a.right, pair.right);
  if (!a.gt.empty()) formats::save_pfm(a.gt, pair.ground_truth);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Motif-guided stereo matching toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mocha 0.1.0");

  MatchArgs ma;
  auto* match = app.add_subcommand("match", "Estimate a disparity map for a rectified pair");
  match->add_option("--left", ma.left, "Left image (PGM/PPM)")->required();
  match->add_option("--right", ma.right, "Right image (PGM/PPM)")->required();
  match->add_option("--out", ma.out, "Output disparity (PFM)")->required();
  match->add_option("--config", ma.config, "JSON pipeline configuration");
  match->add_option("--seed", ma.seed, "Weight seed (default: $MOCHA_SEED, then 0)");
  match->add_option("--iters", ma.iters, "Refinement iterations")->check(CLI::PositiveNumber);
  match->add_option("--max-disparity", ma.max_disparity, "Full-resolution disparity range")
      ->check(CLI::PositiveNumber);
  match->add_option("--toggle", ma.toggles, "Ablation toggle name=on|off (mcg, wavelet, remp)");
  match->add_option("--threads", ma.threads, "Worker threads (0 = hardware)");
  match->add_option("--dump-motif-graphs", ma.graphs_dir, "Write motif graphs (JSONL + DOT) here");
  match->add_flag("--distance-matrix", ma.distance_matrix, "Include distance matrices in graph dumps");
  match->add_option("--dump-iterations", ma.iterations_dir, "Write d_0..d_n (quarter resolution PFM) here");
  match->add_option("--dump-volumes", ma.volumes_dir, "Write cost volumes here");
  match->add_option("--viz", ma.viz, "Colourized disparity (PPM)");
  match->add_option("--timing-json", ma.timing_json, "Write per-stage timings as JSON");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score a disparity map against ground truth");
  eval->add_option("--disp", ea.disp, "Estimated disparity (PFM)")->required();
  eval->add_option("--gt", ea.gt, "Ground truth disparity (PFM)")->required();
  eval->add_option("--thresholds", ea.thresholds, "Bad-pixel thresholds")->delimiter(',');
  eval->add_flag("--mask-nonpositive", ea.mask_nonpositive, "Ignore pixels whose ground truth is <= 0");
  eval->add_option("--loss-initial", ea.loss_initial, "d_0 for the sequence loss (PFM)");
  eval->add_option("--loss-sequence", ea.loss_sequence, "d_1..d_n for the sequence loss (PFM)");
  eval->add_option("--gamma", ea.gamma, "Sequence loss decay")->check(CLI::Range(0.0, 1.0));

  SelftestArgs sa;
  auto* self = app.add_subcommand("selftest", "Run the brute-force oracle suites");
  self->add_option("--trials", sa.trials, "Random instances per suite")->check(CLI::PositiveNumber);
  self->add_option("--seed", sa.seed, "Seed for the random instances");
  self->add_option("--inject-fault", sa.inject_fault, "Sabotage one property (negative control)")
      ->group("");

  DwtArgs da;
  auto* dwt = app.add_subcommand("dwt", "Round-trip an image through the Haar wavelet");
  dwt->add_option("--in", da.in, "Input image (PGM/PPM)")->required();
  dwt->add_option("--out", da.out, "Reconstructed image (PGM/PPM)");
  dwt->add_option("--levels", da.levels, "Decomposition levels")->check(CLI::PositiveNumber);

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Write a synthetic textured-plane stereo pair");
  synth->add_option("--height", ya.height)->check(CLI::PositiveNumber);
  synth->add_option("--width", ya.width)->check(CLI::PositiveNumber);
  synth->add_option("--disparity", ya.disparity)->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", ya.seed);
  synth->add_option("--left", ya.left, "Left image (PPM)")->required();
  synth->add_option("--right", ya.right, "Right image (PPM)")->required();
  synth->add_option("--gt", ya.gt, "Ground truth disparity (PFM)");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*match) return cmd_match(ma, out, err);
    if (*eval) return cmd_eval(ea, out, err);
    if (*self) return cmd_selftest(sa, out, err);
    if (*dwt) return cmd_dwt(da, out, err);
    if (*synth) return cmd_synth(ya, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace mocha::cli
