// SPDX-License-Identifier: Apache-2.0
#include "mocha/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>

#include "mocha/error.hpp"
#include "mocha/features.hpp"
#include "mocha/random.hpp"
#include "mocha/remp.hpp"
#include "mocha/update_op.hpp"

namespace mocha {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (window != 3) throw ConfigError("config: window must be 3");
  if (n_groups == 0) throw ConfigError("config: n_groups must be positive");
  if (feature_channels == 0 || feature_channels % n_groups != 0) {
    throw ConfigError("config: feature_channels (" + std::to_string(feature_channels) +
                      ") must be a positive multiple of n_groups (" + std::to_string(n_groups) + ")");
  }
  if (toggles.mcg && feature_channels / n_groups < 2) {
    throw ConfigError("config: motif graphs need at least 2 channels per group");
  }
  if (wavelet_levels == 0) throw ConfigError("config: wavelet_levels must be >= 1");
  if (max_disparity == 0) throw ConfigError("config: max_disparity must be positive");
  if (iterations == 0) throw ConfigError("config: iterations must be >= 1");
  if (!(gamma > 0.0) || !(gamma <= 1.0)) throw ConfigError("config: gamma must be in (0, 1]");
  if (disparity_sign != 1 && disparity_sign != -1) {
    throw ConfigError("config: disparity_sign must be +1 or -1");
  }
  if (hidden_channels == 0 || context_channels == 0) {
    throw ConfigError("config: hidden_channels and context_channels must be positive");
  }
}

std::size_t PipelineConfig::volume_disparities() const {
  const std::size_t quarter = (max_disparity + 3) / 4;
  return std::max<std::size_t>(8, (quarter + 7) / 8 * 8);
}

std::string PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["n_groups"] = n_groups;
  j["window"] = window;
  j["normalization"] = motif::to_string(normalization);
  j["wavelet_levels"] = wavelet_levels;
  j["max_disparity"] = max_disparity;
  j["iterations"] = iterations;
  j["gamma"] = gamma;
  j["disparity_sign"] = disparity_sign;
  j["lookup_radius"] = lookup_radius;
  j["toggles"] = {{"mcg", toggles.mcg}, {"wavelet", toggles.wavelet}, {"remp", toggles.remp}};
  j["feature_channels"] = feature_channels;
  j["hidden_channels"] = hidden_channels;
  j["context_channels"] = context_channels;
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text, const PipelineConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  PipelineConfig cfg = base;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "n_groups") cfg.n_groups = value.get<std::size_t>();
      else if (key == "window") cfg.window = value.get<std::size_t>();
      else if (key == "normalization") cfg.normalization = motif::parse_normalization(value.get<std::string>());
      else if (key == "wavelet_levels") cfg.wavelet_levels = value.get<std::size_t>();
      else if (key == "max_disparity") cfg.max_disparity = value.get<std::size_t>();
      else if (key == "iterations") cfg.iterations = value.get<std::size_t>();
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "disparity_sign") cfg.disparity_sign = value.get<int>();
      else if (key == "lookup_radius") cfg.lookup_radius = value.get<std::size_t>();
      else if (key == "feature_channels") cfg.feature_channels = value.get<std::size_t>();
      else if (key == "hidden_channels") cfg.hidden_channels = value.get<std::size_t>();
      else if (key == "context_channels") cfg.context_channels = value.get<std::size_t>();
      else if (key == "toggles") {
        if (!value.is_object()) throw ConfigError("config: toggles must be an object");
        for (const auto& [name, flag] : value.items()) {
          if (name == "mcg") cfg.toggles.mcg = flag.get<bool>();
          else if (name == "wavelet") cfg.toggles.wavelet = flag.get<bool>();
          else if (name == "remp") cfg.toggles.remp = flag.get<bool>();
          else throw ConfigError("config: unknown toggle '" + name + "'");
        }
      } else {
        throw ConfigError("config: unknown field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: wrong value type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  return from_json(text, PipelineConfig{});
}

void apply_toggle(Toggles& t, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("toggle '" + assignment + "' is not name=on|off");
  const std::string name = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  bool flag = false;
  if (value == "on" || value == "true" || value == "1") flag = true;
  else if (value == "off" || value == "false" || value == "0") flag = false;
  else throw ConfigError("toggle value '" + value + "' is not on/off");
  if (name == "mcg") t.mcg = flag;
  else if (name == "wavelet") t.wavelet = flag;
  else if (name == "remp") t.remp = flag;
  else throw ConfigError("unknown toggle '" + name + "'");
}

Tensor3 pad_for_encoder(const Tensor3& img) {
  auto target = [](std::size_t n) { return std::max<std::size_t>(32, (n + 15) / 16 * 16); };
  const std::size_t H = target(img.height()), W = target(img.width());
  if (H == img.height() && W == img.width()) return img;
  Tensor3 out(img.channels(), H, W);
  for (std::size_t c = 0; c < img.channels(); ++c)
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t w = 0; w < W; ++w)
        out(c, h, w) = img(c, std::min(h, img.height() - 1), std::min(w, img.width() - 1));
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Tensor3 as_rgb(const Tensor3& img) {
  if (img.channels() == 3) return img;
  if (img.channels() != 1) {
    throw DimensionError("pipeline: images must have 1 or 3 channels, got " + img.shape_string());
  }
  const Tensor3* parts[] = {&img, &img, &img};
  return concat_channels(parts);
}

}  // namespace

PipelineResult run_pipeline(const Tensor3& left_in, const Tensor3& right_in,
                            const PipelineConfig& cfg, const PipelineOptions& opt) {
  cfg.validate();
  if (left_in.height() != right_in.height() || left_in.width() != right_in.width() ||
      left_in.channels() != right_in.channels()) {
    throw DimensionError("pipeline: left " + left_in.shape_string() + " and right " +
                         right_in.shape_string() + " differ");
  }
  if (left_in.empty()) throw DimensionError("pipeline: empty images");
  const auto t_start = Clock::now();
  PipelineResult result;

  const Tensor3 left = pad_for_encoder(as_rgb(left_in));
  const Tensor3 right = pad_for_encoder(as_rgb(right_in));
  SeededGenerator root(cfg.seed);

  auto t0 = Clock::now();
  features::EncoderConfig enc;
  enc.seed = root.fork(1).next_u64();
  enc.channels4 = cfg.feature_channels;
  enc.context_channels = cfg.context_channels;
  const features::ToyEncoder encoder(enc);
  const features::FeatureSet fl = encoder.encode(left);
  const features::FeatureSet fr = encoder.encode(right);
  result.timings.encode_ms = ms_since(t0);

  cost::CorrOptions corr;
  corr.max_disparity = cfg.volume_disparities();
  corr.groups = cfg.n_groups;
  corr.disparity_sign = cfg.disparity_sign;

  t0 = Clock::now();
  cost::CorrelationVolume vol;
  vol.grouped = cost::group_corr(fl.matching, fr.matching, corr);
  result.timings.volume_ms = ms_since(t0);
  if (cfg.toggles.mcg) {
    t0 = Clock::now();
    motif::McgaConfig mc;
    mc.n_groups = cfg.n_groups;
    mc.window = cfg.window;
    mc.normalization = cfg.normalization;
    mc.levels = cfg.wavelet_levels;
    mc.use_wavelet = cfg.toggles.wavelet;
    auto ml = motif::mcga_apply_detailed(fl.matching, mc, opt.keep_graphs);
    auto mr = motif::mcga_apply_detailed(fr.matching, mc, opt.keep_graphs);
    result.graphs_left = std::move(ml.graphs);
    result.graphs_right = std::move(mr.graphs);
    result.timings.mcga_ms = ms_since(t0);

    t0 = Clock::now();
    auto conv_gen = root.fork(2);
    vol.motif = cost::motif_corr(ml.features, mr.features, corr, nn::VolumeConv::seeded(conv_gen));
    result.timings.volume_ms += ms_since(t0);
  } else {
    vol.motif = cost::GroupedVolume(corr.max_disparity, fl.matching.height(),
                                    fl.matching.width(), cfg.n_groups, 1.0f);
  }

  t0 = Clock::now();
  vol.combined = cost::combine(vol.grouped, vol.motif);
  auto init_gen = root.fork(3);
  result.initial = cost::init_disparity(vol.combined, nn::VolumeConv::seeded(init_gen));
  result.timings.volume_ms += ms_since(t0);

  t0 = Clock::now();
  update::UpdateConfig uc;
  uc.hidden_channels = cfg.hidden_channels;
  uc.context_channels = cfg.context_channels;
  uc.lookup_radius = cfg.lookup_radius;
  const auto weights = opt.update_weights ? *opt.update_weights
                                           : update::UpdateWeights::seeded(root.fork(4).next_u64(), uc);
  auto refined = update::run_refinement(vol.combined, fl.context, result.initial,
                                        cfg.iterations, weights);
  result.iterations = std::move(refined.sequence);
  if (opt.keep_refinement) {
    result.deltas = std::move(refined.deltas);
    result.traces = std::move(refined.traces);
  }
  result.timings.refine_ms = ms_since(t0);

  t0 = Clock::now();
  DisparityMap full = remp::upsample_disparity(result.iterations.back(), 4);
  if (cfg.toggles.remp) {
    remp::ReconOptions ro;
    ro.disparity_sign = cfg.disparity_sign;
    const remp::ReconError E = remp::recon_error(left, right, full, ro);
    const auto rw = remp::RempWeights::seeded(root.fork(5).next_u64(), left.channels(),
                                              cfg.normalization);
    full = remp::remp_refine(full, E, rw);
  }
  result.timings.remp_ms = ms_since(t0);

  const std::size_t H = left_in.height(), W = left_in.width();
  result.disparity = DisparityMap(H, W);
  const auto max_d = static_cast<float>(cfg.max_disparity);
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t w = 0; w < W; ++w) {
      const float v = full.values(h, w);
      if (!std::isfinite(v)) throw NumericError("pipeline: non-finite output disparity");
      result.disparity.values(h, w) = std::clamp(v, 0.0f, max_d);
    }
  }
  if (opt.keep_volumes) result.volumes = std::move(vol);
  result.timings.total_ms = ms_since(t_start);
  return result;
}

}  // namespace mocha
