// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mocha/cost_volume.hpp"
#include "mocha/motif_graph.hpp"
#include "mocha/tensor.hpp"
#include "mocha/update_op.hpp"

namespace mocha {

struct Toggles {
  bool mcg = true;
  bool wavelet = true;
  bool remp = true;

  friend bool operator==(const Toggles&, const Toggles&) = default;
};

/// Every knob of a match run. JSON field names equal the member names;
/// `normalization` is "paper_Nc" or "convex_votes" and toggles is an object
/// {"mcg": bool, "wavelet": bool, "remp": bool}.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::size_t n_groups = 8;
  std::size_t window = 3;
  motif::Normalization normalization = motif::Normalization::PaperNc;
  std::size_t wavelet_levels = 2;
  std::size_t max_disparity = 192;  ///< full resolution, pixels
  std::size_t iterations = 22;
  double gamma = 0.9;
  int disparity_sign = -1;
  std::size_t lookup_radius = 4;
  Toggles toggles;
  std::size_t feature_channels = 32;
  std::size_t hidden_channels = 64;
  std::size_t context_channels = 16;

  void validate() const;
  /// Disparity levels of the scale-4 volume: ceil(max_disparity / 4)
  /// rounded up to a multiple of 8.
  std::size_t volume_disparities() const;

  std::string to_json() const;
  /// Overlays the fields present in `json` on `base`. Unknown fields are a
  /// ConfigError.
  static PipelineConfig from_json(const std::string& json, const PipelineConfig& base);
  static PipelineConfig from_json(const std::string& json);

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Applies "name=on|off" (also true/false, 1/0) to the toggles.
void apply_toggle(Toggles& t, const std::string& assignment);

struct PipelineOptions {
  bool keep_graphs = false;
  bool keep_volumes = false;
  bool keep_refinement = false;  ///< Fill PipelineResult::deltas and traces.
  /// Replaces the seeded update-operator weights (shapes must match the
  /// config).
  std::optional<update::UpdateWeights> update_weights;
};

struct StageTimings {
  double encode_ms = 0, mcga_ms = 0, volume_ms = 0, refine_ms = 0, remp_ms = 0, total_ms = 0;
};

struct PipelineResult {
  DisparityMap disparity;               ///< full resolution, input size, clamped to [0, max_disparity]
  DisparityMap initial;                 ///< d_0 at scale 4
  std::vector<DisparityMap> iterations; ///< d_1 .. d_n at scale 4
  std::vector<Tensor2> deltas;          ///< with keep_refinement
  std::vector<update::StepTrace> traces;
  std::optional<cost::CorrelationVolume> volumes;
  std::vector<motif::GraphRecord> graphs_left, graphs_right;
  StageTimings timings;
};

/// Pads a 3 x H x W image by edge replication to sides that are multiples of
/// 16 and at least 32.
Tensor3 pad_for_encoder(const Tensor3& img);

PipelineResult run_pipeline(const Tensor3& left, const Tensor3& right, const PipelineConfig& cfg,
                            const PipelineOptions& opt = {});

}  // namespace mocha
