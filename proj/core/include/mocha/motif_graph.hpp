// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mocha/tensor.hpp"

namespace mocha::motif {

inline constexpr std::size_t kWindow = 3;
inline constexpr std::size_t kSeqLen = kWindow * kWindow;

/// A flattened 3x3 patch, row-major.
using Sequence = std::array<float, kSeqLen>;
using Motif = std::array<double, kSeqLen>;

/// How Σ w_c s_c is normalized when forming a motif.
///  - PaperNc:     m = Σ_c (w_c / N_c) s_c with N_c the total channel count.
///  - ConvexVotes: m = Σ_c (w_c / Σw) s_c, a convex combination.
enum class Normalization { PaperNc, ConvexVotes };

Normalization parse_normalization(const std::string& name);
std::string to_string(Normalization n);

struct McgaConfig {
  std::size_t n_groups = 8;
  std::size_t window = kWindow;
  Normalization normalization = Normalization::PaperNc;
  std::size_t levels = 2;
  bool self_exclusion = true;
  bool use_wavelet = true;  ///< Off: graphs are built on the spatial planes.

  void validate(std::size_t channels) const;
};

struct TileGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t height = 0;  ///< Plane size before padding.
  std::size_t width = 0;

  std::size_t count() const noexcept { return rows * cols; }
};

struct Tiling {
  std::vector<Sequence> patches;  ///< Row-major tile order.
  TileGrid grid;
};

/// Splits a plane into non-overlapping stride-3 tiles after padding right and
/// bottom by edge replication to multiples of 3.
Tiling tile_patches(const Tensor2& plane);

/// Places each motif at its tile slot and crops to grid.height x grid.width.
Tensor2 stitch_motifs(std::span<const Motif> motifs, const TileGrid& grid);

/// Euclidean distance accumulated in double, in index order.
double sequence_distance(std::span<const float> a, std::span<const float> b);

/// Nearest-neighbour voting graph over one group at one patch position.
///
/// Every node casts one vote, split evenly over its p tied nearest
/// neighbours. Votes are kept as integers in units of 1/unit_denominator
/// (the lcm of all tie counts), so Σ vote_units == node_count *
/// unit_denominator holds exactly.
struct MotifGraph {
  std::size_t group = 0;
  std::size_t position = 0;
  std::size_t node_count = 0;
  std::vector<double> distances;  ///< node_count x node_count, row-major.
  std::vector<std::vector<std::size_t>> nearest;
  std::vector<std::int64_t> vote_units;
  std::int64_t unit_denominator = 1;

  double distance(std::size_t a, std::size_t b) const { return distances[a * node_count + b]; }
  double weight(std::size_t c) const {
    return static_cast<double>(vote_units[c]) / static_cast<double>(unit_denominator);
  }
  std::vector<double> weights() const;
  std::int64_t total_units() const;
};

/// Builds the graph from the group's sequences at one position. Ties are
/// exact equality of the stored double distances.
MotifGraph build_graph(std::span<const Sequence> seqs, bool self_exclusion = true);

/// Weighted combination of `seqs` by the graph's votes. `total_channels` is
/// N_c for PaperNc and ignored for ConvexVotes.
Motif extract_motif(const MotifGraph& g, std::span<const Sequence> seqs, Normalization norm,
                    std::size_t total_channels);

struct GraphRecord {
  std::size_t group = 0;
  std::string subband;  ///< "LH1", ..., or "spatial" when wavelets are off.
  MotifGraph graph;
};

struct McgaResult {
  Tensor3 features;                ///< f ⊙ IWT(m^g), same shape as the input.
  std::vector<Tensor2> motif_planes;  ///< IWT(m^g), one per group.
  std::vector<GraphRecord> graphs;    ///< Filled only when requested.
};

/// Motif correlation graph attention over all groups.
McgaResult mcga_apply_detailed(const Tensor3& f, const McgaConfig& cfg, bool keep_graphs);
Tensor3 mcga_apply(const Tensor3& f, const McgaConfig& cfg);

/// Closest pair of length-L subsequences (a < b) in a 1-D series, found via
/// each subsequence's nearest neighbour. Ties resolve to the smallest (a, b).
struct SeriesMotif {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
};
SeriesMotif series_motif(std::span<const float> series, std::size_t length);

}  // namespace mocha::motif
