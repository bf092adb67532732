// SPDX-License-Identifier: Apache-2.0
#include "mocha/motif_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mocha/error.hpp"
#include "mocha/parallel.hpp"
#include "mocha/wavelet.hpp"

namespace mocha::motif {

Normalization parse_normalization(const std::string& name) {
  if (name == "paper_Nc") return Normalization::PaperNc;
  if (name == "convex_votes") return Normalization::ConvexVotes;
  throw ConfigError("unknown normalization '" + name + "' (expected paper_Nc or convex_votes)");
}

std::string to_string(Normalization n) {
  return n == Normalization::PaperNc ? "paper_Nc" : "convex_votes";
}

void McgaConfig::validate(std::size_t channels) const {
  if (window != kWindow) throw ConfigError("mcga: window must be 3");
  if (n_groups == 0) throw ConfigError("mcga: n_groups must be positive");
  if (channels % n_groups != 0) {
    throw ConfigError("mcga: " + std::to_string(channels) + " channels not divisible by " +
                      std::to_string(n_groups) + " groups");
  }
  if (self_exclusion && channels / n_groups < 2) {
    throw DegenerateGroupError("mcga: groups of " + std::to_string(channels / n_groups) +
                               " channel(s) cannot form a graph");
  }
  if (use_wavelet && levels == 0) throw ConfigError("mcga: wavelet levels must be >= 1");
}

Tiling tile_patches(const Tensor2& plane) {
  if (plane.empty()) throw DimensionError("tile_patches: empty plane");
  Tiling t;
  t.grid.height = plane.height();
  t.grid.width = plane.width();
  t.grid.rows = (plane.height() + kWindow - 1) / kWindow;
  t.grid.cols = (plane.width() + kWindow - 1) / kWindow;
  t.patches.resize(t.grid.count());
  const std::size_t max_h = plane.height() - 1, max_w = plane.width() - 1;
  for (std::size_t r = 0; r < t.grid.rows; ++r) {
    for (std::size_t c = 0; c < t.grid.cols; ++c) {
      Sequence& s = t.patches[r * t.grid.cols + c];
      for (std::size_t y = 0; y < kWindow; ++y) {
        const std::size_t h = std::min(r * kWindow + y, max_h);
        for (std::size_t x = 0; x < kWindow; ++x) {
          s[y * kWindow + x] = plane(h, std::min(c * kWindow + x, max_w));
        }
      }
    }
  }
  return t;
}

Tensor2 stitch_motifs(std::span<const Motif> motifs, const TileGrid& grid) {
  if (motifs.size() != grid.count()) {
    throw DimensionError("stitch_motifs: " + std::to_string(motifs.size()) +
                         " motifs for a " + std::to_string(grid.rows) + "x" +
                         std::to_string(grid.cols) + " grid");
  }
  Tensor2 out(grid.height, grid.width);
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      const Motif& m = motifs[r * grid.cols + c];
      for (std::size_t y = 0; y < kWindow; ++y) {
        const std::size_t h = r * kWindow + y;
        if (h >= grid.height) break;
        for (std::size_t x = 0; x < kWindow; ++x) {
          const std::size_t w = c * kWindow + x;
          if (w >= grid.width) break;
          out(h, w) = static_cast<float>(m[y * kWindow + x]);
        }
      }
    }
  }
  return out;
}

double sequence_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<double> MotifGraph::weights() const {
  std::vector<double> w(node_count);
  for (std::size_t c = 0; c < node_count; ++c) w[c] = weight(c);
  return w;
}

std::int64_t MotifGraph::total_units() const {
  return std::accumulate(vote_units.begin(), vote_units.end(), std::int64_t{0});
}

MotifGraph build_graph(std::span<const Sequence> seqs, bool self_exclusion) {
  const std::size_t n = seqs.size();
  if (n < 2) {
    throw DegenerateGroupError("build_graph: need at least 2 sequences, got " +
                               std::to_string(n));
  }
  MotifGraph g;
  g.node_count = n;
  g.distances.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = sequence_distance(seqs[a], seqs[b]);
      g.distances[a * n + b] = d;
      g.distances[b * n + a] = d;
    }
  }

  g.nearest.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n; ++b) {
      if (self_exclusion && a == b) continue;
      best = std::min(best, g.distances[a * n + b]);
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (self_exclusion && a == b) continue;
      if (g.distances[a * n + b] == best) g.nearest[a].push_back(b);
    }
  }

  std::int64_t denom = 1;
  for (const auto& nn : g.nearest) {
    const auto p = static_cast<std::int64_t>(nn.size());
    std::int64_t next = 0, total = 0;
    if (__builtin_mul_overflow(denom / std::gcd(denom, p), p, &next) ||
        __builtin_mul_overflow(next, static_cast<std::int64_t>(n), &total)) {
      throw NumericError("build_graph: tie denominators overflow exact vote arithmetic");
    }
    denom = next;
  }
  g.unit_denominator = denom;
  g.vote_units.assign(n, 0);
  for (const auto& nn : g.nearest) {
    const std::int64_t share = denom / static_cast<std::int64_t>(nn.size());
    for (std::size_t b : nn) g.vote_units[b] += share;
  }
  return g;
}

Motif extract_motif(const MotifGraph& g, std::span<const Sequence> seqs, Normalization norm,
                    std::size_t total_channels) {
  if (seqs.size() != g.node_count) {
    throw DimensionError("extract_motif: " + std::to_string(seqs.size()) +
                         " sequences for a graph of " + std::to_string(g.node_count));
  }
  double divisor = 0.0;
  if (norm == Normalization::PaperNc) {
    if (total_channels == 0) throw ConfigError("extract_motif: total channel count is zero");
    divisor = static_cast<double>(g.unit_denominator) * static_cast<double>(total_channels);
  } else {
    divisor = static_cast<double>(g.total_units());
  }
  Motif m{};
  if (divisor == 0.0) return m;
  for (std::size_t c = 0; c < g.node_count; ++c) {
    if (g.vote_units[c] == 0) continue;
    const double coeff = static_cast<double>(g.vote_units[c]) / divisor;
    for (std::size_t i = 0; i < kSeqLen; ++i) m[i] += coeff * static_cast<double>(seqs[c][i]);
  }
  return m;
}

namespace {

struct BandJob {
  std::size_t group;
  std::size_t band_index;
};

// Motif map for one set of same-sized planes (the group's channels in one
// subband).
Tensor2 motif_map(std::span<const Tensor2* const> planes, std::size_t group,
                  const std::string& band_label, const McgaConfig& cfg,
                  std::size_t total_channels, std::vector<GraphRecord>* records) {
  std::vector<Tiling> tilings;
  tilings.reserve(planes.size());
  for (const Tensor2* p : planes) tilings.push_back(tile_patches(*p));
  const TileGrid grid = tilings.front().grid;

  std::vector<Motif> motifs(grid.count());
  std::vector<Sequence> seqs(planes.size());
  for (std::size_t j = 0; j < grid.count(); ++j) {
    for (std::size_t c = 0; c < planes.size(); ++c) seqs[c] = tilings[c].patches[j];
    MotifGraph g = build_graph(seqs, cfg.self_exclusion);
    g.group = group;
    g.position = j;
    motifs[j] = extract_motif(g, seqs, cfg.normalization, total_channels);
    if (records) records->push_back({group, band_label, std::move(g)});
  }
  return stitch_motifs(motifs, grid);
}

}  // namespace

McgaResult mcga_apply_detailed(const Tensor3& f, const McgaConfig& cfg, bool keep_graphs) {
  cfg.validate(f.channels());
  if (!all_finite(f.data())) throw NumericError("mcga_apply: non-finite input features");
  const std::size_t total = f.channels();
  const std::size_t group_size = total / cfg.n_groups;

  std::vector<std::vector<wavelet::WaveletPyramid>> pyramids(cfg.n_groups);
  std::vector<wavelet::BandRef> bands;
  if (cfg.use_wavelet) {
    parallel_for(cfg.n_groups, [&](std::size_t g) {
      for (std::size_t k = 0; k < group_size; ++k) {
        pyramids[g].push_back(wavelet::dwt2(f.channel(g * group_size + k), cfg.levels));
      }
    });
    bands = wavelet::band_order(cfg.levels);
  }
  const std::size_t bands_per_group = cfg.use_wavelet ? bands.size() : 1;

  std::vector<BandJob> jobs;
  for (std::size_t g = 0; g < cfg.n_groups; ++g)
    for (std::size_t b = 0; b < bands_per_group; ++b) jobs.push_back({g, b});

  std::vector<Tensor2> maps(jobs.size());
  std::vector<std::vector<GraphRecord>> records(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const BandJob& job = jobs[i];
    std::vector<Tensor2> owned;
    std::vector<const Tensor2*> planes;
    std::string label = "spatial";
    if (cfg.use_wavelet) {
      for (const auto& p : pyramids[job.group]) planes.push_back(&wavelet::band(p, bands[job.band_index]));
      label = wavelet::band_name(bands[job.band_index]);
    } else {
      owned.reserve(group_size);
      for (std::size_t k = 0; k < group_size; ++k) owned.push_back(f.channel(job.group * group_size + k));
      for (const auto& t : owned) planes.push_back(&t);
    }
    maps[i] = motif_map(planes, job.group, label, cfg, total,
                        keep_graphs ? &records[i] : nullptr);
  });

  McgaResult result;
  result.motif_planes.resize(cfg.n_groups);
  for (std::size_t g = 0; g < cfg.n_groups; ++g) {
    if (cfg.use_wavelet) {
      wavelet::WaveletPyramid motif_pyr = pyramids[g].front();
      for (std::size_t b = 0; b < bands.size(); ++b) {
        wavelet::band(motif_pyr, bands[b]) = std::move(maps[g * bands_per_group + b]);
      }
      result.motif_planes[g] = wavelet::idwt2(motif_pyr);
    } else {
      result.motif_planes[g] = std::move(maps[g]);
    }
  }

  result.features = Tensor3(f.channels(), f.height(), f.width());
  for (std::size_t c = 0; c < total; ++c) {
    auto src = f.plane(c);
    auto dst = result.features.plane(c);
    auto motif_plane = result.motif_planes[c / group_size].data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * motif_plane[i];
  }
  if (keep_graphs) {
    for (auto& r : records)
      for (auto& rec : r) result.graphs.push_back(std::move(rec));
  }
  return result;
}

Tensor3 mcga_apply(const Tensor3& f, const McgaConfig& cfg) {
  return mcga_apply_detailed(f, cfg, false).features;
}

SeriesMotif series_motif(std::span<const float> series, std::size_t length) {
  if (length == 0 || series.size() < length + 1) {
    throw PreconditionError("series_motif: need at least two subsequences of length " +
                            std::to_string(length));
  }
  const std::size_t count = series.size() - length + 1;
  SeriesMotif best{0, 0, std::numeric_limits<double>::infinity()};
  bool have = false;
  for (std::size_t i = 0; i < count; ++i) {
    double profile = std::numeric_limits<double>::infinity();
    std::size_t nn = 0;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      const double d = sequence_distance(series.subspan(i, length), series.subspan(j, length));
      if (d < profile) {
        profile = d;
        nn = j;
      }
    }
    const std::size_t a = std::min(i, nn), b = std::max(i, nn);
    if (!have || profile < best.distance ||
        (profile == best.distance && std::pair(a, b) < std::pair(best.a, best.b))) {
      best = {a, b, profile};
      have = true;
    }
  }
  return best;
}

}  // namespace mocha::motif
