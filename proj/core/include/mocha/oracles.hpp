// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force reference implementations. They deliberately share no code
// with the optimized paths they check: plain nested loops, double
// precision, no padding tricks.

#include <array>
#include <cstddef>
#include <vector>

#include "mocha/tensor.hpp"

namespace mocha::oracle {

/// One-level orthonormal Haar via separable 1-D filters (a ± b)/√2, first
/// along rows then along columns. Input sides must be even. Returns
/// {LL, LH, HL, HH} with LH the vertical-difference band.
std::array<std::vector<std::vector<double>>, 4> haar_level(const std::vector<std::vector<double>>& x);

struct GraphResult {
  std::vector<double> weights;
  std::vector<std::vector<std::size_t>> nearest;
  std::array<double, 9> motif_paper{};   ///< Σ (w_c / total_channels) s_c
  std::array<double, 9> motif_convex{};  ///< Σ (w_c / Σw) s_c
};

/// Enumerates every ordered pair, keeps all candidates at the minimum
/// distance, and adds 1/p to each.
GraphResult naive_graph(const std::vector<std::array<float, 9>>& seqs, std::size_t total_channels);

/// Five nested loops: d, g, h, w, c.
std::vector<double> naive_group_corr(const Tensor3& f_l, const Tensor3& f_r, std::size_t D,
                                     std::size_t G, int sign);
/// Index (d, h, w, g) -> ((d*H + h)*W + w)*G + g.
std::vector<double> naive_combine(const std::vector<double>& cg, const std::vector<double>& cc,
                                  std::size_t G);

/// Zero-padded 3x3x3 convolution of a (depth, h, w) tensor.
Tensor3 naive_conv3d(const Tensor3& v, const std::array<float, 27>& k, float bias);

/// Softmax expectation of one logit column.
double naive_soft_argmin(const std::vector<double>& logits);

/// Zero-padded 2-D convolution, arbitrary odd kernel and stride.
Tensor3 naive_conv2d(const Tensor3& x, const std::vector<float>& weight,
                     const std::vector<float>& bias, std::size_t out_channels, std::size_t kernel,
                     std::size_t stride);

struct PairMotif {
  std::size_t a = 0, b = 0;
  double distance = 0.0;
};
/// Closest pair of length-L subsequences over all a < b; ties resolve to
/// the lexicographically smallest pair.
PairMotif brute_series_motif(const std::vector<float>& series, std::size_t length);

}  // namespace mocha::oracle
