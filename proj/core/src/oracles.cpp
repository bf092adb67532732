// SPDX-License-Identifier: Apache-2.0
#include "mocha/oracles.hpp"

#include <cmath>
#include <limits>

namespace mocha::oracle {

std::array<std::vector<std::vector<double>>, 4> haar_level(const std::vector<std::vector<double>>& x) {
  const std::size_t H = x.size(), W = x.front().size();
  const double r = 1.0 / std::sqrt(2.0);
  // Rows: low/high along w.
  std::vector<std::vector<double>> lo(H, std::vector<double>(W / 2)), hi = lo;
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t w = 0; w < W / 2; ++w) {
      lo[h][w] = (x[h][2 * w] + x[h][2 * w + 1]) * r;
      hi[h][w] = (x[h][2 * w] - x[h][2 * w + 1]) * r;
    }
  }
  std::vector<std::vector<double>> ll(H / 2, std::vector<double>(W / 2)), lh = ll, hl = ll, hh = ll;
  for (std::size_t h = 0; h < H / 2; ++h) {
    for (std::size_t w = 0; w < W / 2; ++w) {
      ll[h][w] = (lo[2 * h][w] + lo[2 * h + 1][w]) * r;
      lh[h][w] = (lo[2 * h][w] - lo[2 * h + 1][w]) * r;
      hl[h][w] = (hi[2 * h][w] + hi[2 * h + 1][w]) * r;
      hh[h][w] = (hi[2 * h][w] - hi[2 * h + 1][w]) * r;
    }
  }
  return {ll, lh, hl, hh};
}

GraphResult naive_graph(const std::vector<std::array<float, 9>>& seqs, std::size_t total_channels) {
  const std::size_t n = seqs.size();
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
      const double d = static_cast<double>(seqs[a][i]) - static_cast<double>(seqs[b][i]);
      s += d * d;
    }
    return std::sqrt(s);
  };
  GraphResult r;
  r.weights.assign(n, 0.0);
  r.nearest.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> ties;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const double d = dist(a, b);
      if (d < best) {
        best = d;
        ties = {b};
      } else if (d == best) {
        ties.push_back(b);
      }
    }
    for (std::size_t b : ties) r.weights[b] += 1.0 / static_cast<double>(ties.size());
    r.nearest[a] = ties;
  }
  double total = 0.0;
  for (double w : r.weights) total += w;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < 9; ++i) {
      r.motif_paper[i] += r.weights[c] / static_cast<double>(total_channels) * seqs[c][i];
      r.motif_convex[i] += r.weights[c] / total * seqs[c][i];
    }
  }
  return r;
}

std::vector<double> naive_group_corr(const Tensor3& f_l, const Tensor3& f_r, std::size_t D,
                                     std::size_t G, int sign) {
  const std::size_t C = f_l.channels(), H = f_l.height(), W = f_l.width();
  const std::size_t per = C / G;
  std::vector<double> out(D * H * W * G, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
          const long long src = static_cast<long long>(w) + sign * static_cast<long long>(d);
          double s = 0.0;
          if (src >= 0 && src < static_cast<long long>(W)) {
            for (std::size_t c = g * per; c < (g + 1) * per; ++c) {
              s += static_cast<double>(f_l(c, h, w)) *
                   static_cast<double>(f_r(c, h, static_cast<std::size_t>(src)));
            }
          }
          out[((d * H + h) * W + w) * G + g] = s / static_cast<double>(per);
        }
      }
    }
  }
  return out;
}

std::vector<double> naive_combine(const std::vector<double>& cg, const std::vector<double>& cc,
                                  std::size_t G) {
  std::vector<double> out(cg.size() / G, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t g = 0; g < G; ++g) out[i] += cg[i * G + g] * cc[i * G + g];
  return out;
}

Tensor3 naive_conv3d(const Tensor3& v, const std::array<float, 27>& k, float bias) {
  const long long D = static_cast<long long>(v.channels());
  const long long H = static_cast<long long>(v.height());
  const long long W = static_cast<long long>(v.width());
  Tensor3 out(v.channels(), v.height(), v.width());
  for (long long z = 0; z < D; ++z) {
    for (long long y = 0; y < H; ++y) {
      for (long long x = 0; x < W; ++x) {
        double s = bias;
        for (long long a = -1; a <= 1; ++a)
          for (long long b = -1; b <= 1; ++b)
            for (long long c = -1; c <= 1; ++c) {
              const long long zz = z + a, yy = y + b, xx = x + c;
              if (zz < 0 || zz >= D || yy < 0 || yy >= H || xx < 0 || xx >= W) continue;
              s += static_cast<double>(k[static_cast<std::size_t>((a + 1) * 9 + (b + 1) * 3 + (c + 1))]) *
                   v(static_cast<std::size_t>(zz), static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
            }
        out(static_cast<std::size_t>(z), static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
            static_cast<float>(s);
      }
    }
  }
  return out;
}

double naive_soft_argmin(const std::vector<double>& logits) {
  double mx = logits.front();
  for (double l : logits) mx = std::max(mx, l);
  double z = 0.0, e = 0.0;
  for (std::size_t d = 0; d < logits.size(); ++d) {
    const double p = std::exp(logits[d] - mx);
    z += p;
    e += static_cast<double>(d) * p;
  }
  return e / z;
}

Tensor3 naive_conv2d(const Tensor3& x, const std::vector<float>& weight,
                     const std::vector<float>& bias, std::size_t out_channels, std::size_t kernel,
                     std::size_t stride) {
  const std::size_t C = x.channels(), H = x.height(), W = x.width();
  const std::size_t Ho = (H + stride - 1) / stride, Wo = (W + stride - 1) / stride;
  const long long pad = static_cast<long long>(kernel / 2);
  Tensor3 out(out_channels, Ho, Wo);
  for (std::size_t o = 0; o < out_channels; ++o) {
    for (std::size_t oy = 0; oy < Ho; ++oy) {
      for (std::size_t ox = 0; ox < Wo; ++ox) {
        double s = bias[o];
        for (std::size_t i = 0; i < C; ++i) {
          for (std::size_t ky = 0; ky < kernel; ++ky) {
            for (std::size_t kx = 0; kx < kernel; ++kx) {
              const long long iy = static_cast<long long>(oy * stride + ky) - pad;
              const long long ix = static_cast<long long>(ox * stride + kx) - pad;
              if (iy < 0 || ix < 0 || iy >= static_cast<long long>(H) || ix >= static_cast<long long>(W)) continue;
              s += static_cast<double>(weight[((o * C + i) * kernel + ky) * kernel + kx]) *
                   x(i, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
            }
          }
        }
        out(o, oy, ox) = static_cast<float>(s);
      }
    }
  }
  return out;
}

PairMotif brute_series_motif(const std::vector<float>& series, std::size_t length) {
  const std::size_t count = series.size() - length + 1;
  PairMotif best{0, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < length; ++i) {
        const double d = static_cast<double>(series[a + i]) - static_cast<double>(series[b + i]);
        s += d * d;
      }
      const double dist = std::sqrt(s);
      if (dist < best.distance) best = {a, b, dist};
    }
  }
  return best;
}

}  // namespace mocha::oracle
