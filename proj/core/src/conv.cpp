// SPDX-License-Identifier: Apache-2.0
#include "mocha/conv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mocha/error.hpp"
#include "mocha/parallel.hpp"

namespace mocha::nn {

Conv2d::Conv2d(std::size_t in, std::size_t out, std::size_t k, std::size_t s)
    : in_channels(in), out_channels(out), kernel(k), stride(s),
      weight(out * in * k * k, 0.0f), bias(out, 0.0f) {
  if (k % 2 == 0 || s == 0) throw ConfigError("Conv2d: kernel must be odd and stride positive");
}

Conv2d Conv2d::seeded(SeededGenerator& gen, std::size_t in, std::size_t out, std::size_t k,
                      std::size_t s, double gain) {
  Conv2d c(in, out, k, s);
  const double bound = gain * std::sqrt(6.0 / static_cast<double>(in * k * k));
  for (float& v : c.weight) v = static_cast<float>(gen.uniform(-bound, bound));
  return c;
}

bool Conv2d::is_zero() const {
  return std::ranges::all_of(weight, [](float v) { return v == 0.0f; }) &&
         std::ranges::all_of(bias, [](float v) { return v == 0.0f; });
}

Tensor3 Conv2d::forward(const Tensor3& x) const {
  if (x.channels() != in_channels) {
    throw DimensionError("Conv2d: expected " + std::to_string(in_channels) +
                         " input channels, got " + x.shape_string());
  }
  const std::size_t H = x.height(), W = x.width();
  const std::size_t Ho = out_size(H), Wo = out_size(W);
  const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
  Tensor3 out(out_channels, Ho, Wo);

  parallel_for(out_channels, [&](std::size_t o) {
    std::vector<double> acc(Ho * Wo, static_cast<double>(bias[o]));
    for (std::size_t i = 0; i < in_channels; ++i) {
      auto in = x.plane(i);
      for (std::size_t ky = 0; ky < kernel; ++ky) {
        for (std::size_t kx = 0; kx < kernel; ++kx) {
          const double wv = this->w(o, i, ky, kx);
          if (wv == 0.0) continue;
          const auto dy = static_cast<std::ptrdiff_t>(ky) - pad;
          const auto dx = static_cast<std::ptrdiff_t>(kx) - pad;
          for (std::size_t oy = 0; oy < Ho; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride) + dy;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
            const float* row = in.data() + static_cast<std::size_t>(iy) * W;
            double* arow = acc.data() + oy * Wo;
            if (stride == 1) {
              const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -dx);
              const std::ptrdiff_t hi =
                  std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(Wo),
                                           static_cast<std::ptrdiff_t>(W) - dx);
              for (std::ptrdiff_t ox = lo; ox < hi; ++ox) arow[ox] += wv * row[ox + dx];
            } else {
              for (std::size_t ox = 0; ox < Wo; ++ox) {
                const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride) + dx;
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
                arow[ox] += wv * row[ix];
              }
            }
          }
        }
      }
    }
    auto dst = out.plane(o);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = static_cast<float>(acc[k]);
  });
  return out;
}

VolumeConv VolumeConv::seeded(SeededGenerator& gen, double gain) {
  VolumeConv c;
  c.identity = false;
  const double bound = gain * std::sqrt(6.0 / 27.0);
  for (float& v : c.weight) v = static_cast<float>(gen.uniform(-bound, bound));
  return c;
}

Tensor3 VolumeConv::forward(const Tensor3& v) const {
  if (identity) return v;
  const auto D = static_cast<std::ptrdiff_t>(v.channels());
  const auto H = static_cast<std::ptrdiff_t>(v.height());
  const auto W = static_cast<std::ptrdiff_t>(v.width());
  Tensor3 out(v.channels(), v.height(), v.width());
  parallel_for(v.channels(), [&](std::size_t dz_out) {
    const auto z = static_cast<std::ptrdiff_t>(dz_out);
    for (std::ptrdiff_t y = 0; y < H; ++y) {
      for (std::ptrdiff_t x = 0; x < W; ++x) {
        double acc = bias;
        for (std::ptrdiff_t kz = 0; kz < 3; ++kz) {
          const std::ptrdiff_t zz = z + kz - 1;
          if (zz < 0 || zz >= D) continue;
          for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
            const std::ptrdiff_t yy = y + ky - 1;
            if (yy < 0 || yy >= H) continue;
            for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
              const std::ptrdiff_t xx = x + kx - 1;
              if (xx < 0 || xx >= W) continue;
              acc += static_cast<double>(weight[static_cast<std::size_t>((kz * 3 + ky) * 3 + kx)]) *
                     v(static_cast<std::size_t>(zz), static_cast<std::size_t>(yy),
                       static_cast<std::size_t>(xx));
            }
          }
        }
        out(dz_out, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
            static_cast<float>(acc);
      }
    }
  });
  return out;
}

float sigmoid(float v) {
  constexpr float lo = std::numeric_limits<float>::denorm_min();
  const float hi = std::nextafter(1.0f, 0.0f);
  // Split on sign so exp never overflows; the clamp keeps the float result
  // inside the open interval (0, 1) where rounding would otherwise hit 0 or 1.
  double s = 0.0;
  if (v >= 0.0f) {
    s = 1.0 / (1.0 + std::exp(-static_cast<double>(v)));
  } else {
    const double e = std::exp(static_cast<double>(v));
    s = e / (1.0 + e);
  }
  return std::clamp(static_cast<float>(s), lo, hi);
}

float bounded_tanh(float v) {
  const float hi = std::nextafter(1.0f, 0.0f);
  return std::clamp(std::tanh(v), -hi, hi);
}

void relu_inplace(Tensor3& x) {
  for (float& v : x.data()) v = std::max(v, 0.0f);
}

void sigmoid_inplace(Tensor3& x) {
  for (float& v : x.data()) v = sigmoid(v);
}

void tanh_inplace(Tensor3& x) {
  for (float& v : x.data()) v = bounded_tanh(v);
}

}  // namespace mocha::nn
