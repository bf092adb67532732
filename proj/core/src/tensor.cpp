// SPDX-License-Identifier: Apache-2.0
#include "mocha/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "mocha/error.hpp"

namespace mocha {

Tensor2::Tensor2(std::size_t height, std::size_t width, float fill)
    : height_(height), width_(width), data_(height * width, fill) {}

Tensor2::Tensor2(std::size_t height, std::size_t width, std::vector<float> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height_ * width_) {
    throw DimensionError("Tensor2: data length " + std::to_string(data_.size()) +
                         " does not match " + shape_string());
  }
}

std::string Tensor2::shape_string() const {
  return "[" + std::to_string(height_) + "x" + std::to_string(width_) + "]";
}

Tensor3::Tensor3(std::size_t channels, std::size_t height, std::size_t width, float fill)
    : channels_(channels), height_(height), width_(width),
      data_(channels * height * width, fill) {}

Tensor3::Tensor3(std::size_t channels, std::size_t height, std::size_t width,
                 std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != channels_ * height_ * width_) {
    throw DimensionError("Tensor3: data length " + std::to_string(data_.size()) +
                         " does not match " + shape_string());
  }
}

Tensor2 Tensor3::channel(std::size_t c) const {
  auto p = plane(c);
  return Tensor2(height_, width_, std::vector<float>(p.begin(), p.end()));
}

void Tensor3::set_channel(std::size_t c, const Tensor2& plane_in) {
  if (plane_in.height() != height_ || plane_in.width() != width_) {
    throw DimensionError("set_channel: plane " + plane_in.shape_string() +
                         " vs tensor " + shape_string());
  }
  std::ranges::copy(plane_in.data(), plane(c).begin());
}

std::string Tensor3::shape_string() const {
  return "[" + std::to_string(channels_) + "x" + std::to_string(height_) + "x" +
         std::to_string(width_) + "]";
}

Tensor3 hadamard(const Tensor3& a, const Tensor3& b) {
  if (a.channels() != b.channels() || a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError("hadamard: shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
  Tensor3 out(a.channels(), a.height(), a.width());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  return out;
}

Tensor3 hadamard(const Tensor3& a, const Tensor2& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError("hadamard: shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
  Tensor3 out(a.channels(), a.height(), a.width());
  auto y = b.data();
  for (std::size_t c = 0; c < a.channels(); ++c) {
    auto x = a.plane(c);
    auto o = out.plane(c);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  }
  return out;
}

Tensor3 concat_channels(std::span<const Tensor3* const> parts) {
  if (parts.empty()) return {};
  const std::size_t h = parts.front()->height();
  const std::size_t w = parts.front()->width();
  std::size_t channels = 0;
  for (const Tensor3* p : parts) {
    if (p->height() != h || p->width() != w) {
      throw DimensionError("concat_channels: " + p->shape_string() + " vs " +
                           parts.front()->shape_string());
    }
    channels += p->channels();
  }
  std::vector<float> data;
  data.reserve(channels * h * w);
  for (const Tensor3* p : parts) data.insert(data.end(), p->data().begin(), p->data().end());
  return Tensor3(channels, h, w, std::move(data));
}

double max_abs(std::span<const float> values) {
  double m = 0.0;
  for (float v : values) m = std::max(m, static_cast<double>(std::fabs(v)));
  return m;
}

bool all_finite(std::span<const float> values) {
  return std::ranges::all_of(values, [](float v) { return std::isfinite(v); });
}

Tensor3 upsample_bilinear(const Tensor3& x, std::size_t factor) {
  if (factor == 0) throw PreconditionError("upsample_bilinear: factor must be positive");
  const std::size_t H = x.height(), W = x.width();
  Tensor3 out(x.channels(), H * factor, W * factor);
  if (x.empty()) return out;

  // Source coordinate of each output row/column, shared by all channels.
  auto taps = [factor](std::size_t n_in, std::size_t n_out) {
    struct Tap { std::size_t i0, i1; float t; };
    std::vector<Tap> result(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      double s = (static_cast<double>(o) + 0.5) / static_cast<double>(factor) - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(n_in - 1));
      auto i0 = static_cast<std::size_t>(std::floor(s));
      std::size_t i1 = std::min(i0 + 1, n_in - 1);
      result[o] = {i0, i1, static_cast<float>(s - static_cast<double>(i0))};
    }
    return result;
  };
  const auto ty = taps(H, H * factor);
  const auto tx = taps(W, W * factor);

  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t oy = 0; oy < ty.size(); ++oy) {
      const auto& a = ty[oy];
      for (std::size_t ox = 0; ox < tx.size(); ++ox) {
        const auto& b = tx[ox];
        const float top = x(c, a.i0, b.i0) * (1.0f - b.t) + x(c, a.i0, b.i1) * b.t;
        const float bot = x(c, a.i1, b.i0) * (1.0f - b.t) + x(c, a.i1, b.i1) * b.t;
        out(c, oy, ox) = top * (1.0f - a.t) + bot * a.t;
      }
    }
  }
  return out;
}

Tensor3 avg_pool(const Tensor3& x, std::size_t factor) {
  if (factor == 0 || x.height() % factor != 0 || x.width() % factor != 0) {
    throw DimensionError("avg_pool: " + x.shape_string() + " not divisible by " +
                         std::to_string(factor));
  }
  const std::size_t H = x.height() / factor, W = x.width() / factor;
  Tensor3 out(x.channels(), H, W);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        double acc = 0.0;
        for (std::size_t dy = 0; dy < factor; ++dy)
          for (std::size_t dx = 0; dx < factor; ++dx)
            acc += x(c, h * factor + dy, w * factor + dx);
        out(c, h, w) = static_cast<float>(acc * inv);
      }
    }
  }
  return out;
}

DisparityMap::DisparityMap(std::size_t height, std::size_t width, float fill)
    : values(height, width, fill), valid(height * width, 1) {}

DisparityMap::DisparityMap(Tensor2 v) : values(std::move(v)), valid(values.size(), 1) {
  auto d = values.data();
  for (std::size_t i = 0; i < d.size(); ++i) valid[i] = std::isfinite(d[i]) ? 1 : 0;
}

}  // namespace mocha
