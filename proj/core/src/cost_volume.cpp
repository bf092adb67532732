// SPDX-License-Identifier: Apache-2.0
#include "mocha/cost_volume.hpp"

#include <algorithm>
#include <cmath>

#include "mocha/bytes.hpp"
#include "mocha/error.hpp"
#include "mocha/parallel.hpp"

namespace mocha::cost {

void CorrOptions::validate(std::size_t channels) const {
  if (max_disparity == 0) throw ConfigError("correlation: max_disparity must be >= 1");
  if (groups == 0 || channels % groups != 0) {
    throw ConfigError("correlation: " + std::to_string(channels) +
                      " channels not divisible by " + std::to_string(groups) + " groups");
  }
  if (disparity_sign != 1 && disparity_sign != -1) {
    throw ConfigError("correlation: disparity_sign must be +1 or -1");
  }
}

GroupedVolume group_corr(const Tensor3& f_l, const Tensor3& f_r, const CorrOptions& opt) {
  if (f_l.channels() != f_r.channels() || f_l.height() != f_r.height() ||
      f_l.width() != f_r.width()) {
    throw DimensionError("group_corr: " + f_l.shape_string() + " vs " + f_r.shape_string());
  }
  opt.validate(f_l.channels());
  const std::size_t D = opt.max_disparity, H = f_l.height(), W = f_l.width();
  const std::size_t G = opt.groups, group_size = f_l.channels() / G;
  const double norm = 1.0 / static_cast<double>(group_size);
  GroupedVolume out(D, H, W, G);

  parallel_for(D, [&](std::size_t d) {
    const std::ptrdiff_t shift = opt.disparity_sign * static_cast<std::ptrdiff_t>(d);
    std::vector<double> acc(W);
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t h = 0; h < H; ++h) {
        std::ranges::fill(acc, 0.0);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(W),
                                     static_cast<std::ptrdiff_t>(W) - shift);
        for (std::size_t k = 0; k < group_size; ++k) {
          const std::size_t c = g * group_size + k;
          const float* lrow = f_l.plane(c).data() + h * W;
          const float* rrow = f_r.plane(c).data() + h * W;
          for (std::ptrdiff_t w = lo; w < hi; ++w) {
            acc[static_cast<std::size_t>(w)] +=
                static_cast<double>(lrow[w]) * static_cast<double>(rrow[w + shift]);
          }
        }
        for (std::size_t w = 0; w < W; ++w) out(d, h, w, g) = static_cast<float>(acc[w] * norm);
      }
    }
  });
  return out;
}

namespace {

Tensor3 conv_groups(const Tensor3& f, std::size_t groups, const nn::VolumeConv& conv) {
  if (conv.identity) return f;
  const std::size_t group_size = f.channels() / groups;
  Tensor3 out(f.channels(), f.height(), f.width());
  for (std::size_t g = 0; g < groups; ++g) {
    Tensor3 block(group_size, f.height(), f.width());
    for (std::size_t k = 0; k < group_size; ++k) {
      std::ranges::copy(f.plane(g * group_size + k), block.plane(k).begin());
    }
    Tensor3 y = conv.forward(block);
    for (std::size_t k = 0; k < group_size; ++k) {
      std::ranges::copy(y.plane(k), out.plane(g * group_size + k).begin());
    }
  }
  return out;
}

}  // namespace

GroupedVolume motif_corr(const Tensor3& fmc_l, const Tensor3& fmc_r, const CorrOptions& opt,
                         const nn::VolumeConv& conv) {
  if (fmc_l.channels() != fmc_r.channels() || fmc_l.height() != fmc_r.height() ||
      fmc_l.width() != fmc_r.width()) {
    throw DimensionError("motif_corr: " + fmc_l.shape_string() + " vs " +
                         fmc_r.shape_string());
  }
  opt.validate(fmc_l.channels());
  return group_corr(conv_groups(fmc_l, opt.groups, conv), conv_groups(fmc_r, opt.groups, conv),
                    opt);
}

Tensor3 combine(const GroupedVolume& cg, const GroupedVolume& cc) {
  if (!cg.same_shape(cc)) throw DimensionError("combine: grouped volumes differ in shape");
  const std::size_t D = cg.disparities(), H = cg.height(), W = cg.width(), G = cg.groups();
  Tensor3 out(D, H, W);
  auto a = cg.data();
  auto b = cc.data();
  auto o = out.data();
  for (std::size_t i = 0; i < D * H * W; ++i) {
    double acc = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      acc += static_cast<double>(a[i * G + g]) * static_cast<double>(b[i * G + g]);
    }
    o[i] = static_cast<float>(acc);
  }
  return out;
}

DisparityMap soft_argmin(const Tensor3& logits) {
  const std::size_t D = logits.channels(), H = logits.height(), W = logits.width();
  if (D < 2) throw PreconditionError("soft_argmin: need at least 2 disparity levels");
  if (!all_finite(logits.data())) throw NumericError("soft_argmin: non-finite logits");
  DisparityMap out(H, W);
  std::vector<double> e(D);
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t w = 0; w < W; ++w) {
      double mx = -INFINITY;
      for (std::size_t d = 0; d < D; ++d) mx = std::max(mx, static_cast<double>(logits(d, h, w)));
      double z = 0.0, num = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        e[d] = std::exp(static_cast<double>(logits(d, h, w)) - mx);
        z += e[d];
        num += static_cast<double>(d) * e[d];
      }
      out.values(h, w) = static_cast<float>(
          std::clamp(num / z, 0.0, static_cast<double>(D - 1)));
    }
  }
  return out;
}

DisparityMap init_disparity(const Tensor3& combined, const nn::VolumeConv& conv) {
  if (combined.channels() < 2) {
    throw PreconditionError("init_disparity: need at least 2 disparity levels");
  }
  return soft_argmin(conv.forward(combined));
}

Tensor3 corr_lookup(const Tensor3& combined, const DisparityMap& d_now, std::size_t radius) {
  const std::size_t D = combined.channels(), H = combined.height(), W = combined.width();
  if (d_now.height() != H || d_now.width() != W) {
    throw DimensionError("corr_lookup: disparity " + d_now.values.shape_string() +
                         " vs volume " + combined.shape_string());
  }
  if (D == 0) throw DimensionError("corr_lookup: empty volume");
  const auto taps = static_cast<std::ptrdiff_t>(radius);
  Tensor3 out(2 * radius + 1, H, W);
  const double max_pos = static_cast<double>(D - 1);
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t w = 0; w < W; ++w) {
      const double centre = d_now.values(h, w);
      if (!std::isfinite(centre)) throw NumericError("corr_lookup: non-finite disparity");
      for (std::ptrdiff_t k = -taps; k <= taps; ++k) {
        const double pos = std::clamp(centre + static_cast<double>(k), 0.0, max_pos);
        const auto i0 = static_cast<std::size_t>(std::floor(pos));
        const std::size_t i1 = std::min(i0 + 1, D - 1);
        const double t = pos - static_cast<double>(i0);
        const double v = (1.0 - t) * combined(i0, h, w) + t * combined(i1, h, w);
        out(static_cast<std::size_t>(k + taps), h, w) = static_cast<float>(v);
      }
    }
  }
  return out;
}

namespace {

std::vector<std::uint8_t> volume_bytes(std::size_t D, std::size_t H, std::size_t W,
                                       std::size_t G, std::uint32_t flags,
                                       std::span<const float> values) {
  bytes::Writer w;
  w.put_bytes("MCVV");
  w.put_u32(static_cast<std::uint32_t>(D));
  w.put_u32(static_cast<std::uint32_t>(H));
  w.put_u32(static_cast<std::uint32_t>(W));
  w.put_u32(static_cast<std::uint32_t>(G));
  w.put_u32(flags);
  w.put_u32(0);
  w.put_u32(0);
  for (float v : values) w.put_f32(v);
  return w.take();
}

}  // namespace

std::vector<std::uint8_t> serialize_volume(const GroupedVolume& v) {
  return volume_bytes(v.disparities(), v.height(), v.width(), v.groups(), 1u, v.data());
}

std::vector<std::uint8_t> serialize_volume(const Tensor3& c) {
  return volume_bytes(c.channels(), c.height(), c.width(), 1, 0u, c.data());
}

void dump_volume(const std::filesystem::path& path, const GroupedVolume& v) {
  bytes::write_file(path, serialize_volume(v));
}

void dump_volume(const std::filesystem::path& path, const Tensor3& combined) {
  bytes::write_file(path, serialize_volume(combined));
}

}  // namespace mocha::cost
