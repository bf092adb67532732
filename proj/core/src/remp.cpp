// SPDX-License-Identifier: Apache-2.0
#include "mocha/remp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "mocha/error.hpp"
#include "mocha/random.hpp"

namespace mocha::remp {

namespace {

// Coordinates this close outside the frame are rounding noise from the
// homography inverse, not genuine out-of-frame samples.
constexpr double kEdgeSlack = 1e-6;

bool upper_triangular_positive(const Eigen::Matrix3d& K) {
  return K(1, 0) == 0 && K(2, 0) == 0 && K(2, 1) == 0 && K(0, 0) > 0 && K(1, 1) > 0 &&
         K(2, 2) > 0;
}

Eigen::Matrix3d checked_inverse(const Eigen::Matrix3d& m, const char* what) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  if (!lu.isInvertible()) throw NumericError(std::string(what) + " is singular");
  return lu.inverse();
}

// Linear interpolation along a row; x must already be inside [0, W-1].
float sample_row(std::span<const float> row, double x) {
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const std::size_t x1 = std::min(x0 + 1, row.size() - 1);
  const double t = x - static_cast<double>(x0);
  return static_cast<float>((1.0 - t) * row[x0] + t * row[x1]);
}

Tensor3 upsample_nearest(const Tensor3& x, std::size_t factor) {
  Tensor3 out(x.channels(), x.height() * factor, x.width() * factor);
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t h = 0; h < out.height(); ++h)
      for (std::size_t w = 0; w < out.width(); ++w) out(c, h, w) = x(c, h / factor, w / factor);
  return out;
}

}  // namespace

CameraRig CameraRig::rectified(double focal, double cx, double cy, double baseline) {
  CameraRig rig;
  rig.K_l << focal, 0, cx, 0, focal, cy, 0, 0, 1;
  rig.K_r = rig.K_l;
  rig.R.setIdentity();
  rig.T = Eigen::Vector3d(-baseline, 0, 0);
  rig.N = Eigen::Vector3d(0, 0, 1);
  rig.focal = focal;
  rig.baseline = baseline;
  rig.validate();
  return rig;
}

void CameraRig::validate() const {
  if (!upper_triangular_positive(K_l) || !upper_triangular_positive(K_r)) {
    throw ConfigError("camera rig: intrinsics must be upper-triangular with positive diagonal");
  }
  if (std::fabs(N.norm() - 1.0) > 1e-9) throw ConfigError("camera rig: plane normal must be unit");
  if (!(baseline > 0.0)) throw ConfigError("camera rig: baseline must be positive");
  if (!(focal > 0.0)) throw ConfigError("camera rig: focal length must be positive");
}

Eigen::Matrix3d plane_homography(const CameraRig& rig, double depth) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw NumericError("plane_homography: depth must be positive and finite, got " +
                       std::to_string(depth));
  }
  const Eigen::Matrix3d Kr_inv = checked_inverse(rig.K_r, "plane_homography: K_r");
  return rig.K_l * (rig.R - rig.T * rig.N.transpose() / depth) * Kr_inv;
}

Eigen::Matrix3d plane_homography_at_infinity(const CameraRig& rig) {
  return rig.K_l * rig.R * checked_inverse(rig.K_r, "plane_homography: K_r");
}

std::size_t ReconError::valid_count() const {
  return static_cast<std::size_t>(std::ranges::count(valid, std::uint8_t{1}));
}

ReconError recon_error(const Tensor3& I_l, const Tensor3& I_r, const DisparityMap& d,
                       const ReconOptions& opt) {
  if (I_l.channels() != I_r.channels() || I_l.height() != I_r.height() ||
      I_l.width() != I_r.width()) {
    throw DimensionError("recon_error: images " + I_l.shape_string() + " vs " +
                         I_r.shape_string());
  }
  if (d.height() != I_l.height() || d.width() != I_l.width()) {
    throw DimensionError("recon_error: disparity " + d.values.shape_string() + " vs image " +
                         I_l.shape_string());
  }
  const std::size_t C = I_l.channels(), H = I_l.height(), W = I_l.width();
  ReconError out{Tensor3(C, H, W), std::vector<std::uint8_t>(H * W, 0)};
  const double max_x = static_cast<double>(W - 1), max_y = static_cast<double>(H - 1);

  if (opt.mode == WarpMode::Rectified) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        if (!d.is_valid(h, w)) continue;
        const double x = static_cast<double>(w) + opt.disparity_sign * static_cast<double>(d.values(h, w));
        if (!(x >= 0.0 && x <= max_x)) continue;
        out.valid[h * W + w] = 1;
        for (std::size_t c = 0; c < C; ++c) {
          out.error(c, h, w) = sample_row(I_r.plane(c).subspan(h * W, W), x) - I_l(c, h, w);
        }
      }
    }
    return out;
  }

  if (!opt.rig) throw ConfigError("recon_error: homography mode requires a camera rig");
  const CameraRig& rig = *opt.rig;
  rig.validate();
  const Eigen::Matrix3d H_inf_inv =
      checked_inverse(plane_homography_at_infinity(rig), "recon_error: homography");
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t w = 0; w < W; ++w) {
      if (!d.is_valid(h, w)) continue;
      const double disp = d.values(h, w);
      const Eigen::Matrix3d Hinv =
          disp > 0.0 ? checked_inverse(plane_homography(rig, rig.depth_from_disparity(disp)),
                                       "recon_error: homography")
                     : H_inf_inv;
      const Eigen::Vector3d p = Hinv * Eigen::Vector3d(static_cast<double>(w), static_cast<double>(h), 1.0);
      if (!(std::fabs(p.z()) > 0.0)) continue;
      double x = p.x() / p.z(), y = p.y() / p.z();
      if (!(x >= -kEdgeSlack && x <= max_x + kEdgeSlack && y >= -kEdgeSlack &&
            y <= max_y + kEdgeSlack)) {
        continue;
      }
      x = std::clamp(x, 0.0, max_x);
      y = std::clamp(y, 0.0, max_y);
      out.valid[h * W + w] = 1;
      const auto y0 = static_cast<std::size_t>(std::floor(y));
      const std::size_t y1 = std::min(y0 + 1, H - 1);
      const double ty = y - static_cast<double>(y0);
      for (std::size_t c = 0; c < C; ++c) {
        auto plane = I_r.plane(c);
        const double top = sample_row(plane.subspan(y0 * W, W), x);
        const double bot = sample_row(plane.subspan(y1 * W, W), x);
        out.error(c, h, w) = static_cast<float>((1.0 - ty) * top + ty * bot) - I_l(c, h, w);
      }
    }
  }
  return out;
}

DisparityMap upsample_disparity(const DisparityMap& d, std::size_t factor) {
  Tensor3 t(1, d.height(), d.width());
  std::ranges::copy(d.values.data(), t.plane(0).begin());
  Tensor3 up = upsample_bilinear(t, factor);
  for (float& v : up.data()) v *= static_cast<float>(factor);
  DisparityMap out(up.height(), up.width());
  out.values = up.channel(0);
  for (std::size_t h = 0; h < out.height(); ++h)
    for (std::size_t w = 0; w < out.width(); ++w)
      out.valid[h * out.width() + w] = d.valid[(h / factor) * d.width() + w / factor];
  return out;
}

RempWeights RempWeights::seeded(std::uint64_t seed, std::size_t image_channels,
                                 motif::Normalization norm) {
  RempWeights w;
  w.image_channels = image_channels;
  const std::size_t c = w.width;
  SeededGenerator root(seed);
  auto conv = [&root](std::uint64_t stream, std::size_t in, std::size_t out, std::size_t k,
                      std::size_t s, double gain = 1.0) {
    auto g = root.fork(stream);
    return nn::Conv2d::seeded(g, in, out, k, s, gain);
  };
  w.enc0 = conv(300, 1 + image_channels, c, 3, 1);
  w.down1 = conv(301, c, 2 * c, 3, 2);
  w.down2 = conv(302, 2 * c, 4 * c, 3, 2);
  w.up1 = conv(303, 4 * c + 2 * c, 2 * c, 3, 1);
  w.up2 = conv(304, 2 * c + c, c, 3, 1);
  w.lfe1 = conv(305, c, c, 3, 1);
  w.lfe2 = conv(306, c, c, 3, 1);
  w.head = conv(307, c, 1, 3, 1, 0.1);
  w.lmc.n_groups = 2;
  w.lmc.normalization = norm;
  return w;
}

RempWeights RempWeights::with_zero_head() const {
  RempWeights w = *this;
  std::ranges::fill(w.head.weight, 0.0f);
  std::ranges::fill(w.head.bias, 0.0f);
  return w;
}

DisparityMap remp_refine(const DisparityMap& d_up, const ReconError& E, const RempWeights& w,
                         RempTrace* trace) {
  const std::size_t H = d_up.height(), W = d_up.width();
  if (E.error.height() != H || E.error.width() != W || E.error.channels() != w.image_channels) {
    throw DimensionError("remp_refine: disparity " + d_up.values.shape_string() +
                         " vs reconstruction error " + E.error.shape_string());
  }
  if (H % 4 != 0 || W % 4 != 0) {
    throw DimensionError("remp_refine: full-resolution size " + d_up.values.shape_string() +
                         " must be divisible by 4");
  }

  Tensor3 disp(1, H, W);
  std::ranges::copy(d_up.values.data(), disp.plane(0).begin());
  const Tensor3* in_parts[] = {&disp, &E.error};
  Tensor3 e0 = w.enc0.forward(concat_channels(in_parts));
  nn::relu_inplace(e0);
  Tensor3 e1 = w.down1.forward(e0);
  nn::relu_inplace(e1);
  Tensor3 e2 = w.down2.forward(e1);
  nn::relu_inplace(e2);
  const Tensor3 u2 = upsample_bilinear(e2, 2);
  const Tensor3* up1_parts[] = {&u2, &e1};
  Tensor3 d1 = w.up1.forward(concat_channels(up1_parts));
  nn::relu_inplace(d1);
  const Tensor3 u1 = upsample_bilinear(d1, 2);
  const Tensor3* up2_parts[] = {&u1, &e0};
  const Tensor3 o = w.up2.forward(concat_channels(up2_parts));

  Tensor3 lfe = w.lfe1.forward(avg_pool(o, 2));
  nn::relu_inplace(lfe);
  lfe = w.lfe2.forward(lfe);
  nn::sigmoid_inplace(lfe);
  lfe = upsample_nearest(lfe, 2);

  Tensor3 lmc = motif::mcga_apply(o, w.lmc);
  nn::sigmoid_inplace(lmc);

  const Tensor3 hfe = hadamard(o, lmc);
  Tensor3 mix(o.channels(), H, W);
  {
    auto m = mix.data();
    auto a = lfe.data();
    auto g = lmc.data();
    auto hf = hfe.data();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = a[i] * (1.0f - g[i]) + hf[i];
  }
  const Tensor2 penalty = w.head.forward(mix).channel(0);

  DisparityMap out = d_up;
  auto ov = out.values.data();
  auto pv = penalty.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] -= pv[i];
  if (trace) *trace = {o, lfe, lmc, hfe, penalty};
  return out;
}

}  // namespace mocha::remp
