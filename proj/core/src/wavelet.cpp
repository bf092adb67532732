// SPDX-License-Identifier: Apache-2.0
#include "mocha/wavelet.hpp"

#include <algorithm>

#include "mocha/error.hpp"

namespace mocha::wavelet {

namespace {

Tensor2 pad_even(const Tensor2& x) {
  const std::size_t H = x.height() + (x.height() % 2);
  const std::size_t W = x.width() + (x.width() % 2);
  if (H == x.height() && W == x.width()) return x;
  Tensor2 out(H, W);
  for (std::size_t h = 0; h < H; ++h) {
    const std::size_t sh = std::min(h, x.height() - 1);
    for (std::size_t w = 0; w < W; ++w) out(h, w) = x(sh, std::min(w, x.width() - 1));
  }
  return out;
}

Tensor2 crop(const Tensor2& x, std::size_t H, std::size_t W) {
  if (H == x.height() && W == x.width()) return x;
  Tensor2 out(H, W);
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t w = 0; w < W; ++w) out(h, w) = x(h, w);
  return out;
}

}  // namespace

std::vector<BandRef> band_order(std::size_t levels) {
  std::vector<BandRef> order;
  for (std::size_t l = 1; l < levels; ++l) {
    order.push_back({l, BandKind::LH});
    order.push_back({l, BandKind::HL});
    order.push_back({l, BandKind::HH});
  }
  if (levels > 0) {
    order.push_back({levels, BandKind::LL});
    order.push_back({levels, BandKind::LH});
    order.push_back({levels, BandKind::HL});
    order.push_back({levels, BandKind::HH});
  }
  return order;
}

std::string band_name(const BandRef& ref) {
  const char* k = "LL";
  switch (ref.kind) {
    case BandKind::LL: k = "LL"; break;
    case BandKind::LH: k = "LH"; break;
    case BandKind::HL: k = "HL"; break;
    case BandKind::HH: k = "HH"; break;
  }
  return std::string(k) + std::to_string(ref.level);
}

Tensor2& band(WaveletPyramid& p, const BandRef& ref) {
  return const_cast<Tensor2&>(band(static_cast<const WaveletPyramid&>(p), ref));
}

const Tensor2& band(const WaveletPyramid& p, const BandRef& ref) {
  if (ref.level == 0 || ref.level > p.levels.size()) {
    throw StructureError("band: level " + std::to_string(ref.level) + " out of range");
  }
  const Level& lv = p.levels[ref.level - 1];
  switch (ref.kind) {
    case BandKind::LH: return lv.lh;
    case BandKind::HL: return lv.hl;
    case BandKind::HH: return lv.hh;
    case BandKind::LL:
      if (ref.level != p.levels.size()) {
        throw StructureError("band: LL is only stored for the coarsest level");
      }
      return p.ll;
  }
  throw StructureError("band: unknown subband");
}

WaveletPyramid dwt2(const Tensor2& x, std::size_t levels) {
  if (levels == 0) throw PreconditionError("dwt2: levels must be >= 1");
  if (x.height() < 2 || x.width() < 2) {
    throw DimensionError("dwt2: input " + x.shape_string() + " must be at least 2x2");
  }
  WaveletPyramid p;
  Tensor2 current = x;
  for (std::size_t l = 0; l < levels; ++l) {
    Level lv;
    lv.in_height = current.height();
    lv.in_width = current.width();
    const Tensor2 padded = pad_even(current);
    const std::size_t H = padded.height() / 2, W = padded.width() / 2;
    Tensor2 ll(H, W);
    lv.lh = Tensor2(H, W);
    lv.hl = Tensor2(H, W);
    lv.hh = Tensor2(H, W);
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        const float a = padded(2 * h, 2 * w), b = padded(2 * h, 2 * w + 1);
        const float c = padded(2 * h + 1, 2 * w), d = padded(2 * h + 1, 2 * w + 1);
        ll(h, w) = 0.5f * ((a + b) + (c + d));
        lv.hl(h, w) = 0.5f * ((a - b) + (c - d));
        lv.lh(h, w) = 0.5f * ((a + b) - (c + d));
        lv.hh(h, w) = 0.5f * ((a - b) - (c - d));
      }
    }
    p.levels.push_back(std::move(lv));
    current = std::move(ll);
  }
  p.ll = std::move(current);
  return p;
}

Tensor2 idwt2(const WaveletPyramid& p) {
  if (p.levels.empty()) throw StructureError("idwt2: pyramid has no levels");
  Tensor2 current = p.ll;
  for (std::size_t li = p.levels.size(); li-- > 0;) {
    const Level& lv = p.levels[li];
    const std::size_t H = current.height(), W = current.width();
    if (lv.lh.height() != H || lv.lh.width() != W || lv.hl.height() != H ||
        lv.hl.width() != W || lv.hh.height() != H || lv.hh.width() != W) {
      throw StructureError("idwt2: level " + std::to_string(li + 1) +
                           " subbands do not match approximation " + current.shape_string());
    }
    if (lv.in_height > 2 * H || lv.in_width > 2 * W || lv.in_height + 1 < 2 * H ||
        lv.in_width + 1 < 2 * W) {
      throw StructureError("idwt2: level " + std::to_string(li + 1) +
                           " recorded size inconsistent with subbands");
    }
    Tensor2 up(2 * H, 2 * W);
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        const float s = current(h, w), hl = lv.hl(h, w), lh = lv.lh(h, w), hh = lv.hh(h, w);
        up(2 * h, 2 * w) = 0.5f * ((s + hl) + (lh + hh));
        up(2 * h, 2 * w + 1) = 0.5f * ((s - hl) + (lh - hh));
        up(2 * h + 1, 2 * w) = 0.5f * ((s + hl) - (lh + hh));
        up(2 * h + 1, 2 * w + 1) = 0.5f * ((s - hl) - (lh - hh));
      }
    }
    current = crop(up, lv.in_height, lv.in_width);
  }
  return current;
}

std::vector<WaveletPyramid> dwt3(const Tensor3& x, std::size_t levels) {
  std::vector<WaveletPyramid> out;
  out.reserve(x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) out.push_back(dwt2(x.channel(c), levels));
  return out;
}

Tensor3 idwt3(const std::vector<WaveletPyramid>& pyramids) {
  if (pyramids.empty()) return {};
  const std::size_t H = pyramids.front().original_height();
  const std::size_t W = pyramids.front().original_width();
  Tensor3 out(pyramids.size(), H, W);
  for (std::size_t c = 0; c < pyramids.size(); ++c) {
    Tensor2 plane = idwt2(pyramids[c]);
    if (plane.height() != H || plane.width() != W) {
      throw StructureError("idwt3: channel " + std::to_string(c) + " has size " +
                           plane.shape_string());
    }
    out.set_channel(c, plane);
  }
  return out;
}

double energy(const WaveletPyramid& p) {
  double e = 0.0;
  auto add = [&e](const Tensor2& t) {
    for (float v : t.data()) e += static_cast<double>(v) * v;
  };
  for (const Level& lv : p.levels) {
    add(lv.lh);
    add(lv.hl);
    add(lv.hh);
  }
  add(p.ll);
  return e;
}

}  // namespace mocha::wavelet
