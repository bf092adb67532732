// SPDX-License-Identifier: Apache-2.0
#include "mocha/formats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include "mocha/bytes.hpp"
#include "mocha/error.hpp"

namespace mocha::formats {

namespace {

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Header tokenizer shared by PFM and PNM. `comments` enables '#' to end of
// line, which PNM allows and PFM does not.
class HeaderScanner {
 public:
  HeaderScanner(std::span<const std::uint8_t> data, bool comments)
      : data_(data), comments_(comments) {}

  std::size_t offset() const noexcept { return pos_; }
  /// Start of the most recent token.
  std::size_t token_start() const noexcept { return start_; }

  std::string token(const char* what) {
    skip_space();
    const std::size_t start = start_ = pos_;
    while (pos_ < data_.size() && !is_space(data_[pos_]) && !(comments_ && data_[pos_] == '#')) {
      ++pos_;
    }
    if (pos_ == start) throw FormatError(std::string("missing ") + what, start);
    return std::string(reinterpret_cast<const char*>(data_.data() + start), pos_ - start);
  }

  std::size_t positive_int(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    const std::string t = token(what);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v == 0) {
      throw FormatError(std::string("invalid ") + what + " '" + t + "'", start);
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  void end_of_header() {
    if (pos_ >= data_.size() || !is_space(data_[pos_])) {
      throw FormatError("expected a single whitespace byte before the payload", pos_);
    }
    ++pos_;
  }

 private:
  void skip_space() {
    while (pos_ < data_.size()) {
      if (is_space(data_[pos_])) {
        ++pos_;
      } else if (comments_ && data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> data_;
  bool comments_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
};

void check_payload(std::span<const std::uint8_t> data, std::size_t at, std::size_t needed) {
  const std::size_t have = data.size() - at;
  if (have < needed) {
    throw FormatError("truncated payload: expected " + std::to_string(needed) + " bytes, found " +
                          std::to_string(have),
                      data.size());
  }
  if (have > needed) throw FormatError("trailing bytes after payload", at + needed);
}

std::size_t checked_area(std::size_t a, std::size_t b, std::size_t c, std::size_t at) {
  std::size_t ab = 0, n = 0;
  if (__builtin_mul_overflow(a, b, &ab) || __builtin_mul_overflow(ab, c, &n) ||
      n > (std::size_t{1} << 40)) {
    throw FormatError("image dimensions too large", at);
  }
  return n;
}

}  // namespace

DisparityMap read_pfm(std::span<const std::uint8_t> data) {
  HeaderScanner s(data, false);
  const std::string magic = s.token("magic");
  if (magic == "PF") throw UnsupportedFormatError("color PFM (PF) is not supported", 0);
  if (magic != "Pf") throw FormatError("bad PFM magic '" + magic + "'", 0);
  const std::size_t width = s.positive_int("width");
  const std::size_t height = s.positive_int("height");
  const std::string scale_tok = s.token("scale");
  const std::size_t scale_at = s.token_start();
  char* end = nullptr;
  const double scale = std::strtod(scale_tok.c_str(), &end);
  if (end != scale_tok.c_str() + scale_tok.size() || !std::isfinite(scale)) {
    throw FormatError("invalid PFM scale '" + scale_tok + "'", scale_at);
  }
  if (scale == 0.0) throw FormatError("PFM scale must be nonzero", scale_at);
  s.end_of_header();

  const std::size_t payload_at = s.offset();
  const std::size_t count = checked_area(width, height, 1, payload_at);
  check_payload(data, payload_at, count * 4);
  bytes::Reader r(data);
  r.skip(payload_at);
  const bool little = scale < 0.0;
  Tensor2 values(height, width);
  for (std::size_t row = height; row-- > 0;) {
    for (std::size_t w = 0; w < width; ++w) {
      values(row, w) = little ? r.f32_le("PFM sample") : r.f32_be("PFM sample");
    }
  }
  return DisparityMap(std::move(values));
}

std::vector<std::uint8_t> write_pfm(const Tensor2& d) {
  bytes::Writer w;
  w.put_bytes("Pf\n" + std::to_string(d.width()) + " " + std::to_string(d.height()) + "\n-1.0\n");
  for (std::size_t row = d.height(); row-- > 0;) {
    for (float v : d.row(row)) w.put_f32(v);
  }
  return w.take();
}

std::vector<std::uint8_t> write_pfm(const DisparityMap& d) {
  Tensor2 v = d.values;
  auto data = v.data();
  // Finite values flagged invalid become +inf; non-finite values keep their bits.
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!d.valid[i] && std::isfinite(data[i])) data[i] = INFINITY;
  }
  return write_pfm(v);
}

PnmImage read_pnm(std::span<const std::uint8_t> data) {
  HeaderScanner s(data, true);
  const std::string magic = s.token("magic");
  if (magic == "P1" || magic == "P2" || magic == "P3" || magic == "P4") {
    throw UnsupportedFormatError("PNM variant " + magic + " is not supported (binary P5/P6 only)", 0);
  }
  if (magic != "P5" && magic != "P6") throw FormatError("bad PNM magic '" + magic + "'", 0);
  const std::size_t channels = magic == "P5" ? 1 : 3;
  const std::size_t width = s.positive_int("width");
  const std::size_t height = s.positive_int("height");
  const std::size_t maxval = s.positive_int("maxval");
  const std::size_t maxval_at = s.token_start();
  if (maxval > 255) {
    throw UnsupportedFormatError("16-bit PNM (maxval " + std::to_string(maxval) + ") is not supported",
                                 maxval_at);
  }
  s.end_of_header();

  const std::size_t payload_at = s.offset();
  const std::size_t count = checked_area(width, height, channels, payload_at);
  check_payload(data, payload_at, count);
  PnmImage img{Tensor3(channels, height, width), static_cast<unsigned>(maxval)};
  const auto scale = static_cast<float>(maxval);
  std::size_t at = payload_at;
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::uint8_t v = data[at];
        if (v > maxval) throw FormatError("sample exceeds maxval", at);
        img.pixels(c, h, w) = static_cast<float>(v) / scale;
        ++at;
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> write_pnm(const Tensor3& img, unsigned maxval) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw DimensionError("write_pnm: need 1 or 3 channels, got " + img.shape_string());
  }
  if (maxval == 0 || maxval > 255) throw PreconditionError("write_pnm: maxval must be in [1, 255]");
  bytes::Writer w;
  w.put_bytes((img.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(img.width()) + " " +
              std::to_string(img.height()) + "\n" + std::to_string(maxval) + "\n");
  for (std::size_t h = 0; h < img.height(); ++h) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      for (std::size_t c = 0; c < img.channels(); ++c) {
        const float v = std::isfinite(img(c, h, x)) ? std::clamp(img(c, h, x), 0.0f, 1.0f) : 0.0f;
        w.put_u8(static_cast<std::uint8_t>(std::lround(v * static_cast<float>(maxval))));
      }
    }
  }
  return w.take();
}

Tensor3 colorize_disparity(const DisparityMap& d, double max_d) {
  if (!(max_d > 0.0)) throw PreconditionError("colorize_disparity: max_d must be positive");
  static constexpr std::array<std::array<float, 3>, 6> kStops{{
      {0.0f, 0.0f, 0.5f}, {0.0f, 0.0f, 1.0f}, {0.0f, 1.0f, 1.0f},
      {1.0f, 1.0f, 0.0f}, {1.0f, 0.0f, 0.0f}, {0.5f, 0.0f, 0.0f},
  }};
  Tensor3 out(3, d.height(), d.width());
  for (std::size_t h = 0; h < d.height(); ++h) {
    for (std::size_t w = 0; w < d.width(); ++w) {
      const float v = d.values(h, w);
      if (!d.is_valid(h, w) || !std::isfinite(v)) continue;
      const double t = std::clamp(static_cast<double>(v) / max_d, 0.0, 1.0) * (kStops.size() - 1);
      const auto i0 = std::min(static_cast<std::size_t>(t), kStops.size() - 2);
      const double f = t - static_cast<double>(i0);
      for (std::size_t c = 0; c < 3; ++c) {
        out(c, h, w) = static_cast<float>((1.0 - f) * kStops[i0][c] + f * kStops[i0 + 1][c]);
      }
    }
  }
  return out;
}

DisparityMap load_pfm(const std::filesystem::path& path) { return read_pfm(bytes::read_file(path)); }

void save_pfm(const std::filesystem::path& path, const DisparityMap& d) {
  bytes::write_file(path, write_pfm(d));
}

PnmImage load_pnm(const std::filesystem::path& path) { return read_pnm(bytes::read_file(path)); }

void save_pnm(const std::filesystem::path& path, const Tensor3& img, unsigned maxval) {
  bytes::write_file(path, write_pnm(img, maxval));
}

}  // namespace mocha::formats
