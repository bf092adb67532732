// SPDX-License-Identifier: Apache-2.0
#include "mocha/features.hpp"

#include "mocha/bytes.hpp"
#include "mocha/error.hpp"
#include "mocha/random.hpp"

namespace mocha::features {

namespace {
constexpr std::uint16_t kVersion = 1;
constexpr std::string_view kMagic = "MCFV";
}  // namespace

void EncoderConfig::validate() const {
  if (stem_channels == 0 || channels4 == 0 || channels8 == 0 || channels16 == 0 ||
      context_channels == 0) {
    throw ConfigError("encoder: channel counts must be positive");
  }
}

ToyEncoder::ToyEncoder(const EncoderConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  SeededGenerator root(cfg.seed);
  auto gen = [&root](std::uint64_t stream) { return root.fork(stream); };
  {
    auto g = gen(1);
    stem_ = nn::Conv2d::seeded(g, 3, cfg.stem_channels, 3, 2);
  }
  {
    auto g = gen(2);
    down4_ = nn::Conv2d::seeded(g, cfg.stem_channels, cfg.channels4, 3, 2);
  }
  {
    auto g = gen(3);
    down8_ = nn::Conv2d::seeded(g, cfg.channels4, cfg.channels8, 3, 2);
  }
  {
    auto g = gen(4);
    down16_ = nn::Conv2d::seeded(g, cfg.channels8, cfg.channels16, 3, 2);
  }
  {
    auto g = gen(5);
    match_ = nn::Conv2d::seeded(g, cfg.channels4, cfg.channels4, 3, 1);
  }
  {
    auto g = gen(6);
    ctx4_ = nn::Conv2d::seeded(g, cfg.channels4, cfg.context_channels, 3, 1);
  }
  {
    auto g = gen(7);
    ctx8_ = nn::Conv2d::seeded(g, cfg.channels8, cfg.context_channels, 3, 1);
  }
  {
    auto g = gen(8);
    ctx16_ = nn::Conv2d::seeded(g, cfg.channels16, cfg.context_channels, 3, 1);
  }
}

FeatureSet ToyEncoder::encode(const Tensor3& img) const {
  if (img.channels() != 3) {
    throw DimensionError("encode_toy: expected a 3-channel image, got " + img.shape_string());
  }
  if (img.height() < 32 || img.width() < 32 || img.height() % 16 != 0 ||
      img.width() % 16 != 0) {
    throw DimensionError("encode_toy: image " + img.shape_string() +
                         " must be at least 32x32 with both sides divisible by 16; pad the "
                         "input first");
  }
  Tensor3 s2 = stem_.forward(img);
  nn::relu_inplace(s2);
  Tensor3 s4 = down4_.forward(s2);
  nn::relu_inplace(s4);
  Tensor3 s8 = down8_.forward(s4);
  nn::relu_inplace(s8);
  Tensor3 s16 = down16_.forward(s8);
  nn::relu_inplace(s16);

  FeatureSet fs;
  fs.matching = match_.forward(s4);
  auto context = [](const nn::Conv2d& head, const Tensor3& x) {
    Tensor3 c = head.forward(x);
    nn::relu_inplace(c);
    return c;
  };
  fs.context[4] = context(ctx4_, s4);
  fs.context[8] = context(ctx8_, s8);
  fs.context[16] = context(ctx16_, s16);
  return fs;
}

FeatureSet encode_toy(const Tensor3& img, const EncoderConfig& cfg) {
  return ToyEncoder(cfg).encode(img);
}

std::vector<std::uint8_t> serialize(const FeatureSet& fs) {
  bytes::Writer w;
  w.put_bytes(kMagic);
  w.put_u16(kVersion);
  w.put_u8(static_cast<std::uint8_t>(1 + fs.context.size()));
  auto put = [&w](std::uint8_t divisor, const Tensor3& t) {
    w.put_u8(divisor);
    w.put_u32(static_cast<std::uint32_t>(t.channels()));
    w.put_u32(static_cast<std::uint32_t>(t.height()));
    w.put_u32(static_cast<std::uint32_t>(t.width()));
    for (float v : t.data()) w.put_f32(v);
  };
  put(4, fs.matching);
  for (const auto& [divisor, t] : fs.context) put(divisor, t);
  return w.take();
}

FeatureSet deserialize(std::span<const std::uint8_t> data) {
  bytes::Reader r(data);
  auto magic = r.take(4, "magic");
  if (std::string_view(reinterpret_cast<const char*>(magic.data()), 4) != kMagic) {
    throw FormatError("feature file: bad magic", 0);
  }
  const std::size_t version_at = r.offset();
  if (r.u16("version") != kVersion) {
    throw FormatError("feature file: unsupported version", version_at);
  }
  const std::uint8_t count = r.u8("scale count");
  if (count == 0) throw FormatError("feature file: no scales", r.offset() - 1);

  FeatureSet fs;
  for (std::uint8_t s = 0; s < count; ++s) {
    const std::size_t entry_at = r.offset();
    const std::uint8_t divisor = r.u8("scale divisor");
    const std::uint64_t C = r.u32("channel count");
    const std::uint64_t H = r.u32("height");
    const std::uint64_t W = r.u32("width");
    const std::size_t payload_at = r.offset();
    // Reject sizes whose byte count cannot fit in what remains before
    // allocating anything.
    std::uint64_t bytes_needed = 0;
    const bool overflow = __builtin_mul_overflow(C * H, W * sizeof(float), &bytes_needed);
    if (overflow || bytes_needed > r.remaining()) {
      throw FormatError("feature file: dimensions " + std::to_string(C) + "x" +
                            std::to_string(H) + "x" + std::to_string(W) +
                            " exceed remaining payload",
                        payload_at);
    }
    std::vector<float> values(static_cast<std::size_t>(C * H * W));
    for (float& v : values) v = r.f32_le("payload");
    Tensor3 t(C, H, W, std::move(values));
    if (s == 0) {
      fs.matching = std::move(t);
    } else {
      if (fs.context.contains(divisor)) {
        throw FormatError("feature file: duplicate context scale", entry_at);
      }
      fs.context.emplace(divisor, std::move(t));
    }
  }
  if (r.remaining() != 0) throw FormatError("feature file: trailing bytes", r.offset());
  return fs;
}

void save_features(const FeatureSet& fs, const std::filesystem::path& path) {
  bytes::write_file(path, serialize(fs));
}

FeatureSet load_features(const std::filesystem::path& path) {
  return deserialize(bytes::read_file(path));
}

}  // namespace mocha::features
