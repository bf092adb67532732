// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "mocha/bytes.hpp"
#include "mocha/conv.hpp"
#include "mocha/error.hpp"
#include "mocha/oracles.hpp"
#include "mocha/parallel.hpp"
#include "mocha/random.hpp"
#include "mocha/tensor.hpp"
#include "support.hpp"

using namespace mocha;

TEST_SUITE("tensor") {
  TEST_CASE("hadamard with ones plane is identity") {
    const Tensor3 a(2, 2, 2, 1.0f);
    const Tensor2 b(2, 2, 1.0f);
    CHECK(hadamard(a, b) == Tensor3(2, 2, 2, 1.0f));
    const Tensor3 r = test::random_tensor(1, 3, 4, 5);
    CHECK(hadamard(r, Tensor2(4, 5, 1.0f)) == r);
  }

  TEST_CASE("hadamard annihilator and reciprocal scaling") {
    Tensor3 a(2, 2, 2, 1.0f);
    a(0, 0, 0) = 3.0f;
    Tensor2 b(2, 2, 1.0f);
    b(0, 0) = 0.0f;
    CHECK(hadamard(a, b)(0, 0, 0) == 0.0f);
    CHECK(hadamard(Tensor3(2, 2, 2, 2.0f), Tensor3(2, 2, 2, 0.5f)) == Tensor3(2, 2, 2, 1.0f));
  }

  TEST_CASE("hadamard is commutative and associative") {
    const Tensor3 a = test::random_tensor(2, 2, 3, 3), b = test::random_tensor(3, 2, 3, 3),
                  c = test::random_tensor(4, 2, 3, 3);
    CHECK(hadamard(a, b) == hadamard(b, a));
    CHECK(test::max_abs_diff(hadamard(hadamard(a, b), c).data(), hadamard(a, hadamard(b, c)).data()) <= 1e-7);
  }

  TEST_CASE("hadamard shape mismatch names both shapes") {
    try {
      (void)hadamard(Tensor3(2, 3, 4), Tensor3(2, 3, 5));
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("2x3x4") != std::string::npos);
      CHECK(msg.find("2x3x5") != std::string::npos);
    }
    CHECK_THROWS_AS((void)hadamard(Tensor3(1, 2, 2), Tensor2(3, 2)), DimensionError);
  }

  TEST_CASE("avg_pool and upsample_bilinear") {
    const Tensor3 c(1, 4, 4, 2.5f);
    CHECK(avg_pool(c, 2) == Tensor3(1, 2, 2, 2.5f));
    CHECK(upsample_bilinear(Tensor3(2, 3, 3, 1.25f), 2) == Tensor3(2, 6, 6, 1.25f));
    Tensor3 x(1, 2, 2);
    x(0, 0, 0) = 1;
    x(0, 0, 1) = 2;
    x(0, 1, 0) = 3;
    x(0, 1, 1) = 4;
    CHECK(avg_pool(x, 2)(0, 0, 0) == doctest::Approx(2.5));
    CHECK_THROWS_AS((void)avg_pool(Tensor3(1, 5, 4), 2), DimensionError);
  }

  TEST_CASE("disparity map validity follows finiteness") {
    Tensor2 v(1, 3);
    v(0, 1) = std::numeric_limits<float>::infinity();
    v(0, 2) = std::numeric_limits<float>::quiet_NaN();
    const DisparityMap d(v);
    CHECK(d.is_valid(0, 0));
    CHECK_FALSE(d.is_valid(0, 1));
    CHECK_FALSE(d.is_valid(0, 2));
  }
}

TEST_SUITE("random") {
  TEST_CASE("seeded_normal is deterministic per seed") {
    SeededGenerator a(7), b(7), c(8);
    const Tensor3 ta = seeded_normal(a, 2, 3, 4, 1.0);
    CHECK(ta == seeded_normal(b, 2, 3, 4, 1.0));
    CHECK_FALSE(ta == seeded_normal(c, 2, 3, 4, 1.0));
  }

  TEST_CASE("seeded_normal depends on stream position") {
    SeededGenerator a(7), b(7);
    (void)b.next_u64();
    CHECK_FALSE(seeded_normal(a, 1, 2, 2, 1.0) == seeded_normal(b, 1, 2, 2, 1.0));
  }

  TEST_CASE("seeded_normal preconditions") {
    SeededGenerator g(1);
    CHECK_THROWS_AS((void)seeded_normal(g, 1, 2, 2, 0.0), PreconditionError);
    CHECK_THROWS_AS((void)seeded_normal(g, 1, 2, 2, -1.0), PreconditionError);
    CHECK(seeded_normal(g, 0, 3, 3, 1.0).empty());
  }

  TEST_CASE("normal draws have roughly unit moments") {
    SeededGenerator g(11);
    double s = 0, s2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double v = g.normal();
      s += v;
      s2 += v * v;
    }
    CHECK(std::fabs(s / n) < 0.03);
    CHECK(std::fabs(s2 / n - 1.0) < 0.05);
  }

  TEST_CASE("uniform stays in range and forks are independent") {
    SeededGenerator g(3);
    for (int i = 0; i < 1000; ++i) {
      const double u = g.uniform01();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 16; ++s) firsts.insert(g.fork(s).next_u64());
    CHECK(firsts.size() == 16);
  }
}

TEST_SUITE("parallel") {
  TEST_CASE("parallel_for covers every index once for any worker count") {
    for (std::size_t t : {1, 2, 3, 8}) {
      set_num_threads(t);
      std::vector<int> hits(37, 0);
      parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    set_num_threads(1);
  }

  TEST_CASE("parallel_for rethrows worker exceptions") {
    set_num_threads(4);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 7) throw NumericError("boom");
                    }),
                    NumericError);
    set_num_threads(1);
  }
}

TEST_SUITE("conv") {
  TEST_CASE("Conv2d matches the naive oracle") {
    for (std::size_t stride : {1, 2}) {
      for (std::size_t k : {1, 3}) {
        SeededGenerator g(50 + stride * 10 + k);
        auto conv = nn::Conv2d::seeded(g, 3, 5, k, stride);
        for (float& b : conv.bias) b = static_cast<float>(g.uniform(-1, 1));
        const Tensor3 x = test::random_tensor(60 + k, 3, 9, 7);
        const Tensor3 y = conv.forward(x);
        const Tensor3 ref = oracle::naive_conv2d(x, conv.weight, conv.bias, 5, k, stride);
        REQUIRE(y.channels() == ref.channels());
        REQUIRE(y.height() == ref.height());
        REQUIRE(y.width() == ref.width());
        CHECK(test::max_abs_diff(y.data(), ref.data()) <= 1e-5);
      }
    }
  }

  TEST_CASE("Conv2d is bit-identical across thread counts") {
    SeededGenerator g(5);
    const auto conv = nn::Conv2d::seeded(g, 8, 16, 3, 1);
    const Tensor3 x = test::random_tensor(6, 8, 12, 12);
    set_num_threads(1);
    const Tensor3 a = conv.forward(x);
    set_num_threads(4);
    const Tensor3 b = conv.forward(x);
    set_num_threads(1);
    CHECK(test::bit_equal(a.data(), b.data()));
  }

  TEST_CASE("seeded init respects the He-uniform bound") {
    SeededGenerator g(9);
    const auto conv = nn::Conv2d::seeded(g, 4, 6, 3, 1, 0.5);
    const double bound = 0.5 * std::sqrt(6.0 / 36.0);
    for (float w : conv.weight) CHECK(std::fabs(w) <= bound);
    for (float b : conv.bias) CHECK(b == 0.0f);
  }

  TEST_CASE("VolumeConv identity and seeded forward") {
    const Tensor3 v = test::random_tensor(7, 4, 5, 6);
    CHECK(nn::VolumeConv::make_identity().forward(v) == v);
    SeededGenerator g(8);
    const auto vc = nn::VolumeConv::seeded(g);
    CHECK(test::max_abs_diff(vc.forward(v).data(), oracle::naive_conv3d(v, vc.weight, vc.bias).data()) <= 1e-6);
  }

  TEST_CASE("sigmoid and tanh stay strictly inside their ranges") {
    for (float v : {-1e30f, -100.0f, -20.0f, 0.0f, 20.0f, 100.0f, 1e30f}) {
      const float s = nn::sigmoid(v);
      CHECK(s > 0.0f);
      CHECK(s < 1.0f);
      const float t = nn::bounded_tanh(v);
      CHECK(t > -1.0f);
      CHECK(t < 1.0f);
    }
    CHECK(nn::sigmoid(0.0f) == 0.5f);
  }
}

TEST_SUITE("bytes") {
  TEST_CASE("writer and reader round trip little-endian fields") {
    bytes::Writer w;
    w.put_bytes("AB");
    w.put_u8(7);
    w.put_u16(0x1234);
    w.put_u32(0xdeadbeef);
    w.put_f32(2.5f);
    const auto buf = w.take();
    CHECK(buf.size() == 2 + 1 + 2 + 4 + 4);
    CHECK(buf[3] == 0x34);
    bytes::Reader r(buf);
    r.skip(2);
    CHECK(r.u8("a") == 7);
    CHECK(r.u16("b") == 0x1234);
    CHECK(r.u32("c") == 0xdeadbeefu);
    CHECK(r.f32_le("d") == 2.5f);
    CHECK(r.remaining() == 0);
  }

  TEST_CASE("reader reports truncation offset") {
    const std::vector<std::uint8_t> buf{1, 2, 3};
    bytes::Reader r(buf);
    (void)r.u16("first");
    try {
      (void)r.u32("second");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 2);
    }
  }

  TEST_CASE("missing file is an IoError") {
    CHECK_THROWS_AS((void)bytes::read_file("/nonexistent/definitely/missing.bin"), IoError);
  }
}
