// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "golden_cases.hpp"
#include "mocha/error.hpp"
#include "mocha/parallel.hpp"
#include "mocha/update_op.hpp"
#include "support.hpp"

using namespace mocha;
using namespace mocha::update;

namespace {

StageWeights zero_stage(std::size_t hidden, std::size_t in) {
  return {nn::Conv2d(hidden + in, 4 * hidden, 3, 1)};
}

}  // namespace

TEST_SUITE("lstm_step") {
  TEST_CASE("zero weights from zero state") {
    const std::size_t hidden = 3;
    const LstmState prev{Tensor3(hidden, 4, 4), Tensor3(hidden, 4, 4)};
    StepTrace tr;
    const LstmState next = lstm_step(prev, test::random_tensor(1, 2, 4, 4), zero_stage(hidden, 2), hidden, &tr);
    CHECK(tr.forget_min == 0.5f);
    CHECK(tr.forget_max == 0.5f);
    CHECK(tr.input_min == 0.5f);
    CHECK(tr.output_max == 0.5f);
    CHECK(tr.candidate_abs_max == 0.0f);
    CHECK(next.c == Tensor3(hidden, 4, 4));
    CHECK(next.h == Tensor3(hidden, 4, 4));
  }

  TEST_CASE("zero weights halve the cell") {
    const std::size_t hidden = 2;
    const float c = 1.6f;
    const LstmState prev{Tensor3(hidden, 3, 3), Tensor3(hidden, 3, 3, c)};
    const LstmState next = lstm_step(prev, Tensor3(1, 3, 3), zero_stage(hidden, 1), hidden);
    for (float v : next.c.data()) CHECK(v == doctest::Approx(0.5 * c));
    for (float v : next.h.data()) CHECK(v == doctest::Approx(0.5 * std::tanh(0.5 * c)));
  }

  TEST_CASE("gate ranges hold for extreme inputs") {
    const std::size_t hidden = 4;
    SeededGenerator g(5);
    StageWeights w{nn::Conv2d::seeded(g, hidden + 3, 4 * hidden, 3, 1, 50.0)};
    const LstmState prev{test::random_tensor(2, hidden, 5, 5, 10.0), test::random_tensor(3, hidden, 5, 5, 3.0)};
    StepTrace tr;
    (void)lstm_step(prev, test::random_tensor(4, 3, 5, 5, 1000.0), w, hidden, &tr);
    CHECK(tr.forget_min > 0.0f);
    CHECK(tr.forget_max < 1.0f);
    CHECK(tr.input_min > 0.0f);
    CHECK(tr.input_max < 1.0f);
    CHECK(tr.output_min > 0.0f);
    CHECK(tr.output_max < 1.0f);
    CHECK(tr.candidate_abs_max < 1.0f);
    CHECK(tr.cell_inf <= tr.cell_prev_inf + 1.0);
  }

  TEST_CASE("shape mismatches") {
    const std::size_t hidden = 2;
    const LstmState prev{Tensor3(hidden, 3, 3), Tensor3(hidden, 3, 4)};
    CHECK_THROWS_AS((void)lstm_step(prev, Tensor3(1, 3, 3), zero_stage(hidden, 1), hidden), DimensionError);
    const LstmState ok{Tensor3(hidden, 3, 3), Tensor3(hidden, 3, 3)};
    CHECK_THROWS_AS((void)lstm_step(ok, Tensor3(2, 3, 3), zero_stage(hidden, 1), hidden), DimensionError);
  }
}

TEST_SUITE("refinement") {
  TEST_CASE("zero weights keep the initial disparity") {
    auto c = test::golden::refinement_case();
    const auto zero = UpdateWeights::zeros(c.weights.config);
    const auto r = run_refinement(c.combined, c.context, c.d0, 4, zero);
    REQUIRE(r.sequence.size() == 4);
    for (const auto& d : r.sequence) CHECK(d.values == c.d0.values);
    CHECK(run_refinement(c.combined, c.context, c.d0, 1, zero).sequence.size() == 1);
  }

  TEST_CASE("constant head bias adds a fixed step") {
    auto c = test::golden::refinement_case();
    auto w = UpdateWeights::zeros(c.weights.config);
    w.head.bias[0] = 0.25f;
    const auto r = run_refinement(c.combined, c.context, c.d0, 6, w);
    for (std::size_t k = 0; k < 6; ++k)
      for (float v : r.sequence[k].values.data()) CHECK(v == 3.0f + 0.25f * static_cast<float>(k + 1));
  }

  TEST_CASE("predict_delta with a zero head is zero") {
    nn::Conv2d head(5, 1, 1, 1);
    CHECK(predict_delta(test::random_tensor(1, 5, 3, 3), head) == Tensor2(3, 3));
    CHECK_THROWS_AS((void)predict_delta(Tensor3(5, 3, 3), nn::Conv2d(5, 2, 1, 1)), DimensionError);
  }

  TEST_CASE("accumulation identity and invariants over 32 iterations") {
    auto c = test::golden::refinement_case();
    const auto r = run_refinement(c.combined, c.context, c.d0, 32, c.weights);
    REQUIRE(r.deltas.size() == 32);
    REQUIRE(r.traces.size() == 32 * kStages);
    const auto& d0 = c.d0.values.data();
    for (std::size_t i = 0; i < d0.size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 32; ++k) {
        const float prev = k == 0 ? d0[i] : r.sequence[k - 1].values.data()[i];
        CHECK(test::step_consistent(prev, r.deltas[k].data()[i], r.sequence[k].values.data()[i]));
        sum += r.deltas[k].data()[i];
      }
      CHECK(std::fabs(r.sequence.back().values.data()[i] - d0[i] - sum) <= 1e-5);
    }
    for (const auto& t : r.traces) {
      CHECK(t.forget_min > 0.0f);
      CHECK(t.output_max < 1.0f);
      CHECK(t.candidate_abs_max < 1.0f);
      CHECK(t.cell_inf <= t.cell_prev_inf + 1.0);
    }
  }

  TEST_CASE("golden replay is bit-identical for any thread count") {
    auto c = test::golden::refinement_case();
    const auto golden = test::read_golden(test::golden_path("refinement.txt"));
    for (std::size_t threads : {1, 3}) {
      set_num_threads(threads);
      const auto got = test::golden::flatten(run_refinement(c.combined, c.context, c.d0, 5, c.weights));
      CHECK(test::bit_equal(got, golden));
    }
    set_num_threads(1);
  }

  TEST_CASE("errors") {
    auto c = test::golden::refinement_case();
    CHECK_THROWS_AS((void)run_refinement(c.combined, c.context, c.d0, 0, c.weights), PreconditionError);
    auto missing = c.context;
    missing.erase(8);
    CHECK_THROWS_AS((void)run_refinement(c.combined, missing, c.d0, 1, c.weights), DimensionError);
    DisparityMap bad = c.d0;
    bad.values(0, 0) = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS((void)run_refinement(c.combined, c.context, bad, 1, c.weights), NumericError);
  }
}
