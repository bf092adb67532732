// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "golden_cases.hpp"
#include "mocha/bytes.hpp"
#include "mocha/error.hpp"
#include "mocha/formats.hpp"
#include "mocha/parallel.hpp"
#include "mocha/pipeline.hpp"
#include "mocha/synthetic.hpp"
#include "support.hpp"

using namespace mocha;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mocha");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Small network settings so each CLI match stays well under a second.
const char* kSmallConfig =
    R"({"iterations": 2, "max_disparity": 32, "hidden_channels": 8, "context_channels": 4})";

struct Scene {
  test::TempDir dir;
  std::string left, right, gt, config;

  explicit Scene(std::size_t h = 32, std::size_t w = 48, double disp = 4.0) {
    left = (dir.path() / "l.ppm").string();
    right = (dir.path() / "r.ppm").string();
    gt = (dir.path() / "gt.pfm").string();
    config = (dir.path() / "cfg.json").string();
    const auto pair = synthetic::textured_plane(h, w, disp, 11);
    formats::save_pnm(left, pair.left);
    formats::save_pnm(right, pair.right);
    formats::save_pfm(gt, pair.ground_truth);
    const std::string c = kSmallConfig;
    bytes::write_file(config, std::span(reinterpret_cast<const std::uint8_t*>(c.data()), c.size()));
  }

  std::string path(const std::string& name) const { return (dir.path() / name).string(); }

  Run match(const std::string& out, std::vector<std::string> extra = {}) const {
    std::vector<std::string> args{"match", "--left", left, "--right", right, "--out", out, "--config", config};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }
};

void write_pfm_row(const std::string& path, std::initializer_list<float> v) {
  Tensor2 t(1, v.size());
  std::size_t i = 0;
  for (float x : v) t.data()[i++] = x;
  formats::save_pfm(path, DisparityMap(t));
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("json round trip and overlay") {
    PipelineConfig cfg;
    cfg.seed = 9;
    cfg.normalization = motif::Normalization::ConvexVotes;
    cfg.toggles.remp = false;
    CHECK(PipelineConfig::from_json(cfg.to_json()) == cfg);
    const auto over = PipelineConfig::from_json(R"({"iterations": 4, "toggles": {"mcg": false}})", cfg);
    CHECK(over.iterations == 4);
    CHECK(over.seed == 9);
    CHECK_FALSE(over.toggles.mcg);
    CHECK_FALSE(over.toggles.remp);
  }

  TEST_CASE("strict parsing") {
    CHECK_THROWS_AS((void)PipelineConfig::from_json(R"({"iteration": 4})"), ConfigError);
    CHECK_THROWS_AS((void)PipelineConfig::from_json(R"({"normalization": "l2"})"), ConfigError);
    CHECK_THROWS_AS((void)PipelineConfig::from_json(R"({"toggles": {"dwt": true}})"), ConfigError);
    CHECK_THROWS_AS((void)PipelineConfig::from_json("{"), ConfigError);
    CHECK_THROWS_AS((void)PipelineConfig::from_json(R"({"iterations": "x"})"), ConfigError);
    PipelineConfig bad;
    bad.iterations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.feature_channels = 30;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("toggles") {
    Toggles t;
    apply_toggle(t, "mcg=off");
    apply_toggle(t, "wavelet=false");
    apply_toggle(t, "remp=0");
    CHECK(t == Toggles{false, false, false});
    apply_toggle(t, "remp=on");
    CHECK(t.remp);
    CHECK_THROWS_AS(apply_toggle(t, "remp"), ConfigError);
    CHECK_THROWS_AS(apply_toggle(t, "gru=on"), ConfigError);
    CHECK_THROWS_AS(apply_toggle(t, "mcg=maybe"), ConfigError);
  }

  TEST_CASE("volume disparities") {
    PipelineConfig cfg;
    CHECK(cfg.volume_disparities() == 48);
    cfg.max_disparity = 32;
    CHECK(cfg.volume_disparities() == 8);
    cfg.max_disparity = 33;
    CHECK(cfg.volume_disparities() == 16);
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("encoder padding") {
    const Tensor3 img = test::random_tensor(1, 3, 20, 35);
    const Tensor3 p = pad_for_encoder(img);
    CHECK(p.height() == 32);
    CHECK(p.width() == 48);
    CHECK(p(1, 5, 7) == img(1, 5, 7));
    CHECK(p(2, 31, 47) == img(2, 19, 34));
    CHECK(p(0, 0, 40) == img(0, 0, 34));
    CHECK(pad_for_encoder(Tensor3(3, 48, 64)).height() == 48);
  }

  TEST_CASE("golden replay") {
    const auto pair = synthetic::textured_plane(64, 64, 4.0, 402);
    const auto r = run_pipeline(pair.left, pair.right, test::golden::pipeline_case_config());
    const auto golden = test::read_golden(test::golden_path("pipeline.txt"));
    CHECK(test::bit_equal(r.disparity.values.data(), golden));
    CHECK(r.iterations.size() == 3);
    CHECK(r.initial.height() == 16);
  }

  TEST_CASE("motif branch changes the combined volume") {
    const auto pair = synthetic::textured_plane(32, 48, 3.0, 5);
    PipelineConfig cfg = PipelineConfig::from_json(kSmallConfig);
    PipelineOptions po;
    po.keep_volumes = true;
    const auto on = run_pipeline(pair.left, pair.right, cfg, po);
    cfg.toggles.mcg = false;
    const auto off = run_pipeline(pair.left, pair.right, cfg, po);
    REQUIRE(on.volumes);
    REQUIRE(off.volumes);
    CHECK_FALSE(on.volumes->combined == off.volumes->combined);
  }

  TEST_CASE("input shape errors") {
    PipelineConfig cfg = PipelineConfig::from_json(kSmallConfig);
    CHECK_THROWS_AS((void)run_pipeline(Tensor3(3, 32, 32), Tensor3(3, 32, 48), cfg), DimensionError);
    CHECK_THROWS_AS((void)run_pipeline(Tensor3(2, 32, 32), Tensor3(2, 32, 32), cfg), DimensionError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("match writes a finite in-range map and is reproducible") {
    Scene s;
    const std::string a = s.path("a.pfm"), b = s.path("b.pfm"), c = s.path("c.pfm");
    const Run r = s.match(a, {"--threads", "1"});
    REQUIRE(r.code == 0);
    const DisparityMap d = formats::load_pfm(a);
    CHECK(d.height() == 32);
    CHECK(d.width() == 48);
    for (float v : d.values.data()) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0f);
      CHECK(v <= 32.0f);
    }
    REQUIRE(s.match(b, {"--threads", "1"}).code == 0);
    REQUIRE(s.match(c, {"--threads", "3"}).code == 0);
    CHECK(bytes::read_file(a) == bytes::read_file(b));
    CHECK(bytes::read_file(a) == bytes::read_file(c));
    set_num_threads(1);
  }

  TEST_CASE("match dumps") {
    Scene s;
    const Run r = s.match(s.path("d.pfm"), {"--dump-iterations", s.path("it"), "--dump-motif-graphs",
                                            s.path("g"), "--dump-volumes", s.path("v"), "--viz",
                                            s.path("viz.ppm"), "--timing-json", s.path("t.json")});
    REQUIRE(r.code == 0);
    for (const char* f : {"it/iter_000.pfm", "it/iter_002.pfm", "g/left.jsonl", "g/right.dot",
                          "v/grouped.bin", "viz.ppm", "t.json"}) {
      CHECK_MESSAGE(std::filesystem::exists(s.path(f)), f);
    }
    CHECK_FALSE(std::filesystem::exists(s.path("it/iter_003.pfm")));
    CHECK(formats::load_pfm(s.path("it/iter_000.pfm")).width() == 12);
    const auto t = nlohmann::json::parse(test::read_text(s.path("t.json")));
    CHECK(t.contains("total_ms"));
  }

  TEST_CASE("seed changes the weights") {
    Scene s;
    REQUIRE(s.match(s.path("a.pfm"), {"--seed", "1"}).code == 0);
    REQUIRE(s.match(s.path("b.pfm"), {"--seed", "2"}).code == 0);
    CHECK_FALSE(bytes::read_file(s.path("a.pfm")) == bytes::read_file(s.path("b.pfm")));
  }

  TEST_CASE("match error codes") {
    Scene s;
    const auto other = synthetic::textured_plane(32, 64, 2.0, 3);
    formats::save_pnm(s.path("wide.ppm"), other.right);
    Run r = run_cli({"match", "--left", s.left, "--right", s.path("wide.ppm"), "--out", s.path("x.pfm")});
    CHECK(r.code == 2);
    CHECK(r.err.find("error") != std::string::npos);
    r = run_cli({"match", "--left", s.path("missing.ppm"), "--right", s.right, "--out", s.path("x.pfm")});
    CHECK(r.code == 3);
    r = s.match(s.path("x.pfm"), {"--toggle", "mcg=sometimes"});
    CHECK(r.code == 2);
    r = run_cli({"match", "--left", s.left});
    CHECK(r.code == 4);
    CHECK(run_cli({"frobnicate"}).code == 4);
    CHECK(run_cli({"--help"}).code == 0);
  }

  TEST_CASE("eval reports") {
    test::TempDir dir;
    const std::string d = (dir.path() / "d.pfm").string(), g = (dir.path() / "g.pfm").string();
    write_pfm_row(d, {1.0f, 2.0f});
    Run r = run_cli({"eval", "--disp", d, "--gt", d, "--thresholds", "1"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["epe"].get<double>() == 0.0);
    CHECK(j["bad"]["1.0"].get<double>() == 0.0);

    write_pfm_row(g, {1.0f, 4.0f});
    r = run_cli({"eval", "--disp", d, "--gt", g, "--thresholds", "1.0,3.0"});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["epe"].get<double>() == 1.0);
    CHECK(j["bad"]["1.0"].get<double>() == 50.0);
    CHECK(j["bad"]["3.0"].get<double>() == 0.0);

    write_pfm_row(g, {0.0f, 4.0f});
    j = nlohmann::json::parse(run_cli({"eval", "--disp", d, "--gt", g, "--mask-nonpositive"}).out);
    CHECK(j["valid"].get<int>() == 1);
    CHECK(j["epe"].get<double>() == 2.0);

    const std::string d0 = (dir.path() / "d0.pfm").string(), d1 = (dir.path() / "d1.pfm").string(),
                      gt = (dir.path() / "gt.pfm").string();
    write_pfm_row(gt, {2.0f});
    write_pfm_row(d0, {3.0f});
    write_pfm_row(d1, {2.5f});
    j = nlohmann::json::parse(
        run_cli({"eval", "--disp", d1, "--gt", gt, "--loss-initial", d0, "--loss-sequence", d1}).out);
    CHECK(j["loss"].get<double>() == doctest::Approx(1.0));

    write_pfm_row(g, {1.0f, 2.0f, 3.0f});
    CHECK(run_cli({"eval", "--disp", d, "--gt", g}).code == 2);
    CHECK(run_cli({"eval", "--disp", d, "--gt", (dir.path() / "none.pfm").string()}).code == 3);
  }

  TEST_CASE("selftest and negative control") {
    Run r = run_cli({"selftest", "--trials", "5"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).is_object());
    r = run_cli({"selftest", "--trials", "5", "--inject-fault", "corr.group_corr"});
    CHECK(r.code == 1);
    CHECK(r.err.find("corr.group_corr") != std::string::npos);
  }

  TEST_CASE("dwt and synth") {
    test::TempDir dir;
    const std::string l = (dir.path() / "l.ppm").string(), rr = (dir.path() / "r.ppm").string(),
                      gt = (dir.path() / "gt.pfm").string(), back = (dir.path() / "back.ppm").string();
    Run r = run_cli({"synth", "--height", "24", "--width", "40", "--disparity", "3", "--left", l, "--right", rr,
                 "--gt", gt});
    REQUIRE(r.code == 0);
    CHECK(formats::load_pnm(l).pixels.width() == 40);
    CHECK(formats::load_pfm(gt).values(5, 5) == 3.0f);
    r = run_cli({"dwt", "--in", l, "--out", back, "--levels", "2"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["max_abs_error"].get<double>() <= 1e-5);
    CHECK(bytes::read_file(back) == bytes::read_file(l));
  }
}
