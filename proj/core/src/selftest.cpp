// SPDX-License-Identifier: Apache-2.0
#include "mocha/selftest.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <json.hpp>
#include <sstream>

#include "mocha/cost_volume.hpp"
#include "mocha/formats.hpp"
#include "mocha/metrics.hpp"
#include "mocha/motif_graph.hpp"
#include "mocha/oracles.hpp"
#include "mocha/random.hpp"
#include "mocha/remp.hpp"
#include "mocha/wavelet.hpp"

namespace mocha::selftest {

namespace {

class Check {
 public:
  Check(Report& report, const Options& opt, std::string suite, std::string property)
      : report_(report), index_(report.properties.size()), fault_(opt.inject_fault == property) {
    r_.suite = std::move(suite);
    r_.property = std::move(property);
    report_.properties.emplace_back();
  }
  ~Check() { report_.properties[index_] = std::move(r_); }
  Check(const Check&) = delete;
  Check& operator=(const Check&) = delete;

  /// The sabotaged property sees its implementation value shifted by 1.
  double value(double impl) const { return fault_ ? impl + 1.0 : impl; }

  void close(double impl, double expected, double tol, const std::string& what) {
    const double err = std::fabs(value(impl) - expected);
    ++r_.checks;
    if (std::isfinite(err)) r_.worst = std::max(r_.worst, err);
    if (!(err <= tol)) fail(what + ": got " + fmt(value(impl)) + ", expected " + fmt(expected));
  }
  void holds(bool ok, const std::string& what) {
    ++r_.checks;
    if (fault_) ok = !ok;
    if (!ok) fail(what);
  }

 private:
  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
  }
  void fail(const std::string& what) {
    if (r_.passed) r_.detail = what;
    r_.passed = false;
  }
  Report& report_;
  std::size_t index_;
  bool fault_;
  PropertyResult r_;
};

std::size_t pick(SeededGenerator& g, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(g.next_u64() % (hi - lo + 1));
}

Tensor2 random_plane(SeededGenerator& g, std::size_t h, std::size_t w, double bound) {
  Tensor2 t(h, w);
  for (float& v : t.data()) v = static_cast<float>(g.uniform(-bound, bound));
  return t;
}

std::vector<std::vector<double>> to_rows(const Tensor2& t) {
  std::vector<std::vector<double>> rows(t.height(), std::vector<double>(t.width()));
  for (std::size_t h = 0; h < t.height(); ++h)
    for (std::size_t w = 0; w < t.width(); ++w) rows[h][w] = t(h, w);
  return rows;
}

// Random groups with a share of duplicated or integer-valued sequences so
// that the tie rule is exercised.
std::vector<motif::Sequence> random_group(SeededGenerator& g, std::size_t n) {
  std::vector<motif::Sequence> seqs(n);
  const double mode = g.uniform01();
  for (auto& s : seqs) {
    for (float& v : s) {
      v = mode < 0.25 ? static_cast<float>(static_cast<int>(pick(g, 0, 2)) - 1)
                      : static_cast<float>(g.uniform(-10.0, 10.0));
    }
  }
  if (mode > 0.75 && n > 2) {
    const std::size_t copies = pick(g, 1, n / 2);
    for (std::size_t k = 0; k < copies; ++k) seqs[pick(g, 0, n - 1)] = seqs[pick(g, 0, n - 1)];
  }
  return seqs;
}

std::vector<std::array<float, 9>> as_arrays(const std::vector<motif::Sequence>& s) {
  return {s.begin(), s.end()};
}

void wavelet_suites(Report& rep, const Options& opt) {
  SeededGenerator g = SeededGenerator(opt.seed).fork(11);
  Check roundtrip(rep, opt, "wavelet", "wavelet.roundtrip");
  Check energy(rep, opt, "wavelet", "wavelet.energy");
  Check haar(rep, opt, "wavelet", "wavelet.haar_oracle");
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t H = pick(g, 4, 64), W = pick(g, 4, 64);
    const std::size_t levels = pick(g, 1, 2);
    const Tensor2 x = random_plane(g, H, W, g.uniform(0.1, 100.0));
    const auto p = wavelet::dwt2(x, levels);
    const Tensor2 y = wavelet::idwt2(p);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      err = std::max(err, std::fabs(static_cast<double>(y.data()[i]) - x.data()[i]));
    const double scale = 1.0 + max_abs(x.data());
    roundtrip.close(err / scale, 0.0, 1e-5, "max error at " + x.shape_string());

    const bool even = H % (std::size_t{1} << levels) == 0 && W % (std::size_t{1} << levels) == 0;
    if (even) {
      double ex = 0.0;
      for (float v : x.data()) ex += static_cast<double>(v) * v;
      energy.close(std::fabs(wavelet::energy(p) - ex) / std::max(ex, 1e-300), 0.0, 1e-4,
                   "relative energy at " + x.shape_string());
    }
    if (H % 2 == 0 && W % 2 == 0) {
      const auto one = wavelet::dwt2(x, 1);
      const auto ref = oracle::haar_level(to_rows(x));
      const Tensor2* bands[] = {&one.ll, &one.levels[0].lh, &one.levels[0].hl, &one.levels[0].hh};
      double worst = 0.0;
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t h = 0; h < H / 2; ++h)
          for (std::size_t w = 0; w < W / 2; ++w)
            worst = std::max(worst, std::fabs((*bands[b])(h, w) - ref[b][h][w]));
      haar.close(worst / scale, 0.0, 1e-5, "band mismatch at " + x.shape_string());
    }
  }
}

void mcg_suites(Report& rep, const Options& opt) {
  SeededGenerator g = SeededGenerator(opt.seed).fork(12);
  Check weights(rep, opt, "mcg", "mcg.weights_oracle");
  Check nearest(rep, opt, "mcg", "mcg.nearest_oracle");
  Check votes(rep, opt, "mcg", "mcg.vote_conservation");
  Check motifs(rep, opt, "mcg", "mcg.motif_oracle");
  Check perm(rep, opt, "mcg", "mcg.permutation");
  Check scale(rep, opt, "mcg", "mcg.scale");
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t n = pick(g, 2, 32);
    const std::size_t total = n * pick(g, 1, 4);
    const auto seqs = random_group(g, n);
    const motif::MotifGraph gr = motif::build_graph(seqs);
    const oracle::GraphResult ref = oracle::naive_graph(as_arrays(seqs), total);

    double w_err = 0.0;
    bool same_nearest = true;
    for (std::size_t c = 0; c < n; ++c) {
      w_err = std::max(w_err, std::fabs(gr.weight(c) - ref.weights[c]));
      same_nearest = same_nearest && gr.nearest[c] == ref.nearest[c];
    }
    weights.close(w_err, 0.0, 1e-9, "weights, n=" + std::to_string(n));
    nearest.holds(same_nearest, "nearest sets differ, n=" + std::to_string(n));
    votes.holds(gr.total_units() == static_cast<std::int64_t>(n) * gr.unit_denominator,
                "vote units do not sum to node_count, n=" + std::to_string(n));

    const auto mp = motif::extract_motif(gr, seqs, motif::Normalization::PaperNc, total);
    const auto mc = motif::extract_motif(gr, seqs, motif::Normalization::ConvexVotes, total);
    double m_err = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
      m_err = std::max({m_err, std::fabs(mp[i] - ref.motif_paper[i]), std::fabs(mc[i] - ref.motif_convex[i])});
    }
    motifs.close(m_err, 0.0, 1e-9, "motif, n=" + std::to_string(n));

    // Permutation: relabelling channels relabels weights; motif unchanged.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[pick(g, 0, i - 1)]);
    std::vector<motif::Sequence> shuffled(n);
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = seqs[order[i]];
    const auto gp = motif::build_graph(shuffled);
    const auto mpp = motif::extract_motif(gp, shuffled, motif::Normalization::PaperNc, total);
    double p_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) p_err = std::max(p_err, std::fabs(gp.weight(i) - gr.weight(order[i])));
    for (std::size_t i = 0; i < 9; ++i) p_err = std::max(p_err, std::fabs(mpp[i] - mp[i]));
    perm.close(p_err, 0.0, 1e-6, "permuted group, n=" + std::to_string(n));

    // Positive scale: weights unchanged, motif scales. Powers of two keep
    // exact ties exact; other factors only on tie-free data.
    const bool has_ties = std::any_of(gr.nearest.begin(), gr.nearest.end(),
                                      [](const auto& v) { return v.size() > 1; });
    const double s = has_ties ? std::ldexp(1.0, static_cast<int>(pick(g, 0, 6)) - 3) : g.uniform(0.1, 10.0);
    std::vector<motif::Sequence> scaled = seqs;
    for (auto& q : scaled)
      for (float& v : q) v = static_cast<float>(v * s);
    const auto gs = motif::build_graph(scaled);
    const auto ms = motif::extract_motif(gs, scaled, motif::Normalization::PaperNc, total);
    // Rounding s * x to float perturbs each input by one ulp, so the motif
    // error is measured against the scaled input magnitude.
    double s_err = 0.0, mag = 1.0;
    for (const auto& q : scaled)
      for (float v : q) mag = std::max(mag, static_cast<double>(std::fabs(v)));
    for (std::size_t i = 0; i < n; ++i) s_err = std::max(s_err, std::fabs(gs.weight(i) - gr.weight(i)));
    for (std::size_t i = 0; i < 9; ++i) s_err = std::max(s_err, std::fabs(ms[i] - s * mp[i]) / mag);
    scale.close(s_err, 0.0, 1e-6, "scaled group, n=" + std::to_string(n));
  }

  Check series(rep, opt, "mcg", "mcg.series_motif");
  for (std::size_t t = 0; t < std::max<std::size_t>(1, opt.trials / 4); ++t) {
    const std::size_t len = pick(g, 2, 9);
    std::vector<float> s(pick(g, len + 1, 80));
    for (float& v : s) v = static_cast<float>(g.uniform(-5.0, 5.0));
    const auto got = motif::series_motif(s, len);
    const auto ref = oracle::brute_series_motif(s, len);
    series.close(got.distance, ref.distance, 1e-9, "series motif distance");
    series.holds(got.a == ref.a && got.b == ref.b, "series motif pair differs");
  }
}

double max_diff(std::span<const float> impl, const std::vector<double>& ref) {
  double e = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) e = std::max(e, std::fabs(impl[i] - ref[i]));
  return e;
}

void corr_suites(Report& rep, const Options& opt) {
  SeededGenerator g = SeededGenerator(opt.seed).fork(13);
  Check gc(rep, opt, "correlation", "corr.group_corr");
  Check mid(rep, opt, "correlation", "corr.motif_identity");
  Check mconv(rep, opt, "correlation", "corr.motif_conv");
  Check comb(rep, opt, "correlation", "corr.combine");
  Check swap(rep, opt, "correlation", "corr.swap_symmetry");
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t G = pick(g, 1, 4);
    const std::size_t C = G * pick(g, 1, 16 / G);
    const std::size_t S = pick(g, 1, 12);
    cost::CorrOptions co;
    co.groups = G;
    co.max_disparity = pick(g, 1, 8);
    co.disparity_sign = g.uniform01() < 0.8 ? -1 : 1;
    const Tensor3 fl = seeded_uniform(g, C, S, S, 2.0);
    const Tensor3 fr = seeded_uniform(g, C, S, S, 2.0);
    const Tensor3 ml = seeded_uniform(g, C, S, S, 2.0);
    const Tensor3 mr = seeded_uniform(g, C, S, S, 2.0);
    const std::string shape = "C=" + std::to_string(C) + " G=" + std::to_string(G) +
                              " D=" + std::to_string(co.max_disparity) + " S=" + std::to_string(S);

    const auto cg = cost::group_corr(fl, fr, co);
    const auto ref_g = oracle::naive_group_corr(fl, fr, co.max_disparity, G, co.disparity_sign);
    gc.close(max_diff(cg.data(), ref_g), 0.0, 1e-6, shape);

    const auto cc = cost::motif_corr(ml, mr, co, nn::VolumeConv::make_identity());
    const auto ref_c = oracle::naive_group_corr(ml, mr, co.max_disparity, G, co.disparity_sign);
    mid.close(max_diff(cc.data(), ref_c), 0.0, 1e-6, shape);

    const nn::VolumeConv vc = nn::VolumeConv::seeded(g);
    auto conv_ref = [&](const Tensor3& f) {
      const std::size_t per = C / G;
      Tensor3 out(C, S, S);
      for (std::size_t gi = 0; gi < G; ++gi) {
        Tensor3 block(per, S, S);
        for (std::size_t k = 0; k < per; ++k) block.set_channel(k, f.channel(gi * per + k));
        const Tensor3 y = oracle::naive_conv3d(block, vc.weight, vc.bias);
        for (std::size_t k = 0; k < per; ++k) out.set_channel(gi * per + k, y.channel(k));
      }
      return out;
    };
    const auto cv = cost::motif_corr(ml, mr, co, vc);
    const auto ref_v = oracle::naive_group_corr(conv_ref(ml), conv_ref(mr), co.max_disparity, G,
                                                co.disparity_sign);
    mconv.close(max_diff(cv.data(), ref_v), 0.0, 1e-5, shape);

    const Tensor3 combined = cost::combine(cg, cc);
    std::vector<double> a(cg.data().begin(), cg.data().end()), b(cc.data().begin(), cc.data().end());
    comb.close(max_diff(combined.data(), oracle::naive_combine(a, b, G)), 0.0, 1e-6, shape);

    const auto rev = cost::group_corr(fr, fl, co);
    bool exact = true;
    for (std::size_t h = 0; h < S; ++h)
      for (std::size_t w = 0; w < S; ++w)
        for (std::size_t gi = 0; gi < G; ++gi) exact = exact && cg(0, h, w, gi) == rev(0, h, w, gi);
    swap.holds(exact, "C(l, r) != C(r, l) at d = 0, " + shape);
  }

  Check sa(rep, opt, "correlation", "corr.soft_argmin");
  for (std::size_t D : {2, 3, 8, 48}) {
    const DisparityMap u = cost::soft_argmin(Tensor3(D, 1, 1, 0.25f));
    sa.holds(u.values(0, 0) == static_cast<float>(D - 1) / 2.0f, "uniform logits, D=" + std::to_string(D));
  }
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t D = pick(g, 2, 24);
    Tensor3 logits(D, 1, 1);
    std::vector<double> col(D);
    for (std::size_t d = 0; d < D; ++d) col[d] = logits(d, 0, 0) = static_cast<float>(g.uniform(-4.0, 4.0));
    sa.close(cost::soft_argmin(logits).values(0, 0), oracle::naive_soft_argmin(col), 1e-5,
             "random logits, D=" + std::to_string(D));
    Tensor3 hot(D, 1, 1);
    const std::size_t k = pick(g, 0, D - 1);
    hot(k, 0, 0) = 100.0f;
    sa.close(cost::soft_argmin(hot).values(0, 0), static_cast<double>(k), 1e-4, "one-hot");
  }
  Tensor3 worked(3, 1, 1);
  worked(1, 0, 0) = static_cast<float>(std::log(2.0));
  sa.close(cost::soft_argmin(worked).values(0, 0), 1.0, 1e-6, "[0, ln 2, 0]");
}

void warp_suites(Report& rep, const Options& opt) {
  SeededGenerator g = SeededGenerator(opt.seed).fork(14);
  Check shift(rep, opt, "warp", "warp.integer_shift");
  Check homog(rep, opt, "warp", "warp.homography_shortcut");
  Check zero(rep, opt, "warp", "warp.zero_head");
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t H = pick(g, 4, 24), W = pick(g, 12, 40), C = pick(g, 1, 3);
    const std::size_t delta = std::array<std::size_t, 3>{1, 2, 4}[pick(g, 0, 2)];
    const Tensor3 right = seeded_uniform(g, C, H, W, 1.0);
    Tensor3 left(C, H, W);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t h = 0; h < H; ++h)
        for (std::size_t w = 0; w < W; ++w) left(c, h, w) = right(c, h, w >= delta ? w - delta : 0);
    const auto E = remp::recon_error(left, right, DisparityMap(H, W, static_cast<float>(delta)));
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = delta; w < W; ++w) {
        if (!E.valid[h * W + w]) continue;
        for (std::size_t c = 0; c < C; ++c) sum += std::fabs(E.error(c, h, w));
        count += C;
      }
    }
    shift.close(count ? sum / static_cast<double>(count) : 1.0, 0.0, 1e-6,
                "integer shift " + std::to_string(delta));

    remp::ReconOptions ho;
    ho.mode = remp::WarpMode::Homography;
    ho.rig = remp::CameraRig::rectified(g.uniform(200.0, 800.0), g.uniform(0.0, double(W)),
                                        g.uniform(0.0, double(H)), g.uniform(0.05, 0.6));
    DisparityMap d(H, W);
    for (float& v : d.values.data()) v = static_cast<float>(g.uniform(0.1, 6.0));
    const auto Er = remp::recon_error(left, right, d);
    const auto Eh = remp::recon_error(left, right, d, ho);
    double worst = 0.0;
    bool same_valid = true;
    for (std::size_t i = 0; i < H * W; ++i) {
      if (Er.valid[i] != Eh.valid[i]) same_valid = false;
      if (!Er.valid[i] || !Eh.valid[i]) continue;
      for (std::size_t c = 0; c < C; ++c)
        worst = std::max<double>(worst, std::fabs(Er.error.plane(c)[i] - Eh.error.plane(c)[i]));
    }
    homog.close(worst, 0.0, 1e-4, "homography vs rectified warp");
    homog.holds(same_valid, "homography and rectified validity masks differ");
  }
  for (std::size_t t = 0; t < std::max<std::size_t>(1, opt.trials / 10); ++t) {
    const std::size_t H = 4 * pick(g, 2, 6), W = 4 * pick(g, 2, 8);
    const Tensor3 l = seeded_uniform(g, 3, H, W, 1.0), r = seeded_uniform(g, 3, H, W, 1.0);
    DisparityMap d(H, W);
    for (float& v : d.values.data()) v = static_cast<float>(g.uniform(0.0, 4.0));
    const auto E = remp::recon_error(l, r, d);
    const auto w = remp::RempWeights::seeded(g.next_u64(), 3).with_zero_head();
    const DisparityMap out = remp::remp_refine(d, E, w);
    bool same = true;
    for (std::size_t i = 0; i < H * W; ++i)
      same = same && std::bit_cast<std::uint32_t>(out.values.data()[i]) ==
                         std::bit_cast<std::uint32_t>(d.values.data()[i]);
    zero.holds(same, "zero head changed the disparity");
  }
}

void loss_suites(Report& rep, const Options& opt) {
  SeededGenerator g = SeededGenerator(opt.seed).fork(15);
  Check hand(rep, opt, "loss", "loss.hand_case");
  const metrics::Mask one{1};
  const Tensor2 gt(1, 1, 5.0f);
  const std::vector<Tensor2> seq{Tensor2(1, 1, 6.0f), Tensor2(1, 1, 5.0f)};
  hand.close(metrics::sequence_loss(Tensor2(1, 1, 5.0f), seq, gt, one, 0.9), 0.9, 1e-9, "hand case");

  Check sl(rep, opt, "loss", "loss.smooth_l1");
  sl.close(metrics::smooth_l1(0.0), 0.0, 0.0, "smooth_l1(0)");
  sl.close(metrics::smooth_l1(0.5), 0.125, 0.0, "smooth_l1(0.5)");
  sl.close(metrics::smooth_l1(1.0), 0.5, 0.0, "smooth_l1(1)");
  sl.close(metrics::smooth_l1(-1.0), 0.5, 0.0, "smooth_l1(-1)");

  Check so(rep, opt, "loss", "loss.sequence_oracle");
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t H = pick(g, 1, 6), W = pick(g, 1, 6), n = pick(g, 1, 6);
    const double gamma = g.uniform(0.5, 1.0);
    const Tensor2 truth = random_plane(g, H, W, 10.0);
    const Tensor2 d0 = random_plane(g, H, W, 10.0);
    std::vector<Tensor2> ds;
    for (std::size_t k = 0; k < n; ++k) ds.push_back(random_plane(g, H, W, 10.0));
    metrics::Mask mask(H * W);
    for (auto& m : mask) m = g.uniform01() < 0.7;
    mask[pick(g, 0, H * W - 1)] = 1;
    double ref = 0.0, cnt = 0.0;
    for (std::size_t i = 0; i < H * W; ++i) {
      if (!mask[i]) continue;
      cnt += 1.0;
      const double e = static_cast<double>(d0.data()[i]) - truth.data()[i];
      ref += std::fabs(e) < 1.0 ? 0.5 * e * e : std::fabs(e) - 0.5;
    }
    ref /= cnt;
    for (std::size_t k = 1; k <= n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < H * W; ++i)
        if (mask[i]) s += std::fabs(static_cast<double>(ds[k - 1].data()[i]) - truth.data()[i]);
      ref += std::pow(gamma, static_cast<double>(n - k)) * s / cnt;
    }
    so.close(metrics::sequence_loss(d0, ds, truth, mask, gamma), ref, 1e-9 * (1.0 + ref), "random sequence");
  }
}

void io_suites(Report& rep, const Options& opt) {
  SeededGenerator g = SeededGenerator(opt.seed).fork(16);
  Check pfm(rep, opt, "io", "io.pfm_roundtrip");
  Check pnm(rep, opt, "io", "io.pnm_roundtrip");
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t H = pick(g, 1, 24), W = pick(g, 1, 24);
    Tensor2 v(H, W);
    for (float& x : v.data()) {
      x = g.uniform01() < 0.1 ? std::bit_cast<float>(static_cast<std::uint32_t>(g.next_u64()))
                              : static_cast<float>(g.uniform(-300.0, 300.0));
    }
    const auto bytes = formats::write_pfm(v);
    const auto again = formats::write_pfm(formats::read_pfm(bytes));
    pfm.holds(bytes == again, "PFM bytes differ at " + v.shape_string());

    const std::size_t C = g.uniform01() < 0.5 ? 1 : 3;
    const unsigned maxval = g.uniform01() < 0.7 ? 255u : static_cast<unsigned>(pick(g, 1, 254));
    std::string header = (C == 1 ? "P5\n" : "P6\n") + std::to_string(W) + " " +
                         std::to_string(H) + "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> img(header.begin(), header.end());
    for (std::size_t i = 0; i < C * H * W; ++i) img.push_back(static_cast<std::uint8_t>(pick(g, 0, maxval)));
    const auto parsed = formats::read_pnm(img);
    pnm.holds(formats::write_pnm(parsed.pixels, parsed.maxval) == img,
              "PNM bytes differ, maxval " + std::to_string(maxval));
  }
  const std::string minimal = "Pf\n1 1\n-1.0\n";
  std::vector<std::uint8_t> b(minimal.begin(), minimal.end());
  for (std::uint8_t x : {0x00, 0x00, 0x20, 0x40}) b.push_back(x);
  pfm.close(formats::read_pfm(b).values(0, 0), 2.5, 0.0, "minimal PFM");
}

}  // namespace

bool Report::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

std::vector<std::string> Report::failing() const {
  std::vector<std::string> out;
  for (const auto& p : properties)
    if (!p.passed) out.push_back(p.property);
  return out;
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["passed"] = passed();
  j["seconds"] = seconds;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : properties) {
    nlohmann::ordered_json e;
    e["suite"] = p.suite;
    e["property"] = p.property;
    e["passed"] = p.passed;
    e["checks"] = p.checks;
    e["worst"] = p.worst;
    if (!p.passed) e["detail"] = p.detail;
    arr.push_back(std::move(e));
  }
  j["properties"] = std::move(arr);
  j["failing"] = failing();
  return j.dump(2);
}

std::string Report::table() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %-6s %8s %12s\n", "property", "result", "checks", "worst");
  os << line;
  for (const auto& p : properties) {
    std::snprintf(line, sizeof line, "%-28s %-6s %8zu %12.3e\n", p.property.c_str(),
                  p.passed ? "PASS" : "FAIL", p.checks, p.worst);
    os << line;
    if (!p.passed) os << "    " << p.detail << '\n';
  }
  return os.str();
}

std::vector<std::string> property_names() {
  Options quick;
  quick.trials = 1;
  std::vector<std::string> names;
  for (const auto& p : run(quick).properties) names.push_back(p.property);
  return names;
}

Report run(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  auto wanted = [&](const char* suite) {
    return opt.suites.empty() || std::find(opt.suites.begin(), opt.suites.end(), suite) != opt.suites.end();
  };
  if (wanted("wavelet")) wavelet_suites(rep, opt);
  if (wanted("mcg")) mcg_suites(rep, opt);
  if (wanted("correlation")) corr_suites(rep, opt);
  if (wanted("warp")) warp_suites(rep, opt);
  if (wanted("loss")) loss_suites(rep, opt);
  if (wanted("io")) io_suites(rep, opt);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace mocha::selftest
