#include <cmath>

#include "doctest.h"
#include "segmeld/evalkit.hpp"
#include "segmeld/netpbm.hpp"
#include "support.hpp"

using namespace segmeld;

namespace {

ClassRegistry ab() { return {{1, "a"}, {2, "b"}}; }

const ClassRow& row(const std::vector<ClassRow>& rows, ClassId id) {
  for (const auto& r : rows) {
    if (r.id == id) return r;
  }
  throw std::runtime_error("no row");
}

}  // namespace

TEST_CASE("f_beta reference values") {
  CHECK(f_beta(1, 1, 0.5) == 1.0);
  CHECK(f_beta(1, 0, 0.5) == 0.0);
  CHECK(f_beta(0, 0, 0.5) == 0.0);
  CHECK(std::abs(f_beta(0.8, 0.4, 0.5) - 0.66667) < 1e-5);
  CHECK(std::abs(f_beta(0.8, 0.4, 0.5) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("f_beta with beta 0.5 is the 1.25 pr / (0.25 p + r) form") {
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double p = i / 99.0, r = j / 99.0;
      const double want = (0.25 * p + r) == 0 ? 0.0 : 1.25 * p * r / (0.25 * p + r);
      CHECK(f_beta(p, r, 0.5) == want);
    }
  }
}

TEST_CASE("f1 is symmetric and f0.5 favours precision") {
  for (int i = 1; i < 20; ++i) {
    for (int j = 1; j < 20; ++j) CHECK(f_beta(i / 20.0, j / 20.0, 1) == f_beta(j / 20.0, i / 20.0, 1));
    const double p = i / 20.0, h = 1e-6;
    const double dp = (f_beta(p + h, p, 0.5) - f_beta(p - h, p, 0.5)) / (2 * h);
    const double dr = (f_beta(p, p + h, 0.5) - f_beta(p, p - h, 0.5)) / (2 * h);
    CHECK(dp > dr);
  }
}

TEST_CASE("confusion basics") {
  LabelMap gt = LabelMap::Constant(3, 3, 4);
  auto c = confusion(gt, gt);
  CHECK(c.at(4) == PixelCounts{9, 0, 0});
  c = confusion(LabelMap::Zero(3, 3), gt);
  CHECK(c.at(4) == PixelCounts{0, 0, 9});
  CHECK(c.count(0) == 0);
  CHECK_THROWS_AS(confusion(LabelMap::Zero(2, 3), gt), Error);
}

TEST_CASE("confusion on a hand-tallied 3x3 case") {
  LabelMap gt(3, 3), pred(3, 3);
  gt << 1, 1, 2,
        1, 2, 2,
        0, 0, 2;
  pred << 1, 2, 2,
          1, 1, 0,
          2, 1, 2;
  const auto c = confusion(pred, gt);
  // class 1: tp (0,0),(1,0) ; fp (1,1) ; fn (0,1)   ; bottom row gt 0 ignored
  CHECK(c.at(1) == PixelCounts{2, 1, 1});
  // class 2: tp (0,2),(2,2) ; fp (0,1) ; fn (1,1),(1,2)
  CHECK(c.at(2) == PixelCounts{2, 1, 2});
}

TEST_CASE("report averaging conventions") {
  const LabelMap gt = LabelMap::Constant(2, 2, 1);
  const std::vector<LabelMap> gts{gt, gt};
  LabelMap half = gt;
  half.row(1).setZero();  // p = 1, r = 0.5
  const std::vector<LabelMap> preds{gt, half};
  const std::vector<int> counts{1, 1};
  const auto rep = report(preds, gts, ab(), counts);
  REQUIRE(rep.images.size() == 2);
  CHECK(rep.images[0].mean->f05 == 1.0);
  const double f_half = f_beta(1, 0.5, 0.5);
  CHECK(rep.images[1].mean->f05 == f_half);
  CHECK(rep.mean.f05 == (1.0 + f_half) / 2);
  CHECK(rep.images[0].classes.size() == 1);

  const std::vector<LabelMap> one{gt};
  const auto perfect = report(one, one, ab(), std::vector<int>{1});
  CHECK(perfect.mean.f05 == 1.0);
  CHECK(perfect.mean.f1 == 1.0);
  CHECK(perfect.mean.iou == 1.0);
  CHECK(perfect.mean.precision == 1.0);

  CHECK_THROWS_AS(report(preds, one, ab(), counts), Error);
  LabelMap unknown = gt;
  unknown(0, 0) = 9;
  CHECK_THROWS_AS(report(std::vector<LabelMap>{unknown}, one, ab(), std::vector<int>{1}), Error);
}

TEST_CASE("per-image mean is the mean of two class scores") {
  LabelMap gt(1, 4), pred(1, 4);
  gt << 1, 1, 2, 2;
  pred << 1, 1, 1, 2;
  const auto rep = report(std::vector<LabelMap>{pred}, std::vector<LabelMap>{gt}, ab(), std::vector<int>{2});
  const double a = f_beta(2.0 / 3.0, 1.0, 0.5), b = f_beta(1.0, 0.5, 0.5);
  CHECK(std::abs(rep.images[0].mean->f05 - (a + b) / 2) < 1e-15);
}

TEST_CASE("precision-heavy partial segment beats undersegmentation under F0.5") {
  const auto dir = testing::fixture_dir() / "fscore_ranking";
  const LabelMap gt = read_label_pgm(dir / "gt_labels.pgm");
  const auto under = confusion(read_label_pgm(dir / "underseg_labels.pgm"), gt).at(1);
  const auto part = confusion(read_label_pgm(dir / "partial_labels.pgm"), gt).at(1);
  CHECK(under == PixelCounts{100, 50, 0});
  CHECK(part == PixelCounts{67, 0, 33});
  const Metrics mu = metrics_of(under), mp = metrics_of(part);
  CHECK(mp.f05 > mu.f05);
  CHECK(std::abs(mp.f1 - mu.f1) < 0.01);
}

TEST_CASE("report is invariant to relabelling classes") {
  Rng rng(51);
  const ClassRegistry reg{{1, "a"}, {2, "b"}, {3, "c"}};
  const ClassRegistry renamed{{30, "a"}, {10, "b"}, {20, "c"}};
  const std::map<ClassId, ClassId> to{{0, 0}, {1, 30}, {2, 10}, {3, 20}};
  std::vector<LabelMap> preds, gts, preds2, gts2;
  for (int i = 0; i < 6; ++i) {
    LabelMap p(5, 5), g(5, 5);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      p.data()[k] = static_cast<ClassId>(uniform_index(rng, 4));
      g.data()[k] = static_cast<ClassId>(uniform_index(rng, 4));
    }
    preds.push_back(p);
    gts.push_back(g);
    preds2.push_back(p.unaryExpr([&](ClassId c) { return to.at(c); }));
    gts2.push_back(g.unaryExpr([&](ClassId c) { return to.at(c); }));
  }
  const std::vector<int> counts{1, 2, 3, 1, 2, 3};
  const auto a = report(preds, gts, reg, counts);
  const auto b = report(preds2, gts2, renamed, counts);
  CHECK(a.mean.f05 == b.mean.f05);
  CHECK(a.mean.iou == b.mean.iou);
  for (const auto& r : a.classes) {
    const auto& s = row(b.classes, to.at(r.id));
    CHECK(s.name == r.name);
    CHECK(s.counts == r.counts);
  }
}

TEST_CASE("clutter curve groups by item count") {
  const LabelMap gt = LabelMap::Constant(2, 2, 1);
  LabelMap half = gt;
  half.row(1).setZero();
  const std::vector<LabelMap> gts{gt, gt, gt};
  const std::vector<LabelMap> preds{gt, half, gt};
  const auto rep = report(preds, gts, ab(), std::vector<int>{3, 1, 3});
  const auto curve = clutter_curve(rep);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].item_count == 1);
  CHECK(curve[0].mean_f05 == f_beta(1, 0.5, 0.5));
  CHECK(curve[1].item_count == 3);
  CHECK(curve[1].mean_f05 == 1.0);
  CHECK(curve[1].images == 2);
  CHECK(clutter_curve(EvalReport{}).empty());
}

TEST_CASE("clutter curve follows injected label noise") {
  Rng rng(61);
  std::vector<LabelMap> preds, gts;
  std::vector<int> counts;
  for (int n = 1; n <= 6; ++n) {
    for (int i = 0; i < 10; ++i) {
      LabelMap g = LabelMap::Constant(10, 10, 1);
      g.rightCols(5).setConstant(2);
      LabelMap p = g;
      // n * 4 corrupted pixels
      for (int k = 0; k < 4 * n; ++k) p(k / 10, k % 10) = p(k / 10, k % 10) == 1 ? 2 : 1;
      preds.push_back(p);
      gts.push_back(g);
      counts.push_back(n);
    }
  }
  const auto curve = clutter_curve(report(preds, gts, ab(), counts));
  REQUIRE(curve.size() == 6);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].mean_f05 <= curve[i - 1].mean_f05);
}

TEST_CASE("frequency curve joins scores with appearances") {
  LabelMap gt(1, 4), pred(1, 4);
  gt << 1, 1, 2, 2;
  pred << 1, 1, 1, 2;
  const auto rep = report(std::vector<LabelMap>{pred}, std::vector<LabelMap>{gt}, ab(), std::vector<int>{2});
  const auto curve = frequency_curve(rep, {{1, 40}, {2, 5}});
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].id == 2);
  CHECK(curve[0].appearances == 5);
  CHECK(curve[0].f05 == f_beta(1.0, 0.5, 0.5));
  CHECK(curve[1].id == 1);
  CHECK(curve[1].f05 == f_beta(2.0 / 3.0, 1.0, 0.5));
  CHECK_THROWS_AS(frequency_curve(rep, {{1, 40}}), Error);
}
