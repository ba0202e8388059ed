#include <cmath>

#include <Eigen/QR>

#include "doctest.h"
#include "segmeld/descriptor.hpp"
#include "support.hpp"

using namespace segmeld;
using Vec = Eigen::VectorXd;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

EmbeddedTriplet<double> with_distances(double d_plus, double d_minus) {
  // anchor at e1, positive and negative on the unit circle with |a-x|^2/4 = d
  auto at = [](double d) {
    const double c = 1 - 2 * d;  // |a-x|^2 = 2 - 2 cos
    return v2(c, std::sqrt(std::max(0.0, 1 - c * c)));
  };
  return {v2(1, 0), at(d_plus), at(d_minus)};
}

Eigen::MatrixXd random_rotation(Rng& rng, int d) {
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform_real(rng, -1.0, 1.0);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

}  // namespace

TEST_CASE("identity layer normalises a scaled basis vector") {
  const EmbeddingNet<double> net({DenseLayer<double>{Eigen::MatrixXd::Identity(4, 4), Vec::Zero(4)}});
  Vec x = Vec::Zero(4);
  x[0] = 2;
  CHECK(forward(net, x) == Vec::Unit(4, 0));
}

TEST_CASE("zero pre-norm falls back to e1 with no gradient") {
  const auto net = EmbeddingNet<double>::zeros_like(EmbeddingNet<double>::glorot(std::vector<int>{3, 4, 2}, 1));
  const auto trace = forward_trace(net, Vec(Vec::Zero(3)));
  CHECK(trace.degenerate);
  CHECK(trace.output == Vec::Unit(2, 0));
  auto grad = NetGradient<double>::zeros_like(net);
  backward(net, trace, v2(1, 1), grad);
  CHECK(grad.flatten().isZero(0));
}

TEST_CASE("forward is deterministic, unit norm and checks dimensions") {
  Rng rng(4);
  const auto net = EmbeddingNet<double>::glorot(std::vector<int>{6, 5, 3}, 9);
  CHECK(net == EmbeddingNet<double>::glorot(std::vector<int>{6, 5, 3}, 9));
  for (int i = 0; i < 100; ++i) {
    const Vec x = testing::random_vector(rng, 6, 3.0);
    const Vec y = forward(net, x);
    CHECK(y == forward(net, x));
    CHECK(std::abs(y.norm() - 1) < 1e-9);
  }
  CHECK_THROWS_AS(forward(net, Vec(Vec::Zero(5))), Error);
}

TEST_CASE("flatten and assign round trip") {
  auto net = EmbeddingNet<double>::glorot(std::vector<int>{3, 4, 2}, 2);
  CHECK(net.parameter_count() == 3 * 4 + 4 + 4 * 2 + 2);
  const Vec theta = net.flatten();
  auto other = EmbeddingNet<double>::zeros_like(net);
  other.assign(theta);
  CHECK(other == net);
  CHECK_THROWS_AS(other.assign(Vec::Zero(3)), Error);
}

TEST_CASE("net construction rejects unchained layers") {
  std::vector<DenseLayer<double>> layers{{Eigen::MatrixXd::Zero(3, 2), Vec::Zero(3)},
                                         {Eigen::MatrixXd::Zero(2, 4), Vec::Zero(2)}};
  CHECK_THROWS_AS(EmbeddingNet<double>{layers}, Error);
}

TEST_CASE("triplet loss hand values") {
  const double m = 0.2;
  // |a-n| = sqrt 2 >= 0 + m
  CHECK(triplet_loss_terms<double>(v2(1, 0), v2(1, 0), v2(0, 1), m).value == 0.0);
  CHECK(triplet_loss_terms<double>(v2(1, 0), v2(0, 1), v2(1, 0), m).value == 1.0);
  CHECK(triplet_loss_terms<double>(v2(1, 0), v2(1, 0), v2(1, 0), m).value == 1.0);
  // 1 - 1/(sqrt2 + 0.2)
  const double want = 1 - 1.0 / (std::sqrt(2.0) + 0.2);
  CHECK(std::abs(triplet_loss_terms<double>(v2(1, 0), v2(0, 1), v2(0, 0), m).value - want) < 1e-15);
}

TEST_CASE("triplet loss lies in [0,1]") {
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const auto t = triplet_loss_terms<double>(testing::random_unit(rng, 3), testing::random_unit(rng, 3),
                                              testing::random_unit(rng, 3), 0.2);
    CHECK(t.value >= 0.0);
    CHECK(t.value <= 1.0);
    CHECK((t.value == 0.0) == (t.slack <= 0.0));
  }
}

TEST_CASE("global loss hand values") {
  const LossConfig cfg;
  const auto sep = batch_stats<double>({0.1, 0.1, 0.1}, {0.9, 0.9, 0.9});
  CHECK(global_loss_value(sep, cfg) == 0.0);
  const auto two = batch_stats<double>({0.2, 0.4}, {0.5, 0.5});
  CHECK(std::abs(two.var_plus - 0.01) < 1e-12);
  CHECK(two.var_minus == 0.0);
  CHECK(std::abs(global_loss_value(two, cfg) - 0.01) < 1e-12);
  const auto equal = batch_stats<double>({0.3, 0.3}, {0.3, 0.3});
  CHECK(std::abs(global_loss_value(equal, cfg) - cfg.variance_weight * cfg.global_margin) < 1e-15);
  CHECK_THROWS_AS(batch_stats<double>({}, {}), Error);
}

TEST_CASE("global terms from embeddings reproduce the distances") {
  const std::vector<EmbeddedTriplet<double>> batch{with_distances(0.2, 0.5), with_distances(0.4, 0.5)};
  const auto g = global_loss_terms<double>(batch, LossConfig{});
  CHECK(std::abs(g.stats.d_plus[0] - 0.2) < 1e-12);
  CHECK(std::abs(g.stats.d_minus[1] - 0.5) < 1e-12);
  CHECK(std::abs(g.value - 0.01) < 1e-12);
  CHECK_THROWS_AS(global_loss_terms<double>(std::span<const EmbeddedTriplet<double>>{}, LossConfig{}), Error);
}

TEST_CASE("unit embeddings give distances in [0,1]") {
  Rng rng(7);
  std::vector<EmbeddedTriplet<double>> batch;
  for (int i = 0; i < 200; ++i) {
    batch.push_back({testing::random_unit(rng, 4), testing::random_unit(rng, 4), testing::random_unit(rng, 4)});
  }
  const auto g = global_loss_terms<double>(batch, LossConfig{});
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(g.stats.d_plus[i] >= 0.0);
    CHECK(g.stats.d_plus[i] <= 1.0);
    CHECK(g.stats.d_minus[i] <= 1.0);
  }
  CHECK(g.stats.var_plus >= 0.0);
}

TEST_CASE("losses are invariant to a common rotation") {
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd q = random_rotation(rng, 5);
    std::vector<EmbeddedTriplet<double>> table, rotated;
    for (int i = 0; i < 8; ++i) {
      EmbeddedTriplet<double> t{testing::random_unit(rng, 5), testing::random_unit(rng, 5),
                                testing::random_unit(rng, 5)};
      rotated.push_back({q * t.anchor, q * t.positive, q * t.negative});
      table.push_back(std::move(t));
    }
    CHECK(std::abs(global_loss_terms<double>(table, LossConfig{}).value -
                   global_loss_terms<double>(rotated, LossConfig{}).value) < 1e-12);
    for (std::size_t i = 0; i < table.size(); ++i) {
      CHECK(std::abs(triplet_loss_terms(table[i].anchor, table[i].positive, table[i].negative, 0.2).value -
                     triplet_loss_terms(rotated[i].anchor, rotated[i].positive, rotated[i].negative, 0.2).value) <
            1e-12);
    }
  }
}

TEST_CASE("combined loss is linear in alpha") {
  Rng rng(13);
  const auto net = EmbeddingNet<double>::glorot(std::vector<int>{4, 6, 3}, 5);
  std::vector<Triplet<double>> batch;
  for (int i = 0; i < 6; ++i) {
    batch.push_back({testing::random_vector(rng, 4), testing::random_vector(rng, 4), testing::random_vector(rng, 4), 1, 2});
  }
  const std::span<const Triplet<double>> view(batch);
  LossConfig cfg;
  cfg.alpha = 0.0;
  const auto zero = combined_loss(net, view, cfg);
  CHECK(zero.value == global_loss(net, view, cfg).value);
  CHECK(zero.gradient.flatten() == global_loss(net, view, cfg).gradient.flatten());
  double sum = 0;
  for (const auto& t : batch) sum += triplet_loss(net, t, 0.2).value;
  CHECK(std::abs(zero.triplet_sum - sum) < 1e-12);
  for (double a1 : {0.1, 0.8}) {
    for (double a2 : {0.5, 2.0}) {
      cfg.alpha = a1;
      const auto c1 = combined_loss(net, view, cfg);
      cfg.alpha = a2;
      const auto c2 = combined_loss(net, view, cfg);
      CHECK(std::abs((c2.value - c1.value) - (a2 - a1) * sum) < 1e-12);
    }
  }
  CHECK(std::abs((0.01 + 0.8 * 0.5) - 0.41) < 1e-15);
}

TEST_CASE("zero triplet losses leave combined equal to global") {
  // positives identical to anchors, negatives far away
  const EmbeddingNet<double> net({DenseLayer<double>{Eigen::MatrixXd::Identity(2, 2), Vec::Zero(2)}});
  const std::vector<Triplet<double>> batch{{v2(1, 0), v2(1, 0), v2(-1, 0), 1, 2}, {v2(0, 1), v2(0, 1), v2(0, -1), 1, 2}};
  const auto c = combined_loss(net, std::span<const Triplet<double>>(batch), LossConfig{});
  CHECK(c.triplet_sum == 0.0);
  CHECK(c.value == c.global);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(99);
  for (int draw = 0; draw < 15; ++draw) {
    const auto e = testing::gradient_draw(rng);
    CHECK(e.triplet < 1e-4);
    CHECK(e.global < 1e-4);
    CHECK(e.combined < 1e-4);
  }
}

TEST_CASE("loss config validation") {
  LossConfig cfg;
  cfg.triplet_margin = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = LossConfig{};
  cfg.alpha = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("descriptor of a uniform red region") {
  ColorImage img(8, 8);
  BinaryMask mask = BinaryMask::Constant(8, 8, false);
  for (int y = 2; y < 5; ++y) {
    for (int x = 1; x < 6; ++x) {
      img.at(x, y, 0) = 220;
      mask(y, x) = true;
    }
  }
  const PatchDescriptor d = describe_patch(img, mask);
  REQUIRE(d.size() == kDescriptorDim);
  CHECK(d[kGridSize] == doctest::Approx(1.0));
  CHECK(d.segment(kGridSize, kHueBins).sum() == doctest::Approx(1.0));
  CHECK(std::abs(d.head(kGridSize).sum() - 1.0) < 1e-12);
}

TEST_CASE("hue block is translation invariant and separates hues") {
  Rng rng(3);
  auto patch = [&](int ox, int oy, int r, int g, int b) {
    ColorImage img(20, 20);
    BinaryMask mask = BinaryMask::Constant(20, 20, false);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 6; ++x) {
        const int jitter = static_cast<int>(uniform_index(rng, 9)) - 4;
        img.at(ox + x, oy + y, 0) = static_cast<std::uint8_t>(std::clamp(r + jitter, 0, 255));
        img.at(ox + x, oy + y, 1) = static_cast<std::uint8_t>(g);
        img.at(ox + x, oy + y, 2) = static_cast<std::uint8_t>(b);
        mask(oy + y, ox + x) = true;
      }
    }
    return describe_patch(img, mask);
  };
  Rng fixed(3);
  rng = fixed;
  const auto a = patch(1, 1, 200, 40, 40);
  rng = fixed;
  const auto b = patch(12, 9, 200, 40, 40);
  CHECK(a.segment(kGridSize, kHueBins) == b.segment(kGridSize, kHueBins));
  const auto green = patch(3, 3, 40, 200, 40);
  const auto red2 = patch(5, 11, 190, 50, 45);
  auto cosine = [](const Vec& x, const Vec& y) { return x.dot(y) / (x.norm() * y.norm()); };
  CHECK(cosine(a, green) < cosine(a, red2));
}

TEST_CASE("descriptor errors and hue bins") {
  ColorImage img(4, 4);
  CHECK_THROWS_AS(describe_patch(img, BinaryMask::Constant(4, 4, false)), Error);
  CHECK_THROWS_AS(describe_patch(img, BinaryMask::Constant(3, 4, true)), Error);
  CHECK(hue_bin(0) == 0);
  CHECK(hue_bin(11.0) == 0);
  CHECK(hue_bin(12.0) == 1);
  CHECK(hue_bin(350.0) == 0);
  CHECK(hue_of(10, 10, 10) < 0);
  CHECK(hue_of(0, 255, 0) == doctest::Approx(120));
}
