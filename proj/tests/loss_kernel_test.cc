#include "camext/loss_kernel.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "camext/error.h"

namespace camext {
namespace {

FeatureTensor RandomTensor(std::mt19937_64& rng, int c, int h, int w) {
  std::normal_distribution<double> n(0.0, 1.0);
  FeatureTensor t(c, h, w);
  for (double& v : t.data()) v = n(rng);
  return t;
}

FeatureTensor Scaled(const FeatureTensor& t, double s) {
  FeatureTensor out = t;
  for (double& v : out.data()) v *= s;
  return out;
}

TEST(FeatureTensorTest, Validation) {
  EXPECT_THROW(FeatureTensor(0, 1, 1), Error);
  EXPECT_THROW(FeatureTensor(1, 1, 2, std::vector<double>(3)), Error);
  EXPECT_THROW(FeatureTensor(1, 1, 1, std::vector<double>{NAN}), Error);
  EXPECT_EQ(FeatureTensor(3, 4, 5).ShapeString(), "(3, 4, 5)");
}

TEST(GramTest, Examples) {
  const FeatureTensor t(2, 1, 1, {2, 3});
  GramMatrix expected(2, 2);
  expected << 2, 3, 3, 4.5;
  EXPECT_EQ(Gram(t), expected);
  EXPECT_TRUE(Gram(FeatureTensor(3, 2, 2)).isZero(0));
}

TEST(GramTest, ReshapeFormAgreesAndIsPsd) {
  std::mt19937_64 rng(50);
  std::uniform_int_distribution<int> d(1, 8);
  for (int i = 0; i < 200; ++i) {
    const FeatureTensor t = RandomTensor(rng, d(rng), d(rng), d(rng));
    const GramMatrix g = Gram(t);
    ASSERT_LE((g - GramByReshape(t)).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_LE((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    ASSERT_GE(es.eigenvalues().minCoeff(), -1e-9);
    ASSERT_LE((Gram(Scaled(t, 3.0)) - 9.0 * g).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ContentLossTest, Examples) {
  std::mt19937_64 rng(51);
  const FeatureTensor a = RandomTensor(rng, 3, 4, 4);
  EXPECT_EQ(ContentLoss(a, a), 0.0);
  FeatureTensor b = a;
  for (double& v : b.data()) v += 0.25;
  EXPECT_NEAR(ContentLoss(a, b), 0.0625, 1e-15);
  EXPECT_NEAR(ContentLoss(b, a), ContentLoss(a, b), 1e-15);
  const FeatureTensor c = RandomTensor(rng, 3, 4, 4);
  EXPECT_NEAR(ContentLoss(Scaled(a, 2), Scaled(c, 2)), 4 * ContentLoss(a, c), 1e-12);
  try {
    ContentLoss(FeatureTensor(3, 4, 4), FeatureTensor(3, 4, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(StyleLossTest, Examples) {
  const FeatureTensor t(2, 1, 1, {2, 3});
  EXPECT_EQ(StyleLoss(t, FeatureTensor(2, 3, 3)), 42.25);
  EXPECT_EQ(StyleLoss(t, t), 0.0);
  try {
    StyleLoss(t, FeatureTensor(3, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kChannelMismatch);
  }
}

TEST(StyleLossTest, SpatialPermutationInvariance) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 50; ++i) {
    const FeatureTensor a = RandomTensor(rng, 3, 4, 5);
    const FeatureTensor b = RandomTensor(rng, 3, 2, 7);
    std::vector<int> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    FeatureTensor p(3, 4, 5);
    for (int ch = 0; ch < 3; ++ch) {
      for (int k = 0; k < 20; ++k) {
        p(ch, k / 5, k % 5) = a(ch, perm[k] / 5, perm[k] % 5);
      }
    }
    ASSERT_LT(StyleLoss(a, p), 1e-12);
    ASSERT_NEAR(StyleLoss(p, b), StyleLoss(a, b), 1e-12);
  }
}

struct Instance {
  std::vector<FeatureTensor> layers;
  FeatureTensor content;
  std::vector<FeatureTensor> styles;
};

Instance RandomInstance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 4);
  Instance inst{{}, FeatureTensor(1, 1, 1), {}};
  for (int m = 0; m < 3; ++m) {
    const int c = d(rng);
    inst.layers.push_back(RandomTensor(rng, c, d(rng), d(rng)));
    inst.styles.push_back(RandomTensor(rng, c, d(rng), d(rng)));
  }
  const FeatureTensor& last = inst.layers.back();
  inst.content = RandomTensor(rng, last.c(), last.h(), last.w());
  return inst;
}

TEST(TotalLossTest, WeightsAndLinearity) {
  std::mt19937_64 rng(53);
  const Instance inst = RandomInstance(rng);
  EXPECT_EQ(TotalLoss(inst.layers, inst.content, inst.styles, {0, 0}).total, 0.0);
  EXPECT_EQ(TotalLoss(inst.layers, inst.content, inst.styles, {1.7, 0}).total,
            1.7 * ContentLoss(inst.layers.back(), inst.content));
  double style = 0;
  for (int m = 0; m < 3; ++m) style += StyleLoss(inst.layers[m], inst.styles[m]);
  const LossBreakdown b = TotalLoss(inst.layers, inst.content, inst.styles);
  EXPECT_NEAR(b.style, style, 1e-12);
  auto total = [&](double g1, double g2) {
    return TotalLoss(inst.layers, inst.content, inst.styles, {g1, g2}).total;
  };
  EXPECT_NEAR(total(2.4, 0.7) - total(0, 0.7), 2 * (total(1.2, 0.7) - total(0, 0.7)),
              1e-12);
}

TEST(TotalLossTest, PropagatesShapeErrors) {
  std::mt19937_64 rng(54);
  Instance inst = RandomInstance(rng);
  inst.content = FeatureTensor(inst.layers.back().c() + 1, 1, 1);
  EXPECT_THROW(TotalLoss(inst.layers, inst.content, inst.styles), Error);
  inst = RandomInstance(rng);
  inst.styles.pop_back();
  EXPECT_THROW(TotalLoss(inst.layers, inst.content, inst.styles), Error);
}

TEST(LossGradientsTest, ZeroCases) {
  std::mt19937_64 rng(55);
  Instance inst = RandomInstance(rng);
  inst.content = inst.layers.back();
  for (const FeatureTensor& g :
       LossGradients(inst.layers, inst.content, inst.styles, {1, 0})) {
    for (double v : g.data()) EXPECT_EQ(v, 0.0);
  }
  for (const FeatureTensor& g :
       LossGradients(inst.layers, inst.content, inst.styles, {0, 0})) {
    for (double v : g.data()) EXPECT_EQ(v, 0.0);
  }
}

TEST(LossGradientsTest, MatchFiniteDifferences) {
  std::mt19937_64 rng(56);
  const double step = 1e-4;
  for (int i = 0; i < 100; ++i) {
    Instance inst = RandomInstance(rng);
    const LossWeights w{0.5 + (i % 3), 0.5 + (i % 5)};
    const auto grads = LossGradients(inst.layers, inst.content, inst.styles, w);
    for (size_t m = 0; m < inst.layers.size(); ++m) {
      double max_diff = 0, scale = 0;
      for (size_t j = 0; j < inst.layers[m].size(); ++j) {
        double& v = inst.layers[m].data()[j];
        const double saved = v;
        v = saved + step;
        const double up = TotalLoss(inst.layers, inst.content, inst.styles, w).total;
        v = saved - step;
        const double down = TotalLoss(inst.layers, inst.content, inst.styles, w).total;
        v = saved;
        const double fd = (up - down) / (2 * step);
        const double an = grads[m].data()[j];
        max_diff = std::max(max_diff, std::abs(an - fd));
        scale = std::max({scale, std::abs(an), std::abs(fd)});
      }
      if (scale > 0) ASSERT_LT(max_diff / scale, 1e-5) << "instance " << i;
    }
  }
}

TEST(TensorContainerTest, RoundTrip) {
  const FeatureTensor t(2, 1, 3, {0.5, -1.25, 3, 4, 1e-3, -7});
  const std::string bytes = EncodeTensor(t);
  EXPECT_EQ(bytes.substr(0, 4), "CXFT");
  EXPECT_EQ(bytes.size(), 16u + 6 * 4);
  const FeatureTensor back = DecodeTensor(bytes);
  ASSERT_TRUE(back.SameShape(t));
  for (size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.data()[i], static_cast<double>(static_cast<float>(t.data()[i])));
  }
  EXPECT_NE(TensorMetadataJson(t).find("\"c\""), std::string::npos);
}

TEST(TensorContainerTest, Errors) {
  const std::string bytes = EncodeTensor(FeatureTensor(1, 2, 2, 1.0));
  EXPECT_THROW(DecodeTensor(""), Error);
  EXPECT_THROW(DecodeTensor("XXXX" + bytes.substr(4)), Error);
  EXPECT_THROW(DecodeTensor(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(DecodeTensor(bytes + "x"), Error);
}

}  // namespace
}  // namespace camext
