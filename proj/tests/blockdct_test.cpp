#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jpegcons/blockdct.hpp"

namespace jpegcons {
namespace {

using B = Block<double>;

// Textbook cosine-sum definition, independent of the matrix formulation.
B naive_dct(const B& f) {
  B out;
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double sum = 0;
      for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y)
          sum += f(x, y) * std::cos((2 * x + 1) * u * std::numbers::pi / 16) *
                 std::cos((2 * y + 1) * v * std::numbers::pi / 16);
      const double cu = u == 0 ? 1 / std::sqrt(2.0) : 1.0, cv = v == 0 ? 1 / std::sqrt(2.0) : 1.0;
      out(u, v) = 0.25 * cu * cv * sum;
    }
  }
  return out;
}

B random_block(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-128, 127);
  B b;
  for (int i = 0; i < 64; ++i) b.data()[i] = u(rng);
  return b;
}

TEST(BlockDct, MatchesCosineSumDefinition) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const B b = random_block(rng);
    EXPECT_LT((dct2(b) - naive_dct(b)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BlockDct, BasisIsOrthonormal) {
  const auto& c = dct_matrix<double>();
  EXPECT_LT((c * c.transpose() - Eigen::Matrix<double, 8, 8>::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_DOUBLE_EQ(c(0, 3), 1 / std::sqrt(8.0));
}

TEST(BlockDct, ConstantBlockHasOnlyDc) {
  const B d = dct2(B::Constant(-37.0));
  EXPECT_NEAR(d(0, 0), 8 * -37.0, 1e-10);
  B ac = d;
  ac(0, 0) = 0;
  EXPECT_LT(ac.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(dct2(B::Zero()), B::Zero());
}

TEST(BlockDct, InverseOfDcImpulse) {
  B d = B::Zero();
  d(0, 0) = 8;
  EXPECT_LT((idct2(d) - B::Ones()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(idct2(B::Zero()), B::Zero());
}

TEST(BlockDct, RoundTripEnergyAndLinearity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> w(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const B a = random_block(rng), b = random_block(rng);
    EXPECT_LT((idct2(dct2(a)) - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((dct2(idct2(a)) - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(dct2(a).norm(), a.norm(), 1e-10);
    const double alpha = w(rng), beta = w(rng);
    EXPECT_LT((dct2(B(alpha * a + beta * b)) - (alpha * dct2(a) + beta * dct2(b))).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BlockSplit, RasterOrderAndCounts) {
  Plane<double> p(8, 16);
  p.leftCols(8).setConstant(1);
  p.rightCols(8).setConstant(2);
  const auto blocks = split_blocks(p);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0](3, 3), 1);
  EXPECT_EQ(blocks[1](3, 3), 2);
  EXPECT_EQ(split_blocks<double>(Plane<double>::Zero(8, 8)).size(), 1u);
}

TEST(BlockSplit, MergeInvertsSplit) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 255);
  Plane<double> p(64, 64);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
  const auto blocks = split_blocks(p);
  EXPECT_TRUE((merge_blocks<double>(blocks, 64, 64) == p).all());
}

TEST(BlockSplit, PaddingIsOptIn) {
  Plane<double> p = Plane<double>::Zero(10, 12);
  try {
    split_blocks(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonMultipleOf8WithoutPadFlag);
  }
  p(9, 11) = 5;
  const auto blocks = split_blocks(p, true);
  ASSERT_EQ(blocks.size(), 4u);
  // Edge replication fills the padded corner with the last sample.
  EXPECT_EQ(blocks[3](7, 7), 5);
  EXPECT_TRUE((merge_blocks<double>(blocks, 12, 10) == p).all());
}

TEST(BlockSplit, PadAdjointMatchesInnerProduct) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  Plane<double> x(5, 11), g(8, 16);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = u(rng);
  EXPECT_NEAR((pad_edge(x, 8) * g).sum(), (x * pad_edge_adjoint(g, 11, 5)).sum(), 1e-12);
}

}  // namespace
}  // namespace jpegcons
