#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "modclust/modclust.hpp"
#include "oracles.hpp"

using namespace modclust;

namespace {

AdjacencyMatrix adjacency(const oracle::Dense& a) { return AdjacencyMatrix(oracle::to_matrix(a)); }

}  // namespace

TEST(Adjacency, SingleEdgeModularity) {
  const auto b = build_modularity_matrix(adjacency({{0, 1}, {1, 0}}));
  EXPECT_DOUBLE_EQ(b.total_strength(), 2.0);
  EXPECT_DOUBLE_EQ(b.strengths()(0), 1.0);
  EXPECT_DOUBLE_EQ(b.strengths()(1), 1.0);
  EXPECT_DOUBLE_EQ(b(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(b(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(b(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(b(1, 1), -0.5);
}

TEST(Adjacency, EmptyNetworkRejected) {
  const AdjacencyMatrix a(Matrix::Zero(3, 3));
  EXPECT_THROW(build_modularity_matrix(a), ZeroStrengthNetwork);
}

TEST(Adjacency, TrianglePlusPendantMatchesOracle) {
  const oracle::Dense a{{0, 1, 1, 0}, {1, 0, 1, 0}, {1, 1, 0, 1}, {0, 0, 1, 0}};
  const auto b = build_modularity_matrix(adjacency(a));
  const auto expected = oracle::modularity_matrix(a);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(b(i, j), expected[i][j], 1e-15);
}

TEST(Adjacency, ValidationErrors) {
  EXPECT_THROW(adjacency({{0, 1}, {0, 0}}), AsymmetryError);
  EXPECT_THROW(adjacency({{1, 1}, {1, 0}}), InvalidAdjacency);
  EXPECT_THROW(adjacency({{0, -1}, {-1, 0}}), InvalidAdjacency);
  EXPECT_THROW(AdjacencyMatrix(Matrix::Zero(2, 3)), InvalidAdjacency);
  EXPECT_THROW(AdjacencyMatrix(Matrix(0, 0)), InvalidAdjacency);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(adjacency({{0, nan}, {nan, 0}}), InvalidAdjacency);
}

TEST(FuzzyModularity, SingleClusterOnSingleEdge) {
  const auto b = build_modularity_matrix(adjacency({{0, 1}, {1, 0}}));
  EXPECT_DOUBLE_EQ(fuzzy_modularity(b, MembershipMatrix(Matrix::Ones(2, 1))), 1.0);
}

TEST(FuzzyModularity, UniformMembershipFactorsOut) {
  std::mt19937_64 rng(5);
  const auto a = oracle::random_adjacency(9, 0.4, true, rng);
  const auto b = build_modularity_matrix(adjacency(a));
  double off = 0.0;
  for (std::size_t n = 0; n < 9; ++n)
    for (std::size_t m = 0; m < 9; ++m)
      if (n != m) off += b(n, m);
  for (int c = 1; c <= 4; ++c) {
    const MembershipMatrix u(Matrix::Constant(9, c, 1.0 / c));
    EXPECT_NEAR(fuzzy_modularity(b, u), off / c, 1e-12);
  }
}

TEST(FuzzyModularity, RandomFiveNodeMatchesTripleLoop) {
  std::mt19937_64 rng(11);
  const auto a = oracle::random_adjacency(5, 0.6, false, rng);
  const auto u = oracle::random_membership(5, 3, rng);
  const auto b = build_modularity_matrix(adjacency(a));
  const double expected = oracle::fuzzy_modularity(oracle::modularity_matrix(a), u);
  EXPECT_NEAR(fuzzy_modularity(b, MembershipMatrix(oracle::to_matrix(u))), expected, 1e-12);
}

TEST(FuzzyModularity, RowSumsVanish) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    const auto b = build_modularity_matrix(adjacency(oracle::random_adjacency(n, 0.3, trial % 2, rng)));
    EXPECT_LT(b.entries().rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FuzzyModularity, PermutationInvariant) {
  std::mt19937_64 rng(17);
  const std::size_t n = 12;
  const auto a = oracle::random_adjacency(n, 0.35, true, rng);
  const auto u = oracle::random_membership(n, 3, rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  oracle::Dense ap(n, std::vector<double>(n)), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    up[i] = u[perm[i]];
    for (std::size_t j = 0; j < n; ++j) ap[i][j] = a[perm[i]][perm[j]];
  }
  const double q = fuzzy_modularity(build_modularity_matrix(adjacency(a)),
                                    MembershipMatrix(oracle::to_matrix(u)));
  const double qp = fuzzy_modularity(build_modularity_matrix(adjacency(ap)),
                                     MembershipMatrix(oracle::to_matrix(up)));
  EXPECT_NEAR(q, qp, 1e-10);
}

TEST(FuzzyModularity, CrispEqualsSameClusterPairSum) {
  std::mt19937_64 rng(23);
  const std::size_t n = 10;
  const auto a = oracle::random_adjacency(n, 0.4, false, rng);
  const auto b = build_modularity_matrix(adjacency(a));
  std::vector<std::size_t> label(n);
  Matrix u = Matrix::Zero(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = rng() % 3;
    u(i, label[i]) = 1.0;
  }
  double expected = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (label[i] == label[j]) expected += 2.0 * b(i, j);
  EXPECT_NEAR(fuzzy_modularity(b, MembershipMatrix(u)), expected, 1e-12);
}

TEST(FuzzyModularity, UniformIsFractionOfSingleCluster) {
  std::mt19937_64 rng(29);
  const auto b = build_modularity_matrix(adjacency(oracle::random_adjacency(8, 0.5, true, rng)));
  const double single = fuzzy_modularity(b, MembershipMatrix(Matrix::Ones(8, 1)));
  EXPECT_NEAR(fuzzy_modularity(b, MembershipMatrix(Matrix::Constant(8, 4, 0.25))), single / 4, 1e-12);
}

TEST(FuzzyModularity, SelfPairsOption) {
  std::mt19937_64 rng(31);
  const auto a = oracle::random_adjacency(6, 0.5, false, rng);
  const auto u = oracle::random_membership(6, 2, rng);
  const auto b = build_modularity_matrix(adjacency(a));
  const Matrix um = oracle::to_matrix(u);
  double diag = 0.0;
  for (std::size_t n = 0; n < 6; ++n)
    for (std::size_t c = 0; c < 2; ++c) diag += b(n, n) * u[n][c] * u[n][c];
  EXPECT_NEAR(modularity_sum(b, um, true), modularity_sum(b, um) + diag, 1e-12);
}

TEST(FuzzyModularity, DimensionMismatch) {
  const auto b = build_modularity_matrix(adjacency({{0, 1}, {1, 0}}));
  EXPECT_THROW(fuzzy_modularity(b, MembershipMatrix(Matrix::Ones(3, 1))), DimensionMismatch);
}

TEST(ModularityField, ExcludesSelfPairs) {
  std::mt19937_64 rng(37);
  const auto a = oracle::random_adjacency(7, 0.5, true, rng);
  const auto u = oracle::random_membership(7, 3, rng);
  const auto bo = oracle::modularity_matrix(a);
  const Matrix g = modularity_field(build_modularity_matrix(adjacency(a)), oracle::to_matrix(u));
  for (std::size_t n = 0; n < 7; ++n)
    for (std::size_t c = 0; c < 3; ++c) {
      double expected = 0.0;
      for (std::size_t m = 0; m < 7; ++m)
        if (m != n) expected += bo[n][m] * u[m][c];
      EXPECT_NEAR(g(n, c), expected, 1e-12);
    }
}
