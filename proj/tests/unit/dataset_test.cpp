#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shufflebn/dataset.hpp"
#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"
#include "shufflebn/random.hpp"

using namespace shufflebn;

namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

void expect_batch_moments(const NormalizedDataset& nds) {
  for (const auto& b : nds.batches) {
    Matrix s = nds.Xbar.middleCols(b.begin, b.size);
    for (Index k = 0; k < s.rows(); ++k) {
      double mu = s.row(k).mean();
      double var = (s.row(k).array() - mu).square().mean();
      EXPECT_LE(std::abs(mu), 1e-10);
      EXPECT_LE(std::abs(var - 1.0), 1e-8);
    }
  }
}

}  // namespace

TEST(BnBatch, TwoDistinctScalarsMapToMinusOnePlusOne) {
  Matrix out = bn_batch(row({3, 5}), 0.0);
  EXPECT_EQ(out(0, 0), -1.0);
  EXPECT_EQ(out(0, 1), 1.0);
}

TEST(BnBatch, ThreePointExample) {
  Matrix out = bn_batch(row({1, 2, 3}), 0.0);
  EXPECT_NEAR(out(0, 0), -std::sqrt(1.5), 1e-14);
  EXPECT_NEAR(out(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(out(0, 2), std::sqrt(1.5), 1e-14);
}

TEST(BnBatch, FixedPointWhenAlreadyNormalized) {
  Matrix x = row({-1, 1, -1, 1});
  EXPECT_TRUE(bn_batch(x, 0.0).isApprox(x, 1e-15));
}

TEST(BnBatch, MatchesLoopOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Matrix x = oracle::gaussian(4, 7, rng, 3.0);
    for (double eps : {0.0, 1e-5, 0.3})
      EXPECT_TRUE(bn_batch(x, eps).isApprox(oracle::bn_loops(x, eps), 1e-12));
  }
}

TEST(BnBatch, ConstantCoordinateWithoutEpsilonThrows) {
  Matrix x(2, 3);
  x << 1, 2, 3, 4, 4, 4;
  try {
    bn_batch(x, 0.0, 5);
    FAIL();
  } catch (const ConstantCoordinate& e) {
    EXPECT_EQ(e.code(), Errc::constant_coordinate);
    EXPECT_EQ(e.coordinate(), 1);
    EXPECT_EQ(e.batch(), 5);
  }
  Matrix out = bn_batch(x, 1e-5);
  EXPECT_EQ(out.row(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BnBatch, SingleColumnIsTooSmall) {
  try {
    bn_batch(row({1}), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::batch_too_small);
  }
}

TEST(BnBatch, ScaleInvariantPerCoordinate) {
  std::mt19937_64 rng(11);
  Matrix x = oracle::gaussian(1, 6, rng);
  Matrix two(2, 6);
  two.row(0) = x;
  two.row(1) = 17.5 * x;
  Matrix out = bn_batch(two, 0.0);
  EXPECT_TRUE(out.row(0).isApprox(out.row(1), 1e-13));
}

TEST(Dataset, ValidatesShapesAndLabels) {
  EXPECT_THROW(Dataset::regression(Matrix::Zero(2, 1), Matrix::Zero(1, 1)), Error);
  EXPECT_THROW(Dataset::regression(Matrix::Zero(2, 4), Matrix::Zero(1, 3)), Error);
  RowVector bad(3);
  bad << 1, 0, -1;
  try {
    Dataset::classification(Matrix::Zero(1, 3), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_binary_label);
  }
}

TEST(BatchPlan, RejectsInvalidPlans) {
  EXPECT_THROW(BatchPlan::make({0, 1, 2, 3}, 3), Error);
  EXPECT_THROW(BatchPlan::make({0, 1, 1, 3}, 2), Error);
  EXPECT_THROW(BatchPlan::make({0, 1, 2, 3}, 1), Error);
  EXPECT_NO_THROW(BatchPlan::make({3, 1, 2, 0}, 2));
}

TEST(NormalizeSS, BEqualsNMatchesGD) {
  std::mt19937_64 rng(5);
  Dataset ds = Dataset::regression(oracle::gaussian(3, 8, rng), oracle::gaussian(2, 8, rng));
  auto ss = normalize_ss(ds, BatchPlan::identity(8, 8));
  auto gd = normalize_gd(ds);
  EXPECT_EQ(ss.Xbar, gd.Xbar);
  EXPECT_EQ(ss.Y, gd.Y);
}

TEST(NormalizeSS, PairsGiveAlternatingSigns) {
  Dataset ds = Dataset::regression(row({1, 2, 3, 4}), row({0, 0, 0, 0}));
  auto nds = normalize_ss(ds, BatchPlan::identity(4, 2));
  EXPECT_EQ(nds.Xbar, row({-1, 1, -1, 1}));
}

TEST(NormalizeSS, BatchMomentsOnGaussianData) {
  std::mt19937_64 rng(7);
  Dataset ds = Dataset::regression(oracle::gaussian(2, 16, rng), oracle::gaussian(1, 16, rng));
  for (std::uint64_t s = 0; s < 5; ++s) expect_batch_moments(normalize_ss(ds, BatchPlan::random(16, 4, s)));
}

TEST(NormalizeSS, PermutationConsistency) {
  std::mt19937_64 rng(9);
  Dataset ds = Dataset::regression(oracle::gaussian(2, 12, rng), oracle::gaussian(2, 12, rng));
  auto plan = BatchPlan::random(12, 3, 42);
  auto nds = normalize_ss(ds, plan);
  for (Index c = 0; c < 12; ++c) {
    Index orig = plan.perm[static_cast<std::size_t>(c)];
    EXPECT_EQ(nds.source[static_cast<std::size_t>(c)], orig);
    EXPECT_EQ(nds.Y.col(c), ds.Y.col(orig));
  }
  // Normalizing the shuffled columns by hand reproduces each slice.
  for (Index j = 0; j < 4; ++j) {
    Matrix raw(2, 3);
    for (Index c = 0; c < 3; ++c) raw.col(c) = ds.X.col(plan.perm[static_cast<std::size_t>(3 * j + c)]);
    EXPECT_TRUE(nds.Xbar.middleCols(3 * j, 3).isApprox(oracle::bn_loops(raw, 0.0), 1e-12));
  }
}

TEST(NormalizeSS, BooleanPropertyForPairs) {
  std::mt19937_64 rng(13);
  Dataset ds = Dataset::regression(oracle::gaussian(3, 20, rng), oracle::gaussian(1, 20, rng));
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto nds = normalize_ss(ds, BatchPlan::random(20, 2, s));
    EXPECT_TRUE((nds.Xbar.array().abs() == 1.0).all());
  }
}

TEST(NormalizeSS, ConstantCoordinateReportsBatch) {
  Dataset ds = Dataset::regression(row({1, 2, 5, 5}), row({0, 0, 0, 0}));
  try {
    normalize_ss(ds, BatchPlan::identity(4, 2));
    FAIL();
  } catch (const ConstantCoordinate& e) {
    EXPECT_EQ(e.batch(), 1);
  }
}

TEST(NormalizeGD, Examples) {
  Dataset two = Dataset::regression(row({-7, 2}), row({0, 0}));
  EXPECT_EQ(normalize_gd(two).Xbar, row({-1, 1}));
  Dataset four = Dataset::regression(row({0, 0, 3, 3}), row({0, 0, 0, 0}));
  EXPECT_TRUE(normalize_gd(four).Xbar.isApprox(row({-1, -1, 1, 1}), 1e-15));
}

TEST(NormalizeRRFull, SizesAndOrder) {
  Dataset ds3 = Dataset::regression(row({1, 2, 4}), row({0, 0, 0}));
  auto three = normalize_rr_full(ds3, 2);
  EXPECT_EQ(three.cols(), 6);
  EXPECT_EQ(three.batches.size(), 3u);
  EXPECT_EQ(three.Xbar, row({-1, 1, -1, 1, -1, 1}));
  // Lexicographic order of index sets: {0,1}, {0,2}, {1,2}.
  std::vector<Index> expected{0, 1, 0, 2, 1, 2};
  EXPECT_EQ(three.source, expected);

  Dataset ds4 = Dataset::regression(row({1, 2, 3, 4}), row({0, 0, 0, 0}));
  auto four = normalize_rr_full(ds4, 2);
  EXPECT_EQ(four.cols(), 12);
  EXPECT_EQ(four.batches.size(), 6u);
}

TEST(NormalizeRRFull, RankOnGaussianData) {
  std::mt19937_64 rng(17);
  Dataset ds = Dataset::regression(oracle::gaussian(4, 6, rng), oracle::gaussian(1, 6, rng));
  auto nds = normalize_rr_full(ds, 3);
  EXPECT_EQ(nds.cols(), 3 * 20);
  EXPECT_EQ(numerical_rank(nds.Xbar), 4);
  expect_batch_moments(nds);
}

TEST(NormalizeRRFull, CapTriggersBlowup) {
  std::mt19937_64 rng(19);
  Dataset ds = Dataset::regression(oracle::gaussian(1, 30, rng), oracle::gaussian(1, 30, rng));
  try {
    normalize_rr_full(ds, 15);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::combinatorial_blowup);
  }
  EXPECT_THROW(normalize_rr_full(ds, 2, 0.0, 100), Error);
}

TEST(NormalizeRRSampled, SinglePermutationEqualsSS) {
  std::mt19937_64 rng(23);
  Dataset ds = Dataset::regression(oracle::gaussian(2, 12, rng), oracle::gaussian(1, 12, rng));
  auto rr = normalize_rr_sampled(ds, 4, 1, 99);
  auto ss = normalize_ss(ds, BatchPlan::make(sampled_permutation(12, 99, 0), 4));
  EXPECT_EQ(rr.Xbar, ss.Xbar);
  EXPECT_EQ(rr.Y, ss.Y);
}

TEST(NormalizeRRSampled, DeterministicAndSized) {
  std::mt19937_64 rng(29);
  Dataset ds = Dataset::regression(oracle::gaussian(10, 100, rng), oracle::gaussian(1, 100, rng));
  auto a = normalize_rr_sampled(ds, 10, 1000, 5);
  auto b = normalize_rr_sampled(ds, 10, 1000, 5);
  EXPECT_EQ(a.cols(), 1000 * 100);
  EXPECT_EQ(a.Xbar, b.Xbar);
  EXPECT_EQ(a.perms.size(), 1000u);
  auto c = normalize_rr_sampled(ds, 10, 3, 6);
  EXPECT_NE(a.Xbar.leftCols(300), c.Xbar);
}

TEST(Rank, CeilingHoldsForRandomShapes) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> pick(1, 12);
  for (int t = 0; t < 40; ++t) {
    Index d = pick(rng);
    Index B = 2 + pick(rng) % 4;
    Index n = B * (1 + pick(rng) % 4);
    Dataset ds = Dataset::regression(oracle::gaussian(d, n, rng), oracle::gaussian(1, n, rng));
    auto nds = normalize_ss(ds, BatchPlan::random(n, B, static_cast<std::uint64_t>(t)));
    EXPECT_LE(numerical_rank(nds.Xbar), std::min(d, (B - 1) * n / B));
  }
}

TEST(Binomial, SmallValuesAndOverflow) {
  EXPECT_EQ(binomial(6, 3).value(), 20u);
  EXPECT_EQ(binomial(30, 15).value(), 155117520u);
  EXPECT_EQ(binomial(5, 7).value(), 0u);
  EXPECT_FALSE(binomial(200, 100).has_value());
}

TEST(Combinations, LexicographicEnumeration) {
  std::vector<std::vector<Index>> seen;
  for_each_combination(4, 2, [&](const std::vector<Index>& c) { seen.push_back(c); });
  std::vector<std::vector<Index>> expected{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(seen, expected);
}

TEST(Random, SplitSeedStreamsAreDistinctAndStable) {
  EXPECT_EQ(split_seed(7, 3), split_seed(7, 3));
  EXPECT_NE(split_seed(7, 3), split_seed(7, 4));
  EXPECT_NE(split_seed(7, 3), split_seed(8, 3));
  auto p = random_permutation(50, 123);
  EXPECT_TRUE(is_permutation_of(p, 50));
  EXPECT_EQ(p, random_permutation(50, 123));
}

TEST(Random, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
