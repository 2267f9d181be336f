#include <gtest/gtest.h>

#include <cmath>

#include "pathlaw/pl_path.hpp"
#include "test_support.hpp"

using namespace pathlaw;

namespace {

void expect_knots(const PlPath &p, std::vector<std::pair<double, double>> knots,
                  double tol = 1e-15) {
  ASSERT_EQ(p.size(), knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    EXPECT_NEAR(p.time(i), knots[i].first, tol) << "knot " << i;
    EXPECT_NEAR(p.value(i), knots[i].second, tol) << "knot " << i;
  }
}

const PlPath kTent{{0, 0}, {1, 1}, {2, -1}};

}  // namespace

TEST(Grid, UniformTimes) {
  Grid g(2.0, 8);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.time(8), 2.0);
  EXPECT_DOUBLE_EQ(g.step(), 0.25);
  EXPECT_EQ(g.times().size(), 9u);
  EXPECT_EQ(g.index_of(0.75), 3u);
  EXPECT_FALSE(g.index_of(0.8));
  EXPECT_FALSE(g.index_of(2.5));
  EXPECT_THROW(Grid(0.0, 4), DomainError);
  EXPECT_THROW(Grid(1.0, 0), DomainError);
}

TEST(PlPath, RejectsInvalidKnots) {
  EXPECT_THROW(PlPath({0.0}, {0.0}), DomainError);
  EXPECT_THROW(PlPath({0.1, 1.0}, {0.0, 0.0}), DomainError);
  EXPECT_THROW(PlPath({0.0, 0.5, 0.5, 1.0}, {0, 0, 0, 0}), DomainError);
  EXPECT_THROW(PlPath({0.0, 1.0}, {0.0, NAN}), DomainError);
  EXPECT_THROW(PlPath({0.0, 1.0}, {0.0}), DomainError);
}

TEST(PlPath, KnotCap) {
  std::vector<double> ts(kMaxKnots + 1);
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<double>(i);
  EXPECT_THROW(PlPath(ts, std::vector<double>(ts.size(), 0.0)), DomainError);
}

TEST(Evaluate, Examples) {
  EXPECT_DOUBLE_EQ(kTent(1.5), 0.0);
  EXPECT_EQ(PlPath::zero(1.0)(0.37), 0.0);
  EXPECT_DOUBLE_EQ(PlPath::linear(1.0, 0.0, 1.0)(0.25), 0.25);
  EXPECT_EQ(kTent(1.0), 1.0);
  EXPECT_THROW(kTent(-0.1), DomainError);
  EXPECT_THROW(kTent(2.1), DomainError);
}

TEST(RunningMax, Examples) {
  const PlPath m = running_max(kTent);
  EXPECT_EQ(m(0.0), 0.0);
  EXPECT_EQ(m(1.0), 1.0);
  EXPECT_EQ(m(2.0), 1.0);
  EXPECT_EQ(m(1.7), 1.0);
  expect_knots(running_max(PlPath::zero(1.0)), {{0, 0}, {1, 0}});

  const PlPath dip{{0, 0}, {1, -1}, {2, 1}};
  const PlPath md = running_max(dip);
  expect_knots(md, {{0, 0}, {1, 0}, {1.5, 0}, {2, 1}});
  EXPECT_DOUBLE_EQ(md(1.75), 0.5);
}

TEST(SuffixExtremum, Examples) {
  const PlPath s = suffix_extremum(kTent, Extremum::max);
  EXPECT_EQ(s(0.0), 1.0);
  EXPECT_EQ(s(1.0), 1.0);
  EXPECT_EQ(s(2.0), -1.0);
  for (auto kind : {Extremum::max, Extremum::min}) {
    expect_knots(suffix_extremum(PlPath::zero(1.0), kind), {{0, 0}, {1, 0}});
  }
  const PlPath up = PlPath::linear(1.0, 0.0, 1.0);
  EXPECT_EQ(sup_distance(suffix_extremum(up, Extremum::min), up), 0.0);
}

TEST(TimeReverse, Examples) {
  expect_knots(time_reverse(PlPath::linear(1.0, 0.0, 1.0)), {{0, 0}, {1, -1}});
  expect_knots(time_reverse(PlPath::zero(1.0)), {{0, 0}, {1, 0}});
  expect_knots(time_reverse(kTent), {{0, 0}, {1, 2}, {2, 1}});
}

TEST(AffineCombine, Examples) {
  EXPECT_EQ(sup_distance(affine_combine(1.0, kTent, -1.0, kTent), PlPath::zero(2.0)), 0.0);
  EXPECT_EQ(sup_distance(affine_combine(2.0, PlPath::zero(2.0), 1.0, kTent), kTent), 0.0);
  const PlPath p{{0, 0}, {2, 2}};
  const PlPath q{{0, 0}, {1, 1}, {2, 0}};
  expect_knots(affine_combine(1.0, p, 1.0, q), {{0, 0}, {1, 2}, {2, 2}});
  EXPECT_THROW(affine_combine(1.0, p, 1.0, PlPath::zero(1.0)), DomainError);
}

TEST(AbsPath, Examples) {
  expect_knots(abs_path(PlPath{{0, -1}, {2, 1}}), {{0, 1}, {1, 0}, {2, 1}});
  const PlPath pos{{0, 0.5}, {0.3, 2}, {1, 0}};
  EXPECT_EQ(sup_distance(abs_path(pos), pos), 0.0);
  expect_knots(abs_path(PlPath::zero(1.0)), {{0, 0}, {1, 0}});
}

TEST(SupDistance, Examples) {
  EXPECT_EQ(sup_distance(kTent, kTent), 0.0);
  EXPECT_EQ(sup_distance(PlPath::linear(1.0, 0.0, 1.0), PlPath::zero(1.0)), 1.0);
  EXPECT_EQ(sup_distance(PlPath{{0, 0}, {2, 0}}, PlPath{{0, 1}, {1, -1}, {2, 1}}), 1.0);
  EXPECT_THROW(sup_distance(kTent, PlPath::zero(1.0)), DomainError);
}

TEST(KnotMerge, NearDuplicateCrossingsMerge) {
  // The crossing of 0 lands within 1e-14 t of the knot at 1: no extra knot.
  const PlPath p{{0, -1}, {1 - 1e-16, -1e-16}, {2, 1}};
  const PlPath a = abs_path(p);
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_GT(a.time(i) - a.time(i - 1), 1e-14);
  }
}

class PlPathProperties : public ::testing::TestWithParam<int> {};

TEST_P(PlPathProperties, AgainstPointwiseOracle) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const PlPath phi = oracle::random_path(seed, 8 + seed % 57, 3.0);
  const PlPath psi = oracle::random_path(seed + 1000, 8 + (seed * 7) % 57, 3.0);
  const PlPath top = running_max(phi);
  const PlPath smax = suffix_extremum(phi, Extremum::max);
  const PlPath smin = suffix_extremum(phi, Extremum::min);
  const PlPath rmin = running_min(phi);
  const double overall = oracle::running_max(phi, 1.0);

  const PlPath twice = time_reverse(time_reverse(phi));
  ASSERT_EQ(twice.size(), phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    EXPECT_NEAR(twice.time(i), phi.time(i), 1e-15);
    EXPECT_NEAR(twice.value(i), phi.value(i), 1e-15);
  }
  EXPECT_EQ(smax(0.0), top(1.0));

  for (std::size_t i = 0; i < top.size(); ++i) {
    const double s = top.time(i);
    EXPECT_GE(top.value(i), oracle::eval(phi, s) - 1e-12);
    if (i > 0) {
      EXPECT_GE(top.value(i), top.value(i - 1));
    }
  }
  for (std::size_t i = 1; i < smax.size(); ++i) EXPECT_LE(smax.value(i), smax.value(i - 1));
  for (std::size_t i = 1; i < smin.size(); ++i) EXPECT_GE(smin.value(i), smin.value(i - 1));

  const auto merged = detail::merged_times(top, smax);
  for (double s : merged) {
    EXPECT_DOUBLE_EQ(std::max(top(s), smax(s)), overall);
  }

  // Extrema envelopes against brute-force maxima over knots, on a dense set
  // that includes points between knots.
  auto times = oracle::uniform_times(seed, 100, 1.0);
  for (double s : phi.times()) times.push_back(s);
  for (double s : times) {
    EXPECT_NEAR(top(s), oracle::running_max(phi, s), 1e-12);
    EXPECT_NEAR(smax(s), oracle::suffix_max(phi, s), 1e-12);
    EXPECT_NEAR(smin(s), oracle::suffix_min(phi, s), 1e-12);
    EXPECT_NEAR(rmin(s), -oracle::running_max(negate(phi), s), 1e-12);
  }

  const double a = 0.7;
  const double b = -1.3;
  const PlPath comb = affine_combine(a, phi, b, psi);
  const PlPath absolute = abs_path(phi);
  for (double s : oracle::uniform_times(seed + 7, 100, 1.0)) {
    EXPECT_NEAR(comb(s), a * oracle::eval(phi, s) + b * oracle::eval(psi, s), 1e-12);
    EXPECT_NEAR(absolute(s), std::abs(oracle::eval(phi, s)), 1e-12);
  }
  for (double v : absolute.values()) EXPECT_GE(v, 0.0);

  double brute = 0.0;
  for (double s : detail::merged_times(phi, psi)) {
    brute = std::max(brute, std::abs(oracle::eval(phi, s) - oracle::eval(psi, s)));
  }
  EXPECT_NEAR(sup_distance(phi, psi), brute, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, PlPathProperties, ::testing::Range(1, 41));

TEST(PointwiseExtremum, MatchesOracle) {
  const PlPath p = oracle::random_path(3, 20, 2.0);
  const PlPath q = oracle::random_path(4, 30, 2.0);
  const PlPath hi = pointwise_max(p, q);
  const PlPath lo = pointwise_min(p, q);
  for (double s : oracle::uniform_times(5, 200, 1.0)) {
    EXPECT_NEAR(hi(s), std::max(oracle::eval(p, s), oracle::eval(q, s)), 1e-12);
    EXPECT_NEAR(lo(s), std::min(oracle::eval(p, s), oracle::eval(q, s)), 1e-12);
  }
}

TEST(LinearCombination, ConstantTerm) {
  const PlPath r = linear_combination({Term{2.0, &kTent}}, 1.0);
  expect_knots(r, {{0, 1}, {1, 3}, {2, -1}});
}
