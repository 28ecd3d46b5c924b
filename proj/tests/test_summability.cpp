#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "scalekit/summability.hpp"

using namespace scalekit;

namespace {

constexpr double kBasel = std::numbers::pi * std::numbers::pi / 6.0;
// sum_{k<=1e5} 1/k^2 and sum_{k<=1e4} 1/k^2, from mpmath
constexpr double kBasel1e5 = 1.6449240668982262698;
constexpr double kBasel1e4 = 1.6448340718480597698;

EnumerationPtr random_permutation(std::mt19937_64& rng, std::size_t k) {
  std::vector<Index> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  return std::make_shared<const Enumeration>(Enumeration::from_forward(perm));
}

SummabilityOptions opts(int max_m) {
  SummabilityOptions o;
  o.max_m = max_m;
  return o;
}

}  // namespace

TEST(Summability, PowersOfKGiveBaselSum) {
  const auto start = std::chrono::steady_clock::now();
  const auto fam = ScaleFamily::parse("pow(k,n)", 6);
  const auto rep = summability_check(fam, Prefix::dense(100000), opts(6));
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  EXPECT_LT(secs, 1.0);
  ASSERT_EQ(rep.entries.size(), 3u);
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.m, e.n + 2);
    EXPECT_EQ(e.verdict, SummabilityVerdict::kCertified);
    EXPECT_EQ(e.method, TailMethod::kCondensation);
    EXPECT_NEAR(e.partial_sum.to_double(), kBasel1e5, 1e-12);
    EXPECT_NEAR(e.partial_sum.to_double(), kBasel, 1e-4);
    ASSERT_TRUE(e.tail_bound);
    // true tail is about 1e-5
    EXPECT_GE(e.partial_sum.to_double() + e.tail_bound->to_double(), kBasel);
    EXPECT_LT(e.tail_bound->to_double(), 3e-5);
  }
}

TEST(Summability, StandardVariantOffsets) {
  const std::vector<EnumerationPtr> g{identity_enumeration()};
  const Prefix pre = Prefix::dense(10000);
  const struct {
    StandardVariant v;
    int offset;
  } cases[] = {{StandardVariant::kSquared, 1},
               {StandardVariant::kPlain, 2},
               {StandardVariant::kSqrt, 4}};
  for (const auto& c : cases) {
    const auto fam = standard_family(g, c.v, 12);
    const auto rep = summability_check(fam, pre, opts(12));
    for (const auto& e : rep.entries) {
      EXPECT_EQ(e.m, e.n + c.offset);
      EXPECT_EQ(e.verdict, SummabilityVerdict::kCertified);
      EXPECT_NEAR(e.partial_sum.to_double(), kBasel1e4, 1e-12);
    }
  }
}

TEST(Summability, ConstantRatioIsRefuted) {
  const auto fam = ScaleFamily::parse("exp(k)", 12);
  const auto rep = summability_check(fam, Prefix::dense(100000));
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.verdict, SummabilityVerdict::kRefutedTrend);
    EXPECT_FALSE(e.tail_bound);
  }
}

TEST(Summability, HarmonicLikeIsRefuted) {
  const auto fam = ScaleFamily::parse("pow(1+log(k), n)", 4);
  const auto rep = summability_check(fam, Prefix::dense(20000), opts(4));
  for (const auto& e : rep.entries) {
    EXPECT_NE(e.verdict, SummabilityVerdict::kCertified);
  }
}

TEST(Summability, RejectsBadMaxM) {
  const auto fam = ScaleFamily::parse("pow(k,n)", 6);
  SummabilityOptions o;
  o.ns = {3};
  o.max_m = 3;
  EXPECT_THROW(summability_check(fam, Prefix::dense(10), o), DomainError);
  o.max_m = 7;
  EXPECT_THROW(summability_check(fam, Prefix::dense(10), o), DomainError);
}

TEST(Summability, TableFamilyIsPrefixBoundedOnly) {
  std::vector<double> v;
  for (int k = 1; k <= 1000; ++k) v.push_back(k);
  auto t = expr::table(v);
  const auto fam = ScaleFamily::from_expression(expr::pow(t, expr::var_n()), 4);
  const auto rep = summability_check(fam, Prefix::dense(1000), opts(4));
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.verdict, SummabilityVerdict::kPrefixBounded);
    EXPECT_EQ(e.method, TailMethod::kNone);
  }
}

TEST(Summability, EnlargingMNeverIncreasesSum) {
  const char* families[] = {"pow(k,n)", "pow(k+1,n)*exp(n)",
                            "pow(1+log(k),n)", "exp(n*sqrt(k))"};
  const Prefix pre = Prefix::dense(3000);
  for (const char* f : families) {
    const auto fam = ScaleFamily::parse(f, 8);
    for (int n = 0; n < 8; ++n) {
      LogValue prev = partial_sum(fam, n, n + 1, pre);
      for (int m = n + 2; m <= 8; ++m) {
        const LogValue cur = partial_sum(fam, n, m, pre);
        EXPECT_FALSE(approx::greater(cur, prev)) << f << " n=" << n;
        prev = cur;
      }
    }
  }
}

TEST(Summability, StandardFamiliesStayBelowBasel) {
  std::mt19937_64 rng(42);
  const std::size_t k = 2000;
  const Prefix pre = Prefix::dense(k);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<EnumerationPtr> g;
    for (int i = 0; i < 10; ++i) g.push_back(random_permutation(rng, k));
    const struct {
      StandardVariant v;
      int offset;
    } cases[] = {{StandardVariant::kPlain, 2},
                 {StandardVariant::kSquared, 1},
                 {StandardVariant::kSqrt, 4}};
    for (const auto& c : cases) {
      const auto fam = standard_family(g, c.v, 10);
      for (int n = 0; n + c.offset <= 10; ++n) {
        const double s = partial_sum(fam, n, n + c.offset, pre).to_double();
        EXPECT_LE(s, kBasel + 1e-9);
      }
    }
  }
}

TEST(SingleScale, SqrtNeedsSquare) {
  const auto r = single_scale_summable(Scale::parse("sqrt(k)"),
                                      identity_enumeration(),
                                      Prefix::dense(10000));
  ASSERT_TRUE(r.d);
  EXPECT_EQ(*r.d, 2);
  EXPECT_NEAR(r.constant.to_double(), 1.0, 1e-12);
}

TEST(SingleScale, LogarithmBeatsNoPower) {
  const auto r = single_scale_summable(Scale::parse("1+log(k)"),
                                      identity_enumeration(),
                                      Prefix::dense(10000));
  EXPECT_FALSE(r.d);
  EXPECT_EQ(r.verdict, SummabilityVerdict::kRefutedTrend);
}

TEST(SingleScale, EnumerationItself) {
  std::mt19937_64 rng(1);
  const auto g = random_permutation(rng, 500);
  const auto r = single_scale_summable(Scale::of(g), g, Prefix::dense(500));
  ASSERT_TRUE(r.d);
  EXPECT_EQ(*r.d, 1);
  EXPECT_DOUBLE_EQ(r.constant.to_double(), 1.0);
}

TEST(Condensation, AlreadySorted) {
  const Prefix pre = Prefix::dense(1000);
  const auto c = condensation_enumeration(Scale::constant(1.0),
                                          Scale::parse("k^2"), pre);
  EXPECT_TRUE(c.summable_on_prefix);
  for (Index k = 1; k <= 1000; ++k) EXPECT_EQ(c.gamma.forward(k), k);
  EXPECT_DOUBLE_EQ(c.constant.to_double(), 1.0);
}

TEST(Condensation, PermutedSquaresRecoverThePermutation) {
  std::mt19937_64 rng(9);
  const std::size_t k = 800;
  std::vector<Index> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> sq;
  for (Index r : perm) sq.push_back(double(r) * r);
  const Scale sigma_m(expr::table(sq));
  const Prefix pre = Prefix::dense(k);
  const auto c = condensation_enumeration(Scale::constant(1.0), sigma_m, pre);
  for (std::size_t x = 0; x < k; ++x) EXPECT_EQ(c.gamma.forward(x + 1), perm[x]);
  EXPECT_DOUBLE_EQ(c.constant.to_double(), 1.0);
  // the inequality holds at every index
  for (Index x = 1; x <= k; ++x) {
    const LogValue lhs =
        LogValue::from_double(double(c.gamma.forward(x))).sqrt();
    EXPECT_FALSE(approx::greater(lhs, c.constant * sigma_m.eval(x)));
  }
}

TEST(Condensation, ConstantRatioIsReported) {
  const auto c = condensation_enumeration(Scale::parse("k"), Scale::parse("k"),
                                          Prefix::dense(1000));
  EXPECT_FALSE(c.summable_on_prefix);
  EXPECT_FALSE(c.error.empty());
}

TEST(Condensation, TiesBrokenByIndex) {
  const auto c = condensation_enumeration(
      Scale::constant(1.0), Scale::parse("table[4,1,4,1]"), Prefix::dense(4));
  EXPECT_EQ(c.gamma.forward(2), 1u);
  EXPECT_EQ(c.gamma.forward(4), 2u);
  EXPECT_EQ(c.gamma.forward(1), 3u);
  EXPECT_EQ(c.gamma.forward(3), 4u);
}

TEST(SqrtChain, PowersStepByOne) {
  const auto fam = ScaleFamily::parse("pow(k,n)", 8);
  const auto chain = sqrt_standard_chain(fam, Prefix::dense(2000), 6);
  ASSERT_EQ(chain.size(), 6u);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    EXPECT_EQ(chain[i].m, static_cast<int>(i) + 1);
    EXPECT_EQ(chain[i].gamma.forward(17), 17u);
  }
}

TEST(SqrtChain, SquaredStandardFamily) {
  const auto fam = standard_family({identity_enumeration()},
                                   StandardVariant::kSquared, 6);
  const auto chain = sqrt_standard_chain(fam, Prefix::dense(2000), 5);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    EXPECT_EQ(chain[i].m, static_cast<int>(i) + 1);
  }
}

TEST(SqrtChain, StallsOnNonSummableFamily) {
  const auto fam = ScaleFamily::parse("exp(k)", 6);
  EXPECT_THROW(sqrt_standard_chain(fam, Prefix::dense(500), 2), ContractError);
}

TEST(PSummability, ThetaTimesDimsPowers) {
  const auto p = DimensionSequence::from_expression(parse_expression("k"), 10000);
  const auto ell = ScaleFamily::parse("pow(k*k, n)", 8);
  SummabilityOptions o;
  o.max_m = 8;
  const auto rep = p_summability_check(ell, p, Prefix::dense(10000), o);
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.verdict, SummabilityVerdict::kCertified);
    EXPECT_EQ(e.m, e.n + 2);
    EXPECT_NEAR(e.partial_sum.to_double(), kBasel1e4, 1e-12);
  }
}

TEST(PSummability, UnitDimsReduceToPlainCheck) {
  const auto p = DimensionSequence::from_expression(parse_expression("1"), 5000);
  const auto fam = ScaleFamily::parse("pow(k,n)", 6);
  SummabilityOptions o;
  o.max_m = 6;
  const Prefix pre = Prefix::dense(5000);
  const auto a = p_summability_check(fam, p, pre, o);
  const auto b = summability_check(fam, pre, o);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].m, b.entries[i].m);
    EXPECT_EQ(a.entries[i].partial_sum, b.entries[i].partial_sum);
  }
}

TEST(PSummability, GrowingDimsWithFlatScaleRefuted) {
  std::vector<std::uint64_t> dims;
  for (std::uint64_t z = 1; z <= 2000; ++z) dims.push_back(z);
  const auto p = DimensionSequence::from_integers(dims);
  const auto ell = ScaleFamily::parse("1", 4);
  SummabilityOptions o;
  o.max_m = 4;
  const auto rep = p_summability_check(ell, p, Prefix::dense(2000), o);
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.verdict, SummabilityVerdict::kRefutedTrend);
  }
}

TEST(PSummability, LengthMismatch) {
  const auto p = DimensionSequence::from_integers({1, 2, 3});
  const auto ell = ScaleFamily::parse("pow(k,n)", 4);
  SummabilityOptions o;
  o.max_m = 4;
  EXPECT_THROW(p_summability_check(ell, p, Prefix::dense(10), o), DomainError);
}

TEST(Prop63, EllIsThetaTimesDims) {
  const auto p = DimensionSequence::from_expression(parse_expression("k+1"), 3000);
  const auto r = prop63_check(Scale::parse("k*(k+1)"), p,
                              identity_enumeration(), Prefix::dense(3000));
  ASSERT_TRUE(r.d);
  EXPECT_EQ(*r.d, 1);
  EXPECT_NEAR(r.constant.to_double(), 1.0, 1e-12);
  EXPECT_TRUE(r.consistent);
}

TEST(Prop63, FlatEllFails) {
  const auto p = DimensionSequence::from_expression(parse_expression("k"), 3000);
  const auto r = prop63_check(Scale::constant(1.0), p, identity_enumeration(),
                              Prefix::dense(3000));
  EXPECT_FALSE(r.d);
}

TEST(Prop63, LinearEllAndDims) {
  const std::size_t k = 10000;
  const auto p = DimensionSequence::from_expression(parse_expression("k"), k);
  const Prefix pre = Prefix::dense(k);
  const auto r = prop63_check(Scale::parse("k"), p, identity_enumeration(), pre);
  ASSERT_TRUE(r.d);
  EXPECT_EQ(*r.d, 2);
  EXPECT_DOUBLE_EQ(r.constant.to_double(), 1.0);
  EXPECT_TRUE(r.consistent);
  for (const auto& s : r.partial_sums) {
    EXPECT_NEAR(s.to_double(), kBasel1e4, 1e-12);
  }
  // the weighted check lands on m = n + 2d
  SummabilityOptions o;
  o.max_m = 8;
  const auto rep = p_summability_check(ScaleFamily::parse("pow(k,n)", 8), p, pre, o);
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.m, e.n + 4);
    EXPECT_EQ(e.verdict, SummabilityVerdict::kCertified);
    EXPECT_LE(e.partial_sum.to_double(),
              r.bound.to_double() + 1e-6);
  }
}

TEST(TailBound, CoversTrueTail) {
  // sum_{k > 1000} 1/k^3 = 4.995002509e-7 (mpmath)
  const auto tb = tail_bound(parse_expression("1/k^3"), 1000);
  ASSERT_TRUE(tb);
  EXPECT_GE(tb->bound.to_double(), 4.995002509e-7);
  EXPECT_LE(tb->bound.to_double(), 2e-6);
  EXPECT_FALSE(tail_bound(parse_expression("1/k"), 1000));
}
