#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "scalekit/schwartz.hpp"

using namespace scalekit;

namespace {

ScaleFamily powers() { return ScaleFamily::parse("pow(k,n)", 4); }

FinSuppVector ones123() {
  FinSuppVector f;
  f.set(1, 1.0);
  f.set(2, 1.0);
  f.set(3, 1.0);
  return f;
}

}  // namespace

TEST(Norms, Delta) {
  const auto d = FinSuppVector::delta(3);
  EXPECT_DOUBLE_EQ(norm_l1(d, powers(), 2).to_double(), 9.0);
  EXPECT_DOUBLE_EQ(norm_sup(d, powers(), 2).to_double(), 9.0);
}

TEST(Norms, Zero) {
  EXPECT_TRUE(norm_l1(FinSuppVector{}, powers(), 3).is_zero());
  EXPECT_TRUE(norm_sup(FinSuppVector{}, powers(), 3).is_zero());
}

TEST(Norms, OnesWithSquares) {
  const auto fam = ScaleFamily::parse("pow(k,2*n)", 2);
  EXPECT_NEAR(norm_l1(ones123(), fam, 1).to_double(), 14.0, 1e-13);
  EXPECT_NEAR(norm_sup(ones123(), fam, 1).to_double(), 9.0, 1e-13);
}

TEST(Norms, SupportOutsidePrefix) {
  EXPECT_THROW(norm_l1(ones123(), powers(), 1, Index{2}), DomainError);
  EXPECT_NO_THROW(norm_sup(ones123(), powers(), 1, Index{3}));
}

TEST(Norms, SandwichAndBasisIdentity) {
  Rng rng(77);
  const auto fam = ScaleFamily::parse("pow(k+1,n)*exp(n)", 5);
  for (int t = 0; t < 500; ++t) {
    const auto f = random_fin_supp(rng, 1000);
    for (int n = 0; n <= 5; ++n) {
      const LogValue l1 = norm_l1(f, fam, n);
      const LogValue sup = norm_sup(f, fam, n);
      EXPECT_FALSE(approx::greater(sup, l1, 1e-12));
      // Σ |φ(x)|·‖δ_x‖¹_n
      double s = 0.0;
      for (const auto& [x, v] : f) {
        s += std::abs(v) * norm_l1(FinSuppVector::delta(x), fam, n).to_double();
      }
      EXPECT_LE(std::abs(s - l1.to_double()) / l1.to_double(), 1e-12);
      if (n > 0) {
        EXPECT_FALSE(approx::greater(norm_l1(f, fam, n - 1), l1));
        EXPECT_FALSE(approx::greater(norm_sup(f, fam, n - 1), sup));
      }
    }
  }
}

TEST(Norms, HugeScaleValues) {
  const auto fam = ScaleFamily::parse("exp(n*k^k)", 2);
  const auto d = FinSuppVector::delta(6, 2.0);
  EXPECT_NEAR(norm_l1(d, fam, 2).log(), 2 * 46656 + std::log(2.0), 1e-6);
}

TEST(PointwiseMul, Examples) {
  FinSuppVector f, g;
  f.set(1, 1.0);
  f.set(2, 2.0);
  g.set(1, 3.0);
  g.set(3, 1.0);
  const auto fg = pointwise_mul(f, g);
  EXPECT_EQ(fg.support_size(), 1u);
  EXPECT_EQ(fg(1), Complex(3.0));
  EXPECT_EQ(pointwise_mul(f, FinSuppVector::delta(2)),
            FinSuppVector::delta(2, 2.0));
  EXPECT_TRUE(pointwise_mul(f, FinSuppVector{}).is_zero());
}

TEST(IdealInequality, DeltaTightness) {
  const auto fam = powers();
  const auto d = FinSuppVector::delta(7, Complex(0.0, 1.0));
  const auto dd = pointwise_mul(d, d);
  for (int n = 0; n <= 4; ++n) {
    EXPECT_NEAR((norm_l1(dd, fam, n) / norm_l1(d, fam, n)).to_double(), 1.0,
                1e-15);
  }
}

TEST(IdealInequality, RandomTrials) {
  const auto start = std::chrono::steady_clock::now();
  const auto rep = ideal_inequality_check(powers(), 1000, 50, 12345);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count(),
            10.0);
  EXPECT_LE(rep.worst(), 1.0 + 1e-9);
  // with K = 50 and 20-point supports, some trial is nearly tight
  EXPECT_GT(rep.worst(), 0.5);
  EXPECT_EQ(rep.per_n.size(), 5u);
}

TEST(IdealInequality, Reproducible) {
  const auto a = ideal_inequality_check(powers(), 100, 50, 5);
  const auto b = ideal_inequality_check(powers(), 100, 50, 5);
  for (std::size_t i = 0; i < a.per_n.size(); ++i) {
    EXPECT_EQ(a.per_n[i].worst_l1, b.per_n[i].worst_l1);
    EXPECT_EQ(a.per_n[i].worst_sup, b.per_n[i].worst_sup);
  }
}

TEST(Fourier, PureTone) {
  const auto d = fourier_seminorm_demo(FourierVector::delta(1), 1, 64);
  EXPECT_DOUBLE_EQ(d.lhs, 1.0);
  EXPECT_NEAR(d.rhs, 1.0, 1e-14);
  EXPECT_TRUE(d.holds);
}

TEST(Fourier, Constant) {
  const auto d = fourier_seminorm_demo(FourierVector::delta(0), 3, 8);
  EXPECT_DOUBLE_EQ(d.lhs, 0.0);
  EXPECT_TRUE(d.holds);
}

TEST(Fourier, TwoTones) {
  FourierVector f;
  f.set(1, 1.0);
  f.set(2, 1.0);
  const auto d = fourier_seminorm_demo(f, 2, 64);
  EXPECT_DOUBLE_EQ(d.lhs, 4.0);
  EXPECT_NEAR(d.rhs, 5.0, 1e-13);
  EXPECT_TRUE(d.holds);
}

TEST(Fourier, RandomPolynomials) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    FourierVector f;
    const int terms = 1 + static_cast<int>(rng() % 6);
    for (int j = 0; j < terms; ++j) {
      f.set(static_cast<std::int64_t>(rng() % 21) - 10, complex_gaussian(rng));
    }
    for (int i = 0; i <= 3; ++i) {
      EXPECT_TRUE(fourier_seminorm_demo(f, i, 40).holds);
    }
  }
}

TEST(Fourier, GridTooCoarse) {
  EXPECT_THROW(fourier_seminorm_demo(FourierVector::delta(5), 1, 19),
               DomainError);
}
