#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scalekit/block.hpp"
#include "scalekit/dims.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/matrix_socle.hpp"
#include "scalekit/random.hpp"
#include "scalekit/scale.hpp"
#include "scalekit/schwartz.hpp"

namespace scalekit {

// Renormalized seminorms. For an algebra A inside a Banach algebra B with
// norms ‖·‖_n (‖·‖_0 the norm of B):
//   star   ‖a‖*_n   = sup{‖ab‖_n  : ‖b‖_0 <= 1}
//   dagger ‖a‖†_n   = sup{‖ba‖_n  : ‖b‖_0 <= 1}
//   two    ‖a‖two_n = sup{‖cab‖_n : ‖b‖_0, ‖c‖_0 <= 1}
// Each supported instance computes these suprema exactly because the unit
// ball of B splits into independent coordinates or blocks.

/// What every instance kind provides. Elements of A and B share one type;
/// `attaining_unit(a, n)` returns b with ‖b‖_0 <= 1 and ‖ab‖_n = ‖a‖*_n.
template <class I>
concept RenormInstance = requires(const I& inst, const typename I::Element& a,
                                  int n, Rng& rng) {
  { inst.kind() } -> std::convertible_to<std::string>;
  { inst.max_n() } -> std::convertible_to<int>;
  { inst.norm(a, n) } -> std::same_as<LogValue>;
  { inst.mul(a, a) } -> std::same_as<typename I::Element>;
  { inst.star(a, n) } -> std::same_as<LogValue>;
  { inst.dagger(a, n) } -> std::same_as<LogValue>;
  { inst.two(a, n) } -> std::same_as<LogValue>;
  { inst.attaining_unit(a, n) } -> std::same_as<typename I::Element>;
  { inst.random_element(rng) } -> std::same_as<typename I::Element>;
  { inst.random_unit(rng) } -> std::same_as<typename I::Element>;
  { inst.star_domination(n) } -> std::convertible_to<std::pair<double, int>>;
};

namespace detail {

inline FinSuppVector normalize_sup(FinSuppVector b) {
  const double m = b.sup_abs();
  return m == 0.0 ? b : Complex(1.0 / m) * b;
}

inline Complex unit_phase(Complex z) {
  const double r = std::abs(z);
  return r == 0.0 ? Complex(1.0) : z / r;
}

}  // namespace detail

/// c_f(X) in c_0(X): ‖a‖_0 = sup|a|, ‖a‖_n = Σ σ_n|a| for n >= 1.
class PointwiseC0 {
 public:
  using Element = FinSuppVector;

  PointwiseC0(ScaleFamily sigma, Index k) : sigma_(std::move(sigma)), k_(k) {}

  std::string kind() const { return "pointwise-c0"; }
  int max_n() const { return sigma_.max_index(); }

  LogValue norm(const Element& a, int n) const {
    if (n == 0) return LogValue::from_double(a.sup_abs());
    return norm_l1(a, sigma_, n);
  }
  Element mul(const Element& a, const Element& b) const {
    return pointwise_mul(a, b);
  }
  // |b| = 1 on the support of a is optimal coordinate by coordinate.
  LogValue star(const Element& a, int n) const { return norm(a, n); }
  LogValue dagger(const Element& a, int n) const { return star(a, n); }
  LogValue two(const Element& a, int n) const { return star(a, n); }
  Element attaining_unit(const Element& a, int) const {
    Element b;
    for (const auto& [x, v] : a) b.set(x, std::conj(detail::unit_phase(v)));
    return b;
  }
  Element random_element(Rng& rng) const { return random_fin_supp(rng, k_); }
  Element random_unit(Rng& rng) const {
    return detail::normalize_sup(random_fin_supp(rng, k_));
  }
  std::pair<double, int> star_domination(int n) const { return {1.0, n}; }

 private:
  ScaleFamily sigma_;
  Index k_;
};

/// The pair algebra inside c_0: coordinates 2k, 2k+1 for k = 1..K.
/// ‖f‖_0 = sup|f| and for n >= 1
///   ‖f‖_n = sup_k σ(k)^n max{|f(2k) + f(2k+1)|, σ(k)^n |f(2k) - f(2k+1)|}.
class PairedB2 {
 public:
  using Element = FinSuppVector;

  PairedB2(Scale sigma, int max_n, Index k)
      : sigma_(std::move(sigma)), max_n_(max_n), k_(k) {}

  std::string kind() const { return "paired-B2"; }
  int max_n() const { return max_n_; }
  const Scale& sigma() const { return sigma_; }

  LogValue norm(const Element& a, int n) const {
    if (n == 0) return LogValue::from_double(a.sup_abs());
    LogValue m;
    for (Index k : pairs(a)) {
      const Complex x = a(2 * k), y = a(2 * k + 1);
      const LogValue s = sigma_.eval(k).pow(n);
      m = max(m, s * max(LogValue::from_double(std::abs(x + y)),
                         s * LogValue::from_double(std::abs(x - y))));
    }
    return m;
  }

  Element mul(const Element& a, const Element& b) const {
    return pointwise_mul(a, b);
  }

  /// Per pair, aligning phases makes either combination |a0 b0 ± a1 b1|
  /// reach |a0| + |a1|; the σ^n-weighted one wins since σ >= 1:
  /// ‖a‖*_n = sup_k σ(k)^{2n} (|a(2k)| + |a(2k+1)|).
  LogValue star(const Element& a, int n) const {
    if (n == 0) return LogValue::from_double(a.sup_abs());
    LogValue m;
    for (Index k : pairs(a)) {
      m = max(m, sigma_.eval(k).pow(2.0 * n) *
                     LogValue::from_double(std::abs(a(2 * k)) +
                                           std::abs(a(2 * k + 1))));
    }
    return m;
  }
  LogValue dagger(const Element& a, int n) const { return star(a, n); }
  // cb runs over the whole unit ball, so the two-sided sup is the same
  LogValue two(const Element& a, int n) const { return star(a, n); }

  Element attaining_unit(const Element& a, int) const {
    Element b;
    for (const auto& [x, v] : a) {
      const Complex u = std::conj(detail::unit_phase(v));
      b.set(x, x % 2 == 0 ? u : -u);
    }
    return b;
  }

  Element random_element(Rng& rng) const {
    Element f;
    for (const auto& [x, v] : random_fin_supp(rng, 2 * k_ + 1)) {
      if (x >= 2) f.set(x, v);
    }
    if (f.is_zero()) f.set(2, 1.0);
    return f;
  }
  Element random_unit(Rng& rng) const {
    return detail::normalize_sup(random_element(rng));
  }

  /// ‖a‖*_n <= √2 ‖a‖_{2n}, from max(|x+y|, |x-y|) >= (|x| + |y|)/√2.
  std::pair<double, int> star_domination(int n) const {
    return {std::sqrt(2.0), 2 * n};
  }

  /// Grid refinement over the magnitudes (r0, r1) in [0,1]² of one pair,
  /// phases aligned. Starts 32×32 and zooms until the cell is below tol.
  LogValue star_by_grid(const Element& a, int n, double tol = 1e-6) const {
    if (n == 0) return star(a, 0);
    LogValue best;
    for (Index k : pairs(a)) {
      const double x = std::abs(a(2 * k)), y = std::abs(a(2 * k + 1));
      const LogValue s = sigma_.eval(k).pow(n);
      auto h = [&](double r0, double r1) {
        const LogValue aligned = LogValue::from_double(r0 * x + r1 * y);
        return max(s * aligned, s * s * aligned);
      };
      double lo0 = 0, hi0 = 1, lo1 = 0, hi1 = 1;
      LogValue top;
      const int g = 32;
      while (true) {
        double b0 = lo0, b1 = lo1;
        top = LogValue::zero();
        for (int i = 0; i <= g; ++i) {
          for (int j = 0; j <= g; ++j) {
            const double r0 = lo0 + (hi0 - lo0) * i / g;
            const double r1 = lo1 + (hi1 - lo1) * j / g;
            const LogValue v = h(r0, r1);
            if (v > top) top = v, b0 = r0, b1 = r1;
          }
        }
        if (hi0 - lo0 < tol && hi1 - lo1 < tol) break;
        const double w0 = (hi0 - lo0) / 4, w1 = (hi1 - lo1) / 4;
        lo0 = std::max(0.0, b0 - w0), hi0 = std::min(1.0, b0 + w0);
        lo1 = std::max(0.0, b1 - w1), hi1 = std::min(1.0, b1 + w1);
      }
      best = max(best, top);
    }
    return best;
  }

 private:
  static std::vector<Index> pairs(const Element& a) {
    std::vector<Index> out;
    for (const auto& [x, v] : a) {
      if (x < 2) throw DomainError("pair algebra uses coordinates >= 2");
      const Index k = x / 2;
      if (out.empty() || out.back() != k) out.push_back(k);
    }
    return out;
  }

  Scale sigma_;
  int max_n_;
  Index k_;
};

/// Block socle with S^{∞,op} norms: ‖a‖_0 = ‖a‖_B, ‖a‖_n = sup ℓ_n‖a(z)‖_op.
class BlockSocle {
 public:
  using Element = BlockElement;

  BlockSocle(ScaleFamily ell, DimensionSequence dims)
      : ell_(std::move(ell)), dims_(std::move(dims)) {
    dims_.integers();  // rejects log-domain dimensions
  }

  std::string kind() const { return "block-socle"; }
  int max_n() const { return ell_.max_index(); }

  LogValue norm(const Element& a, int n) const {
    if (n == 0) return cstar_norm(a);
    return socle_norm_op(a, ell_, n);
  }
  Element mul(const Element& a, const Element& b) const {
    return block_mul(a, b);
  }
  // Blocks of b are independent; ‖a(z)b(z)‖ <= ‖a(z)‖ with equality at
  // b(z) = v v* for the top right singular vector v.
  LogValue star(const Element& a, int n) const { return norm(a, n); }
  LogValue dagger(const Element& a, int n) const { return norm(a, n); }
  LogValue two(const Element& a, int n) const { return norm(a, n); }

  Element attaining_unit(const Element& a, int) const {
    Element b;
    for (const auto& [z, m] : a) {
      const auto v = top_singular(m).right;
      DenseMatrix p(m.size());
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) p(i, j) = v[i] * std::conj(v[j]);
      b.set(z, p);
    }
    return b;
  }

  Element random_element(Rng& rng) const {
    return random_block_element(rng, dims_, 5);
  }
  Element random_unit(Rng& rng) const {
    Element b;
    for (const auto& [z, m] : random_block_element(rng, dims_, 8)) {
      b.set(z, Complex(1.0 / op_norm(m)) * m);
    }
    return b;
  }
  std::pair<double, int> star_domination(int n) const { return {1.0, n}; }

 private:
  ScaleFamily ell_;
  DimensionSequence dims_;
};

/// Zero multiplication on ℓ¹-type norms ‖a‖_n = Σ σ_n|a|, σ_0 = 1.
class TrivialProduct {
 public:
  using Element = FinSuppVector;

  TrivialProduct(ScaleFamily sigma, Index k) : sigma_(std::move(sigma)), k_(k) {}

  std::string kind() const { return "trivial-product"; }
  int max_n() const { return sigma_.max_index(); }
  LogValue norm(const Element& a, int n) const {
    if (n == 0) return LogValue::from_double(a.l1_abs());
    return norm_l1(a, sigma_, n);
  }
  Element mul(const Element&, const Element&) const { return {}; }
  LogValue star(const Element&, int) const { return LogValue::zero(); }
  LogValue dagger(const Element&, int) const { return LogValue::zero(); }
  LogValue two(const Element&, int) const { return LogValue::zero(); }
  Element attaining_unit(const Element&, int) const { return {}; }
  Element random_element(Rng& rng) const { return random_fin_supp(rng, k_); }
  Element random_unit(Rng& rng) const {
    const auto b = random_fin_supp(rng, k_);
    return Complex(1.0 / b.l1_abs()) * b;
  }
  std::pair<double, int> star_domination(int n) const { return {1.0, n}; }

 private:
  ScaleFamily sigma_;
  Index k_;
};

static_assert(RenormInstance<PointwiseC0>);
static_assert(RenormInstance<PairedB2>);
static_assert(RenormInstance<BlockSocle>);
static_assert(RenormInstance<TrivialProduct>);

// ---------------------------------------------------------------------------
// Generic renormalized norms

template <RenormInstance I>
LogValue star_norm(const typename I::Element& a, const I& inst, int n) {
  return inst.star(a, n);
}

template <RenormInstance I>
LogValue star_plus_norm(const typename I::Element& a, const I& inst, int n) {
  if (n == 0) return inst.norm(a, 0);
  return max(inst.star(a, n), inst.norm(a, n));
}

template <RenormInstance I>
LogValue dagger_norm(const typename I::Element& a, const I& inst, int n) {
  return inst.dagger(a, n);
}

template <RenormInstance I>
LogValue dagger_plus_norm(const typename I::Element& a, const I& inst, int n) {
  if (n == 0) return inst.norm(a, 0);
  return max(inst.dagger(a, n), inst.norm(a, n));
}

template <RenormInstance I>
LogValue two_norm(const typename I::Element& a, const I& inst, int n) {
  return inst.two(a, n);
}

/// max of the two-sided, starred, dagger and original norms.
template <RenormInstance I>
LogValue two_plus_norm(const typename I::Element& a, const I& inst, int n) {
  if (n == 0) return inst.norm(a, 0);
  return max(max(inst.two(a, n), inst.star(a, n)),
             max(inst.dagger(a, n), inst.norm(a, n)));
}

/// Lower bound for ‖a‖*_n from random unit-ball samples.
template <RenormInstance I>
LogValue sampled_star_norm(const typename I::Element& a, const I& inst, int n,
                           int samples, Rng& rng) {
  LogValue best;
  for (int s = 0; s < samples; ++s) {
    best = max(best, inst.norm(inst.mul(a, inst.random_unit(rng)), n));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Contract verification

struct RenormRatios {
  int n = 0;
  std::map<std::string, double> worst;  // inequality name -> max ratio
};

struct RenormReport {
  std::string kind;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<RenormRatios> per_n;
  bool zeroth_preserved = true;   // ‖·‖*+_0 = ‖·‖two+_0 = ‖·‖_0
  bool monotone = true;           // renormalized norms nondecreasing in n
  bool sampling_sound = true;     // sampled sup <= exact sup
  double attained_gap = 0.0;      // max |witness - exact| / exact
  double domination_ratio = 0.0;  // max ‖a‖*_n / (C‖a‖_m)
  double tolerance = 1e-6;

  double worst() const {
    double w = 0.0;
    for (const auto& r : per_n)
      for (const auto& [k, v] : r.worst) w = std::max(w, v);
    return w;
  }
  bool passed() const {
    return worst() <= 1.0 + tolerance && zeroth_preserved && monotone &&
           sampling_sound && attained_gap <= tolerance &&
           domination_ratio <= 1.0 + tolerance;
  }
};

namespace detail {

inline double ratio(LogValue num, LogValue den) {
  if (num.is_zero()) return 0.0;
  if (den.is_zero()) return INFINITY;
  return (num / den).to_double();
}

}  // namespace detail

/// Random trials of the right and left ideal inequalities with C_n = 1,
/// m_n = n for the renormalized norms, plus submultiplicativity.
template <RenormInstance I>
RenormReport verify_renorm_contract(const I& inst, int trials,
                                    std::uint64_t seed) {
  RenormReport rep;
  rep.kind = inst.kind();
  rep.seed = seed;
  rep.trials = trials;
  Rng rng(seed);
  const int nmax = inst.max_n();
  for (int n = 0; n <= nmax; ++n) rep.per_n.push_back({n, {}});
  auto bump = [](RenormRatios& r, const char* name, double v) {
    auto& w = r.worst[name];
    w = std::max(w, v);
  };
  for (int t = 0; t < trials; ++t) {
    const auto a = inst.random_element(rng);
    const auto a2 = inst.random_element(rng);
    const auto b = inst.random_unit(rng);
    const LogValue b0 = inst.norm(b, 0);
    const auto ab = inst.mul(a, b);
    const auto ba = inst.mul(b, a);
    const auto aa = inst.mul(a, a2);
    LogValue prev_sp, prev_tp;
    for (auto& r : rep.per_n) {
      const int n = r.n;
      const LogValue sp = star_plus_norm(a, inst, n);
      const LogValue dp = dagger_plus_norm(a, inst, n);
      const LogValue tp = two_plus_norm(a, inst, n);
      bump(r, "star+ right", detail::ratio(star_plus_norm(ab, inst, n), sp * b0));
      bump(r, "original by star", detail::ratio(inst.norm(ab, n), inst.star(a, n) * b0));
      bump(r, "star+ submultiplicative",
           detail::ratio(star_plus_norm(aa, inst, n),
                         sp * star_plus_norm(a2, inst, n)));
      bump(r, "dagger+ left", detail::ratio(dagger_plus_norm(ba, inst, n), b0 * dp));
      bump(r, "two+ right", detail::ratio(two_plus_norm(ab, inst, n), tp * b0));
      bump(r, "two+ left", detail::ratio(two_plus_norm(ba, inst, n), b0 * tp));
      if (n == 0) {
        const LogValue o = inst.norm(a, 0);
        if (!(sp == o) || !(tp == o)) rep.zeroth_preserved = false;
      } else {
        if (approx::greater(prev_sp, sp) || approx::greater(prev_tp, tp)) {
          rep.monotone = false;
        }
      }
      prev_sp = sp;
      prev_tp = tp;

      const LogValue exact = inst.star(a, n);
      const LogValue witness = inst.norm(inst.mul(a, inst.attaining_unit(a, n)), n);
      if (!exact.is_zero() || !witness.is_zero()) {
        rep.attained_gap = std::max(
            rep.attained_gap, std::abs(detail::ratio(witness, exact) - 1.0));
      }
      if (t % 8 == 0) {
        const LogValue sampled = sampled_star_norm(a, inst, n, 4, rng);
        if (approx::greater(sampled, exact)) rep.sampling_sound = false;
      }
      const auto [c, m] = inst.star_domination(n);
      if (m <= nmax) {
        rep.domination_ratio = std::max(
            rep.domination_ratio,
            detail::ratio(exact, LogValue::from_double(c) * inst.norm(a, m)));
      }
    }
  }
  return rep;
}

}  // namespace scalekit
