#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/dims.hpp"
#include "scalekit/domination.hpp"
#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/expr.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/matrix_socle.hpp"
#include "scalekit/renorm.hpp"
#include "scalekit/scale.hpp"
#include "scalekit/schwartz.hpp"
#include "scalekit/summability.hpp"

namespace scalekit {

// ---------------------------------------------------------------------------
// Power sums Σ_{i<=P} i^n

enum class PowerSumMethod { kFaulhaber, kExactLoop, kBounds };

inline const char* to_string(PowerSumMethod m) {
  switch (m) {
    case PowerSumMethod::kFaulhaber:
      return "faulhaber";
    case PowerSumMethod::kExactLoop:
      return "exact-loop";
    case PowerSumMethod::kBounds:
      return "bounds";
  }
  return "bounds";
}

struct PowerSum {
  LogValue value;  // the sum, or its lower bound P^n for kBounds
  LogValue upper;  // equal to value unless kBounds (then P^{n+1})
  PowerSumMethod method = PowerSumMethod::kBounds;
};

inline constexpr int kFaulhaberMaxDegree = 8;
inline constexpr double kExactLoopLimit = 1e7;

/// Faulhaber's formula for n <= 8, split into positive and negative parts so
/// it stays in the log domain for astronomically large P. Otherwise an exact
/// loop for machine-sized P, otherwise P^n <= Σ <= P^{n+1}.
inline PowerSum power_sum(LogValue p, int n) {
  if (n < 0) throw DomainError("power sum degree must be nonnegative");
  if (approx::greater(LogValue::one(), p)) {
    throw DomainError("power sum needs P >= 1");
  }
  PowerSum out;
  if (n <= kFaulhaberMaxDegree) {
    // Bernoulli numbers with B_1 = +1/2
    static constexpr std::array<double, 9> bern{
        1.0, 0.5, 1.0 / 6, 0.0, -1.0 / 30, 0.0, 1.0 / 42, 0.0, -1.0 / 30};
    std::vector<LogValue> pos, neg;
    double binom = 1.0;  // C(n+1, j)
    for (int j = 0; j <= n; ++j) {
      if (j > 0) binom = binom * (n + 2 - j) / j;
      const double c = binom * bern[j] / (n + 1);
      if (c == 0.0) continue;
      const LogValue t = LogValue::from_double(std::abs(c)) * p.pow(n + 1 - j);
      (c > 0 ? pos : neg).push_back(t);
    }
    out.value = difference(log_sum(pos), log_sum(neg));
    out.upper = out.value;
    out.method = PowerSumMethod::kFaulhaber;
    return out;
  }
  if (p.log() <= std::log(kExactLoopLimit)) {
    const auto top = static_cast<std::uint64_t>(std::llround(p.to_double()));
    std::vector<LogValue> terms;
    terms.reserve(top);
    for (std::uint64_t i = 1; i <= top; ++i) {
      terms.push_back(LogValue::from_double(static_cast<double>(i)).pow(n));
    }
    out.value = log_sum(terms);
    out.upper = out.value;
    out.method = PowerSumMethod::kExactLoop;
    return out;
  }
  out.value = p.pow(n);
  out.upper = p.pow(n + 1);
  out.method = PowerSumMethod::kBounds;
  return out;
}

// ---------------------------------------------------------------------------
// Blow-up of the ideal ratio for block dimensions without the growth
// condition. With β(k, i, j) = i·k·p_{k-1} + (j - 1)p_k and p_0 = 1:
//   S_K = Σ_{k<=K} c_1(k)/√p_k,  ‖S_K‖_B = 1,
//   ‖S_K‖_n = Σ_k (k p_{k-1})^n p_k^{-1/2} Σ_{i<=p_k} i^n,
//   T_K = Σ_{k<=K} e_{k,11},     ‖T_K‖_m = Σ_k (k p_{k-1})^m,
//   S_K T_K = S_K, and the ratio ‖S_K T_K‖_n / (‖S_K‖_B ‖T_K‖_m) is at
//   least p_K^{n-1/2} / (K^{m+1} p_{K-1}^m).

struct BlowupEntry {
  std::size_t k = 0;
  LogValue s_norm;     // ‖S_K‖_n
  LogValue s_cstar;    // ‖S_K‖_B
  LogValue t_norm;     // ‖T_K‖_m
  LogValue ratio;      // ‖S_K T_K‖_n / (‖S_K‖_B ‖T_K‖_m)
  LogValue bound;      // p_K^{n-1/2} / (K^{m+1} p_{K-1}^m)
  PowerSumMethod sum_method = PowerSumMethod::kFaulhaber;
};

struct BlowupReport {
  int n = 0;
  int m = 0;
  std::vector<BlowupEntry> entries;
  bool exceeds_bound = false;        // ratio >= bound at every K
  bool strictly_increasing = false;  // log-ratio differences all positive
  bool growth_holds = false;
  std::optional<std::string> warning;
  DominationReport trend;            // ratio against the constant 1
};

inline BlowupReport b1_blowup(const DimensionSequence& p, int n, int m,
                              std::size_t k_max) {
  if (!(n >= 1 && m > n)) throw DomainError("need m > n >= 1");
  if (k_max < 1 || k_max > p.size()) {
    throw DomainError("K_max outside the dimension sequence");
  }
  BlowupReport rep;
  rep.n = n;
  rep.m = m;
  const auto pk = p.prefix(k_max);
  rep.growth_holds = growth_condition_check(pk, *identity_enumeration()).holds();
  if (rep.growth_holds) {
    rep.warning = "growth condition holds on the prefix; no blow-up expected";
  }
  std::vector<LogValue> s_terms, t_terms;
  rep.exceeds_bound = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const LogValue cur = p.value(k);
    const LogValue prev = k == 1 ? LogValue::one() : p.value(k - 1);
    const LogValue kk = LogValue::from_double(static_cast<double>(k));
    const PowerSum ps = power_sum(cur, n);
    s_terms.push_back((kk * prev).pow(n) * ps.value / cur.sqrt());
    t_terms.push_back((kk * prev).pow(m));
    BlowupEntry e;
    e.k = k;
    e.sum_method = ps.method;
    e.s_norm = log_sum(s_terms);
    e.s_cstar = LogValue::one();  // each block c_1(k)/√p_k has norm 1
    e.t_norm = log_sum(t_terms);
    e.ratio = e.s_norm / (e.s_cstar * e.t_norm);
    e.bound = cur.pow(n - 0.5) / (kk.pow(m + 1) * prev.pow(m));
    if (approx::greater(e.bound, e.ratio)) rep.exceeds_bound = false;
    rep.entries.push_back(e);
  }
  rep.strictly_increasing = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    if (!(rep.entries[i].ratio.log() > rep.entries[i - 1].ratio.log())) {
      rep.strictly_increasing = false;
    }
  }
  std::vector<LogValue> ratios, ones(rep.entries.size(), LogValue::one());
  for (const auto& e : rep.entries) ratios.push_back(e.ratio);
  rep.trend = dominates_values(ratios, ones);
  return rep;
}

/// S_K materialized for machine-sized dimensions (test oracle).
inline BlockElement b1_s_element(const DimensionSequence& p, std::size_t k_max) {
  BlockElement s;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto pk = p.at(k);
    s.set(k, Complex(1.0 / std::sqrt(static_cast<double>(pk))) *
                 DenseMatrix::first_column_ones(pk));
  }
  return s;
}

inline BlockElement b1_t_element(const DimensionSequence& p, std::size_t k_max) {
  BlockElement t;
  for (std::size_t k = 1; k <= k_max; ++k) {
    t.set(k, DenseMatrix::unit(p.at(k), 1, 1));
  }
  return t;
}

/// β(k, i, j)^n with p_0 = 1.
inline EntryWeight b1_beta_weight(const DimensionSequence& p, int n) {
  return [p, n](Index k, std::size_t i, std::size_t j) {
    const LogValue prev = k == 1 ? LogValue::one() : p.value(k - 1);
    const LogValue a = LogValue::from_double(static_cast<double>(i * k)) * prev;
    const LogValue b = LogValue::from_double(static_cast<double>(j - 1)) * p.value(k);
    return (a + b).pow(n);
  };
}

// ---------------------------------------------------------------------------
// Pair algebra inside c_0 whose norm fails the ideal inequality.

struct B2Entry {
  Index k = 0;
  double sigma = 0.0;
  double delta_even = 0.0;   // ‖δ_{2k}‖
  double delta_odd = 0.0;    // ‖δ_{2k+1}‖
  double delta_plus = 0.0;   // ‖δ_{+,k}‖
  double delta_minus = 0.0;  // ‖δ_{-,k}‖
  double ratio = 0.0;        // ‖δ₊δ₋‖ / (‖δ₊‖ ‖δ₋‖_∞)
};

struct B2Report {
  std::vector<B2Entry> entries;
  double max_rel_error = 0.0;  // against σ², σ², 2σ, 2σ², σ
  DominationReport trend;      // ratio against the constant 1
  bool unbounded() const { return !trend.dominated(); }
};

inline B2Report b2_pair_algebra(const Scale& sigma, Index k_max) {
  {
    std::vector<LogValue> s, ones(k_max, LogValue::one());
    for (Index k = 1; k <= k_max; ++k) s.push_back(sigma.eval(k));
    if (dominates_values(s, ones).dominated()) {
      throw DomainError("σ is not proper on the prefix");
    }
  }
  const PairedB2 alg(sigma, 1, k_max);
  B2Report rep;
  std::vector<LogValue> ratios, ones;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  for (Index k = 1; k <= k_max; ++k) {
    B2Entry e;
    e.k = k;
    e.sigma = sigma.eval(k).to_double();
    FinSuppVector plus, minus;
    plus.set(2 * k, 1.0);
    plus.set(2 * k + 1, 1.0);
    minus.set(2 * k, 1.0);
    minus.set(2 * k + 1, -1.0);
    e.delta_even = alg.norm(FinSuppVector::delta(2 * k), 1).to_double();
    e.delta_odd = alg.norm(FinSuppVector::delta(2 * k + 1), 1).to_double();
    e.delta_plus = alg.norm(plus, 1).to_double();
    e.delta_minus = alg.norm(minus, 1).to_double();
    e.ratio = alg.norm(pointwise_mul(plus, minus), 1).to_double() /
              (e.delta_plus * minus.sup_abs());
    const double s = e.sigma;
    rep.max_rel_error = std::max({rep.max_rel_error, rel(e.delta_even, s * s),
                                  rel(e.delta_odd, s * s),
                                  rel(e.delta_plus, 2 * s),
                                  rel(e.delta_minus, 2 * s * s),
                                  rel(e.ratio, s)});
    ratios.push_back(LogValue::from_double(e.ratio));
    ones.push_back(LogValue::one());
    rep.entries.push_back(e);
  }
  rep.trend = dominates_values(ratios, ones);
  return rep;
}

// ---------------------------------------------------------------------------
// Power-series embedding θ_χ(f)(x) = Σ_{r>=1} f(r) χ(x)^r

/// Finitely supported functions on ℕ (index 0 allowed).
using SeqVector = FinSupp<Index>;

/// (f * g)(r) = Σ_{s<=r} f(s) g(r - s), exact on the supports.
inline SeqVector convolve(const SeqVector& f, const SeqVector& g) {
  SeqVector out;
  std::map<Index, Complex> acc;
  for (const auto& [r, a] : f)
    for (const auto& [s, b] : g) acc[r + s] += a * b;
  for (const auto& [r, v] : acc) out.set(r, v);
  return out;
}

inline void check_chi(const FinSuppVector& chi) {
  for (const auto& [x, c] : chi) {
    if (c.imag() != 0.0 || !(c.real() > 0.0 && c.real() < 1.0)) {
      throw DomainError("χ must take values in (0, 1)");
    }
  }
}

/// θ_χ(f) on X = support of χ. f must vanish at 0.
inline FinSuppVector theta_chi(const SeqVector& f, const FinSuppVector& chi) {
  check_chi(chi);
  if (f(0) != Complex(0.0)) throw DomainError("θ_χ needs f(0) = 0");
  FinSuppVector out;
  for (const auto& [x, c] : chi) {
    const double cx = c.real();
    Complex s = 0.0;
    Index last = 0;
    double power = 1.0;
    for (const auto& [r, v] : f) {
      for (; last < r; ++last) power *= cx;
      s += v * power;
    }
    out.set(x, s);
  }
  return out;
}

struct HomomorphismReport {
  int trials = 0;
  std::uint64_t seed = 0;
  double max_defect = 0.0;       // ‖θ(f*g) - θ(f)θ(g)‖_∞
  bool contraction = true;       // ‖θ(f)‖_∞ <= ‖f‖_1 throughout
};

/// Random f, g supported in 1..max_degree with complex Gaussian values.
inline HomomorphismReport theta_homomorphism_check(const FinSuppVector& chi,
                                                   int trials,
                                                   std::uint64_t seed,
                                                   Index max_degree = 10) {
  HomomorphismReport rep;
  rep.trials = trials;
  rep.seed = seed;
  Rng rng(seed);
  auto draw = [&] {
    SeqVector f;
    const auto count = uniform_int(rng, 1, 5);
    for (std::uint64_t i = 0; i < count; ++i) {
      f.set(uniform_int(rng, 1, max_degree), complex_gaussian(rng));
    }
    if (f.is_zero()) f.set(1, 1.0);
    return f;
  };
  for (int t = 0; t < trials; ++t) {
    const auto f = draw();
    const auto g = draw();
    const auto tf = theta_chi(f, chi);
    const auto lhs = theta_chi(convolve(f, g), chi);
    const auto rhs = pointwise_mul(tf, theta_chi(g, chi));
    rep.max_defect = std::max(rep.max_defect, (lhs - rhs).sup_abs());
    if (tf.sup_abs() > f.l1_abs() * (1 + 1e-15)) rep.contraction = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// θ_χ(f) is never in the Schwartz space when σ_d χ^p is unbounded.

struct B5Entry {
  Index x = 0;
  bool exceptional = false;   // χ(x)‖f‖_1 >= |f(p)|/2
  LogValue weighted;          // σ_d(x)|θ_χ(f)(x)|
  LogValue lower;             // σ_d(x) χ(x)^p |f(p)| / 2
  bool chain_holds = true;    // every step of the chain, off S
};

struct B5Report {
  Index p = 0;                // first nonzero index of f
  int d = 0;
  std::vector<Index> exceptional;
  std::vector<B5Entry> entries;
  bool chain_holds = true;
  DominationReport trend;     // σ_d|θ(f)| against the constant 1
  bool unbounded() const { return !trend.dominated(); }
};

inline B5Report b5_not_in_schwartz(const SeqVector& f, const ExprPtr& chi,
                                   const ScaleFamily& sigma, int d, Index k) {
  if (f.is_zero()) throw DomainError("f must be nonzero");
  if (f(0) != Complex(0.0)) throw DomainError("f must vanish at 0");
  B5Report rep;
  rep.d = d;
  rep.p = f.begin()->first;
  const double fp = std::abs(f(rep.p));
  const double f1 = f.l1_abs();
  std::vector<LogValue> hyp, weighted, ones;
  for (Index x = 1; x <= k; ++x) {
    const double c = expr::evaluate(*chi, x).to_double();
    if (!(c > 0.0 && c < 1.0)) throw DomainError("χ must take values in (0, 1)");
    const LogValue sd = sigma[d].eval(x);
    const LogValue cp = LogValue::from_double(c).pow(static_cast<double>(rep.p));
    hyp.push_back(sd * cp);
    ones.push_back(LogValue::one());
    FinSuppVector cx;
    cx.set(x, c);
    const double theta = std::abs(theta_chi(f, cx)(x));
    B5Entry e;
    e.x = x;
    // boundary points belong to S; χ may carry rounding from the log domain
    e.exceptional = c * f1 >= fp / 2 * (1 - 1e-12);
    e.weighted = sd * LogValue::from_double(theta);
    e.lower = sd * cp * LogValue::from_double(fp / 2);
    if (!e.exceptional) {
      // |θ| = χ^p|f(p) + Σ_q f(q+p)χ^q| >= χ^p(|f(p)| - ‖f‖_1 χ) >= χ^p|f(p)|/2
      double rest = 0.0;
      for (const auto& [r, v] : f) {
        if (r > rep.p) rest += std::abs(v) * std::pow(c, static_cast<double>(r - rep.p));
      }
      const LogValue step1 = sd * cp * LogValue::from_double(std::max(fp - rest, 0.0));
      const LogValue step2 = sd * cp * LogValue::from_double(std::max(fp - f1 * c, 0.0));
      e.chain_holds = approx::less_equal(step1, e.weighted) &&
                      approx::less_equal(step2, step1) &&
                      approx::less_equal(e.lower, step2);
    } else {
      rep.exceptional.push_back(x);
    }
    rep.chain_holds = rep.chain_holds && e.chain_holds;
    weighted.push_back(e.weighted);
    rep.entries.push_back(e);
  }
  if (dominates_values(hyp, ones).dominated()) {
    throw ContractError("σ_d χ^p is bounded on the prefix");
  }
  rep.trend = dominates_values(weighted, ones);
  return rep;
}

// ---------------------------------------------------------------------------
// An enumeration γ₂ <= γ₁ + 1 that no power of which dominates γ₁.
// Special points s_0 = 1 and s_i = ⌈e^{i^i}⌉; γ₂(1) = 1,
// γ₂(s_{i+1}) = s_i + 1, and γ₂(k) = k + 1 elsewhere.

/// s_i as a LogValue; exact integers while they fit.
inline LogValue b7_special(int i) {
  if (i < 0) throw DomainError("special index must be nonnegative");
  if (i == 0) return LogValue::one();
  const double e = std::pow(static_cast<double>(i), i);
  if (e < std::log(expr::kExactIntegerLimit)) {
    return LogValue::from_double(std::ceil(std::exp(e)));
  }
  return LogValue::from_log(e);
}

/// Special points that fit in an Index: s_0..s_3.
inline const std::vector<Index>& b7_machine_specials() {
  static const std::vector<Index> s = [] {
    std::vector<Index> v;
    for (int i = 0; i <= 3; ++i) {
      v.push_back(static_cast<Index>(std::llround(b7_special(i).to_double())));
    }
    return v;
  }();
  return s;
}

inline std::optional<Index> b7_gamma2(Index k) {
  if (k == 0) return std::nullopt;
  if (k == 1) return 1;
  const auto& s = b7_machine_specials();
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (k == s[i]) return s[i - 1] + 1;
  }
  if (k == std::numeric_limits<Index>::max()) return std::nullopt;
  return k + 1;
}

inline std::optional<Index> b7_gamma2_inverse(Index v) {
  if (v == 0) return std::nullopt;
  if (v == 1) return 1;
  const auto& s = b7_machine_specials();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (v == s[i] + 1) return s[i + 1];
  }
  if (v == s.back() + 1) return std::nullopt;  // s_4 is not an Index
  return v - 1;
}

inline EnumerationPtr b7_enumeration() {
  static const EnumerationPtr e = std::make_shared<const Enumeration>(
      Enumeration::from_rules("gamma2", b7_gamma2, b7_gamma2_inverse));
  return e;
}

/// Dense 1..16, then each machine special point past 16 with its neighbours.
inline std::vector<Index> b7_default_list() {
  std::vector<Index> v;
  for (Index k = 1; k <= 16; ++k) v.push_back(k);
  for (Index s : b7_machine_specials()) {
    if (s > 16) {
      v.push_back(s - 1);
      v.push_back(s);
      v.push_back(s + 1);
    }
  }
  return v;
}

struct B7Point {
  LogValue gamma1;
  LogValue gamma2;
  bool special = false;
};

struct B7Report {
  std::vector<B7Point> points;      // machine list, then s_4..s_{i_max+1}
  bool bounded_by_gamma1_plus_one = true;
  bool injective_on_list = true;
  std::vector<DominationReport> per_d;  // γ₁ against γ₂^d, d = 1..d_max
  bool all_refuted() const {
    return std::all_of(per_d.begin(), per_d.end(),
                       [](const auto& r) { return !r.dominated(); });
  }
};

/// Evaluates γ₂ on the machine-integer list, appends the special points
/// s_4..s_{i_max+1} in the log domain, and tests γ₁ <= C γ₂^d for each d.
inline B7Report b7_enumerations(const std::vector<Index>& list, int i_max = 5,
                                int d_max = 8) {
  if (list.empty()) throw DomainError("empty index list");
  const Index top = *std::max_element(list.begin(), list.end());
  for (std::size_t i = 1; i < b7_machine_specials().size(); ++i) {
    const Index s = b7_machine_specials()[i];
    if (s <= top && std::find(list.begin(), list.end(), s) == list.end()) {
      throw DomainError("index list misses special point " + std::to_string(s));
    }
  }
  B7Report rep;
  std::vector<Index> seen;
  for (Index k : list) {
    const Index g = b7_enumeration()->forward(k);
    const bool special = std::find(b7_machine_specials().begin() + 1,
                                   b7_machine_specials().end(),
                                   k) != b7_machine_specials().end();
    rep.points.push_back({LogValue::from_double(static_cast<double>(k)),
                          LogValue::from_double(static_cast<double>(g)),
                          special});
    if (g > k + 1) rep.bounded_by_gamma1_plus_one = false;
    if (b7_enumeration()->inverse(g) != k) rep.injective_on_list = false;
    seen.push_back(g);
  }
  std::vector<Index> sorted = seen;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    rep.injective_on_list = false;
  }
  for (int i = 4; i <= i_max + 1; ++i) {
    const LogValue s = b7_special(i);
    const LogValue g = b7_special(i - 1) + LogValue::one();
    rep.points.push_back({s, g, true});
    if (approx::greater(g, s + LogValue::one())) {
      rep.bounded_by_gamma1_plus_one = false;
    }
  }
  std::vector<LogValue> g1, g2;
  for (const auto& p : rep.points) {
    g1.push_back(p.gamma1);
    g2.push_back(p.gamma2);
  }
  for (int d = 1; d <= d_max; ++d) {
    std::vector<LogValue> g2d;
    for (const auto& v : g2) g2d.push_back(v.pow(d));
    rep.per_d.push_back(dominates_values(g1, g2d));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Dyadic rationals l/2^p in [0, 1), with l odd or the single point 0.

struct Dyadic {
  std::uint64_t l = 0;
  int p = 0;
};

inline std::uint64_t cantor_sigma(const Dyadic& x) {
  return x.p == 0 ? 1 : std::uint64_t{1} << x.p;
}

/// γ(l/2^p) = 2^{p-1} + ⌊l/2⌋ + 1, γ(0) = 1.
inline std::uint64_t cantor_gamma(const Dyadic& x) {
  if (x.p == 0) return 1;
  return (std::uint64_t{1} << (x.p - 1)) + x.l / 2 + 1;
}

struct CantorReport {
  int p_max = 0;
  std::size_t count = 0;         // number of dyadics with p <= p_max
  bool bijective = false;        // γ hits 1..2^{p_max} exactly once
  bool sandwich = false;         // γ <= σ <= 2γ everywhere
  // γ <= σ <= 2γ holds level by level (γ ranges over 2^{p-1}+1..2^p while
  // σ = 2^p), so equivalence rests on the exhaustive sandwich. The trend
  // rule would misread the sawtooth γ/σ, which rises across every level.
  bool equivalent = false;
  LogValue c_sigma_gamma;        // max σ/γ on the prefix, below 2
  LogValue c_gamma_sigma;        // max γ/σ on the prefix, equal to 1
  std::vector<SummabilityEntry> summability;  // {σ^n}, n = 0..2
  double inverse_square_sum = 0.0;            // Σ 1/σ², exact for p <= p_max
};

/// Exhaustive checks on all dyadics with denominator up to 2^{p_max}.
/// Summability of {σ^n} uses the block tail Σ_{p > P} 2^{p-1} 2^{-pq},
/// q = m - n, which is finite exactly when q >= 2.
inline CantorReport cantor_scale(int p_max) {
  if (p_max < 1 || p_max > 20) throw DomainError("p_max must be in 1..20");
  CantorReport rep;
  rep.p_max = p_max;
  const std::uint64_t total = std::uint64_t{1} << p_max;
  std::vector<Dyadic> by_rank(total + 1);
  std::vector<bool> hit(total + 1, false);
  bool bij = true, sandwich = true;
  auto visit = [&](const Dyadic& x) {
    ++rep.count;
    const auto g = cantor_gamma(x);
    const auto s = cantor_sigma(x);
    if (g == 0 || g > total || hit[g]) {
      bij = false;
      return;
    }
    hit[g] = true;
    by_rank[g] = x;
    if (!(g <= s && s <= 2 * g)) sandwich = false;
  };
  visit({0, 0});
  for (int p = 1; p <= p_max; ++p) {
    for (std::uint64_t l = 1; l < (std::uint64_t{1} << p); l += 2) visit({l, p});
  }
  bij = bij && rep.count == total &&
        std::all_of(hit.begin() + 1, hit.end(), [](bool b) { return b; });
  rep.bijective = bij;
  rep.sandwich = sandwich;

  std::vector<LogValue> sig, gam;
  for (std::uint64_t r = 1; r <= total; ++r) {
    sig.push_back(LogValue::from_double(static_cast<double>(cantor_sigma(by_rank[r]))));
    gam.push_back(LogValue::from_double(static_cast<double>(r)));
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    rep.c_sigma_gamma = max(rep.c_sigma_gamma, sig[i] / gam[i]);
    rep.c_gamma_sigma = max(rep.c_gamma_sigma, gam[i] / sig[i]);
  }
  rep.equivalent = rep.bijective && rep.sandwich;

  std::vector<LogValue> inv_sq;
  for (const auto& s : sig) inv_sq.push_back(LogValue::one() / (s * s));
  rep.inverse_square_sum = log_sum(inv_sq).to_double();

  for (int n = 0; n <= 2; ++n) {
    for (int m = n + 1; m <= n + 4; ++m) {
      const int q = m - n;
      std::vector<LogValue> t;
      for (const auto& s : sig) t.push_back(LogValue::one() / s.pow(q));
      SummabilityEntry e;
      e.n = n;
      e.m = m;
      e.partial_sum = log_sum(t);
      if (q >= 2) {
        // Σ_{p>P} 2^{p-1} 2^{-pq} = 2^{-(P+1)(q-1)} / (2(1 - 2^{1-q}))
        const double tail = std::pow(2.0, -(p_max + 1.0) * (q - 1)) /
                            (2.0 * (1.0 - std::pow(2.0, 1.0 - q)));
        e.tail_bound = LogValue::from_double(tail);
        e.method = TailMethod::kCondensation;
        e.p = q;
        e.verdict = SummabilityVerdict::kCertified;
        rep.summability.push_back(e);
        break;
      }
      e.verdict = detail::trend_refutes(t) ? SummabilityVerdict::kRefutedTrend
                                           : SummabilityVerdict::kPrefixBounded;
      rep.summability.push_back(e);
    }
  }
  return rep;
}

}  // namespace scalekit
