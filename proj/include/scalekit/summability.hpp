#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/dims.hpp"
#include "scalekit/domination.hpp"
#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/expr.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/scale.hpp"

namespace scalekit {

enum class TailMethod { kCondensation, kPSeries, kNone };
enum class SummabilityVerdict { kCertified, kPrefixBounded, kRefutedTrend };

inline const char* to_string(TailMethod m) {
  switch (m) {
    case TailMethod::kCondensation:
      return "condensation";
    case TailMethod::kPSeries:
      return "p-series";
    case TailMethod::kNone:
      return "none";
  }
  return "none";
}

inline const char* to_string(SummabilityVerdict v) {
  switch (v) {
    case SummabilityVerdict::kCertified:
      return "certified";
    case SummabilityVerdict::kPrefixBounded:
      return "prefix-bounded";
    case SummabilityVerdict::kRefutedTrend:
      return "refuted-trend";
  }
  return "refuted-trend";
}

struct TailBound {
  LogValue bound;
  TailMethod method = TailMethod::kNone;
  double p = 0.0;  // decay exponent of the power bound on the term
};

struct SummabilityEntry {
  int n = 0;
  int m = 0;
  LogValue partial_sum;
  std::optional<LogValue> tail_bound;
  TailMethod method = TailMethod::kNone;
  SummabilityVerdict verdict = SummabilityVerdict::kRefutedTrend;
  double p = 0.0;
};

struct SummabilityReport {
  std::size_t prefix_size = 0;
  std::vector<SummabilityEntry> entries;

  bool all(SummabilityVerdict v) const {
    return std::all_of(entries.begin(), entries.end(),
                       [v](const auto& e) { return e.verdict == v; });
  }
};

struct SummabilityOptions {
  std::vector<int> ns{0, 1, 2};
  int max_m = 12;
};

/// Share of the partial sum carried by the final quarter above which a
/// series is reported as divergent-looking.
inline constexpr double kTrendShare = 0.01;

/// True for c·k^a with a <= 0, or structurally nonincreasing.
inline bool is_nonincreasing(const Expr& e) {
  const auto m = expr::monotonicity(e);
  if (m == expr::Monotonicity::kNonIncreasing ||
      m == expr::Monotonicity::kConst) {
    return true;
  }
  const auto b = expr::power_bounds(e);
  if (b.upper && b.lower && b.upper->exponent <= 0.0 &&
      b.upper->exponent == b.lower->exponent &&
      std::abs(b.upper->log_c - b.lower->log_c) <=
          kLogTolerance * std::max(1.0, std::abs(b.upper->log_c))) {
    return true;
  }
  return false;
}

/// Bound on the sum of `term` over k > K, from the grammar alone.
///
/// A power bound term <= C·k^{-p} with p > 1 gives the p-series bound
/// C·K^{1-p}/(p-1). When the term is also nonincreasing and computable
/// everywhere, dyadic blocks [M·2^j, M·2^{j+1}) are summed exactly as
/// M·2^j·term(M·2^j) and the p-series bound closes the remainder.
inline std::optional<TailBound> tail_bound(const ExprPtr& term, Index k) {
  const auto bounds = expr::power_bounds(*term);
  if (!bounds.upper || !(bounds.upper->exponent < -1.0)) return std::nullopt;
  const double p = -bounds.upper->exponent;
  const double log_c = bounds.upper->log_c;
  auto pseries_from = [&](double start) {
    // sum_{k > start} C k^{-p} <= C start^{1-p}/(p-1)
    return LogValue::from_log(log_c + (1.0 - p) * std::log(start) -
                              std::log(p - 1.0));
  };
  TailBound out;
  out.p = p;
  out.method = TailMethod::kPSeries;
  out.bound = pseries_from(static_cast<double>(k));

  if (expr::is_total(*term) && is_nonincreasing(*term)) {
    const Index m0 = k + 1;
    const int jmax = std::min(40, static_cast<int>(std::floor(
                                      62.0 - std::log2(static_cast<double>(m0)))));
    if (jmax >= 1) {
      std::vector<LogValue> blocks;
      try {
        for (int j = 0; j < jmax; ++j) {
          const Index at = m0 << j;
          blocks.push_back(LogValue::from_double(static_cast<double>(at)) *
                           expr::evaluate(*term, at));
        }
        const double rest = std::ldexp(static_cast<double>(m0), jmax) - 1.0;
        blocks.push_back(pseries_from(rest));
        out.bound = log_sum(blocks);
        out.method = TailMethod::kCondensation;
      } catch (const Error&) {
        // fall back to the p-series bound
      }
    }
  }
  return out;
}

namespace detail {

struct SummabilityProblem {
  const std::vector<std::vector<LogValue>>* members = nullptr;  // [m][i]
  const std::vector<LogValue>* weights = nullptr;               // optional
  std::function<ExprPtr(int, int)> term_expr;                   // may return null
  const Prefix* prefix = nullptr;
};

inline std::vector<LogValue> terms(const SummabilityProblem& pr, int n,
                                   int m) {
  const auto& a = (*pr.members)[n];
  const auto& b = (*pr.members)[m];
  std::vector<LogValue> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    t[i] = a[i] / b[i];
    if (pr.weights) t[i] *= (*pr.weights)[i];
  }
  return t;
}

inline bool trend_refutes(const std::vector<LogValue>& t) {
  const std::size_t n = t.size();
  const std::size_t q = (3 * n + 3) / 4;  // ceil(3n/4)
  const LogValue head = log_sum(std::span<const LogValue>(t.data(), q));
  const LogValue all = log_sum(t);
  if (all.is_zero()) return false;
  const LogValue tail = difference(max(all, head), head);
  return tail > all * LogValue::from_double(kTrendShare);
}

inline SummabilityEntry evaluate_pair(const SummabilityProblem& pr, int n,
                                      int m) {
  SummabilityEntry e;
  e.n = n;
  e.m = m;
  const auto t = terms(pr, n, m);
  e.partial_sum = log_sum(t);
  std::optional<TailBound> tb;
  if (pr.prefix->is_dense() && pr.term_expr) {
    if (ExprPtr term = pr.term_expr(n, m)) {
      tb = tail_bound(term, pr.prefix->size());
    }
  }
  if (tb) {
    e.tail_bound = tb->bound;
    e.method = tb->method;
    e.p = tb->p;
    e.verdict = SummabilityVerdict::kCertified;
  } else {
    e.verdict = trend_refutes(t) ? SummabilityVerdict::kRefutedTrend
                                 : SummabilityVerdict::kPrefixBounded;
  }
  return e;
}

inline SummabilityReport solve(const SummabilityProblem& pr,
                               const SummabilityOptions& opt) {
  const int available = static_cast<int>(pr.members->size()) - 1;
  if (opt.max_m > available) {
    throw DomainError("family has no member " + std::to_string(opt.max_m));
  }
  SummabilityReport rep;
  rep.prefix_size = pr.prefix->size();
  for (int n : opt.ns) {
    if (n < 0) throw DomainError("family index must be nonnegative");
    if (opt.max_m <= n) {
      throw DomainError("max_m must exceed n = " + std::to_string(n));
    }
    std::vector<SummabilityEntry> tried;
    for (int m = n + 1; m <= opt.max_m; ++m) {
      tried.push_back(evaluate_pair(pr, n, m));
    }
    const SummabilityEntry* pick = nullptr;
    // prefer a term decaying at least like k^-2, then any certificate,
    // then the smallest partial sum
    for (const auto& e : tried) {
      if (e.verdict == SummabilityVerdict::kCertified && e.p >= 2.0 - 1e-12) {
        pick = &e;
        break;
      }
    }
    if (!pick) {
      for (const auto& e : tried) {
        if (e.verdict == SummabilityVerdict::kCertified) {
          pick = &e;
          break;
        }
      }
    }
    if (!pick) {
      for (const auto& e : tried) {
        if (!pick || approx::greater(pick->partial_sum, e.partial_sum)) {
          pick = &e;
        }
      }
    }
    rep.entries.push_back(*pick);
  }
  return rep;
}

inline void check_increasing_values(
    const std::vector<std::vector<LogValue>>& v) {
  for (std::size_t m = 1; m < v.size(); ++m) {
    for (std::size_t i = 0; i < v[m].size(); ++i) {
      if (approx::greater(v[m - 1][i], v[m][i])) {
        throw DomainError("family not increasing at member " +
                          std::to_string(m));
      }
    }
  }
}

inline std::vector<std::vector<LogValue>> member_values(
    const ScaleFamily& f, const Prefix& prefix, int upto) {
  std::vector<std::vector<LogValue>> out;
  for (int m = 0; m <= upto; ++m) out.push_back(f[m].eval(prefix));
  return out;
}

}  // namespace detail

/// For each requested n, searches m in (n, max_m] for Σ_x σ_n(x)/σ_m(x)
/// and attaches a grammar-derived tail bound when one exists.
inline SummabilityReport summability_check(const ScaleFamily& sigma,
                                           const Prefix& prefix,
                                           const SummabilityOptions& opt = {}) {
  for (int n : opt.ns) {
    if (opt.max_m <= n) {
      throw DomainError("max_m must exceed n = " + std::to_string(n));
    }
  }
  if (opt.max_m > sigma.max_index()) {
    throw DomainError("family has no member " + std::to_string(opt.max_m));
  }
  const auto values = detail::member_values(sigma, prefix, opt.max_m);
  detail::check_increasing_values(values);
  detail::SummabilityProblem pr;
  pr.members = &values;
  pr.prefix = &prefix;
  pr.term_expr = [&](int n, int m) {
    return expr::div(sigma[n].expr(), sigma[m].expr());
  };
  return detail::solve(pr, opt);
}

/// Partial sum Σ_x w(x)·σ_n(x)/σ_m(x) for one pair, with w = 1 if absent.
inline LogValue partial_sum(const ScaleFamily& sigma, int n, int m,
                            const Prefix& prefix,
                            const std::vector<LogValue>* weights = nullptr) {
  const auto a = sigma[n].eval(prefix);
  const auto b = sigma[m].eval(prefix);
  std::vector<LogValue> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    t[i] = a[i] / b[i];
    if (weights) t[i] *= (*weights)[i];
  }
  return log_sum(t);
}

inline std::vector<LogValue> squared_weights(const DimensionSequence& p,
                                             const Prefix& prefix) {
  std::vector<LogValue> w;
  w.reserve(prefix.size());
  for (Index z : prefix) {
    if (z > p.size()) {
      throw DomainError("index " + std::to_string(z) +
                        " beyond the dimension sequence");
    }
    w.push_back(p.value(z).pow(2.0));
  }
  return w;
}

/// Σ_z p_z²·ℓ_n(z)/ℓ_m(z), searched over m as in summability_check.
inline SummabilityReport p_summability_check(
    const ScaleFamily& ell, const DimensionSequence& p, const Prefix& prefix,
    const SummabilityOptions& opt = {}) {
  for (int n : opt.ns) {
    if (opt.max_m <= n) {
      throw DomainError("max_m must exceed n = " + std::to_string(n));
    }
  }
  if (opt.max_m > ell.max_index()) {
    throw DomainError("family has no member " + std::to_string(opt.max_m));
  }
  const auto weights = squared_weights(p, prefix);
  const auto values = detail::member_values(ell, prefix, opt.max_m);
  detail::check_increasing_values(values);
  detail::SummabilityProblem pr;
  pr.members = &values;
  pr.weights = &weights;
  pr.prefix = &prefix;
  if (p.source()) {
    // ceil(x) <= x + 1
    ExprPtr w = expr::pow(expr::add(p.source(), expr::constant(1.0)),
                          expr::constant(2.0));
    pr.term_expr = [&, w](int n, int m) {
      return expr::mul(w, expr::div(ell[n].expr(), ell[m].expr()));
    };
  }
  return detail::solve(pr, opt);
}

// ---------------------------------------------------------------------------

struct SingleScaleReport {
  std::optional<int> d;
  LogValue constant;
  SummabilityVerdict verdict = SummabilityVerdict::kRefutedTrend;
  DominationReport report;
};

/// Least d <= d_max with γ <= C·σ^d on the prefix. Such a d makes the
/// powers {σ^n} summable with m = n + 2d.
inline SingleScaleReport single_scale_summable(const Scale& sigma,
                                               const EnumerationPtr& gamma,
                                               const Prefix& prefix,
                                               int d_max = 8) {
  const auto res = power_dominates(Scale::of(gamma), sigma, prefix, d_max);
  SingleScaleReport out;
  out.d = res.d;
  out.report = res.last;
  out.constant = res.last.constant;
  out.verdict = res.d ? SummabilityVerdict::kPrefixBounded
                      : SummabilityVerdict::kRefutedTrend;
  return out;
}

struct CondensationResult {
  Enumeration gamma = Enumeration::identity();
  LogValue constant;          // least C with σ_n·sqrt(γ) <= C·σ_m on the prefix
  bool summable_on_prefix = false;
  std::string error;          // set when the ratio does not look summable
};

/// Ranks the prefix by σ_n/σ_m in nonincreasing order (ties by prefix
/// position) and returns the rank function γ with its witness constant.
inline CondensationResult condensation_enumeration_values(
    const Prefix& prefix, const std::vector<LogValue>& num,
    const std::vector<LogValue>& den) {
  const std::size_t n = prefix.size();
  std::vector<LogValue> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = num[i] / den[i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r[b] < r[a]; });
  std::vector<Index> inverse(n);
  std::vector<Index> rank(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    inverse[pos] = prefix[order[pos]];
    rank[order[pos]] = pos + 1;
  }
  CondensationResult out;
  out.gamma = Enumeration::from_inverse(std::move(inverse), "condensation");
  LogValue c;
  for (std::size_t i = 0; i < n; ++i) {
    c = max(c, r[i] * LogValue::from_double(static_cast<double>(rank[i])).sqrt());
  }
  out.constant = c;
  out.summable_on_prefix = !detail::trend_refutes(r);
  if (!out.summable_on_prefix) out.error = "ratio not summable on the prefix";
  return out;
}

inline CondensationResult condensation_enumeration(const Scale& sigma_n,
                                                   const Scale& sigma_m,
                                                   const Prefix& prefix) {
  return condensation_enumeration_values(prefix, sigma_n.eval(prefix),
                                         sigma_m.eval(prefix));
}

struct ChainLink {
  Enumeration gamma = Enumeration::identity();
  int m = 0;
  LogValue step_constant;   // σ_{m_{n-1}}·sqrt(γ_n) <= C·σ_{m_n}
  LogValue chain_constant;  // sqrt(γ_1⋯γ_n) <= C·σ_{m_n}
};

/// Builds γ_1, γ_2, ... and m_1 < m_2 < ... with
/// σ_{m_{n-1}}·sqrt(γ_n) dominated by σ_{m_n}, starting from m_0 = 0.
/// Throws ContractError when no m <= max member works.
inline std::vector<ChainLink> sqrt_standard_chain(const ScaleFamily& sigma,
                                                  const Prefix& prefix,
                                                  int steps) {
  std::vector<std::vector<LogValue>> values;
  for (const auto& s : sigma.members()) values.push_back(s.eval(prefix));
  std::vector<ChainLink> chain;
  std::vector<LogValue> product(prefix.size(), LogValue::one());
  int prev = 0;
  for (int step = 1; step <= steps; ++step) {
    bool found = false;
    for (int m = prev + 1; m <= sigma.max_index(); ++m) {
      auto c = condensation_enumeration_values(prefix, values[prev], values[m]);
      std::vector<LogValue> lhs(prefix.size());
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        lhs[i] = values[prev][i] *
                 LogValue::from_double(
                     static_cast<double>(c.gamma.forward(prefix[i])))
                     .sqrt();
      }
      const auto step_rep = dominates_values(lhs, values[m]);
      if (!step_rep.dominated()) continue;
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        product[i] *= LogValue::from_double(
            static_cast<double>(c.gamma.forward(prefix[i])));
      }
      std::vector<LogValue> root(prefix.size());
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        root[i] = product[i].sqrt();
      }
      const auto chain_rep = dominates_values(root, values[m]);
      if (!chain_rep.dominated()) {
        throw ContractError("sqrt of the enumeration product escapes σ_" +
                            std::to_string(m));
      }
      chain.push_back({std::move(c.gamma), m, step_rep.constant,
                       chain_rep.constant});
      prev = m;
      found = true;
      break;
    }
    if (!found) {
      throw ContractError("enumeration chain stalls after m = " +
                          std::to_string(prev));
    }
  }
  return chain;
}

// ---------------------------------------------------------------------------

struct Prop63Report {
  std::optional<int> d;
  LogValue constant;
  DominationReport report;
  // partial sums of Σ p²ℓ^n/ℓ^{n+2d}, n = 0..2, and their bound C²π²/6
  std::vector<LogValue> partial_sums;
  LogValue bound;
  bool consistent = false;
};

/// Least d with ϑ(z)·p_z <= C·ℓ(z)^d on the prefix, cross-checked against
/// the weighted sums it implies.
inline Prop63Report prop63_check(const Scale& ell, const DimensionSequence& p,
                                 const EnumerationPtr& theta,
                                 const Prefix& prefix, int d_max = 8) {
  std::vector<LogValue> lhs;
  for (Index z : prefix) {
    if (z > p.size()) throw DomainError("index beyond the dimension sequence");
    lhs.push_back(LogValue::from_double(
                      static_cast<double>(theta->forward(z))) *
                  p.value(z));
  }
  const auto ell_values = ell.eval(prefix);
  const auto res = power_dominates_values(lhs, ell_values, d_max);
  Prop63Report out;
  out.d = res.d;
  out.report = res.last;
  out.constant = res.last.constant;
  if (!res.d) return out;
  const int d = *res.d;
  const auto weights = squared_weights(p, prefix);
  out.bound = out.constant.pow(2.0) *
              LogValue::from_double(std::numbers::pi * std::numbers::pi / 6.0);
  out.consistent = true;
  for (int n = 0; n <= 2; ++n) {
    std::vector<LogValue> t(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      t[i] = weights[i] * ell_values[i].pow(n) / ell_values[i].pow(n + 2 * d);
    }
    const LogValue s = log_sum(t);
    out.partial_sums.push_back(s);
    if (s.to_double() > out.bound.to_double() + 1e-6) out.consistent = false;
  }
  return out;
}

}  // namespace scalekit
