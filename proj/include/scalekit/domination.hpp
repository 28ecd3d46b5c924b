#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/scale.hpp"

namespace scalekit {

enum class DominationVerdict { kDominated, kRefutedByTrend };

inline const char* to_string(DominationVerdict v) {
  return v == DominationVerdict::kDominated ? "dominated-with-constant"
                                            : "refuted-by-trend";
}

/// Outcome of testing τ <= C·σ on a finite prefix. A dominated verdict is a
/// certificate at truncation only.
struct DominationReport {
  DominationVerdict verdict = DominationVerdict::kDominated;
  LogValue constant;             // max of τ/σ over the prefix
  std::vector<LogValue> trend;   // running maxima of τ/σ
  std::size_t argmax = 0;        // position where the max is first attained

  bool dominated() const { return verdict == DominationVerdict::kDominated; }
};

/// Decision rule on sequences of values listed in prefix order.
///
/// Dominated iff, over the final quarter of the prefix, the running max of
/// τ/σ does not increase and the ratio itself is not strictly increasing.
inline DominationReport dominates_values(std::span<const LogValue> tau,
                                         std::span<const LogValue> sigma) {
  if (tau.size() != sigma.size()) {
    throw DomainError("domination: sequences differ in length");
  }
  if (tau.empty()) throw DomainError("domination: empty prefix");
  const std::size_t n = tau.size();
  std::vector<LogValue> ratio(n);
  DominationReport rep;
  rep.trend.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma[i].is_zero()) throw DomainError("domination: σ vanishes");
    ratio[i] = tau[i] / sigma[i];
    if (i == 0 || ratio[i] > rep.trend[i - 1]) {
      rep.trend[i] = ratio[i];
      rep.argmax = i;
    } else {
      rep.trend[i] = rep.trend[i - 1];
    }
  }
  rep.constant = rep.trend.back();

  const std::size_t q = std::max<std::size_t>(1, (3 * n) / 4);
  bool stable = true;
  bool strictly_rising = q < n;
  if (q < n) {
    stable = !approx::greater(rep.trend[n - 1], rep.trend[q - 1]);
    for (std::size_t i = q; i < n; ++i) {
      if (!approx::greater(ratio[i], ratio[i - 1])) {
        strictly_rising = false;
        break;
      }
    }
  }
  rep.verdict = (stable && !strictly_rising) ? DominationVerdict::kDominated
                                             : DominationVerdict::kRefutedByTrend;
  return rep;
}

/// Does σ dominate τ on the prefix (τ <= C·σ)?
inline DominationReport dominates(const Scale& tau, const Scale& sigma,
                                  const Prefix& prefix) {
  const auto t = tau.eval(prefix);
  const auto s = sigma.eval(prefix);
  return dominates_values(t, s);
}

inline DominationReport dominates(const Scale& tau, const Scale& sigma,
                                  Index k) {
  return dominates(tau, sigma, Prefix::dense(k));
}

struct EquivalenceReport {
  bool equivalent = false;
  LogValue c_sigma_tau;  // σ <= c·τ
  LogValue c_tau_sigma;  // τ <= c·σ
  DominationReport sigma_by_tau;
  DominationReport tau_by_sigma;
};

inline EquivalenceReport equivalent_values(std::span<const LogValue> sigma,
                                           std::span<const LogValue> tau) {
  EquivalenceReport rep;
  rep.sigma_by_tau = dominates_values(sigma, tau);
  rep.tau_by_sigma = dominates_values(tau, sigma);
  rep.c_sigma_tau = rep.sigma_by_tau.constant;
  rep.c_tau_sigma = rep.tau_by_sigma.constant;
  rep.equivalent = rep.sigma_by_tau.dominated() && rep.tau_by_sigma.dominated();
  return rep;
}

inline EquivalenceReport equivalent(const Scale& sigma, const Scale& tau,
                                    const Prefix& prefix) {
  const auto s = sigma.eval(prefix);
  const auto t = tau.eval(prefix);
  return equivalent_values(s, t);
}

/// Least d in 1..d_max with τ <= C·σ^d on the prefix.
struct PowerDominationReport {
  std::optional<int> d;
  DominationReport last;  // report for the returned d, or for d_max
};

inline PowerDominationReport power_dominates_values(
    std::span<const LogValue> tau, std::span<const LogValue> sigma,
    int d_max) {
  if (d_max < 1) throw DomainError("d_max must be at least 1");
  PowerDominationReport out;
  std::vector<LogValue> sd(sigma.size());
  for (int d = 1; d <= d_max; ++d) {
    for (std::size_t i = 0; i < sigma.size(); ++i) sd[i] = sigma[i].pow(d);
    out.last = dominates_values(tau, sd);
    if (out.last.dominated()) {
      out.d = d;
      return out;
    }
  }
  return out;
}

inline PowerDominationReport power_dominates(const Scale& tau,
                                             const Scale& sigma,
                                             const Prefix& prefix, int d_max) {
  const auto t = tau.eval(prefix);
  const auto s = sigma.eval(prefix);
  return power_dominates_values(t, s, d_max);
}

struct FamilyDominationEntry {
  int n = 0;
  std::optional<int> m;     // least m with τ_n <= C·σ_m
  DominationReport report;  // for m, or for the largest m tried
};

/// For each τ_n, the least σ_m dominating it on the prefix.
inline std::vector<FamilyDominationEntry> family_dominates(
    const ScaleFamily& sigma, const ScaleFamily& tau, const Prefix& prefix) {
  std::vector<std::vector<LogValue>> s;
  s.reserve(sigma.size());
  for (const auto& m : sigma.members()) s.push_back(m.eval(prefix));
  std::vector<FamilyDominationEntry> out;
  for (int n = 0; n <= tau.max_index(); ++n) {
    FamilyDominationEntry entry;
    entry.n = n;
    const auto t = tau[n].eval(prefix);
    for (int m = 0; m <= sigma.max_index(); ++m) {
      entry.report = dominates_values(t, s[m]);
      if (entry.report.dominated()) {
        entry.m = m;
        break;
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

/// Both families dominate each other member by member.
inline bool families_equivalent(const ScaleFamily& a, const ScaleFamily& b,
                                const Prefix& prefix) {
  auto ab = family_dominates(a, b, prefix);
  auto ba = family_dominates(b, a, prefix);
  auto ok = [](const std::vector<FamilyDominationEntry>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](const auto& e) { return e.m.has_value(); });
  };
  return ok(ab) && ok(ba);
}

}  // namespace scalekit
