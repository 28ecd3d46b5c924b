#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalekit/block.hpp"
#include "scalekit/dims.hpp"
#include "scalekit/domination.hpp"
#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/random.hpp"
#include "scalekit/scale.hpp"

namespace scalekit {

/// Weight attached to a whole block z (ℓ_n(z) for a fixed n).
using BlockWeight = std::function<LogValue(Index z)>;
/// Weight attached to a single entry (z, i, j), 1-based.
using EntryWeight = std::function<LogValue(Index z, std::size_t i, std::size_t j)>;

inline BlockWeight member_weight(const ScaleFamily& ell, int n) {
  const Scale& s = ell[static_cast<std::size_t>(n)];
  return [s](Index z) { return s.eval(z); };
}

/// Checks every block of f against the dimension sequence.
inline void check_shapes(const BlockElement& f, const DimensionSequence& dims) {
  for (const auto& [z, m] : f) {
    if (z > dims.size() || m.size() != dims.at(z)) {
      throw DomainError("block " + std::to_string(z) +
                        " does not match the dimension sequence");
    }
  }
}

// ---------------------------------------------------------------------------
// Socle norms

/// sup_z ℓ(z)‖f(z)‖_op
inline LogValue socle_norm_op(const BlockElement& f, const BlockWeight& ell,
                              const OpNormOptions& opt = {}) {
  LogValue m;
  for (const auto& [z, b] : f) {
    m = max(m, ell(z) * LogValue::from_double(op_norm(b, opt)));
  }
  return m;
}

inline LogValue socle_norm_op(const BlockElement& f, const ScaleFamily& ell,
                              int n, const OpNormOptions& opt = {}) {
  return socle_norm_op(f, member_weight(ell, n), opt);
}

struct EntryNorms {
  LogValue l1;
  LogValue sup;
};

/// Entrywise ℓ¹ and sup norms with an entry-dependent weight.
inline EntryNorms entry_norms(const BlockElement& f, const EntryWeight& w) {
  EntryNorms out;
  std::vector<LogValue> terms;
  for (const auto& [z, b] : f) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        const double a = std::abs(b(i, j));
        if (a == 0.0) continue;
        const LogValue t = w(z, i + 1, j + 1) * LogValue::from_double(a);
        terms.push_back(t);
        out.sup = max(out.sup, t);
      }
    }
  }
  out.l1 = log_sum(terms);
  return out;
}

/// Entrywise norms with weight ℓ(z) constant on each block.
inline EntryNorms socle_norms_l1_sup(const BlockElement& f,
                                     const BlockWeight& ell) {
  EntryNorms out;
  std::vector<LogValue> terms;
  for (const auto& [z, b] : f) {
    const LogValue w = ell(z);
    terms.push_back(w * LogValue::from_double(b.sum_abs()));
    out.sup = max(out.sup, w * LogValue::from_double(b.max_abs()));
  }
  out.l1 = log_sum(terms);
  return out;
}

inline EntryNorms socle_norms_l1_sup(const BlockElement& f,
                                     const ScaleFamily& ell, int n) {
  return socle_norms_l1_sup(f, member_weight(ell, n));
}

struct SandwichResult {
  LogValue sup, op, l1;
  bool holds = false;  // sup <= op <= l1 up to 1e-9 relative
};

inline SandwichResult sandwich_check(const BlockElement& f,
                                     const ScaleFamily& ell, int n) {
  SandwichResult r;
  const auto w = member_weight(ell, n);
  const auto e = socle_norms_l1_sup(f, w);
  r.sup = e.sup;
  r.l1 = e.l1;
  r.op = socle_norm_op(f, w);
  r.holds = approx::less_equal(r.sup, r.op) && approx::less_equal(r.op, r.l1);
  return r;
}

// ---------------------------------------------------------------------------
// Random elements and the two-sided ideal inequality

/// Random element with 1..max_blocks blocks drawn from z in 1..K.
inline BlockElement random_block_element(Rng& rng,
                                         const DimensionSequence& dims,
                                         std::size_t max_blocks) {
  const std::uint64_t k = dims.size();
  BlockElement f;
  const auto count = uniform_int(rng, 1, max_blocks);
  for (std::uint64_t t = 0; t < count; ++t) {
    const Index z = uniform_int(rng, 1, k);
    f.set(z, DenseMatrix::random(rng, dims.at(z)));
  }
  return f;
}

struct TwoSidedRatio {
  int n = 0;
  double worst_left = 0.0;   // ‖fφ‖_n / (‖f‖_B‖φ‖_n)
  double worst_right = 0.0;  // ‖φf‖_n / (‖φ‖_n‖f‖_B)
};

struct TwoSidedReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<TwoSidedRatio> per_n;

  double worst() const {
    double w = 0.0;
    for (const auto& r : per_n) w = std::max({w, r.worst_left, r.worst_right});
    return w;
  }
};

/// Random trials of both one-sided inequalities for the S^{∞,op} norms.
/// f has up to 20 blocks, φ up to 5.
inline TwoSidedReport two_sided_ideal_check(const ScaleFamily& ell,
                                            const DimensionSequence& dims,
                                            int trials, std::uint64_t seed) {
  TwoSidedReport rep;
  rep.seed = seed;
  rep.trials = trials;
  Rng rng(seed);
  for (int n = 0; n <= ell.max_index(); ++n) rep.per_n.push_back({n, 0, 0});
  for (int t = 0; t < trials; ++t) {
    const auto f = random_block_element(rng, dims, 20);
    const auto phi = random_block_element(rng, dims, 5);
    const LogValue fb = cstar_norm(f);
    const auto left = block_mul(f, phi);
    const auto right = block_mul(phi, f);
    for (auto& r : rep.per_n) {
      const auto w = member_weight(ell, r.n);
      const LogValue pn = socle_norm_op(phi, w);
      const LogValue denom = fb * pn;
      r.worst_left = std::max(r.worst_left,
                              (socle_norm_op(left, w) / denom).to_double());
      r.worst_right = std::max(r.worst_right,
                               (socle_norm_op(right, w) / denom).to_double());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Diagonal embedding of c_f(Y), Y = {(z, i) : 1 <= i <= p_z}

using DiagIndex = std::pair<Index, std::size_t>;
using DiagVector = FinSupp<DiagIndex>;

inline BlockElement diagonal_embed(const DiagVector& phi,
                                   const DimensionSequence& dims) {
  std::map<Index, DenseMatrix> blocks;
  for (const auto& [key, v] : phi) {
    const auto [z, i] = key;
    if (z == 0 || z > dims.size() || i == 0 || i > dims.at(z)) {
      throw DomainError("diagonal index (" + std::to_string(z) + ", " +
                        std::to_string(i) + ") out of range");
    }
    auto it = blocks.try_emplace(z, DenseMatrix(dims.at(z))).first;
    it->second(i - 1, i - 1) = v;
  }
  BlockElement f;
  for (auto& [z, m] : blocks) f.set(z, std::move(m));
  return f;
}

/// max_{(z,i)} ℓ(z)|φ(z,i)|
inline LogValue diag_norm_sup(const DiagVector& phi, const BlockWeight& ell) {
  LogValue m;
  for (const auto& [key, v] : phi) {
    m = max(m, ell(key.first) * LogValue::from_double(std::abs(v)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// ℓ_min / ℓ_max

namespace detail {

// Elements 1..K listed in ϑ-order; ϑ must permute 1..K.
inline std::vector<Index> theta_order(const Enumeration& theta, std::size_t k) {
  std::vector<Index> order(k, 0);
  for (Index z = 1; z <= k; ++z) {
    const Index r = theta.forward(z);
    if (r == 0 || r > k || order[r - 1] != 0) {
      throw DomainError("ϑ does not permute the prefix 1.." +
                        std::to_string(k));
    }
    order[r - 1] = z;
  }
  return order;
}

}  // namespace detail

/// Values indexed by z - 1.
struct EllMinMax {
  std::vector<LogValue> min;
  std::vector<LogValue> max;
  std::vector<Index> order;  // z listed by increasing ϑ
};

/// ℓ_min(z) sums p over elements ϑ-before z (1 for the ϑ-first element);
/// ℓ_max(z) also includes z itself.
inline EllMinMax ell_min_max(const DimensionSequence& p,
                             const Enumeration& theta) {
  const std::size_t k = p.size();
  EllMinMax out;
  out.order = detail::theta_order(theta, k);
  out.min.resize(k);
  out.max.resize(k);
  LogValue running;
  for (std::size_t r = 0; r < k; ++r) {
    const Index z = out.order[r];
    out.min[z - 1] = r == 0 ? LogValue::one() : running;
    running = running + p.value(z);
    out.max[z - 1] = running;
  }
  return out;
}

/// Table scale from values; throws when a value leaves double range.
inline Scale table_scale(const std::vector<LogValue>& values) {
  std::vector<double> d;
  d.reserve(values.size());
  for (const auto& v : values) {
    const double x = v.to_double();
    if (!std::isfinite(x)) {
      throw DomainError("value too large for a table scale");
    }
    d.push_back(x);
  }
  return Scale(expr::table(d));
}

// ---------------------------------------------------------------------------
// Growth condition

struct GrowthCondition {
  std::string name;
  std::optional<int> d;          // least power with τ <= C·ℓ_min^d
  PowerDominationReport report;

  bool holds() const { return d.has_value(); }
};

struct GrowthReport {
  std::size_t k = 0;
  int d_max = 0;
  std::vector<GrowthCondition> conditions;  // (i), (ii), (iii)
  bool consistent = true;  // all three verdicts agree

  bool holds() const { return consistent && conditions[0].holds(); }
};

/// Tests p, ϑp and ℓ_max against powers of ℓ_min, listing z in ϑ-order.
/// The three conditions are equivalent, so a disagreement is flagged as an
/// internal inconsistency.
inline GrowthReport growth_condition_check(const DimensionSequence& p,
                                           const Enumeration& theta,
                                           int d_max = 8) {
  if (p.size() == 0) throw DomainError("empty dimension sequence");
  const auto ell = ell_min_max(p, theta);
  const std::size_t k = p.size();
  std::vector<LogValue> lmin(k), dims(k), theta_dims(k), lmax(k);
  for (std::size_t r = 0; r < k; ++r) {
    const Index z = ell.order[r];
    lmin[r] = ell.min[z - 1];
    lmax[r] = ell.max[z - 1];
    dims[r] = p.value(z);
    theta_dims[r] = LogValue::from_double(static_cast<double>(r + 1)) * dims[r];
  }
  GrowthReport rep;
  rep.k = k;
  rep.d_max = d_max;
  auto run = [&](std::string name, const std::vector<LogValue>& tau) {
    GrowthCondition c;
    c.name = std::move(name);
    c.report = power_dominates_values(tau, lmin, d_max);
    c.d = c.report.d;
    rep.conditions.push_back(std::move(c));
  };
  run("p <~ l_min", dims);
  run("theta*p <~ l_min", theta_dims);
  run("l_max <~ l_min", lmax);
  const bool h = rep.conditions[0].holds();
  for (const auto& c : rep.conditions) {
    if (c.holds() != h) rep.consistent = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Enumeration of X = ∪ {z} × {1..p_z} × {1..p_z}

struct BlockIndex {
  Index z = 0;
  std::uint64_t i = 0;
  std::uint64_t j = 0;

  friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

/// γ(z_r, i, j) = p_{z_1}² + ... + p_{z_{r-1}}² + (i - 1) + (j - 1)p_{z_r} + 1
/// with z_1, z_2, ... the ϑ-order.
class BlockEnumeration {
 public:
  BlockEnumeration(const DimensionSequence& p, const Enumeration& theta) {
    const auto& ints = p.integers();
    order_ = detail::theta_order(theta, ints.size());
    dims_ = ints;
    offset_.assign(ints.size(), 0);
    std::uint64_t total = 0;
    for (Index z : order_) {
      offset_[z - 1] = total;
      std::uint64_t sq = 0;
      const std::uint64_t pz = ints[z - 1];
      if (__builtin_mul_overflow(pz, pz, &sq) ||
          __builtin_add_overflow(total, sq, &total)) {
        throw DomainError("sum of squared dimensions overflows 64 bits");
      }
    }
    total_ = total;
  }

  std::uint64_t total() const { return total_; }
  const std::vector<Index>& order() const { return order_; }

  /// Ranks taken by block z: [first(z), last(z)].
  std::uint64_t first(Index z) const { return offset_.at(z - 1) + 1; }
  std::uint64_t last(Index z) const {
    return offset_.at(z - 1) + dims_.at(z - 1) * dims_.at(z - 1);
  }

  std::uint64_t forward(const BlockIndex& x) const {
    if (x.z == 0 || x.z > dims_.size()) throw DomainError("block out of range");
    const std::uint64_t pz = dims_[x.z - 1];
    if (x.i == 0 || x.j == 0 || x.i > pz || x.j > pz) {
      throw DomainError("entry out of range");
    }
    return offset_[x.z - 1] + (x.i - 1) + (x.j - 1) * pz + 1;
  }

  BlockIndex inverse(std::uint64_t r) const {
    if (r == 0 || r > total_) throw DomainError("rank out of range");
    // binary search over blocks in ϑ-order
    std::size_t lo = 0, hi = order_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (offset_[order_[mid] - 1] < r) lo = mid; else hi = mid;
    }
    const Index z = order_[lo];
    const std::uint64_t pz = dims_[z - 1];
    const std::uint64_t local = r - offset_[z - 1] - 1;
    return {z, local % pz + 1, local / pz + 1};
  }

  /// Exhaustive: every (z, i, j) hits a distinct rank in 1..total and the
  /// inverse recovers it.
  bool verify_bijection(std::uint64_t limit = 100'000'000) const {
    if (total_ > limit) {
      throw DomainError("block enumeration too large for exhaustive check");
    }
    std::vector<bool> hit(total_, false);
    for (Index z = 1; z <= dims_.size(); ++z) {
      const std::uint64_t pz = dims_[z - 1];
      for (std::uint64_t j = 1; j <= pz; ++j) {
        for (std::uint64_t i = 1; i <= pz; ++i) {
          const BlockIndex x{z, i, j};
          const std::uint64_t r = forward(x);
          if (r == 0 || r > total_ || hit[r - 1]) return false;
          hit[r - 1] = true;
          if (!(inverse(r) == x)) return false;
        }
      }
    }
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  }

 private:
  std::vector<std::uint64_t> dims_;
  std::vector<std::uint64_t> offset_;
  std::vector<Index> order_;
  std::uint64_t total_ = 0;
};

inline BlockEnumeration gamma_block_enumeration(const DimensionSequence& p,
                                                const Enumeration& theta) {
  return BlockEnumeration(p, theta);
}

// ---------------------------------------------------------------------------
// Reordering of dimension sequences

/// A run of `count` copies of `value`; padding runs were inserted.
struct Run {
  LogValue value;
  LogValue count;
  bool padding = false;
};

struct PaddedPrefix {
  std::vector<Run> runs;
  bool verified = false;  // p_k <= p_1 + ... + p_{k-1} for every k >= 2

  /// Number of entries, as a LogValue (it can be astronomically large).
  LogValue length() const {
    std::vector<LogValue> c;
    for (const auto& r : runs) c.push_back(r.count);
    return log_sum(c);
  }

  /// Materialized entries; throws when there are more than `limit`.
  std::vector<LogValue> expand(std::size_t limit = 10'000'000) const {
    std::vector<LogValue> out;
    for (const auto& r : runs) {
      const double c = r.count.to_double();
      if (!(c <= static_cast<double>(limit - out.size()))) {
        throw DomainError("padded prefix too long to expand");
      }
      out.insert(out.end(), static_cast<std::size_t>(std::llround(c)), r.value);
    }
    return out;
  }
};

/// Inserts copies of the repeated value before each entry that exceeds the
/// sum of everything before it. Entry 1 is exempt. Counts are exact integers
/// while they fit in a double mantissa.
inline PaddedPrefix reorder_with_padding(
    const std::vector<LogValue>& entries,
    const std::optional<LogValue>& repeated) {
  if (!repeated || repeated->is_zero()) {
    throw DomainError("padding needs a declared repeated value");
  }
  PaddedPrefix out;
  LogValue sum;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const LogValue pk = entries[k];
    if (k > 0 && approx::greater(pk, sum)) {
      LogValue count = difference(pk, sum) / *repeated;
      if (count.log() < std::log(expr::kExactIntegerLimit)) {
        count = LogValue::from_double(std::ceil(count.to_double() - 1e-9));
      }
      out.runs.push_back({*repeated, count, true});
      sum = sum + count * *repeated;
    }
    out.runs.push_back({pk, LogValue::one(), false});
    sum = sum + pk;
  }
  // Check run by run. Inside a run of equal values the first copy is the
  // binding one, since the running sum only grows.
  bool ok = true;
  LogValue prefix;
  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    const Run& run = out.runs[r];
    if (r > 0 && !approx::less_equal(run.value, prefix)) ok = false;
    prefix = prefix + run.count * run.value;
  }
  out.verified = ok;
  return out;
}

/// Is p_k <= C(p_1 + ... + p_{k-1})^d for every k >= 2?
inline std::optional<std::size_t> growth_violation(
    const std::vector<LogValue>& p, double c, double d) {
  LogValue sum;
  const LogValue cc = LogValue::from_double(c);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0 && !approx::less_equal(p[k], cc * sum.pow(d))) return k + 1;
    sum = sum + p[k];
  }
  return std::nullopt;
}

/// Sorts p into nondecreasing order and re-verifies the growth inequality
/// with the same C and d. Throws ContractError when either check fails.
inline std::vector<LogValue> nondecreasing_reorder(std::vector<LogValue> p,
                                                   double c, double d) {
  if (!(c > 0.0) || !(d >= 0.0)) {
    throw DomainError("growth constants must satisfy C > 0, d >= 0");
  }
  if (auto k = growth_violation(p, c, d)) {
    throw ContractError("growth inequality fails at position " +
                        std::to_string(*k) + " before reordering");
  }
  std::stable_sort(p.begin(), p.end());
  if (auto k = growth_violation(p, c, d)) {
    throw ContractError("growth inequality fails at position " +
                        std::to_string(*k) + " after reordering");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Standard Schwartz classification

struct StandardSchwartzReport {
  GrowthReport growth;
  std::optional<BlockEnumeration> gamma;
  bool sandwich = false;            // ℓ_min(z) <= γ <= ℓ_max(z)² on X
  std::optional<int> gamma_power;   // least d with γ <~ ℓ_min^d

  bool standard() const { return growth.holds() && gamma && sandwich; }
};

/// Runs the growth check and, when it holds, builds γ and checks
/// σ_min <= γ <= σ_max² on the whole prefix of X. γ runs through a
/// contiguous range on each block while σ_min, σ_max are constant there, so
/// comparing block endpoints covers every entry.
inline StandardSchwartzReport standard_schwartz_classify(
    const DimensionSequence& p, const Enumeration& theta, int d_max = 8) {
  StandardSchwartzReport rep;
  rep.growth = growth_condition_check(p, theta, d_max);
  if (!rep.growth.holds() || !p.machine_integers()) return rep;
  rep.gamma.emplace(p, theta);
  const auto ell = ell_min_max(p, theta);
  bool ok = true;
  std::vector<LogValue> top, lmin;
  for (Index z : rep.gamma->order()) {
    const LogValue lo = LogValue::from_double(static_cast<double>(rep.gamma->first(z)));
    const LogValue hi = LogValue::from_double(static_cast<double>(rep.gamma->last(z)));
    if (!approx::less_equal(ell.min[z - 1], lo)) ok = false;
    if (!approx::less_equal(hi, ell.max[z - 1].pow(2.0))) ok = false;
    top.push_back(hi);
    lmin.push_back(ell.min[z - 1]);
  }
  rep.sandwich = ok;
  rep.gamma_power = power_dominates_values(top, lmin, d_max).d;
  return rep;
}

}  // namespace scalekit
