#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/log_value.hpp"

namespace scalekit {

enum class ExprOp {
  kConst,
  kK,
  kN,
  kAdd,
  kMul,
  kDiv,
  kPow,
  kSqrt,
  kExp,
  kLog,
  kFloor,
  kTable,
  kEnum
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Node of the scale grammar. Values are nonnegative reals in the free
/// variable k >= 1 and, for families, the member index n.
struct Expr {
  ExprOp op = ExprOp::kConst;
  LogValue value;                // kConst
  std::vector<ExprPtr> args;     // operands
  std::shared_ptr<const std::map<Index, double>> table;  // kTable
  EnumerationPtr enumeration;    // kEnum
};

namespace expr {

inline ExprPtr constant(LogValue v) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::kConst;
  e->value = v;
  return e;
}
inline ExprPtr constant(double v) { return constant(LogValue::from_double(v)); }

inline ExprPtr var_k() {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::kK;
  return e;
}

inline ExprPtr var_n() {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::kN;
  return e;
}

inline ExprPtr node(ExprOp op, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = std::move(args);
  return e;
}

inline ExprPtr add(ExprPtr a, ExprPtr b) { return node(ExprOp::kAdd, {a, b}); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return node(ExprOp::kMul, {a, b}); }
inline ExprPtr div(ExprPtr a, ExprPtr b) { return node(ExprOp::kDiv, {a, b}); }
inline ExprPtr pow(ExprPtr a, ExprPtr b) { return node(ExprOp::kPow, {a, b}); }
inline ExprPtr sqrt(ExprPtr a) { return node(ExprOp::kSqrt, {a}); }
inline ExprPtr exp(ExprPtr a) { return node(ExprOp::kExp, {a}); }
inline ExprPtr log(ExprPtr a) { return node(ExprOp::kLog, {a}); }
inline ExprPtr floor(ExprPtr a) { return node(ExprOp::kFloor, {a}); }

/// Tabulated values, keyed by index. Dense tables start at index 1.
inline ExprPtr table(std::map<Index, double> values) {
  for (const auto& [k, v] : values) {
    if (k == 0) throw DomainError("table index 0");
    if (!(v >= 0.0) || std::isinf(v)) {
      throw DomainError("table values must be finite and nonnegative");
    }
  }
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::kTable;
  e->table = std::make_shared<const std::map<Index, double>>(std::move(values));
  return e;
}

inline ExprPtr table(const std::vector<double>& dense) {
  std::map<Index, double> m;
  for (std::size_t i = 0; i < dense.size(); ++i) m.emplace(i + 1, dense[i]);
  return table(std::move(m));
}

/// The rank function of an enumeration, as a scale.
inline ExprPtr enumeration(EnumerationPtr e) {
  if (!e) throw DomainError("null enumeration");
  auto out = std::make_shared<Expr>();
  out->op = ExprOp::kEnum;
  out->enumeration = std::move(e);
  return out;
}

/// Replaces every occurrence of n by the constant `n`.
inline ExprPtr bind_n(const ExprPtr& e, int n) {
  if (e->op == ExprOp::kN) return constant(static_cast<double>(n));
  if (e->args.empty()) return e;
  auto out = std::make_shared<Expr>(*e);
  for (auto& a : out->args) a = bind_n(a, n);
  return out;
}

inline bool depends_on_n(const Expr& e) {
  if (e.op == ExprOp::kN) return true;
  return std::any_of(e.args.begin(), e.args.end(),
                     [](const ExprPtr& a) { return depends_on_n(*a); });
}

/// True when the expression can be evaluated at every positive index, not
/// only on a stored prefix.
inline bool is_total(const Expr& e) {
  if (e.op == ExprOp::kTable) return false;
  if (e.op == ExprOp::kEnum && !e.enumeration->is_identity() &&
      e.enumeration->domain_size()) {
    return false;
  }
  return std::all_of(e.args.begin(), e.args.end(),
                     [](const ExprPtr& a) { return is_total(*a); });
}

// Largest magnitude at which doubles still resolve integers.
inline constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53

inline LogValue floor_value(LogValue v) {
  if (v.is_zero()) return v;
  if (v.log() >= std::log(kExactIntegerLimit)) return v;
  return LogValue::from_double(std::floor(v.to_double()));
}

/// Evaluates at index k. Throws DomainError for an unbound n, an index
/// outside a table, or a value leaving the log-domain range.
inline LogValue evaluate(const Expr& e, Index k,
                         std::optional<int> n = std::nullopt) {
  switch (e.op) {
    case ExprOp::kConst:
      return e.value;
    case ExprOp::kK:
      return LogValue::from_double(static_cast<double>(k));
    case ExprOp::kN:
      if (!n) throw DomainError("family index n is not bound");
      return LogValue::from_double(static_cast<double>(*n));
    case ExprOp::kAdd:
      return evaluate(*e.args[0], k, n) + evaluate(*e.args[1], k, n);
    case ExprOp::kMul:
      return evaluate(*e.args[0], k, n) * evaluate(*e.args[1], k, n);
    case ExprOp::kDiv:
      return evaluate(*e.args[0], k, n) / evaluate(*e.args[1], k, n);
    case ExprOp::kPow: {
      const LogValue base = evaluate(*e.args[0], k, n);
      const double q = evaluate(*e.args[1], k, n).to_double();
      if (std::isinf(q)) throw DomainError("exponent out of range");
      return base.pow(q);
    }
    case ExprOp::kSqrt:
      return evaluate(*e.args[0], k, n).sqrt();
    case ExprOp::kExp: {
      const double x = evaluate(*e.args[0], k, n).to_double();
      if (std::isinf(x)) throw DomainError("exp argument out of range");
      return LogValue::from_log(x);
    }
    case ExprOp::kLog: {
      const LogValue y = evaluate(*e.args[0], k, n);
      if (y.is_zero() || y.log() < 0.0) {
        throw DomainError("log of a value below 1");
      }
      return LogValue::from_double(y.log());
    }
    case ExprOp::kFloor:
      return floor_value(evaluate(*e.args[0], k, n));
    case ExprOp::kTable: {
      auto it = e.table->find(k);
      if (it == e.table->end()) {
        throw DomainError("index " + std::to_string(k) +
                          " outside tabulated data");
      }
      return LogValue::from_double(it->second);
    }
    case ExprOp::kEnum:
      return LogValue::from_double(
          static_cast<double>(e.enumeration->forward(k)));
  }
  return LogValue::zero();
}

// ---------------------------------------------------------------------------
// Power bounds c·k^a valid for every k >= 1.

struct PowerBound {
  double log_c = 0.0;  // -inf encodes the zero bound
  double exponent = 0.0;
};

struct PowerBounds {
  std::optional<PowerBound> upper;
  std::optional<PowerBound> lower;
};

namespace detail {

inline PowerBound times(PowerBound a, PowerBound b) {
  return {a.log_c + b.log_c, a.exponent + b.exponent};
}

inline PowerBound over(PowerBound a, PowerBound b) {
  return {a.log_c - b.log_c, a.exponent - b.exponent};
}

inline PowerBound raise(PowerBound a, double q) {
  return {a.log_c * q, a.exponent * q};
}

inline bool usable_lower(const std::optional<PowerBound>& b) {
  return b && std::isfinite(b->log_c);
}

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace detail

inline PowerBounds power_bounds(const Expr& e) {
  using detail::usable_lower;
  PowerBounds out;
  switch (e.op) {
    case ExprOp::kConst:
      if (e.value.is_zero()) {
        out.upper = PowerBound{-std::numeric_limits<double>::infinity(), 0.0};
      } else {
        out.upper = out.lower = PowerBound{e.value.log(), 0.0};
      }
      return out;
    case ExprOp::kK:
      out.upper = out.lower = PowerBound{0.0, 1.0};
      return out;
    case ExprOp::kN:
      return out;
    case ExprOp::kAdd: {
      const auto a = power_bounds(*e.args[0]);
      const auto b = power_bounds(*e.args[1]);
      if (a.upper && b.upper) {
        out.upper = PowerBound{detail::log_add(a.upper->log_c, b.upper->log_c),
                               std::max(a.upper->exponent, b.upper->exponent)};
      }
      if (usable_lower(a.lower) && usable_lower(b.lower)) {
        const bool pick_a =
            a.lower->exponent > b.lower->exponent ||
            (a.lower->exponent == b.lower->exponent &&
             a.lower->log_c >= b.lower->log_c);
        out.lower = pick_a ? a.lower : b.lower;
      } else if (usable_lower(a.lower)) {
        out.lower = a.lower;
      } else if (usable_lower(b.lower)) {
        out.lower = b.lower;
      }
      return out;
    }
    case ExprOp::kMul: {
      const auto a = power_bounds(*e.args[0]);
      const auto b = power_bounds(*e.args[1]);
      if (a.upper && b.upper) out.upper = detail::times(*a.upper, *b.upper);
      if (usable_lower(a.lower) && usable_lower(b.lower)) {
        out.lower = detail::times(*a.lower, *b.lower);
      }
      return out;
    }
    case ExprOp::kDiv: {
      const auto a = power_bounds(*e.args[0]);
      const auto b = power_bounds(*e.args[1]);
      if (a.upper && usable_lower(b.lower)) {
        out.upper = detail::over(*a.upper, *b.lower);
      }
      if (usable_lower(a.lower) && b.upper && std::isfinite(b.upper->log_c)) {
        out.lower = detail::over(*a.lower, *b.upper);
      }
      return out;
    }
    case ExprOp::kPow: {
      const Expr& q_expr = *e.args[1];
      if (q_expr.op != ExprOp::kConst) return out;
      const double q = q_expr.value.to_double();
      if (q == 0.0) {
        out.upper = out.lower = PowerBound{0.0, 0.0};
        return out;
      }
      const auto a = power_bounds(*e.args[0]);
      if (a.upper) out.upper = detail::raise(*a.upper, q);
      if (usable_lower(a.lower)) out.lower = detail::raise(*a.lower, q);
      return out;
    }
    case ExprOp::kSqrt: {
      const auto a = power_bounds(*e.args[0]);
      if (a.upper) out.upper = detail::raise(*a.upper, 0.5);
      if (usable_lower(a.lower)) out.lower = detail::raise(*a.lower, 0.5);
      return out;
    }
    case ExprOp::kExp: {
      const auto a = power_bounds(*e.args[0]);
      if (a.upper && a.upper->exponent <= 0.0) {
        const double c = std::exp(a.upper->log_c);
        out.upper = PowerBound{c, 0.0};
      }
      if (usable_lower(a.lower)) {
        if (a.lower->exponent > 0.0) {
          // e^x >= x^j / j!
          const double j =
              std::min(20.0, std::ceil(4.0 / a.lower->exponent));
          PowerBound b = detail::raise(*a.lower, j);
          b.log_c -= std::lgamma(j + 1.0);
          out.lower = b;
        } else if (a.lower->exponent == 0.0) {
          out.lower = PowerBound{std::exp(a.lower->log_c), 0.0};
        } else {
          out.lower = PowerBound{0.0, 0.0};
        }
      } else {
        out.lower = PowerBound{0.0, 0.0};
      }
      return out;
    }
    case ExprOp::kLog: {
      // ln y <= (4/e) y^{1/4}
      const auto a = power_bounds(*e.args[0]);
      if (a.upper) {
        PowerBound b = detail::raise(*a.upper, 0.25);
        b.log_c += std::log(4.0) - 1.0;
        out.upper = b;
      }
      return out;
    }
    case ExprOp::kFloor: {
      const auto a = power_bounds(*e.args[0]);
      out.upper = a.upper;
      if (usable_lower(a.lower) && a.lower->log_c >= 0.0 &&
          a.lower->exponent >= 0.0) {
        out.lower = PowerBound{a.lower->log_c - std::log(2.0),
                               a.lower->exponent};
      }
      return out;
    }
    case ExprOp::kTable:
      return out;
    case ExprOp::kEnum:
      if (e.enumeration->is_identity()) {
        out.upper = out.lower = PowerBound{0.0, 1.0};
      }
      return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monotonicity in k on k >= 1.

enum class Monotonicity { kConst, kNonDecreasing, kNonIncreasing, kUnknown };

namespace detail {

inline bool up(Monotonicity m) {
  return m == Monotonicity::kConst || m == Monotonicity::kNonDecreasing;
}
inline bool down(Monotonicity m) {
  return m == Monotonicity::kConst || m == Monotonicity::kNonIncreasing;
}

inline Monotonicity combine_same(Monotonicity a, Monotonicity b) {
  if (a == Monotonicity::kConst && b == Monotonicity::kConst) {
    return Monotonicity::kConst;
  }
  if (up(a) && up(b)) return Monotonicity::kNonDecreasing;
  if (down(a) && down(b)) return Monotonicity::kNonIncreasing;
  return Monotonicity::kUnknown;
}

inline Monotonicity flip(Monotonicity m) {
  if (m == Monotonicity::kNonDecreasing) return Monotonicity::kNonIncreasing;
  if (m == Monotonicity::kNonIncreasing) return Monotonicity::kNonDecreasing;
  return m;
}

}  // namespace detail

inline Monotonicity monotonicity(const Expr& e) {
  using detail::combine_same;
  switch (e.op) {
    case ExprOp::kConst:
    case ExprOp::kN:
      return Monotonicity::kConst;
    case ExprOp::kK:
      return Monotonicity::kNonDecreasing;
    case ExprOp::kAdd:
    case ExprOp::kMul:
      return combine_same(monotonicity(*e.args[0]), monotonicity(*e.args[1]));
    case ExprOp::kDiv:
      return combine_same(monotonicity(*e.args[0]),
                          detail::flip(monotonicity(*e.args[1])));
    case ExprOp::kPow: {
      const Expr& q = *e.args[1];
      const Monotonicity base = monotonicity(*e.args[0]);
      if (q.op == ExprOp::kConst || q.op == ExprOp::kN) {
        if (q.op == ExprOp::kConst && q.value.is_zero()) {
          return Monotonicity::kConst;
        }
        return base;
      }
      // b^q with b >= 1 nondecreasing and q nondecreasing
      const Monotonicity qm = monotonicity(q);
      if (detail::up(base) && detail::up(qm)) {
        try {
          if (evaluate(*e.args[0], 1, 0) >= LogValue::one()) {
            return combine_same(base, qm);
          }
        } catch (const Error&) {
        }
      }
      return Monotonicity::kUnknown;
    }
    case ExprOp::kSqrt:
    case ExprOp::kExp:
    case ExprOp::kLog:
    case ExprOp::kFloor:
      return monotonicity(*e.args[0]);
    case ExprOp::kTable:
      return Monotonicity::kUnknown;
    case ExprOp::kEnum:
      return e.enumeration->is_identity() ? Monotonicity::kNonDecreasing
                                          : Monotonicity::kUnknown;
  }
  return Monotonicity::kUnknown;
}

// ---------------------------------------------------------------------------

inline std::string to_string(const Expr& e) {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  switch (e.op) {
    case ExprOp::kConst:
      if (!e.value.is_zero() && std::abs(e.value.log()) > 700.0) {
        return "exp(" + num(e.value.log()) + ")";
      }
      return num(e.value.to_double());
    case ExprOp::kK:
      return "k";
    case ExprOp::kN:
      return "n";
    case ExprOp::kAdd:
      return "(" + to_string(*e.args[0]) + " + " + to_string(*e.args[1]) + ")";
    case ExprOp::kMul:
      return "(" + to_string(*e.args[0]) + " * " + to_string(*e.args[1]) + ")";
    case ExprOp::kDiv:
      return "(" + to_string(*e.args[0]) + " / " + to_string(*e.args[1]) + ")";
    case ExprOp::kPow:
      return "pow(" + to_string(*e.args[0]) + ", " + to_string(*e.args[1]) +
             ")";
    case ExprOp::kSqrt:
      return "sqrt(" + to_string(*e.args[0]) + ")";
    case ExprOp::kExp:
      return "exp(" + to_string(*e.args[0]) + ")";
    case ExprOp::kLog:
      return "log(" + to_string(*e.args[0]) + ")";
    case ExprOp::kFloor:
      return "floor(" + to_string(*e.args[0]) + ")";
    case ExprOp::kTable: {
      std::string s = "table[";
      bool first = true;
      for (const auto& [k, v] : *e.table) {
        if (!first) s += ",";
        first = false;
        s += std::to_string(k) + ":" + num(v);
      }
      return s + "]";
    }
    case ExprOp::kEnum:
      return "enum(" + e.enumeration->name() + ")";
  }
  return "?";
}

}  // namespace expr
}  // namespace scalekit
