#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/expr.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/parser.hpp"

namespace scalekit {

/// A function from positive indices to [1, inf) given by a closed
/// expression in k.
class Scale {
 public:
  explicit Scale(ExprPtr e) : expr_(std::move(e)) {
    if (!expr_) throw DomainError("null scale expression");
    if (expr::depends_on_n(*expr_)) {
      throw DomainError("a scale may not depend on n; bind it first");
    }
  }

  static Scale parse(std::string_view text,
                     const EnumerationRegistry& registry = {}) {
    return Scale(parse_expression(text, registry));
  }

  static Scale constant(double c) { return Scale(expr::constant(c)); }
  static Scale of(EnumerationPtr e) { return Scale(expr::enumeration(e)); }

  /// Value at k; throws DomainError below 1.
  LogValue eval(Index k) const {
    const LogValue v = expr::evaluate(*expr_, k);
    if (approx::greater(LogValue::one(), v)) {
      throw DomainError("scale value below 1 at index " + std::to_string(k) +
                        ": " + to_string(v));
    }
    return v;
  }

  std::vector<LogValue> eval(const Prefix& prefix) const {
    std::vector<LogValue> out;
    out.reserve(prefix.size());
    for (Index k : prefix) out.push_back(eval(k));
    return out;
  }

  const ExprPtr& expr() const { return expr_; }
  std::string text() const { return expr::to_string(*expr_); }
  bool is_total() const { return expr::is_total(*expr_); }

 private:
  ExprPtr expr_;
};

/// Pointwise product.
inline Scale scale_product(const Scale& a, const Scale& b) {
  return Scale(expr::mul(a.expr(), b.expr()));
}

/// Pointwise power a^d, d >= 0.
inline Scale scale_power(const Scale& a, double d) {
  if (!(d >= 0.0)) throw DomainError("scale power must be nonnegative");
  return Scale(expr::pow(a.expr(), expr::constant(d)));
}

/// An increasing sequence σ_0 <= σ_1 <= ... <= σ_N of scales.
class ScaleFamily {
 public:
  ScaleFamily() = default;

  explicit ScaleFamily(std::vector<Scale> members)
      : members_(std::move(members)) {
    if (members_.empty()) throw DomainError("empty scale family");
    sigma0_is_one_ = members_[0].expr()->op == ExprOp::kConst &&
                     members_[0].expr()->value == LogValue::one();
  }

  /// Members n = 0..N of an expression in k and n.
  static ScaleFamily from_expression(const ExprPtr& e, int max_n) {
    if (max_n < 0) throw DomainError("family size must be nonnegative");
    std::vector<Scale> members;
    members.reserve(static_cast<std::size_t>(max_n) + 1);
    for (int n = 0; n <= max_n; ++n) {
      members.emplace_back(expr::bind_n(e, n));
    }
    return ScaleFamily(std::move(members));
  }

  static ScaleFamily parse(std::string_view text, int max_n,
                           const EnumerationRegistry& registry = {}) {
    return from_expression(parse_expression(text, registry), max_n);
  }

  /// Powers σ^0 = 1, σ^1, ..., σ^N of one scale.
  static ScaleFamily powers(const Scale& sigma, int max_n) {
    std::vector<Scale> members;
    members.push_back(Scale::constant(1.0));
    for (int n = 1; n <= max_n; ++n) {
      members.push_back(n == 1 ? sigma : scale_power(sigma, n));
    }
    return ScaleFamily(std::move(members));
  }

  std::size_t size() const { return members_.size(); }
  int max_index() const { return static_cast<int>(members_.size()) - 1; }
  const Scale& operator[](std::size_t n) const {
    if (n >= members_.size()) {
      throw DomainError("family member " + std::to_string(n) +
                        " not available");
    }
    return members_[n];
  }
  const std::vector<Scale>& members() const { return members_; }
  bool sigma0_is_one() const { return sigma0_is_one_; }

  /// Throws DomainError unless σ_n <= σ_{n+1} on the prefix (tolerant).
  void check_increasing(const Prefix& prefix) const {
    for (Index k : prefix) {
      LogValue prev = members_[0].eval(k);
      for (std::size_t n = 1; n < members_.size(); ++n) {
        const LogValue cur = members_[n].eval(k);
        if (approx::greater(prev, cur)) {
          throw DomainError("family not increasing at index " +
                            std::to_string(k) + ", member " +
                            std::to_string(n));
        }
        prev = cur;
      }
    }
  }

 private:
  std::vector<Scale> members_;
  bool sigma0_is_one_ = false;
};

enum class StandardVariant { kPlain, kSquared, kSqrt };

/// Member n is γ_1⋯γ_n, its square, or its square root; member 0 is 1.
/// With fewer enumerations than members, the last one repeats.
inline ScaleFamily standard_family(const std::vector<EnumerationPtr>& gammas,
                                   StandardVariant variant, int max_n) {
  if (gammas.empty()) throw DomainError("standard family needs enumerations");
  const auto size0 = gammas.front()->domain_size();
  for (const auto& g : gammas) {
    if (!g) throw DomainError("null enumeration");
    if (g->domain_size() != size0) {
      throw DomainError("enumerations are defined on different prefixes");
    }
  }
  std::vector<Scale> members;
  members.push_back(Scale::constant(1.0));
  ExprPtr product;
  for (int n = 1; n <= max_n; ++n) {
    const auto& g = gammas[std::min<std::size_t>(n - 1, gammas.size() - 1)];
    ExprPtr factor = expr::enumeration(g);
    product = product ? expr::mul(product, factor) : factor;
    switch (variant) {
      case StandardVariant::kPlain:
        members.emplace_back(product);
        break;
      case StandardVariant::kSquared:
        members.emplace_back(expr::pow(product, expr::constant(2.0)));
        break;
      case StandardVariant::kSqrt:
        members.emplace_back(expr::sqrt(product));
        break;
    }
  }
  return ScaleFamily(std::move(members));
}

inline EnumerationPtr identity_enumeration() {
  static const EnumerationPtr id =
      std::make_shared<const Enumeration>(Enumeration::identity());
  return id;
}

}  // namespace scalekit
