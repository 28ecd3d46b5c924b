#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalekit/errors.hpp"
#include "scalekit/expr.hpp"
#include "scalekit/log_value.hpp"

namespace scalekit {

/// Block dimensions p_1..p_K. Small dimensions are kept as machine
/// integers; astronomically large ones only as LogValue, which is enough
/// for growth and blow-up analysis but not for building matrices.
class DimensionSequence {
 public:
  DimensionSequence() = default;

  static DimensionSequence from_integers(std::vector<std::uint64_t> dims) {
    DimensionSequence d;
    for (auto p : dims) {
      if (p == 0) throw DomainError("block dimensions must be at least 1");
      d.values_.push_back(LogValue::from_double(static_cast<double>(p)));
    }
    d.ints_ = std::move(dims);
    return d;
  }

  static DimensionSequence from_values(std::vector<LogValue> values) {
    DimensionSequence d;
    bool all_int = true;
    std::vector<std::uint64_t> ints;
    for (const auto& v : values) {
      if (approx::greater(LogValue::one(), v)) {
        throw DomainError("block dimensions must be at least 1");
      }
      if (all_int && v.log() < std::log(expr::kExactIntegerLimit)) {
        const double x = v.to_double();
        const double r = std::round(x);
        if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) {
          ints.push_back(static_cast<std::uint64_t>(r));
          continue;
        }
      }
      all_int = false;
    }
    d.values_ = std::move(values);
    if (all_int) d.ints_ = std::move(ints);
    return d;
  }

  /// p_z = ceil(e(z)) for z = 1..K. Past 2^53 the value is kept unrounded.
  static DimensionSequence from_expression(const ExprPtr& e, std::size_t k) {
    std::vector<LogValue> values;
    values.reserve(k);
    for (std::size_t z = 1; z <= k; ++z) {
      LogValue v = expr::evaluate(*e, z);
      if (!v.is_zero() && v.log() < std::log(expr::kExactIntegerLimit)) {
        v = LogValue::from_double(std::ceil(v.to_double() - 1e-9));
      }
      values.push_back(v);
    }
    DimensionSequence d = from_values(std::move(values));
    d.source_ = e;
    return d;
  }

  std::size_t size() const { return values_.size(); }
  LogValue value(std::size_t z) const { return values_.at(z - 1); }
  const std::vector<LogValue>& values() const { return values_; }

  bool machine_integers() const { return ints_.has_value(); }

  /// Integer dimension of block z; throws for LogValue-only sequences.
  std::uint64_t at(std::size_t z) const {
    if (!ints_) {
      throw DomainError("dimension sequence holds log-domain values only");
    }
    return ints_->at(z - 1);
  }
  const std::vector<std::uint64_t>& integers() const {
    if (!ints_) {
      throw DomainError("dimension sequence holds log-domain values only");
    }
    return *ints_;
  }

  /// Expression the sequence came from, when there is one.
  const ExprPtr& source() const { return source_; }

  DimensionSequence prefix(std::size_t k) const {
    if (k > size()) throw DomainError("prefix longer than sequence");
    DimensionSequence d;
    d.values_.assign(values_.begin(), values_.begin() + k);
    if (ints_) d.ints_.emplace(ints_->begin(), ints_->begin() + k);
    d.source_ = source_;
    return d;
  }

 private:
  std::vector<LogValue> values_;
  std::optional<std::vector<std::uint64_t>> ints_;
  ExprPtr source_;
};

}  // namespace scalekit
