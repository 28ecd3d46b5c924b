#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>

#include "scalekit/errors.hpp"

namespace scalekit {

/// Relative tolerance used for every log-domain comparison.
inline constexpr double kLogTolerance = 1e-9;

/// A nonnegative extended real stored as the natural log of its magnitude.
///
/// Values such as e^{k^k} are representable as long as the logarithm itself
/// fits in a double. Exact zero is carried by a flag so that sums and
/// products with zero stay exact.
class LogValue {
 public:
  /// Zero.
  constexpr LogValue() = default;

  static constexpr LogValue zero() { return LogValue{}; }
  static constexpr LogValue one() { return from_log(0.0); }

  static constexpr LogValue from_log(double log_mag) {
    LogValue v;
    v.zero_ = false;
    v.log_mag_ = log_mag;
    return v;
  }

  static LogValue from_double(double value) {
    if (std::isnan(value) || value < 0.0) {
      throw DomainError("LogValue cannot hold a negative or NaN value");
    }
    if (value == 0.0) return zero();
    return from_log(std::log(value));
  }

  constexpr bool is_zero() const { return zero_; }

  /// Natural log of the value; -inf for zero.
  double log() const {
    return zero_ ? -std::numeric_limits<double>::infinity() : log_mag_;
  }

  /// Linear value; saturates to +inf when the magnitude exceeds double range.
  double to_double() const { return zero_ ? 0.0 : std::exp(log_mag_); }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.zero_ || b.zero_) return zero();
    return from_log(a.log_mag_ + b.log_mag_);
  }

  friend LogValue operator/(LogValue a, LogValue b) {
    if (b.zero_) throw DomainError("LogValue division by zero");
    if (a.zero_) return zero();
    return from_log(a.log_mag_ - b.log_mag_);
  }

  // log-sum-exp
  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.zero_) return b;
    if (b.zero_) return a;
    const double hi = std::max(a.log_mag_, b.log_mag_);
    const double lo = std::min(a.log_mag_, b.log_mag_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  LogValue& operator+=(LogValue o) { return *this = *this + o; }
  LogValue& operator*=(LogValue o) { return *this = *this * o; }
  LogValue& operator/=(LogValue o) { return *this = *this / o; }

  /// a - b for a >= b. A negative difference within tolerance clamps to zero.
  friend LogValue difference(LogValue a, LogValue b) {
    if (b.zero_) return a;
    if (a.zero_) {
      throw DomainError("LogValue difference would be negative");
    }
    const double gap = b.log_mag_ - a.log_mag_;
    if (gap >= 0.0) {
      if (gap <= kLogTolerance * std::max(1.0, std::abs(a.log_mag_))) {
        return zero();
      }
      throw DomainError("LogValue difference would be negative");
    }
    // log(a - b) = log a + log(1 - e^{gap})
    return from_log(a.log_mag_ + std::log(-std::expm1(gap)));
  }

  LogValue pow(double exponent) const {
    if (zero_) {
      if (exponent > 0.0) return zero();
      if (exponent == 0.0) return one();
      throw DomainError("LogValue zero raised to a negative power");
    }
    return from_log(log_mag_ * exponent);
  }

  LogValue sqrt() const { return pow(0.5); }

  /// Exact ordering on the stored representation.
  friend bool operator<(LogValue a, LogValue b) {
    if (b.zero_) return false;
    if (a.zero_) return true;
    return a.log_mag_ < b.log_mag_;
  }
  friend bool operator>(LogValue a, LogValue b) { return b < a; }
  friend bool operator<=(LogValue a, LogValue b) { return !(b < a); }
  friend bool operator>=(LogValue a, LogValue b) { return !(a < b); }
  friend bool operator==(LogValue a, LogValue b) {
    return a.zero_ == b.zero_ && (a.zero_ || a.log_mag_ == b.log_mag_);
  }

 private:
  bool zero_ = true;
  double log_mag_ = 0.0;
};

inline LogValue max(LogValue a, LogValue b) { return a < b ? b : a; }
inline LogValue min(LogValue a, LogValue b) { return a < b ? a : b; }

/// Tolerance-aware comparisons in the log domain.
namespace approx {

inline double tolerance_for(LogValue a, LogValue b, double rel) {
  double scale = 1.0;
  if (!a.is_zero()) scale = std::max(scale, std::abs(a.log()));
  if (!b.is_zero()) scale = std::max(scale, std::abs(b.log()));
  return rel * scale;
}

/// a > b by more than the log-domain tolerance.
inline bool greater(LogValue a, LogValue b, double rel = kLogTolerance) {
  if (a.is_zero()) return false;
  if (b.is_zero()) return true;
  return a.log() - b.log() > tolerance_for(a, b, rel);
}

inline bool less_equal(LogValue a, LogValue b, double rel = kLogTolerance) {
  return !greater(a, b, rel);
}

inline bool equal(LogValue a, LogValue b, double rel = kLogTolerance) {
  return !greater(a, b, rel) && !greater(b, a, rel);
}

}  // namespace approx

/// Accurate sum of many log-domain terms: shift by the largest log and
/// accumulate with Neumaier compensation.
inline LogValue log_sum(std::span<const LogValue> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (!t.is_zero()) hi = std::max(hi, t.log());
  }
  if (!std::isfinite(hi)) return LogValue::zero();
  double sum = 0.0;
  double comp = 0.0;
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    const double x = std::exp(t.log() - hi);
    const double s = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - s) + x;
    } else {
      comp += (x - s) + sum;
    }
    sum = s;
  }
  return LogValue::from_log(hi + std::log(sum + comp));
}

inline std::string to_string(LogValue v) {
  if (v.is_zero()) return "0";
  if (std::abs(v.log()) < 690.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v.to_double());
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "exp(%.12g)", v.log());
  return buf;
}

}  // namespace scalekit
