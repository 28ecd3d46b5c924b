#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace scalekit {

using Complex = std::complex<double>;

/// A finitely supported complex function on an ordered index set.
/// Absent keys are zero; exact zeros are never stored.
template <class Key>
class FinSupp {
 public:
  using key_type = Key;

  FinSupp() = default;

  static FinSupp delta(const Key& x, Complex v = 1.0) {
    FinSupp f;
    f.set(x, v);
    return f;
  }

  void set(const Key& x, Complex v) {
    if (v == Complex(0.0)) {
      entries_.erase(x);
    } else {
      entries_[x] = v;
    }
  }

  Complex operator()(const Key& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? Complex(0.0) : it->second;
  }

  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }
  const std::map<Key, Complex>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<Key> support() const {
    std::vector<Key> s;
    s.reserve(entries_.size());
    for (const auto& [k, v] : entries_) s.push_back(k);
    return s;
  }

  /// Largest |f(x)|.
  double sup_abs() const {
    double m = 0.0;
    for (const auto& [k, v] : entries_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Sum of |f(x)|.
  double l1_abs() const {
    double s = 0.0;
    for (const auto& [k, v] : entries_) s += std::abs(v);
    return s;
  }

  friend FinSupp operator+(const FinSupp& a, const FinSupp& b) {
    FinSupp out = a;
    for (const auto& [k, v] : b.entries_) out.set(k, out(k) + v);
    return out;
  }

  friend FinSupp operator-(const FinSupp& a, const FinSupp& b) {
    FinSupp out = a;
    for (const auto& [k, v] : b.entries_) out.set(k, out(k) - v);
    return out;
  }

  friend FinSupp operator*(Complex c, const FinSupp& a) {
    FinSupp out;
    for (const auto& [k, v] : a.entries_) out.set(k, c * v);
    return out;
  }

  friend bool operator==(const FinSupp& a, const FinSupp& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::map<Key, Complex> entries_;
};

/// Entrywise product; the support is the intersection of the supports.
template <class Key>
FinSupp<Key> pointwise_mul(const FinSupp<Key>& f, const FinSupp<Key>& g) {
  FinSupp<Key> out;
  const auto& small = f.support_size() <= g.support_size() ? f : g;
  const auto& large = f.support_size() <= g.support_size() ? g : f;
  for (const auto& [k, v] : small) {
    const Complex w = large(k);
    if (w != Complex(0.0)) out.set(k, v * w);
  }
  return out;
}

}  // namespace scalekit
