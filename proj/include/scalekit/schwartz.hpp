#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/random.hpp"
#include "scalekit/scale.hpp"

namespace scalekit {

/// Element of c_f(X) with X coded by positive integers.
using FinSuppVector = FinSupp<Index>;

namespace detail {

inline void check_support(const FinSuppVector& phi,
                          std::optional<Index> prefix_length) {
  if (!prefix_length) return;
  for (const auto& [x, v] : phi) {
    if (x == 0 || x > *prefix_length) {
      throw DomainError("support index " + std::to_string(x) +
                        " outside the evaluated prefix");
    }
  }
}

}  // namespace detail

/// Σ_x σ_n(x)|φ(x)|.
inline LogValue norm_l1(const FinSuppVector& phi, const ScaleFamily& sigma,
                        int n, std::optional<Index> prefix_length = {}) {
  detail::check_support(phi, prefix_length);
  std::vector<LogValue> terms;
  terms.reserve(phi.support_size());
  for (const auto& [x, v] : phi) {
    terms.push_back(sigma[n].eval(x) * LogValue::from_double(std::abs(v)));
  }
  return log_sum(terms);
}

/// max_x σ_n(x)|φ(x)|.
inline LogValue norm_sup(const FinSuppVector& phi, const ScaleFamily& sigma,
                         int n, std::optional<Index> prefix_length = {}) {
  detail::check_support(phi, prefix_length);
  LogValue m;
  for (const auto& [x, v] : phi) {
    m = max(m, sigma[n].eval(x) * LogValue::from_double(std::abs(v)));
  }
  return m;
}

/// Random element: support size uniform in 1..max_support, positions
/// uniform in 1..K, complex Gaussian values.
inline FinSuppVector random_fin_supp(Rng& rng, Index k,
                                     std::size_t max_support = 20) {
  FinSuppVector f;
  const auto size = uniform_int(rng, 1, max_support);
  for (std::uint64_t i = 0; i < size; ++i) {
    f.set(uniform_int(rng, 1, k), complex_gaussian(rng));
  }
  if (f.is_zero()) f.set(1, 1.0);
  return f;
}

struct IdealRatio {
  int n = 0;
  double worst_l1 = 0.0;   // max ‖fg‖¹_n / (‖f‖¹_n‖g‖_∞)
  double worst_sup = 0.0;  // max ‖fg‖^∞_n / (‖f‖^∞_n‖g‖_∞)
};

struct IdealCheckReport {
  std::uint64_t seed = 0;
  int trials = 0;
  Index k = 0;
  std::vector<IdealRatio> per_n;

  double worst() const {
    double w = 0.0;
    for (const auto& r : per_n) w = std::max({w, r.worst_l1, r.worst_sup});
    return w;
  }
};

/// Random trials of ‖fg‖_n <= ‖f‖_n‖g‖_∞ in both the ℓ¹ and sup norms.
inline IdealCheckReport ideal_inequality_check(const ScaleFamily& sigma,
                                               int trials, Index k,
                                               std::uint64_t seed) {
  IdealCheckReport rep;
  rep.seed = seed;
  rep.trials = trials;
  rep.k = k;
  Rng rng(seed);
  for (int n = 0; n <= sigma.max_index(); ++n) rep.per_n.push_back({n, 0, 0});
  for (int t = 0; t < trials; ++t) {
    const auto f = random_fin_supp(rng, k);
    const auto g = random_fin_supp(rng, k);
    const auto fg = pointwise_mul(f, g);
    const LogValue g_inf = LogValue::from_double(g.sup_abs());
    for (auto& r : rep.per_n) {
      const LogValue a = norm_l1(fg, sigma, r.n);
      const LogValue b = norm_l1(f, sigma, r.n) * g_inf;
      r.worst_l1 = std::max(r.worst_l1, (a / b).to_double());
      const LogValue c = norm_sup(fg, sigma, r.n);
      const LogValue d = norm_sup(f, sigma, r.n) * g_inf;
      r.worst_sup = std::max(r.worst_sup, (c / d).to_double());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Fourier seminorms on the circle.

using FourierVector = FinSupp<std::int64_t>;

struct FourierDemo {
  double lhs = 0.0;          // sup_k |k^i φ̂(k)|
  double rhs = 0.0;          // grid max of |∂^i φ|
  double error_bound = 0.0;  // max gap between the grid max and the true sup
  bool holds = false;        // lhs <= rhs + error_bound
};

/// Compares the coefficient seminorm with a sampled sup of the i-th
/// derivative of φ(θ) = Σ φ̂(k) e^{ikθ}.
inline FourierDemo fourier_seminorm_demo(const FourierVector& phi_hat, int i,
                                         int grid) {
  if (i < 0) throw DomainError("derivative order must be nonnegative");
  std::int64_t kmax = 0;
  for (const auto& [k, v] : phi_hat) kmax = std::max(kmax, k < 0 ? -k : k);
  if (grid < 4 * kmax || grid < 1) {
    throw DomainError("grid must have at least 4 points per unit frequency");
  }
  FourierDemo d;
  double lipschitz = 0.0;
  std::vector<std::pair<double, Complex>> coeffs;  // (k, (ik)^i φ̂(k))
  for (const auto& [k, v] : phi_hat) {
    const double ak = std::abs(static_cast<double>(k));
    d.lhs = std::max(d.lhs, std::pow(ak, i) * std::abs(v));
    lipschitz += std::pow(ak, i + 1) * std::abs(v);
    Complex c = v;
    for (int r = 0; r < i; ++r) c *= Complex(0.0, static_cast<double>(k));
    coeffs.emplace_back(static_cast<double>(k), c);
  }
  for (int j = 0; j < grid; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / grid;
    Complex s = 0.0;
    for (const auto& [k, c] : coeffs) s += c * std::polar(1.0, k * theta);
    d.rhs = std::max(d.rhs, std::abs(s));
  }
  d.error_bound = std::numbers::pi / grid * lipschitz;
  d.holds = d.lhs <= d.rhs + d.error_bound + 1e-12 * std::max(1.0, d.lhs);
  return d;
}

}  // namespace scalekit
