#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/random.hpp"

namespace scalekit {

/// Dense square complex matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t p) : p_(p), a_(p * p, Complex(0.0)) {}

  static DenseMatrix identity(std::size_t p) {
    DenseMatrix m(p);
    for (std::size_t i = 0; i < p; ++i) m(i, i) = 1.0;
    return m;
  }

  /// e_{ij} with 1-based indices.
  static DenseMatrix unit(std::size_t p, std::size_t i, std::size_t j) {
    if (i < 1 || j < 1 || i > p || j > p) {
      throw DomainError("matrix unit index out of range");
    }
    DenseMatrix m(p);
    m(i - 1, j - 1) = 1.0;
    return m;
  }

  /// Ones in the first column.
  static DenseMatrix first_column_ones(std::size_t p) {
    DenseMatrix m(p);
    for (std::size_t i = 0; i < p; ++i) m(i, 0) = 1.0;
    return m;
  }

  static DenseMatrix random(Rng& rng, std::size_t p) {
    DenseMatrix m(p);
    for (auto& x : m.a_) x = complex_gaussian(rng);
    return m;
  }

  std::size_t size() const { return p_; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * p_ + j]; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return a_[i * p_ + j];
  }
  const std::vector<Complex>& data() const { return a_; }

  DenseMatrix adjoint() const {
    DenseMatrix m(p_);
    for (std::size_t i = 0; i < p_; ++i) {
      for (std::size_t j = 0; j < p_; ++j) m(j, i) = std::conj((*this)(i, j));
    }
    return m;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.p_ != b.p_) throw DomainError("matrix shape mismatch");
    DenseMatrix c(a.p_);
    for (std::size_t i = 0; i < a.p_; ++i) {
      for (std::size_t k = 0; k < a.p_; ++k) {
        const Complex x = a(i, k);
        if (x == Complex(0.0)) continue;
        for (std::size_t j = 0; j < a.p_; ++j) c(i, j) += x * b(k, j);
      }
    }
    return c;
  }

  friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.p_ != b.p_) throw DomainError("matrix shape mismatch");
    DenseMatrix c(a.p_);
    for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] = a.a_[i] + b.a_[i];
    return c;
  }

  friend DenseMatrix operator*(Complex s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (auto& x : c.a_) x *= s;
    return c;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.p_ == b.p_ && a.a_ == b.a_;
  }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(),
                       [](Complex x) { return x == Complex(0.0); });
  }

  double max_abs() const {
    double m = 0.0;
    for (auto x : a_) m = std::max(m, std::abs(x));
    return m;
  }

  double sum_abs() const {
    double s = 0.0;
    for (auto x : a_) s += std::abs(x);
    return s;
  }

 private:
  std::size_t p_ = 0;
  std::vector<Complex> a_;
};

struct OpNormOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

namespace detail {

inline double vec_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (auto x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline std::vector<Complex> apply(const DenseMatrix& a,
                                  const std::vector<Complex>& v) {
  const std::size_t p = a.size();
  std::vector<Complex> w(p, Complex(0.0));
  for (std::size_t i = 0; i < p; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += a(i, j) * v[j];
    w[i] = s;
  }
  return w;
}

inline std::vector<Complex> apply_adjoint(const DenseMatrix& a,
                                          const std::vector<Complex>& v) {
  const std::size_t p = a.size();
  std::vector<Complex> w(p, Complex(0.0));
  for (std::size_t i = 0; i < p; ++i) {
    const Complex x = v[i];
    if (x == Complex(0.0)) continue;
    for (std::size_t j = 0; j < p; ++j) w[j] += std::conj(a(i, j)) * x;
  }
  return w;
}

// Top singular pair by closed form when the nonzero pattern allows it.
inline std::optional<std::pair<double, std::vector<Complex>>>
top_singular_closed_form(const DenseMatrix& a) {
  const std::size_t p = a.size();
  std::vector<std::size_t> rows, cols;
  std::vector<bool> row_used(p, false), col_used(p, false);
  bool diagonal = true;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (a(i, j) == Complex(0.0)) continue;
      if (i != j) diagonal = false;
      if (!row_used[i]) rows.push_back(i), row_used[i] = true;
      if (!col_used[j]) cols.push_back(j), col_used[j] = true;
    }
  }
  std::vector<Complex> v(p, Complex(0.0));
  if (rows.empty()) {
    if (p > 0) v[0] = 1.0;
    return std::pair{0.0, v};
  }
  if (diagonal) {
    std::size_t best = rows[0];
    for (std::size_t i : rows) {
      if (std::abs(a(i, i)) > std::abs(a(best, best))) best = i;
    }
    v[best] = 1.0;
    return std::pair{std::abs(a(best, best)), v};
  }
  if (cols.size() == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += std::norm(a(i, cols[0]));
    v[cols[0]] = 1.0;
    return std::pair{std::sqrt(s), v};
  }
  if (rows.size() == 1) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += std::norm(a(rows[0], j));
    s = std::sqrt(s);
    for (std::size_t j = 0; j < p; ++j) v[j] = std::conj(a(rows[0], j)) / s;
    return std::pair{s, v};
  }
  return std::nullopt;
}

}  // namespace detail

/// Largest singular value with a unit right singular vector.
struct SingularPair {
  double value = 0.0;
  std::vector<Complex> right;
};

/// Closed forms for zero, diagonal, single-row and single-column matrices;
/// otherwise power iteration on AᴴA from the all-ones vector until the
/// eigen-residual is below tolerance·λ.
inline SingularPair top_singular(const DenseMatrix& a,
                                 const OpNormOptions& opt = {}) {
  if (auto c = detail::top_singular_closed_form(a)) {
    return {c->first, std::move(c->second)};
  }
  const std::size_t p = a.size();
  std::vector<Complex> v(p, Complex(1.0));
  auto step = [&](const std::vector<Complex>& x) {
    return detail::apply_adjoint(a, detail::apply(a, x));
  };
  std::vector<Complex> w = step(v);
  const double scale = a.max_abs();
  if (detail::vec_norm(w) <= 1e-300 + 1e-14 * scale * scale * p) {
    // all-ones lies in the kernel; use a start with distinct entries
    for (std::size_t j = 0; j < p; ++j) {
      v[j] = Complex(1.0 / (j + 1.0), 0.5 / (j + 2.0));
    }
  }
  const double nv = detail::vec_norm(v);
  for (auto& x : v) x /= nv;
  for (int it = 0; it < opt.max_iterations; ++it) {
    w = step(v);
    // Rayleigh quotient with ‖v‖ = 1
    Complex rq = 0.0;
    for (std::size_t j = 0; j < p; ++j) rq += std::conj(v[j]) * w[j];
    const double lambda = rq.real();
    double res = 0.0;
    for (std::size_t j = 0; j < p; ++j) res += std::norm(w[j] - lambda * v[j]);
    res = std::sqrt(res);
    const double nw = detail::vec_norm(w);
    if (nw == 0.0) return {0.0, v};
    if (res <= opt.tolerance * lambda) {
      return {std::sqrt(std::max(lambda, 0.0)), v};
    }
    for (std::size_t j = 0; j < p; ++j) v[j] = w[j] / nw;
  }
  throw ConvergenceError("power iteration did not converge in " +
                         std::to_string(opt.max_iterations) + " iterations");
}

inline double op_norm(const DenseMatrix& a, const OpNormOptions& opt = {}) {
  return top_singular(a, opt).value;
}

/// Finitely many matrix blocks z -> f(z) of the direct sum.
class BlockElement {
 public:
  BlockElement() = default;

  static BlockElement single(Index z, DenseMatrix m) {
    BlockElement f;
    f.set(z, std::move(m));
    return f;
  }

  /// e_{z,ij}
  static BlockElement unit(Index z, std::size_t p, std::size_t i,
                           std::size_t j) {
    return single(z, DenseMatrix::unit(p, i, j));
  }

  void set(Index z, DenseMatrix m) {
    if (z == 0) throw DomainError("block index 0");
    if (m.is_zero()) {
      blocks_.erase(z);
    } else {
      blocks_[z] = std::move(m);
    }
  }

  const DenseMatrix* find(Index z) const {
    auto it = blocks_.find(z);
    return it == blocks_.end() ? nullptr : &it->second;
  }

  const std::map<Index, DenseMatrix>& blocks() const { return blocks_; }
  bool is_zero() const { return blocks_.empty(); }
  auto begin() const { return blocks_.begin(); }
  auto end() const { return blocks_.end(); }

  BlockElement adjoint() const {
    BlockElement out;
    for (const auto& [z, m] : blocks_) out.blocks_[z] = m.adjoint();
    return out;
  }

  friend BlockElement operator+(const BlockElement& a, const BlockElement& b) {
    BlockElement out = a;
    for (const auto& [z, m] : b.blocks_) {
      auto it = out.blocks_.find(z);
      out.set(z, it == out.blocks_.end() ? m : it->second + m);
    }
    return out;
  }

  friend BlockElement operator*(Complex s, const BlockElement& a) {
    BlockElement out;
    for (const auto& [z, m] : a.blocks_) out.set(z, s * m);
    return out;
  }

  friend bool operator==(const BlockElement& a, const BlockElement& b) {
    return a.blocks_ == b.blocks_;
  }

 private:
  std::map<Index, DenseMatrix> blocks_;
};

/// (ab)(z) = a(z)b(z).
inline BlockElement block_mul(const BlockElement& a, const BlockElement& b) {
  BlockElement out;
  for (const auto& [z, m] : a) {
    if (const DenseMatrix* n = b.find(z)) {
      if (n->size() != m.size()) {
        throw DomainError("block " + std::to_string(z) + " shape mismatch");
      }
      out.set(z, m * *n);
    }
  }
  return out;
}

/// sup_z ‖f(z)‖_op
inline LogValue cstar_norm(const BlockElement& f,
                           const OpNormOptions& opt = {}) {
  LogValue m;
  for (const auto& [z, b] : f) {
    m = max(m, LogValue::from_double(op_norm(b, opt)));
  }
  return m;
}

}  // namespace scalekit
