#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scalekit/errors.hpp"

namespace scalekit {

using Index = std::uint64_t;

/// An ordered list of indices on which finite checks are run.
///
/// Dense prefixes are 1..K. Sparse prefixes carry an explicit list so that
/// astronomically indexed features can be reached without enumerating
/// everything below them. Order matters: trend rules look at the tail of
/// the list.
class Prefix {
 public:
  Prefix() = default;

  static Prefix dense(Index k) {
    if (k == 0) throw DomainError("prefix length must be at least 1");
    Prefix p;
    p.indices_.resize(k);
    for (Index i = 0; i < k; ++i) p.indices_[i] = i + 1;
    p.dense_ = true;
    return p;
  }

  static Prefix sparse(std::vector<Index> indices) {
    if (indices.empty()) throw DomainError("prefix must not be empty");
    for (Index x : indices) {
      if (x == 0) throw DomainError("indices start at 1");
    }
    Prefix p;
    p.indices_ = std::move(indices);
    p.dense_ = false;
    return p;
  }

  std::size_t size() const { return indices_.size(); }
  Index operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<Index>& indices() const { return indices_; }
  bool is_dense() const { return dense_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  std::vector<Index> indices_;
  bool dense_ = false;
};

/// A bijection between (a prefix of) a countable set coded by positive
/// integers and an initial segment of the positive integers.
///
/// Three representations: the identity, an explicit table over a finite
/// domain, and a pair of rules for enumerations defined by formula on all of
/// the machine-integer range.
class Enumeration {
 public:
  using Rule = std::function<std::optional<Index>(Index)>;

  static Enumeration identity() {
    Enumeration e;
    e.kind_ = Kind::kIdentity;
    e.name_ = "id";
    return e;
  }

  /// `inverse[r - 1]` is the element sent to r. Must be injective.
  static Enumeration from_inverse(std::vector<Index> inverse,
                                  std::string name = "table") {
    Enumeration e;
    e.kind_ = Kind::kTable;
    e.name_ = std::move(name);
    e.forward_.reserve(inverse.size());
    for (std::size_t r = 0; r < inverse.size(); ++r) {
      if (!e.forward_.emplace(inverse[r], r + 1).second) {
        throw DomainError("enumeration table repeats element " +
                          std::to_string(inverse[r]));
      }
    }
    e.inverse_ = std::move(inverse);
    return e;
  }

  /// `forward[x - 1]` is the rank of x for x = 1..K; must be a permutation
  /// of 1..K.
  static Enumeration from_forward(const std::vector<Index>& forward,
                                  std::string name = "table") {
    std::vector<Index> inverse(forward.size(), 0);
    for (std::size_t x = 0; x < forward.size(); ++x) {
      const Index r = forward[x];
      if (r == 0 || r > forward.size() || inverse[r - 1] != 0) {
        throw DomainError("forward table is not a permutation of 1..K");
      }
      inverse[r - 1] = x + 1;
    }
    return from_inverse(std::move(inverse), std::move(name));
  }

  /// Formula-defined enumeration. Rules return nullopt outside the range
  /// they can represent.
  static Enumeration from_rules(std::string name, Rule forward, Rule inverse) {
    Enumeration e;
    e.kind_ = Kind::kRule;
    e.name_ = std::move(name);
    e.forward_rule_ = std::move(forward);
    e.inverse_rule_ = std::move(inverse);
    return e;
  }

  const std::string& name() const { return name_; }
  bool is_identity() const { return kind_ == Kind::kIdentity; }

  /// Size of the stored domain for table enumerations, nullopt otherwise.
  std::optional<std::size_t> domain_size() const {
    if (kind_ == Kind::kTable) return inverse_.size();
    return std::nullopt;
  }

  Index forward(Index x) const {
    switch (kind_) {
      case Kind::kIdentity:
        if (x == 0) throw DomainError("enumeration index 0");
        return x;
      case Kind::kTable: {
        auto it = forward_.find(x);
        if (it == forward_.end()) {
          throw DomainError("index " + std::to_string(x) +
                            " outside the stored prefix of enumeration " +
                            name_);
        }
        return it->second;
      }
      case Kind::kRule: {
        auto r = forward_rule_(x);
        if (!r) {
          throw DomainError("enumeration " + name_ +
                            " undefined at index " + std::to_string(x));
        }
        return *r;
      }
    }
    return 0;
  }

  Index inverse(Index rank) const {
    switch (kind_) {
      case Kind::kIdentity:
        if (rank == 0) throw DomainError("enumeration rank 0");
        return rank;
      case Kind::kTable:
        if (rank == 0 || rank > inverse_.size()) {
          throw DomainError("rank " + std::to_string(rank) +
                            " outside the stored prefix of enumeration " +
                            name_);
        }
        return inverse_[rank - 1];
      case Kind::kRule: {
        auto r = inverse_rule_(rank);
        if (!r) {
          throw DomainError("enumeration " + name_ +
                            " has no preimage for rank " +
                            std::to_string(rank));
        }
        return *r;
      }
    }
    return 0;
  }

  /// forward∘inverse and inverse∘forward are identities on the given
  /// elements.
  bool round_trips(const Prefix& elements) const {
    for (Index x : elements) {
      if (inverse(forward(x)) != x) return false;
    }
    return true;
  }

 private:
  enum class Kind { kIdentity, kTable, kRule };

  Kind kind_ = Kind::kIdentity;
  std::string name_;
  std::unordered_map<Index, Index> forward_;
  std::vector<Index> inverse_;
  Rule forward_rule_;
  Rule inverse_rule_;
};

using EnumerationPtr = std::shared_ptr<const Enumeration>;

}  // namespace scalekit
