#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include "scalekit/block.hpp"
#include "scalekit/dims.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/parser.hpp"

// Plain-text fixtures. Blank lines and lines starting with '#' are skipped.
//   sparse vector:  index re im
//   dimensions:     one integer or expression in k per line (k = line rank)
//   block element:  z i j re im      (1-based i, j)
namespace scalekit::io {

namespace detail {

struct Line {
  std::size_t number;
  std::string text;
};

inline std::vector<Line> content_lines(std::istream& in) {
  std::vector<Line> out;
  std::string s;
  std::size_t n = 0;
  while (std::getline(in, s)) {
    ++n;
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos || s[first] == '#') continue;
    const auto last = s.find_last_not_of(" \t\r");
    out.push_back({n, s.substr(first, last - first + 1)});
  }
  return out;
}

[[noreturn]] inline void fail(const std::string& what, const Line& l) {
  throw ParseError(what + " on line " + std::to_string(l.number) + ": '" +
                   l.text + "'");
}

template <class T>
T read_field(std::istringstream& ss, const Line& l, const char* name) {
  T v{};
  if constexpr (std::is_unsigned_v<T>) {
    // istream wraps "-1" into a huge unsigned value
    if ((ss >> std::ws).peek() == '-') fail(std::string("negative ") + name, l);
  }
  if (!(ss >> v)) fail(std::string("bad or missing ") + name, l);
  return v;
}

inline void expect_end(std::istringstream& ss, const Line& l) {
  std::string rest;
  if (ss >> rest) fail("trailing field", l);
}

inline std::ifstream open(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open fixture " + path);
  return f;
}

}  // namespace detail

/// Key is Index for sequences on ℕ⁺ (or ℕ) and int64 for Fourier data.
template <class Key>
FinSupp<Key> read_sparse(std::istream& in) {
  FinSupp<Key> f;
  for (const auto& l : detail::content_lines(in)) {
    std::istringstream ss(l.text);
    const auto x = detail::read_field<Key>(ss, l, "index");
    const auto re = detail::read_field<double>(ss, l, "real part");
    const auto im = detail::read_field<double>(ss, l, "imaginary part");
    detail::expect_end(ss, l);
    if (f(x) != Complex(0.0)) detail::fail("duplicate index", l);
    f.set(x, Complex(re, im));
  }
  return f;
}

template <class Key>
FinSupp<Key> read_sparse_file(const std::string& path) {
  auto in = detail::open(path);
  return read_sparse<Key>(in);
}

inline DimensionSequence read_dims(std::istream& in) {
  std::vector<LogValue> values;
  for (const auto& l : detail::content_lines(in)) {
    const auto e = parse_expression(l.text);
    LogValue v = expr::evaluate(*e, values.size() + 1);
    if (!v.is_zero() && v.log() < std::log(expr::kExactIntegerLimit)) {
      v = LogValue::from_double(std::ceil(v.to_double() - 1e-9));
    }
    values.push_back(v);
  }
  if (values.empty()) throw ParseError("dimension fixture is empty");
  return DimensionSequence::from_values(std::move(values));
}

inline DimensionSequence read_dims_file(const std::string& path) {
  auto in = detail::open(path);
  return read_dims(in);
}

inline BlockElement read_blocks(std::istream& in, const DimensionSequence& p) {
  std::map<Index, DenseMatrix> blocks;
  for (const auto& l : detail::content_lines(in)) {
    std::istringstream ss(l.text);
    const auto z = detail::read_field<Index>(ss, l, "block index");
    const auto i = detail::read_field<std::size_t>(ss, l, "row");
    const auto j = detail::read_field<std::size_t>(ss, l, "column");
    const auto re = detail::read_field<double>(ss, l, "real part");
    const auto im = detail::read_field<double>(ss, l, "imaginary part");
    detail::expect_end(ss, l);
    if (z < 1 || z > p.size()) detail::fail("block index outside the dimensions", l);
    const auto dim = p.at(z);
    if (i < 1 || j < 1 || i > dim || j > dim) detail::fail("entry outside the block", l);
    auto it = blocks.try_emplace(z, DenseMatrix(dim)).first;
    it->second(i - 1, j - 1) = Complex(re, im);
  }
  BlockElement f;
  for (auto& [z, m] : blocks) f.set(z, std::move(m));
  return f;
}

inline BlockElement read_blocks_file(const std::string& path,
                                     const DimensionSequence& p) {
  auto in = detail::open(path);
  return read_blocks(in, p);
}

/// One positive integer per line: the forward table of an enumeration.
inline std::vector<Index> read_index_list(std::istream& in) {
  std::vector<Index> out;
  for (const auto& l : detail::content_lines(in)) {
    std::istringstream ss(l.text);
    out.push_back(detail::read_field<Index>(ss, l, "index"));
    detail::expect_end(ss, l);
  }
  return out;
}

inline std::vector<Index> read_index_list_file(const std::string& path) {
  auto in = detail::open(path);
  return read_index_list(in);
}

}  // namespace scalekit::io
