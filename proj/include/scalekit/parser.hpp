#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/expr.hpp"

namespace scalekit {

/// Named enumerations visible to `enum(name)`. `id` is always available.
using EnumerationRegistry = std::map<std::string, EnumerationPtr, std::less<>>;

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, const EnumerationRegistry& registry)
      : text_(text), registry_(registry) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in \"" +
                     std::string(text_) + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    while (accept('+')) lhs = expr::add(lhs, parse_product());
    return lhs;
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_power();
    for (;;) {
      if (accept('*')) {
        lhs = expr::mul(lhs, parse_power());
      } else if (accept('/')) {
        lhs = expr::div(lhs, parse_power());
      } else {
        return lhs;
      }
    }
  }

  // right associative: k^k^2 = k^(k^2)
  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) return expr::pow(base, parse_power());
    return base;
  }

  double parse_number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  Index parse_index() {
    const double v = parse_number();
    if (v < 1.0 || v != std::floor(v) || v > 1.8e19) {
      fail("table index must be a positive integer");
    }
    return static_cast<Index>(v);
  }

  std::string parse_identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  ExprPtr parse_table() {
    expect('[');
    std::map<Index, double> values;
    Index next = 1;
    if (accept(']')) fail("empty table");
    do {
      const double first = parse_number();
      if (accept(':')) {
        if (first < 1.0 || first != std::floor(first)) {
          fail("table index must be a positive integer");
        }
        const Index idx = static_cast<Index>(first);
        const double v = parse_number();
        if (!values.emplace(idx, v).second) fail("repeated table index");
        next = idx + 1;
      } else {
        if (!values.emplace(next, first).second) fail("repeated table index");
        ++next;
      }
    } while (accept(','));
    expect(']');
    try {
      return expr::table(std::move(values));
    } catch (const DomainError& e) {
      fail(e.what());
    }
  }

  ExprPtr parse_call(const std::string& name) {
    expect('(');
    if (name == "enum") {
      const std::string id = parse_identifier();
      expect(')');
      if (id.empty()) fail("expected an enumeration name");
      if (id == "id") {
        auto found = registry_.find(id);
        if (found != registry_.end()) return expr::enumeration(found->second);
        return expr::enumeration(
            std::make_shared<const Enumeration>(Enumeration::identity()));
      }
      auto it = registry_.find(id);
      if (it == registry_.end()) fail("unknown enumeration '" + id + "'");
      return expr::enumeration(it->second);
    }
    ExprPtr a = parse_sum();
    if (name == "pow") {
      expect(',');
      ExprPtr b = parse_sum();
      expect(')');
      return expr::pow(a, b);
    }
    expect(')');
    if (name == "sqrt") return expr::sqrt(a);
    if (name == "exp") return expr::exp(a);
    if (name == "log" || name == "ln") return expr::log(a);
    if (name == "floor") return expr::floor(a);
    fail("unknown function '" + name + "'");
  }

  ExprPtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const double v = parse_number();
      if (v < 0.0 || std::isinf(v)) fail("constants must be finite");
      return expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string name = parse_identifier();
      if (name == "k") return expr::var_k();
      if (name == "n") return expr::var_n();
      if (name == "e") return expr::constant(LogValue::from_log(1.0));
      if (name == "pi") return expr::constant(std::numbers::pi);
      if (name == "table") return parse_table();
      return parse_call(name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  const EnumerationRegistry& registry_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the scale grammar: `k`, `n`, numerals, `e`, `pi`, `+ * / ^`,
/// `sqrt exp log floor pow(a,b)`, `table[v1,v2,...]` or
/// `table[i:v,...]`, and `enum(name)`.
inline ExprPtr parse_expression(std::string_view text,
                                const EnumerationRegistry& registry = {}) {
  return detail::ExprParser(text, registry).parse();
}

}  // namespace scalekit
