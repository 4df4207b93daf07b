#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdstrop {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Thrown for malformed textual input (matrices, equations, fan files).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Thrown when a mathematical precondition fails (not an input-format problem).
class MathError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto issign = [](char c) { return c == '+' || c == '-'; };
  if (s.empty()) throw ParseError("empty rational literal");
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool ok = (c >= '0' && c <= '9') || c == '/' || (i == 0 && issign(c));
    if (!ok) throw ParseError("malformed rational '" + s + "'");
  }
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (s == "+" || s == "-") throw ParseError("malformed rational '" + s + "'");
    std::string digits = (s[0] == '+') ? s.substr(1) : s;
    return Rational(Integer(digits));
  }
  std::string num = s.substr(0, slash);
  std::string den = s.substr(slash + 1);
  if (num.empty() || num == "+" || num == "-" || den.empty() || den.find('/') != std::string::npos ||
      issign(den[0]))
    throw ParseError("malformed rational '" + s + "'");
  if (num[0] == '+') num = num.substr(1);
  Integer d(den);
  if (d == 0) throw ParseError("zero denominator in '" + s + "'");
  return Rational(Integer(num), d);
}

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

inline std::int64_t to_int64(const Rational& q) {
  if (!is_integer(q)) throw MathError("non-integral value " + to_string(q));
  const Integer& n = numerator(q);
  if (n > Integer(INT64_MAX) || n < Integer(INT64_MIN)) throw MathError("integer overflow");
  return n.convert_to<std::int64_t>();
}

}  // namespace mdstrop
