#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace cvzk {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Parses a decimal literal ("-1.9", "3", "0.25") into an exact rational.
inline Rat rat_from_decimal(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty decimal literal");
  size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') neg = (s[pos] == '-'), ++pos;
  BigInt num = 0;
  BigInt den = 1;
  bool seen_digit = false, seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("bad decimal literal: " + s);
      seen_dot = true;
    } else if (c == '/') {
      // Fraction form "p/q" accepted as well; only valid before any dot.
      if (seen_dot || !seen_digit) throw std::invalid_argument("bad literal: " + s);
      BigInt d(s.substr(pos + 1));
      if (d == 0) throw std::invalid_argument("zero denominator: " + s);
      Rat r(num, d);
      return neg ? Rat(-r) : r;
    } else if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      seen_digit = true;
    } else {
      throw std::invalid_argument("bad decimal literal: " + s);
    }
  }
  if (!seen_digit) throw std::invalid_argument("bad decimal literal: " + s);
  Rat r(num, den);
  return neg ? Rat(-r) : r;
}

inline double rat_to_double(const Rat& r) {
  return r.convert_to<double>();
}

}  // namespace cvzk
