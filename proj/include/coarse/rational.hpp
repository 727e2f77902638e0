#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace coarse {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Accepts "3", "-2/5" or a finite decimal such as "1.5".
inline Rational parse_rational(const std::string& text) {
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      return {std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      const std::string frac = text.substr(dot + 1);
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const bool negative = !text.empty() && text[0] == '-';
      std::int64_t whole = dot == 0 || text.substr(0, dot) == "-" ? 0 : std::stoll(text.substr(0, dot));
      std::int64_t part = frac.empty() ? 0 : std::stoll(frac);
      if (negative) part = -part;
      return Rational(whole) + Rational(part, den);
    }
    return Rational(std::stoll(text));
  } catch (const std::logic_error&) {
    throw PreconditionError("not a rational number: '" + text + "'");
  }
}

inline std::int64_t floor_of(const Rational& r) {
  auto q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline std::int64_t ceil_of(const Rational& r) { return -floor_of(-r); }

}  // namespace coarse
