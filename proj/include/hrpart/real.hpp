#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <ios>
#include <limits>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace hrpart {

// 50 significant decimal digits everywhere; the 10-digit constants of the
// estimators are parsed from decimal text so they stay exact.
using real = boost::multiprecision::mpfr_float_50;
using bigint = boost::multiprecision::mpz_int;

inline constexpr int working_digits = 50;
inline constexpr int default_output_digits = 30;

inline const real& pi() {
  static const real value = boost::math::constants::pi<real>();
  return value;
}

// pi * sqrt(2/3), the exponent scale of the Hardy-Ramanujan term.
inline const real& hr_exponent_scale() {
  static const real value = pi() * sqrt(real(2) / 3);
  return value;
}

inline const real& sqrt3() {
  static const real value = sqrt(real(3));
  return value;
}

inline const real& sqrt2() {
  static const real value = sqrt(real(2));
  return value;
}

inline real to_real(const bigint& v) { return real(v); }

inline real to_real(std::int64_t v) { return real(v); }

inline bool is_decimal_literal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  bool digits = false;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, digits = true;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, digits = true;
  }
  if (!digits) return false;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
    bool exp_digits = false;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, exp_digits = true;
    if (!exp_digits) return false;
  }
  return i == text.size();
}

inline real parse_real(std::string_view text) {
  if (!is_decimal_literal(text)) {
    throw config_error("not a decimal number: '" + std::string(text) + "'");
  }
  return real(std::string(text));
}

inline bigint parse_bigint(std::string_view text) {
  if (text.empty()) throw config_error("empty integer literal");
  std::size_t i = text[0] == '-' ? 1 : 0;
  if (i == text.size()) throw config_error("not an integer: '" + std::string(text) + "'");
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw config_error("not an integer: '" + std::string(text) + "'");
    }
  }
  return bigint(std::string(text));
}

// Scientific notation with `digits` significant digits. digits == 0 prints
// enough digits to read the exact binary value back.
inline std::string format_real(const real& v, int digits = default_output_digits) {
  if (digits <= 0) digits = std::numeric_limits<real>::max_digits10;
  return v.str(digits, std::ios_base::scientific);
}

inline std::string format_bigint(const bigint& v) { return v.str(); }

// Relative agreement to k significant digits: |x - ref| / |ref| <= 5 * 10^-k.
inline bool agrees_to_digits(const real& value, const real& reference, int digits) {
  if (reference == 0) return value == 0;
  real tol = real(5) * pow(real(10), -digits);
  return abs(value - reference) / abs(reference) <= tol;
}

inline real relative_difference(const real& value, const real& reference) {
  return abs(value - reference) / abs(reference);
}

}  // namespace hrpart
