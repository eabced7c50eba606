#pragma once

#include <cstdint>
#include <string>

#include "coefficients.hpp"
#include "errors.hpp"
#include "real.hpp"

namespace hrpart {

namespace detail {

inline void require_positive_n(std::int64_t n, const char* name) {
  if (n < 1) throw domain_error(std::string(name) + " requires n >= 1, got " + std::to_string(n));
}

inline real hr_exp(const real& x) { return exp(hr_exponent_scale() * sqrt(x)); }

}  // namespace detail

// exp(pi sqrt(2/3) sqrt(x)) / (4 sqrt(3) x) at real x > 0.
inline real rh_real(const real& x) {
  if (x <= 0) throw domain_error("rh needs a positive argument");
  return detail::hr_exp(x) / (4 * sqrt3() * x);
}

inline real rh(std::int64_t n) {
  detail::require_positive_n(n, "rh");
  return rh_real(real(n));
}

inline real rh1(std::int64_t n, const coefficient_set& c) {
  detail::require_positive_n(n, "rh1");
  c.require_kind(estimator_kind::rh1);
  real x(n);
  real shifted = x + c.get("c1");
  if (shifted <= 0) throw domain_error("rh1: n + c1 must be positive");
  real radicand = x + c.get("a1") / sqrt(shifted) + c.get("b1");
  if (radicand <= 0) throw domain_error("rh1: nonpositive exponent radicand at n=" + std::to_string(n));
  return detail::hr_exp(radicand) / (4 * sqrt3() * x);
}

inline real rh2(std::int64_t n, const coefficient_set& c) {
  detail::require_positive_n(n, "rh2");
  c.require_kind(estimator_kind::rh2);
  real x(n);
  real shifted = x + c.get("c2");
  if (shifted < 0) throw domain_error("rh2: n + c2 must be nonnegative");
  real denom = x + c.get("a2") * sqrt(shifted) + c.get("b2");
  if (denom <= 0) throw domain_error("rh2: nonpositive denominator at n=" + std::to_string(n));
  return detail::hr_exp(x) / (4 * sqrt3() * denom);
}

inline real rd3(std::int64_t n, const coefficient_set& c) {
  c.require_kind(estimator_kind::rd3);
  real lin = c.get("a3") * n + c.get("b3");
  if (n < 1 || lin <= 0) throw domain_error("rd3: a3*n + b3 <= 0 at n=" + std::to_string(n));
  return rh(n) / (1 + 1 / sqrt(lin));
}

// a1 n^3 + b1 n^2 + c1 n + d1
inline real f3_cubic(std::int64_t n, const coefficient_set& c) {
  real x(n);
  return ((c.get("a1") * x + c.get("b1")) * x + c.get("c1")) * x + c.get("d1");
}

inline real f3(std::int64_t n, const coefficient_set& c) {
  detail::require_positive_n(n, "f3");
  c.require_kind(estimator_kind::f3);
  real c3 = f3_cubic(n, c);
  if (c3 <= 0) throw domain_error("f3: cubic is nonpositive at n=" + std::to_string(n));
  real x(n);
  return rh(n) - pi() * detail::hr_exp(x) / (12 * sqrt(2 * c3));
}

// a u^1.5 + b u + c u^0.5 + d
inline real power_basis_sum(const real& u, const real& a, const real& b, const real& c, const real& d) {
  real r = sqrt(u);
  return a * u * r + b * u + c * r + d;
}

inline real rh3_denominator(std::int64_t n, const coefficient_set& c) {
  real u = real(n) - c.get("t0");
  if (u <= 0) throw domain_error("rh3: n must exceed t0");
  return power_basis_sum(u, c.get("a2"), c.get("b2"), c.get("c2"), c.get("d2"));
}

inline real rh3(std::int64_t n, const coefficient_set& c) {
  detail::require_positive_n(n, "rh3");
  c.require_kind(estimator_kind::rh3);
  const real& t0 = c.get("t0");
  real c4 = rh3_denominator(n, c);
  if (c4 == 0) throw domain_error("rh3: C4 vanishes at n=" + std::to_string(n));
  return rh(n) - sqrt2() * t0 * pi() * detail::hr_exp(real(n) - t0) / (24 * c4);
}

inline real rh4_denominator(std::int64_t n, const coefficient_set& c) {
  return power_basis_sum(real(n), c.get("a3"), c.get("b3"), c.get("c3"), c.get("d3"));
}

inline real rh4(std::int64_t n, const coefficient_set& c) {
  detail::require_positive_n(n, "rh4");
  c.require_kind(estimator_kind::rh4);
  real c5 = rh4_denominator(n, c);
  if (c5 == 0) throw domain_error("rh4: C5 vanishes at n=" + std::to_string(n));
  return rh(n) - pi() * detail::hr_exp(real(n)) / (12 * sqrt2() * c5);
}

enum class rh0_branch { odd, even };

inline constexpr std::int64_t rh0_max_n = 100;

inline rh0_branch rh0_branch_for(std::int64_t n) { return n % 2 != 0 ? rh0_branch::odd : rh0_branch::even; }

struct rh0_evaluation {
  real value;
  rh0_branch branch;
  real shift_term;  // C'2(n)
};

inline rh0_evaluation rh0_evaluate(std::int64_t n, const coefficient_set& c) {
  c.require_kind(estimator_kind::rh0);
  if (n < 1 || n > rh0_max_n) {
    throw range_error("rh0 is defined for 1 <= n <= 100, got " + std::to_string(n));
  }
  auto branch = rh0_branch_for(n);
  const char* prefix = branch == rh0_branch::odd ? "odd_" : "even_";
  std::string p(prefix);
  real radicand = real(n) + c.get(p + "shift");
  if (radicand < 0) throw domain_error("rh0: negative radicand at n=" + std::to_string(n));
  real c2 = c.get(p + "scale") * sqrt(radicand) + c.get(p + "offset");
  real denom = real(n) + c2;
  if (denom <= 0) throw domain_error("rh0: nonpositive denominator at n=" + std::to_string(n));
  real x(n);
  return {detail::hr_exp(x) / (4 * sqrt3() * denom), branch, c2};
}

inline real rh0(std::int64_t n, const coefficient_set& c) { return rh0_evaluate(n, c).value; }

// floor(x + 1/2), computed at working precision.
inline bigint round_half_up(const real& x) {
  if (x < 0) throw domain_error("round_half_up requires a nonnegative argument");
  real f = floor(x + real(0.5));
  return bigint(f.convert_to<bigint>());
}

inline real estimate(estimator_kind kind, std::int64_t n, const coefficient_registry& registry) {
  switch (kind) {
    case estimator_kind::rh: return rh(n);
    case estimator_kind::rh1: return rh1(n, registry.get(kind));
    case estimator_kind::rh2: return rh2(n, registry.get(kind));
    case estimator_kind::rd3: return rd3(n, registry.get(kind));
    case estimator_kind::f3: return f3(n, registry.get(kind));
    case estimator_kind::rh3: return rh3(n, registry.get(kind));
    case estimator_kind::rh4: return rh4(n, registry.get(kind));
    case estimator_kind::rh0: return rh0(n, registry.get(kind));
  }
  throw config_error("unknown estimator kind");
}

inline bigint estimate_rounded(estimator_kind kind, std::int64_t n, const coefficient_registry& registry) {
  return round_half_up(estimate(kind, n, registry));
}

}  // namespace hrpart
