#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "real.hpp"

namespace hrpart {

// Exact p(0..max_n). Immutable once built, so it can be shared freely.
class partition_table {
 public:
  partition_table() : values_{bigint(1)} {}

  explicit partition_table(std::vector<bigint> values) : values_(std::move(values)) {
    if (values_.empty()) throw config_error("partition table needs at least p(0)");
  }

  std::size_t max_n() const { return values_.size() - 1; }
  std::size_t size() const { return values_.size(); }

  const bigint& operator[](std::size_t n) const { return values_[n]; }

  const bigint& at(std::int64_t n) const {
    if (n < 0 || static_cast<std::uint64_t>(n) > max_n()) {
      throw index_error("p(" + std::to_string(n) + ") outside table of max_n " +
                        std::to_string(max_n()));
    }
    return values_[static_cast<std::size_t>(n)];
  }

  std::span<const bigint> values() const { return values_; }

  friend bool operator==(const partition_table&, const partition_table&) = default;

 private:
  std::vector<bigint> values_;
};

// floor(sqrt(v)) without touching floating point.
constexpr std::uint64_t isqrt(std::uint64_t v) {
  if (v < 2) return v;
  std::uint64_t x = v;
  std::uint64_t y = (x + 1) / 2;
  while (y < x) {
    x = y;
    y = (x + v / x) / 2;
  }
  return x;
}

// Upper summation limits of the two pentagonal sums:
// k1 = floor((sqrt(24n+1) - 1) / 6), k2 = floor((sqrt(24n+1) + 1) / 6),
// evaluated with the integer square root.
struct pentagonal_bounds {
  std::uint64_t k1;
  std::uint64_t k2;
};

constexpr pentagonal_bounds pentagonal_limits(std::uint64_t n) {
  std::uint64_t s = isqrt(24 * n + 1);
  return {(s - 1) / 6, (s + 1) / 6};
}

// Euler's pentagonal recursion, evaluated bottom-up over a dense table.
inline partition_table build_table(std::size_t max_n) {
  std::vector<bigint> p;
  p.reserve(max_n + 1);
  p.emplace_back(1);
  for (std::uint64_t n = 1; n <= max_n; ++n) {
    auto [k1, k2] = pentagonal_limits(n);
    bigint sum = 0;
    for (std::uint64_t k = 1; k <= k1; ++k) {
      const bigint& term = p[n - (3 * k * k + k) / 2];
      if (k % 2 == 1) sum += term; else sum -= term;
    }
    for (std::uint64_t k = 1; k <= k2; ++k) {
      const bigint& term = p[n - (3 * k * k - k) / 2];
      if (k % 2 == 1) sum += term; else sum -= term;
    }
    p.push_back(std::move(sum));
  }
  return partition_table(std::move(p));
}

inline const bigint& p_exact(const partition_table& table, std::int64_t n) { return table.at(n); }

// Independent check: count partitions of n by largest part,
// q(m, k) = #partitions of m with parts <= k, q(m, k) = q(m, k-1) + q(m-k, k).
// Quadratic in n.
inline bigint p_oracle_dp(std::size_t n) {
  std::vector<std::vector<bigint>> q(n + 1, std::vector<bigint>(n + 1));
  for (std::size_t k = 0; k <= n; ++k) q[0][k] = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    q[m][0] = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      q[m][k] = q[m][k - 1];
      if (k <= m) q[m][k] += q[m - k][k];
    }
  }
  return q[n][n];
}

// Bytes needed to store p(n) given any approximation of it:
// ceil((log2(estimate) + 1) / 8).
inline std::int64_t storage_bytes_estimate(std::int64_t n, const real& estimate) {
  if (n < 1) throw domain_error("storage_bytes_estimate needs n >= 1");
  if (estimate <= 0) throw domain_error("storage_bytes_estimate needs a positive estimate");
  real bits = log2(estimate) + 1;
  return ceil(bits / 8).convert_to<std::int64_t>();
}

}  // namespace hrpart
