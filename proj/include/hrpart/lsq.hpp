#pragma once

#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "real.hpp"

namespace hrpart {

struct lsq_solution {
  std::vector<real> coeffs;
  std::vector<real> residuals;  // y - A x
  real avg_error;               // sqrt(mean(residual^2))
  real orthogonality;           // max_j |r . A_j| / (|r| |A_j|)
};

// Residual norms below this fraction of |y| count as exact fits, with
// orthogonality reported as zero.
inline const real& residual_noise_floor() {
  static const real value("1e-35");
  return value;
}

// Least squares min |y - A x| by Householder QR. `columns[j][i]` is A(i, j).
inline lsq_solution solve_lsq(const std::vector<std::vector<real>>& columns, const std::vector<real>& y) {
  const std::size_t k = columns.size();
  const std::size_t m = y.size();
  if (k == 0) throw config_error("least squares needs at least one basis column");
  if (m < k) throw singular_fit_error("fewer points than basis functions");
  for (const auto& col : columns) {
    if (col.size() != m) throw config_error("basis column length differs from data length");
  }

  std::vector<std::vector<real>> a = columns;
  std::vector<real> rhs = y;
  std::vector<real> col_norm(k);
  for (std::size_t j = 0; j < k; ++j) {
    real s = 0;
    for (const auto& v : a[j]) s += v * v;
    col_norm[j] = sqrt(s);
    if (col_norm[j] == 0) throw singular_fit_error("zero basis column");
  }
  const real rank_tol("1e-40");

  for (std::size_t j = 0; j < k; ++j) {
    real s = 0;
    for (std::size_t i = j; i < m; ++i) s += a[j][i] * a[j][i];
    real norm = sqrt(s);
    if (norm <= rank_tol * col_norm[j]) throw singular_fit_error("rank-deficient design matrix");
    real alpha = a[j][j] > 0 ? real(-norm) : norm;
    std::vector<real> v(a[j].begin() + static_cast<std::ptrdiff_t>(j), a[j].end());
    v[0] -= alpha;
    real vnorm2 = 0;
    for (const auto& t : v) vnorm2 += t * t;
    auto reflect = [&](std::vector<real>& col) {
      real dot = 0;
      for (std::size_t i = j; i < m; ++i) dot += v[i - j] * col[i];
      real f = 2 * dot / vnorm2;
      for (std::size_t i = j; i < m; ++i) col[i] -= f * v[i - j];
    };
    for (std::size_t c = j + 1; c < k; ++c) reflect(a[c]);
    reflect(rhs);
    a[j][j] = alpha;
  }

  std::vector<real> x(k);
  for (std::size_t jj = k; jj-- > 0;) {
    real s = rhs[jj];
    for (std::size_t c = jj + 1; c < k; ++c) s -= a[c][jj] * x[c];
    x[jj] = s / a[jj][jj];
  }

  lsq_solution out;
  out.coeffs = x;
  out.residuals.resize(m);
  real r2 = 0;
  real y2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    real fit = 0;
    for (std::size_t j = 0; j < k; ++j) fit += columns[j][i] * x[j];
    out.residuals[i] = y[i] - fit;
    r2 += out.residuals[i] * out.residuals[i];
    y2 += y[i] * y[i];
  }
  out.avg_error = sqrt(r2 / m);
  real r_norm = sqrt(r2);
  out.orthogonality = 0;
  if (r_norm > residual_noise_floor() * sqrt(y2)) {
    for (std::size_t j = 0; j < k; ++j) {
      real dot = 0;
      for (std::size_t i = 0; i < m; ++i) dot += out.residuals[i] * columns[j][i];
      real o = abs(dot) / (r_norm * col_norm[j]);
      if (o > out.orthogonality) out.orthogonality = o;
    }
  }
  return out;
}

}  // namespace hrpart
