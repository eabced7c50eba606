#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "lsq.hpp"
#include "range.hpp"
#include "real.hpp"

namespace hrpart {

struct series_point {
  real x;
  real y;
};

// Ordered (x, y) points consumed by a fit. x is strictly increasing.
class data_series {
 public:
  data_series(std::string label, std::vector<series_point> points)
      : label_(std::move(label)), points_(std::move(points)) {
    if (points_.empty()) throw config_error("data series '" + label_ + "' is empty");
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (!(points_[i].x > points_[i - 1].x)) {
        throw config_error("data series '" + label_ + "' needs strictly increasing x");
      }
    }
  }

  const std::string& label() const { return label_; }
  const std::vector<series_point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  std::vector<real> xs() const {
    std::vector<real> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.x);
    return out;
  }

  std::vector<real> ys() const {
    std::vector<real> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.y);
    return out;
  }

  template <class Pred>
  data_series filter(std::string label, Pred keep) const {
    std::vector<series_point> kept;
    for (const auto& p : points_) {
      if (keep(p)) kept.push_back(p);
    }
    return data_series(std::move(label), std::move(kept));
  }

 private:
  std::string label_;
  std::vector<series_point> points_;
};

// shifted_power: a/(x+c)^e + b     shifted_sqrt: a*sqrt(x+c) + b
// line: slope*x + intercept        shifted_line: x + c
// cubic: a x^3 + b x^2 + c x + d   power_basis: a u^1.5 + b u + c u^0.5 + d
enum class fit_model { shifted_power, shifted_sqrt, line, shifted_line, cubic, power_basis };

inline std::string_view to_string(fit_model m) {
  switch (m) {
    case fit_model::shifted_power: return "shifted_power";
    case fit_model::shifted_sqrt: return "shifted_sqrt";
    case fit_model::line: return "line";
    case fit_model::shifted_line: return "shifted_line";
    case fit_model::cubic: return "cubic";
    case fit_model::power_basis: return "power_basis";
  }
  throw config_error("unknown fit model");
}

inline fit_model parse_fit_model(std::string_view text) {
  for (auto m : {fit_model::shifted_power, fit_model::shifted_sqrt, fit_model::line, fit_model::shifted_line,
                 fit_model::cubic, fit_model::power_basis}) {
    if (to_string(m) == text) return m;
  }
  throw config_error("unknown fit model '" + std::string(text) + "'");
}

struct named_value {
  std::string name;
  real value;

  friend bool operator==(const named_value&, const named_value&) = default;
};

using coefficient_list = std::vector<named_value>;

inline const real& find_value(const coefficient_list& list, std::string_view name) {
  for (const auto& nv : list) {
    if (nv.name == name) return nv.value;
  }
  throw config_error("no coefficient named '" + std::string(name) + "'");
}

struct trace_entry {
  std::int64_t index = 0;
  coefficient_list coeffs;
  real score;

  friend bool operator==(const trace_entry&, const trace_entry&) = default;
};

struct fit_result {
  fit_model model = fit_model::line;
  std::string label;
  coefficient_list coeffs;
  real avg_error = 0;
  real score = 0;  // minimized objective; equals avg_error unless a search used another one
  real orthogonality = 0;
  std::vector<trace_entry> trace;
  bool diverged = false;
  std::string divergence_reason;

  const real& get(std::string_view name) const { return find_value(coeffs, name); }
};

struct grid_config {
  real c_low;
  real c_high;
  real initial_step;
  int significant_digits = 1;

  void validate() const {
    if (!(c_low < c_high)) throw config_error("grid needs c_low < c_high");
    if (!(initial_step > 0)) throw config_error("grid step must be positive");
    if (significant_digits < 1) throw config_error("grid digit target must be >= 1");
  }
};

inline grid_config default_c1_grid() { return {real("0.5"), real(15), real("0.1"), 8}; }
inline grid_config default_c2_grid() { return {real(0), real(15), real("0.1"), 6}; }
inline grid_config default_c2prime_grid() { return {real("-2.9"), real(15), real("0.1"), 5}; }
inline grid_config default_t0_grid() { return {real("0.1"), real(1), real("0.1"), 10}; }

inline n_range default_c1_range() { return {120, 8000, 20}; }
inline n_range default_diff_range() { return {80, 8000, 20}; }
inline n_range default_c2prime_range() { return {3, 100, 1}; }

using real_function = std::function<real(const real&)>;

inline bool finite(const real& v) { return boost::multiprecision::isfinite(v); }

// sqrt(mean((y_i - f(x_i))^2))
inline real avg_error(const data_series& series, const real_function& f) {
  real s = 0;
  for (const auto& p : series.points()) {
    real d = p.y - f(p.x);
    s += d * d;
  }
  return sqrt(s / series.size());
}

// Least squares over an arbitrary basis. Coefficients are named `names`
// (k0, k1, ... when empty).
inline fit_result linear_lsq(const std::vector<real_function>& basis, const data_series& series,
                             std::vector<std::string> names = {}, fit_model model = fit_model::line) {
  if (names.empty()) {
    for (std::size_t j = 0; j < basis.size(); ++j) names.push_back("k" + std::to_string(j));
  }
  if (names.size() != basis.size()) throw config_error("one name per basis function required");
  std::vector<std::vector<real>> columns(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    columns[j].reserve(series.size());
    for (const auto& p : series.points()) {
      real v = basis[j](p.x);
      if (!finite(v)) throw domain_error("basis function not finite at x=" + format_real(p.x, 10));
      columns[j].push_back(std::move(v));
    }
  }
  auto sol = solve_lsq(columns, series.ys());
  fit_result out;
  out.model = model;
  out.label = series.label();
  for (std::size_t j = 0; j < basis.size(); ++j) out.coeffs.push_back({names[j], sol.coeffs[j]});
  out.avg_error = sol.avg_error;
  out.score = sol.avg_error;
  out.orthogonality = sol.orthogonality;
  return out;
}

// ---- data series builders ----

namespace detail {

inline real exact_real(const partition_table& table, std::int64_t n) { return real(table.at(n)); }

inline void require_series_n(std::int64_t n) {
  if (n < 1) throw domain_error("series points need n >= 1, got " + std::to_string(n));
}

template <class F>
data_series build_series(std::string label, const std::vector<std::int64_t>& ns, F f) {
  std::vector<series_point> pts;
  pts.reserve(ns.size());
  for (auto n : ns) {
    require_series_n(n);
    pts.push_back({real(n), f(n)});
  }
  return data_series(std::move(label), std::move(pts));
}

}  // namespace detail

// C1(n) = (3/2) ln(4 n sqrt(3) p(n))^2 / pi^2 - n
inline data_series build_c1_series(const partition_table& table, const std::vector<std::int64_t>& ns) {
  return detail::build_series("C1", ns, [&](std::int64_t n) {
    real l = log(4 * real(n) * sqrt3() * detail::exact_real(table, n));
    return real(3) / 2 * l * l / (pi() * pi()) - n;
  });
}

// C2(n) = exp(pi sqrt(2n/3)) / (4 sqrt(3) p(n)) - n
inline data_series build_c2_series(const partition_table& table, const std::vector<std::int64_t>& ns) {
  return detail::build_series("C2", ns, [&](std::int64_t n) {
    return detail::hr_exp(real(n)) / (4 * sqrt3() * detail::exact_real(table, n)) - n;
  });
}

// C2 with the fitted C1 shift inside the exponent:
// exp(pi sqrt(2/3) sqrt(n + a1/sqrt(n+c1) + b1)) / (4 sqrt(3) p(n)) - n
inline data_series build_c2_with_c1_series(const partition_table& table, const std::vector<std::int64_t>& ns,
                                           const coefficient_set& rh1_coeffs) {
  rh1_coeffs.require_kind(estimator_kind::rh1);
  return detail::build_series("C2|C1", ns, [&](std::int64_t n) {
    real x(n);
    real arg = x + rh1_coeffs.get("a1") / sqrt(x + rh1_coeffs.get("c1")) + rh1_coeffs.get("b1");
    if (arg <= 0) throw domain_error("C2|C1: nonpositive exponent radicand");
    return detail::hr_exp(arg) / (4 * sqrt3() * detail::exact_real(table, n)) - n;
  });
}

// R_h(n) / p(n)
inline data_series build_ratio_series(const partition_table& table, const std::vector<std::int64_t>& ns) {
  return detail::build_series("Rh/p", ns,
                              [&](std::int64_t n) { return rh(n) / detail::exact_real(table, n); });
}

// (n, (R_h/p - 1)^-2), which lies close to a straight line.
inline data_series ratio_line_series(const data_series& ratio) {
  std::vector<series_point> pts;
  for (const auto& p : ratio.points()) {
    real d = p.y - 1;
    if (d <= 0) throw domain_error("ratio must exceed 1");
    pts.push_back({p.x, 1 / (d * d)});
  }
  return data_series("(Rh/p-1)^-2", std::move(pts));
}

enum class diff_target { c3, c4, c5 };

// Targets built from the gap R_h(n) - p(n):
//   c3: (pi e / (12 sqrt2 (R_h - p)))^2
//   c4: sqrt2 t0 pi exp(pi sqrt(2/3) sqrt(n - t0)) / (24 (R_h - p))
//   c5: pi e / (12 sqrt2 (R_h - p))
// with e = exp(pi sqrt(2/3) sqrt(n)).
inline data_series build_diff_target_series(const partition_table& table, const std::vector<std::int64_t>& ns,
                                            diff_target variant, const real& t0 = real(0)) {
  const char* label = variant == diff_target::c3 ? "C3" : variant == diff_target::c4 ? "C4" : "C5";
  return detail::build_series(label, ns, [&](std::int64_t n) {
    real x(n);
    real gap = rh(n) - detail::exact_real(table, n);
    if (gap <= 0) throw domain_error("R_h(n) - p(n) is not positive at n=" + std::to_string(n));
    switch (variant) {
      case diff_target::c3: {
        real v = pi() * detail::hr_exp(x) / (12 * sqrt2() * gap);
        return real(v * v);
      }
      case diff_target::c4:
        if (x - t0 <= 0) throw domain_error("C4 target needs n > t0");
        return real(sqrt2() * t0 * pi() * detail::hr_exp(x - t0) / (24 * gap));
      case diff_target::c5:
        return real(pi() * detail::hr_exp(x) / (12 * sqrt2() * gap));
    }
    throw config_error("unknown target");
  });
}

// ---- fixed-shift model fits ----

// a/(x+c)^e + b with c and e held fixed; a and b by least squares.
inline fit_result fit_shifted_power_fixed(const data_series& series, const real& c, const real& e) {
  if (series.points().front().x + c <= 0) throw domain_error("x + c must be positive");
  auto r = linear_lsq({[&](const real& x) { return real(pow(x + c, -e)); }, [](const real&) { return real(1); }},
                      series, {"a", "b"}, fit_model::shifted_power);
  r.coeffs.push_back({"c", c});
  r.coeffs.push_back({"e", e});
  return r;
}

// a*sqrt(x+c) + b with c fixed.
inline fit_result fit_shifted_sqrt_fixed(const data_series& series, const real& c) {
  if (series.points().front().x + c < 0) throw domain_error("x + c must be nonnegative");
  auto r = linear_lsq({[&](const real& x) { return real(sqrt(x + c)); }, [](const real&) { return real(1); }},
                      series, {"a", "b"}, fit_model::shifted_sqrt);
  r.coeffs.push_back({"c", c});
  return r;
}

// ---- alternating refinement steps ----

struct exponent_scale {
  real e2;
  real a;
  real slope;      // of ln(b - y) against ln(x + c2)
  real intercept;
};

// Line fit of ln(b - y) against ln(x + c2): e2 = -slope, a = -exp(intercept).
inline exponent_scale refine_exponent_scale(const data_series& series, const real& b, const real& c2) {
  std::vector<series_point> pts;
  pts.reserve(series.size());
  for (const auto& p : series.points()) {
    if (!(b - p.y > 0)) throw domain_error("b - y must be positive");
    if (!(p.x + c2 > 0)) throw domain_error("x + c2 must be positive");
    pts.push_back({log(p.x + c2), log(b - p.y)});
  }
  data_series logs("log-log", std::move(pts));
  auto r = linear_lsq({[](const real& x) { return x; }, [](const real&) { return real(1); }}, logs,
                      {"slope", "intercept"}, fit_model::line);
  real slope = r.get("slope");
  real intercept = r.get("intercept");
  return {-slope, -exp(intercept), slope, intercept};
}

// Scale only, exponent held: a = -exp(mean(ln(b - y) + e2 ln(x + c2))).
inline real refine_scale_fixed_exponent(const data_series& series, const real& b, const real& c2, const real& e2) {
  real s = 0;
  for (const auto& p : series.points()) {
    if (!(b - p.y > 0)) throw domain_error("b - y must be positive");
    if (!(p.x + c2 > 0)) throw domain_error("x + c2 must be positive");
    s += log(b - p.y) + e2 * log(p.x + c2);
  }
  return -exp(s / series.size());
}

// Intercept of the unit-slope line through ((a/(y-b))^(1/e2), x):
// c2 = mean((a/(y-b))^(1/e2) - x).
inline real refine_shift(const data_series& series, const real& a, const real& b, const real& e2) {
  if (e2 == 0) throw domain_error("exponent must be nonzero");
  real s = 0;
  for (const auto& p : series.points()) {
    real q = a / (p.y - b);
    if (!(q > 0)) throw domain_error("a/(y - b) must be positive");
    s += pow(q, 1 / e2) - p.x;
  }
  return s / series.size();
}

struct iteration_options {
  real init_c2{"2.5"};
  real init_e2{"0.5"};
  int max_iter = 200;
  bool fix_e2 = false;
  bool double_a = false;  // also re-estimate a between the a,b fit and the shift step; implies fix_e2
  real divergence_ratio{10};
};

// Alternates the a,b least-squares fit with exponent/scale and shift
// re-estimation. Returns the iterate with least average error. The loop
// stops on max_iter, on a domain failure or non-finite value, or when an
// iterate's error exceeds divergence_ratio times the best so far; the latter
// two set `diverged`.
inline fit_result iterate_c1_fit(const data_series& series, const iteration_options& opt) {
  if (opt.max_iter < 1) throw config_error("max_iter must be >= 1");
  if (!(opt.divergence_ratio > 1)) throw config_error("divergence ratio must exceed 1");
  const bool fix_e2 = opt.fix_e2 || opt.double_a;
  real c2 = opt.init_c2;
  real e2 = opt.init_e2;
  fit_result best;
  std::vector<trace_entry> trace;
  bool diverged = false;
  std::string reason;
  std::optional<std::size_t> best_index;

  for (int it = 0; it < opt.max_iter; ++it) {
    try {
      auto step = fit_shifted_power_fixed(series, c2, e2);
      if (!finite(step.avg_error) || !finite(step.get("a")) || !finite(step.get("b"))) {
        throw domain_error("non-finite iterate");
      }
      trace.push_back({it, step.coeffs, step.avg_error});
      if (best_index && step.avg_error > opt.divergence_ratio * best.avg_error) {
        diverged = true;
        reason = "average error grew past " + format_real(opt.divergence_ratio, 3) + "x the best iterate at step " +
                 std::to_string(it);
        break;
      }
      if (!best_index || step.avg_error < best.avg_error) {
        best = step;
        best_index = trace.size() - 1;
      }
      real a = step.get("a");
      const real& b = step.get("b");
      if (!fix_e2) {
        auto es = refine_exponent_scale(series, b, c2);
        e2 = es.e2;
        a = es.a;
      } else if (opt.double_a) {
        a = refine_scale_fixed_exponent(series, b, c2, e2);
      }
      c2 = refine_shift(series, a, b, e2);
      if (!finite(c2) || !finite(e2)) throw domain_error("non-finite shift or exponent");
    } catch (const domain_error& e) {
      diverged = true;
      reason = std::string("step ") + std::to_string(it) + ": " + e.what();
      break;
    } catch (const singular_fit_error& e) {
      diverged = true;
      reason = std::string("step ") + std::to_string(it) + ": " + e.what();
      break;
    }
  }
  if (!best_index) throw fit_diverged_error("first iteration failed: " + reason);
  best.label = series.label();
  best.trace = std::move(trace);
  best.diverged = diverged;
  best.divergence_reason = reason;
  return best;
}

// ---- grid refinement ----

// Scans c = c_low + i*step over [c_low, c_high], keeps the first strict
// minimum c0 of the score, then rescans [c0 - 5 step, c0 + 5 step] with a
// step ten times smaller, for significant_digits levels in total. `eval`
// returns the fit at c; a domain_error or singular_fit_error skips the point.
template <class Eval>
fit_result grid_search(const grid_config& cfg, Eval&& eval) {
  cfg.validate();
  real lo = cfg.c_low;
  real hi = cfg.c_high;
  real step = cfg.initial_step;
  std::optional<fit_result> best;
  real best_c;
  std::vector<trace_entry> trace;
  std::int64_t index = 0;
  for (int level = 0; level < cfg.significant_digits; ++level) {
    const real limit = hi + step / 1000;
    for (std::int64_t i = 0;; ++i) {
      real c = lo + step * i;
      if (c > limit) break;
      try {
        fit_result r = eval(c);
        trace.push_back({index++, r.coeffs, r.score});
        if (!finite(r.score)) continue;
        if (!best || r.score < best->score) {
          best = std::move(r);
          best_c = c;
        }
      } catch (const domain_error&) {
      } catch (const singular_fit_error&) {
      }
    }
    if (!best) throw fit_diverged_error("no grid point inside the model domain");
    lo = best_c - 5 * step;
    hi = best_c + 5 * step;
    step /= 10;
  }
  best->trace = std::move(trace);
  return *best;
}

// Grid over the shift c of a shifted_sqrt or fixed-exponent shifted_power
// model, with a and b fitted linearly at every c.
inline fit_result grid_refine(const data_series& series, fit_model model, const grid_config& cfg,
                              const real& exponent = real("0.5")) {
  if (model == fit_model::shifted_sqrt) {
    return grid_search(cfg, [&](const real& c) { return fit_shifted_sqrt_fixed(series, c); });
  }
  if (model == fit_model::shifted_power) {
    return grid_search(cfg, [&](const real& c) { return fit_shifted_power_fixed(series, c, exponent); });
  }
  throw config_error("grid refinement supports shifted_sqrt and shifted_power only");
}

// ---- polynomial-type fits ----

inline fit_result fit_cubic(const data_series& series) {
  return linear_lsq({[](const real& x) { return real(x * x * x); }, [](const real& x) { return real(x * x); },
                     [](const real& x) { return x; }, [](const real&) { return real(1); }},
                    series, {"a", "b", "c", "d"}, fit_model::cubic);
}

// a u^1.5 + b u + c u^0.5 + d with u = x - shift.
inline fit_result fit_power_basis(const data_series& series, const real& shift = real(0)) {
  if (series.points().front().x - shift <= 0) throw domain_error("x - shift must be positive");
  return linear_lsq({[&](const real& x) { real u = x - shift; return real(u * sqrt(u)); },
                     [&](const real& x) { return real(x - shift); },
                     [&](const real& x) { return real(sqrt(x - shift)); }, [](const real&) { return real(1); }},
                    series, {"a", "b", "c", "d"}, fit_model::power_basis);
}

inline fit_result fit_line(const data_series& series) {
  return linear_lsq({[](const real& x) { return x; }, [](const real&) { return real(1); }}, series,
                    {"slope", "intercept"}, fit_model::line);
}

inline fit_result fit_c3_cubic(const partition_table& table, const std::vector<std::int64_t>& ns) {
  return fit_cubic(build_diff_target_series(table, ns, diff_target::c3));
}

inline fit_result fit_c5(const partition_table& table, const std::vector<std::int64_t>& ns) {
  return fit_power_basis(build_diff_target_series(table, ns, diff_target::c5));
}

inline fit_result fit_ratio_line(const partition_table& table, const std::vector<std::int64_t>& ns) {
  return fit_line(ratio_line_series(build_ratio_series(table, ns)));
}

// RMS of R_h(n - t0)/p(n) - 1 over ns.
inline real t0_objective(const partition_table& table, const std::vector<std::int64_t>& ns, const real& t0) {
  real s = 0;
  for (auto n : ns) {
    real r = rh_real(real(n) - t0) / real(table.at(n)) - 1;
    s += r * r;
  }
  return sqrt(s / ns.size());
}

// Grid search for the shift t0 at which R_h(n - t0) tracks p(n) best, then a
// power_basis fit of the C4 target in u = n - t0. Coefficients: t0, a, b, c, d.
inline fit_result fit_t0_and_c4(const partition_table& table, const std::vector<std::int64_t>& ns,
                                const grid_config& t0_grid) {
  if (ns.empty()) throw config_error("t0 search needs data");
  auto search = grid_search(t0_grid, [&](const real& t0) {
    if (t0 <= 0 || t0 >= real(ns.front())) throw domain_error("t0 outside (0, min n)");
    fit_result r;
    r.coeffs = {{"t0", t0}};
    r.score = t0_objective(table, ns, t0);
    r.avg_error = r.score;
    return r;
  });
  real t0 = search.get("t0");
  auto c4 = fit_power_basis(build_diff_target_series(table, ns, diff_target::c4, t0), t0);
  fit_result out = c4;
  out.coeffs.insert(out.coeffs.begin(), {"t0", t0});
  out.score = search.score;
  out.trace = std::move(search.trace);
  return out;
}

struct branch_fits {
  fit_result first;
  fit_result second;
};

// Plain C2 over n = 3..100 split by parity, each branch a shifted_sqrt grid fit.
inline branch_fits fit_c2prime_piecewise(const partition_table& table, const grid_config& cfg = default_c2prime_grid(),
                                         const n_range& range = default_c2prime_range()) {
  auto series = build_c2_series(table, range.values());
  auto odd = series.filter("C2 odd", [](const series_point& p) { return p.x.convert_to<std::int64_t>() % 2 != 0; });
  auto even = series.filter("C2 even", [](const series_point& p) { return p.x.convert_to<std::int64_t>() % 2 == 0; });
  return {grid_refine(odd, fit_model::shifted_sqrt, cfg), grid_refine(even, fit_model::shifted_sqrt, cfg)};
}

// C2 (with the C1 shift) at odd n in [3, 39] follows two interleaved curves:
// n = 3 (mod 6) and the remaining odd n. Each gets a cubic.
inline branch_fits fit_odd_c2_cubics(const partition_table& table, const coefficient_set& rh1_coeffs,
                                     const n_range& range = {3, 39, 2}) {
  auto series = build_c2_with_c1_series(table, range.values(), rh1_coeffs);
  auto part_a = series.filter("C2|C1 n=3 mod 6",
                              [](const series_point& p) { return p.x.convert_to<std::int64_t>() % 6 == 3; });
  auto part_b = series.filter("C2|C1 other odd", [](const series_point& p) {
    auto n = p.x.convert_to<std::int64_t>();
    return n % 2 != 0 && n % 6 != 3;
  });
  return {fit_cubic(part_a), fit_cubic(part_b)};
}

}  // namespace hrpart
