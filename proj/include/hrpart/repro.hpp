#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"
#include "coefficients.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "fitting.hpp"
#include "pipelines.hpp"

namespace hrpart {

// Reference values checked by the acceptance criteria, with pinned tolerances.
namespace claims {

inline constexpr std::int64_t table_size = 10000;

inline constexpr int coefficient_digits = 4;
inline constexpr int avg_error_digits = 2;
inline constexpr int c1_linear_coefficient_digits = 8;
inline constexpr int c1_linear_avg_error_digits = 4;
inline constexpr int roundtrip_digits = 10;
inline constexpr const char* orthogonality_bound = "1e-20";

}  // namespace claims

struct criterion_result {
  int id = 0;
  std::string group;
  std::string title;
  bool passed = false;
  std::vector<std::string> details;
};

inline const std::map<int, std::string>& criterion_groups() {
  static const std::map<int, std::string> groups = {
      {1, "exactness"},   {2, "exactness"},   {3, "estimators"}, {4, "thresholds"}, {5, "thresholds"},
      {6, "thresholds"},  {7, "thresholds"},  {8, "thresholds"}, {9, "thresholds"}, {10, "fitting"},
      {11, "fitting"},    {12, "fitting"},    {13, "fitting"},   {14, "fitting"},   {15, "fitting"},
      {16, "fitting"},    {17, "properties"}};
  return groups;
}

// Comma-separated criterion ids and/or group names; empty selects everything.
inline std::set<int> parse_selection(std::string_view text) {
  std::set<int> out;
  if (text.empty() || text == "all") {
    for (const auto& [id, g] : criterion_groups()) out.insert(id);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find(',', pos);
    auto item = std::string(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    bool matched = false;
    for (const auto& [id, g] : criterion_groups()) {
      if (g == item || std::to_string(id) == item) {
        out.insert(id);
        matched = true;
      }
    }
    if (!matched) throw config_error("unknown criterion or group '" + item + "'");
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

namespace detail {

inline std::string verdict(bool ok) { return ok ? "ok" : "FAIL"; }

// "name = value vs reference (rel r, k digits) ok|FAIL"; returns the verdict.
inline bool compare_digits(std::vector<std::string>& log, const std::string& name, const real& value,
                           const char* reference, int digits) {
  real ref = parse_real(reference);
  bool ok = agrees_to_digits(value, ref, digits);
  log.push_back(name + " = " + format_real(value, 11) + " vs " + reference + " (rel " +
                format_real(relative_difference(value, ref), 3) + ", " + std::to_string(digits) + " digits) " +
                verdict(ok));
  return ok;
}

inline std::string describe(const clause_result& r) {
  std::string s = r.clause.describe() + ": " + verdict(r.passed) + " (" + std::to_string(r.checked) + " checked";
  if (r.skipped) s += ", " + std::to_string(r.skipped) + " undefined skipped";
  s += "; extreme |rel| " + format_real(r.worst_value, 4) + " at n=" + std::to_string(r.worst_n);
  if (!r.passed) {
    s += "; " + std::to_string(r.violations.size()) + " violations, first n=" + std::to_string(*r.witness_n) +
         " |rel| " + format_real(r.witness_value, 4);
  }
  return s + ")";
}

inline threshold_clause below(std::int64_t lo, std::int64_t hi, const char* bound) {
  return {lo, hi, parse_real(bound), threshold_direction::all_below, {}};
}

inline threshold_clause above(std::int64_t lo, std::int64_t hi, const char* bound) {
  return {lo, hi, parse_real(bound), threshold_direction::all_above, {}};
}

inline threshold_clause exact_at(std::vector<std::int64_t> ns) {
  return {0, 0, real(0), threshold_direction::exact, std::move(ns)};
}

}  // namespace detail

class criteria_runner {
 public:
  criteria_runner(const partition_table& table, coefficient_registry registry)
      : table_(table), registry_(std::move(registry)) {
    if (static_cast<std::int64_t>(table_.max_n()) < claims::table_size) {
      throw config_error("the reproduction suite needs p(n) up to n=10000");
    }
  }

  std::vector<criterion_result> run(const std::set<int>& ids) {
    std::vector<criterion_result> out;
    for (int id : ids) out.push_back(run_one(id));
    return out;
  }

  criterion_result run_one(int id) {
    criterion_result r;
    r.id = id;
    r.group = criterion_groups().at(id);
    switch (id) {
      case 1: exactness_known_values(r); break;
      case 2: exactness_oracle(r); break;
      case 3: rounded_point_values(r); break;
      case 4: thresholds_rh(r); break;
      case 5: thresholds_rh1(r); break;
      case 6: thresholds_rh3(r); break;
      case 7: thresholds_rh4(r); break;
      case 8: thresholds_rh0(r); break;
      case 9: rd3_domain(r); break;
      case 10: fit_c1_linear(r); break;
      case 11: fit_c1_grid(r); break;
      case 12: fit_c1_iterate(r); break;
      case 13: fit_c2_grid(r); break;
      case 14: fit_ratio(r); break;
      case 15: fit_t0_c4_c5(r); break;
      case 16: fit_c2prime(r); break;
      case 17: properties(r); break;
      default: throw config_error("unknown criterion " + std::to_string(id));
    }
    return r;
  }

  // Scans shipped with `repro --emit-tables`.
  std::vector<std::pair<std::string, error_report>> standard_reports() const {
    return {
        {"rh", scan(table_, estimator_kind::rh, {1, 10000, 1}, registry_)},
        {"rh1", scan(table_, estimator_kind::rh1, {1, 10000, 1}, registry_)},
        {"rh1_rounded", scan(table_, estimator_kind::rh1, {1, 10000, 1}, registry_, true)},
        {"rh2", scan(table_, estimator_kind::rh2, {1, 10000, 1}, registry_)},
        {"rd3", scan(table_, estimator_kind::rd3, {1, 10000, 1}, registry_)},
        {"f3", scan(table_, estimator_kind::f3, {1, 10000, 1}, registry_)},
        {"rh3_rounded", scan(table_, estimator_kind::rh3, {1, 10000, 1}, registry_, true)},
        {"rh4_rounded", scan(table_, estimator_kind::rh4, {1, 10000, 1}, registry_, true)},
        {"rh0_rounded", scan(table_, estimator_kind::rh0, {1, 100, 1}, registry_, true)},
    };
  }

  const pipeline_output& pipeline(pipeline_kind kind) {
    auto it = pipelines_.find(kind);
    if (it == pipelines_.end()) {
      pipeline_config cfg;
      cfg.kind = kind;
      it = pipelines_.emplace(kind, run_pipeline(table_, cfg, registry_)).first;
    }
    return it->second;
  }

 private:
  const error_report& report(estimator_kind kind, bool rounded) {
    auto key = std::make_pair(kind, rounded);
    auto it = reports_.find(key);
    if (it == reports_.end()) {
      n_range range = kind == estimator_kind::rh0 ? n_range{1, 100, 1} : n_range{1, claims::table_size, 1};
      it = reports_.emplace(key, scan(table_, kind, range, registry_, rounded)).first;
    }
    return it->second;
  }

  void apply_clauses(criterion_result& r, estimator_kind kind, bool rounded, const std::vector<threshold_clause>& clauses) {
    r.passed = true;
    for (const auto& res : check_thresholds(report(kind, rounded), clauses)) {
      r.details.push_back(detail::describe(res));
      r.passed = r.passed && res.passed;
    }
  }

  void exactness_known_values(criterion_result& r) {
    r.title = "p(100) and p(200) exact";
    bool a = table_[100] == bigint("190569292");
    bool b = table_[200] == bigint("3972999029388");
    r.details.push_back("p(100) = " + format_bigint(table_[100]) + " " + detail::verdict(a));
    r.details.push_back("p(200) = " + format_bigint(table_[200]) + " " + detail::verdict(b));
    r.passed = a && b;
  }

  void exactness_oracle(criterion_result& r) {
    r.title = "pentagonal table equals the dynamic-programming count for n <= 500";
    r.passed = true;
    for (std::size_t n = 0; n <= 500; ++n) {
      if (table_[n] != p_oracle_dp(n)) {
        r.passed = false;
        r.details.push_back("mismatch at n=" + std::to_string(n));
        break;
      }
    }
    if (r.passed) r.details.push_back("501 values equal");
  }

  void rounded_point_values(criterion_result& r) {
    r.title = "rounded rh1 at n=100 and n=200";
    r.passed = true;
    const std::pair<std::int64_t, const char*> targets[] = {{100, "190569177"}, {200, "3972999059745"}};
    const auto& rh1_set = registry_.get(estimator_kind::rh1);
    for (const auto& [n, text] : targets) {
      bigint want(text);
      bigint got = round_half_up(rh1(n, rh1_set));
      std::vector<std::string> producers;
      for (auto kind : all_estimator_kinds) {
        try {
          if (round_half_up(estimate(kind, n, registry_)) == want) producers.emplace_back(to_string(kind));
        } catch (const error&) {
        }
      }
      bool from_rh1_or_rh2 = false;
      std::string who;
      for (const auto& p : producers) {
        who += (who.empty() ? "" : ", ") + p;
        from_rh1_or_rh2 = from_rh1_or_rh2 || p == "rh1" || p == "rh2";
      }
      r.details.push_back("round(rh1(" + std::to_string(n) + ")) = " + format_bigint(got) + ", expected " + text +
                          " (difference " + format_bigint(got - want) + "); produced by: " +
                          (who.empty() ? std::string("no shipped estimator") : who) + " " +
                          detail::verdict(from_rh1_or_rh2));
      r.passed = r.passed && from_rh1_or_rh2;
    }
  }

  void thresholds_rh(criterion_result& r) {
    r.title = "rh relative-error lower bounds";
    apply_clauses(r, estimator_kind::rh, false,
                  {detail::above(1, 25, "0.09"), detail::above(26, 220, "0.03"), detail::above(1, 1000, "0.014"),
                   detail::above(1000, 10000, "0.0044")});
  }

  void thresholds_rh1(criterion_result& r) {
    r.title = "rh1 relative-error upper bounds";
    apply_clauses(r, estimator_kind::rh1, false,
                  {detail::below(100, 10000, "6e-7"), detail::below(26, 10000, "1e-3"), detail::below(11, 10000, "1e-2"),
                   detail::below(1000, 3000, "1e-8"), detail::below(3000, 10000, "5.3e-9")});
  }

  void thresholds_rh3(criterion_result& r) {
    r.title = "rounded rh3 bounds and exact small values";
    apply_clauses(r, estimator_kind::rh3, true,
                  {detail::below(2501, 9999, "3e-9"), detail::exact_at({2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 15})});
  }

  void thresholds_rh4(criterion_result& r) {
    r.title = "rounded rh4 bounds and exact small values";
    apply_clauses(r, estimator_kind::rh4, true,
                  {detail::below(2501, 9999, "1e-9"), detail::exact_at({2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 15})});
  }

  void thresholds_rh0(criterion_result& r) {
    r.title = "rounded rh0 bound for 3 <= n <= 80";
    apply_clauses(r, estimator_kind::rh0, true, {detail::below(3, 80, "4e-5")});
  }

  void rd3_domain(criterion_result& r) {
    r.title = "rd3 undefined exactly for n <= 14";
    const auto& c = registry_.get(estimator_kind::rd3);
    std::vector<std::int64_t> wrong;
    for (std::int64_t n = 1; n <= claims::table_size; ++n) {
      bool threw = false;
      try {
        rd3(n, c);
      } catch (const domain_error&) {
        threw = true;
      }
      if (threw != (n <= 14)) wrong.push_back(n);
    }
    r.passed = wrong.empty();
    r.details.push_back(r.passed ? std::string("domain error for n=1..14, defined for n=15..10000")
                                 : "unexpected behaviour at n=" + std::to_string(wrong.front()) + " (" +
                                       std::to_string(wrong.size()) + " cases)");
  }

  void fit_c1_linear(criterion_result& r) {
    r.title = "C1 fit with c2=2.5, e2=0.5";
    const auto& f = pipeline(pipeline_kind::c1_linear).fits.front().second;
    auto& d = r.details;
    bool ok = detail::compare_digits(d, "a", f.get("a"), "-0.02635983935", claims::c1_linear_coefficient_digits);
    ok &= detail::compare_digits(d, "b", f.get("b"), "-0.3456348045", claims::c1_linear_coefficient_digits);
    ok &= detail::compare_digits(d, "avg_error", f.avg_error, "1.074574171e-5", claims::c1_linear_avg_error_digits);
    r.passed = ok;
  }

  void fit_c1_grid(criterion_result& r) {
    r.title = "C1 grid refinement over 120..8000";
    const auto& f = pipeline(pipeline_kind::c1_grid).fits.front().second;
    auto& d = r.details;
    bool ok = detail::compare_digits(d, "a", f.get("a"), "-0.02651010067", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "b", f.get("b"), "-0.3456324524", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "c", f.get("c"), "4.8444724", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "avg_error", f.avg_error, "2.446731760e-7", claims::avg_error_digits);
    r.passed = ok;
  }

  void fit_c1_iterate(criterion_result& r) {
    r.title = "C1 alternating iteration from c2=2.5, e2=0.5";
    const auto& f = pipeline(pipeline_kind::c1_iterate).fits.front().second;
    auto& d = r.details;
    bool ok = detail::compare_digits(d, "a", f.get("a"), "-0.02594609078", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "b", f.get("b"), "-0.3456286995", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "c", f.get("c"), "3.320623832", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "e", f.get("e"), "0.4963284361", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "avg_error", f.avg_error, "9.010349470e-8", claims::avg_error_digits);
    d.push_back("trace length " + std::to_string(f.trace.size()) + (f.diverged ? ", diverged" : ""));
    r.passed = ok;
  }

  void fit_c2_grid(criterion_result& r) {
    r.title = "C2 grid refinement";
    const auto& f = pipeline(pipeline_kind::c2_grid).fits.front().second;
    auto& d = r.details;
    bool ok = detail::compare_digits(d, "a", f.get("a"), "0.4432884566", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "b", f.get("b"), "0.1325096085", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "c", f.get("c"), "0.274078", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "avg_error", f.avg_error, "3.65e-6", claims::avg_error_digits);
    r.passed = ok;
  }

  void fit_ratio(criterion_result& r) {
    r.title = "ratio line";
    const auto& f = pipeline(pipeline_kind::ratio_line).fits.front().second;
    auto& d = r.details;
    bool ok = detail::compare_digits(d, "a3", f.get("slope"), "5.062307637", claims::coefficient_digits);
    ok &= detail::compare_digits(d, "b3", f.get("intercept"), "-75.65700620", claims::coefficient_digits);
    r.passed = ok;
  }

  void fit_t0_c4_c5(criterion_result& r) {
    r.title = "t0 search with C4, and C5";
    const auto& c4 = pipeline(pipeline_kind::c4_t0).fits.front().second;
    const auto& c5 = pipeline(pipeline_kind::c5).fits.front().second;
    auto& d = r.details;
    const int k = claims::coefficient_digits;
    bool ok = detail::compare_digits(d, "t0", c4.get("t0"), "0.3594143172", k);
    ok &= detail::compare_digits(d, "a2", c4.get("a"), "1.039888529", k);
    ok &= detail::compare_digits(d, "b2", c4.get("b"), "-0.3305606395", k);
    ok &= detail::compare_digits(d, "c2", c4.get("c"), "0.6134039843", k);
    ok &= detail::compare_digits(d, "d2", c4.get("d"), "-0.8582793693", k);
    ok &= detail::compare_digits(d, "a3", c5.get("a"), "2.893270736", k);
    ok &= detail::compare_digits(d, "b3", c5.get("b"), "0.4164546941", k);
    ok &= detail::compare_digits(d, "c3", c5.get("c"), "-0.08501098214", k);
    ok &= detail::compare_digits(d, "d3", c5.get("d"), "-0.4621004962", k);
    r.passed = ok;
  }

  void fit_c2prime(criterion_result& r) {
    r.title = "piecewise C2' branches";
    const auto& out = pipeline(pipeline_kind::c2prime);
    const auto& odd = out.fits[0].second;
    const auto& even = out.fits[1].second;
    auto& d = r.details;
    const int k = claims::coefficient_digits;
    bool ok = detail::compare_digits(d, "odd scale", odd.get("a"), "0.4527092482", k);
    ok &= detail::compare_digits(d, "odd shift", odd.get("c"), "4.35278", k);
    ok &= detail::compare_digits(d, "odd offset", odd.get("b"), "-0.05498719946", k);
    ok &= detail::compare_digits(d, "even scale", even.get("a"), "0.4412187317", k);
    ok &= detail::compare_digits(d, "even shift", even.get("c"), "-2.01699", k);
    ok &= detail::compare_digits(d, "even offset", even.get("b"), "0.2102618735", k);
    r.passed = ok;
  }

  void properties(criterion_result& r) {
    r.title = "least-squares orthogonality, synthetic recovery, grid determinism, rh > p";
    auto& d = r.details;
    bool ok = true;

    real worst = 0;
    std::string worst_name;
    for (auto kind : all_pipelines) {
      for (const auto& [name, fit] : pipeline(kind).fits) {
        if (fit.orthogonality >= worst) {
          worst = fit.orthogonality;
          worst_name = std::string(to_string(kind)) + "/" + name;
        }
      }
    }
    bool orth = worst < parse_real(claims::orthogonality_bound);
    d.push_back("max residual/basis correlation " + format_real(worst, 3) + " (" + worst_name + ") " +
                detail::verdict(orth));
    ok &= orth;

    bool rt = synthetic_round_trips(d);
    ok &= rt;

    auto series = build_c2_series(table_, default_c1_range().values());
    auto first = to_json(grid_refine(series, fit_model::shifted_sqrt, default_c2_grid())).dump();
    auto second = to_json(grid_refine(series, fit_model::shifted_sqrt, default_c2_grid())).dump();
    bool det = first == second;
    d.push_back("C2 grid repeated: " + std::string(det ? "byte-identical" : "differs") + " " + detail::verdict(det));
    ok &= det;

    std::optional<std::int64_t> bad;
    for (std::int64_t n = 1; n <= claims::table_size && !bad; ++n) {
      if (!(rh(n) > real(table_[static_cast<std::size_t>(n)]))) bad = n;
    }
    d.push_back(bad ? "rh(n) <= p(n) at n=" + std::to_string(*bad) + " FAIL" : std::string("rh(n) > p(n) for 1..10000 ok"));
    ok &= !bad;
    r.passed = ok;
  }

  bool synthetic_round_trips(std::vector<std::string>& d) const {
    auto make = [](const real_function& f) {
      std::vector<series_point> pts;
      for (int i = 0; i < 80; ++i) {
        real x(10 + 25 * i);
        pts.push_back({x, f(x)});
      }
      return data_series("synthetic", std::move(pts));
    };
    const int k = claims::roundtrip_digits;
    bool ok = true;
    auto check = [&](const std::string& name, const real& got, const real& want) {
      bool good = agrees_to_digits(got, want, k);
      if (!good) d.push_back("synthetic " + name + " recovered as " + format_real(got, 15) + " FAIL");
      ok = ok && good;
    };

    const real pa("-0.0265"), pb("-0.3456"), pc("4.8125"), pe("0.5");
    auto power = make([&](const real& x) { return real(pa / pow(x + pc, pe) + pb); });
    auto grid_power = grid_refine(power, fit_model::shifted_power, {real("0.5"), real(15), real("0.1"), 5});
    check("power a", grid_power.get("a"), pa);
    check("power b", grid_power.get("b"), pb);
    check("power c", grid_power.get("c"), pc);
    auto es = refine_exponent_scale(power, pb, pc);
    check("exponent", es.e2, pe);
    check("scale", es.a, pa);
    check("scale (fixed exponent)", refine_scale_fixed_exponent(power, pb, pc, pe), pa);
    check("shift", refine_shift(power, pa, pb, pe), pc);
    iteration_options opt;
    opt.init_c2 = pc;
    opt.init_e2 = pe;
    opt.max_iter = 3;
    auto it = iterate_c1_fit(power, opt);
    check("iteration c", it.get("c"), pc);
    check("iteration e", it.get("e"), pe);

    const real sa("0.4527"), sb("-0.055"), sc("4.35");
    auto sq = make([&](const real& x) { return real(sa * sqrt(x + sc) + sb); });
    auto grid_sqrt = grid_refine(sq, fit_model::shifted_sqrt, {real("-2.9"), real(15), real("0.1"), 4});
    check("sqrt a", grid_sqrt.get("a"), sa);
    check("sqrt b", grid_sqrt.get("b"), sb);
    check("sqrt c", grid_sqrt.get("c"), sc);

    auto cubic = fit_cubic(make([](const real& x) { return real(real("8.38") * x * x * x + 130 * x * x - 120000 * x + 42000000); }));
    check("cubic a", cubic.get("a"), real("8.38"));
    check("cubic d", cubic.get("d"), real(42000000));

    const real t0("0.359");
    auto basis = fit_power_basis(make([&](const real& x) {
      real u = x - t0;
      return real(real("1.04") * u * sqrt(u) - real("0.33") * u + real("0.61") * sqrt(u) - real("0.86"));
    }), t0);
    check("basis a", basis.get("a"), real("1.04"));
    check("basis d", basis.get("d"), real("-0.86"));

    auto line = fit_line(make([](const real& x) { return real(real("5.0623") * x - real("75.657")); }));
    check("line slope", line.get("slope"), real("5.0623"));
    check("line intercept", line.get("intercept"), real("-75.657"));

    d.push_back(std::string("synthetic model recovery to ") + std::to_string(k) + " digits " + detail::verdict(ok));
    return ok;
  }

  const partition_table& table_;
  coefficient_registry registry_;
  std::map<std::pair<estimator_kind, bool>, error_report> reports_;
  std::map<pipeline_kind, pipeline_output> pipelines_;
};

}  // namespace hrpart
