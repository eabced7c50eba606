#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "fitting.hpp"
#include "range.hpp"

namespace hrpart {

enum class pipeline_kind { c1_linear, c1_iterate, c1_grid, c2_grid, ratio_line, c3_cubic, c4_t0, c5, c2prime, odd_c2_cubics };

inline constexpr std::array<pipeline_kind, 10> all_pipelines = {
    pipeline_kind::c1_linear, pipeline_kind::c1_iterate, pipeline_kind::c1_grid,  pipeline_kind::c2_grid,
    pipeline_kind::ratio_line, pipeline_kind::c3_cubic,  pipeline_kind::c4_t0,    pipeline_kind::c5,
    pipeline_kind::c2prime,   pipeline_kind::odd_c2_cubics};

inline std::string_view to_string(pipeline_kind k) {
  switch (k) {
    case pipeline_kind::c1_linear: return "c1-linear";
    case pipeline_kind::c1_iterate: return "c1-iterate";
    case pipeline_kind::c1_grid: return "c1-grid";
    case pipeline_kind::c2_grid: return "c2-grid";
    case pipeline_kind::ratio_line: return "ratio-line";
    case pipeline_kind::c3_cubic: return "c3-cubic";
    case pipeline_kind::c4_t0: return "c4-t0";
    case pipeline_kind::c5: return "c5";
    case pipeline_kind::c2prime: return "c2prime";
    case pipeline_kind::odd_c2_cubics: return "odd-c2-cubics";
  }
  throw config_error("unknown pipeline");
}

inline pipeline_kind parse_pipeline(std::string_view text) {
  for (auto k : all_pipelines) {
    if (to_string(k) == text) return k;
  }
  throw config_error("unknown pipeline '" + std::string(text) + "'");
}

struct pipeline_config {
  pipeline_kind kind = pipeline_kind::c1_grid;
  std::optional<std::vector<std::int64_t>> n_values;  // default depends on the pipeline
  std::optional<grid_config> grid;
  iteration_options iteration;
  real fixed_c{"2.5"};  // c1-linear
  real fixed_e{"0.5"};  // c1-linear and the c1-grid exponent
};

inline n_range default_range(pipeline_kind k) {
  switch (k) {
    case pipeline_kind::c3_cubic:
    case pipeline_kind::c4_t0:
    case pipeline_kind::c5: return default_diff_range();
    case pipeline_kind::c2prime: return default_c2prime_range();
    case pipeline_kind::odd_c2_cubics: return {3, 39, 2};
    default: return default_c1_range();
  }
}

inline std::optional<grid_config> default_grid(pipeline_kind k) {
  switch (k) {
    case pipeline_kind::c1_grid: return default_c1_grid();
    case pipeline_kind::c2_grid: return default_c2_grid();
    case pipeline_kind::c2prime: return default_c2prime_grid();
    case pipeline_kind::c4_t0: return default_t0_grid();
    default: return std::nullopt;
  }
}

inline std::vector<std::int64_t> pipeline_n_values(const pipeline_config& cfg) {
  auto ns = cfg.n_values ? *cfg.n_values : default_range(cfg.kind).values();
  if (ns.empty()) throw config_error("pipeline needs at least one n");
  if (!std::is_sorted(ns.begin(), ns.end()) || std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
    throw config_error("pipeline n values must be strictly increasing");
  }
  if (ns.front() < 1) throw config_error("pipeline n values must be >= 1");
  return ns;
}

inline std::int64_t required_max_n(const pipeline_config& cfg) { return pipeline_n_values(cfg).back(); }

struct pipeline_output {
  pipeline_kind kind;
  std::vector<std::pair<std::string, fit_result>> fits;
  std::optional<coefficient_set> refit;  // for pipelines that feed an estimator

  bool diverged() const {
    return std::any_of(fits.begin(), fits.end(), [](const auto& f) { return f.second.diverged; });
  }
};

namespace detail {

inline coefficient_set refit_set(estimator_kind kind, const std::vector<std::pair<std::string, real>>& values) {
  return coefficient_set::from_values(kind, provenance::refit, values);
}

}  // namespace detail

inline pipeline_output run_pipeline(const partition_table& table, const pipeline_config& cfg,
                                    const coefficient_registry& registry = coefficient_registry::published_defaults()) {
  auto ns = pipeline_n_values(cfg);
  auto grid = cfg.grid ? *cfg.grid : default_grid(cfg.kind).value_or(grid_config{});
  pipeline_output out{cfg.kind, {}, std::nullopt};
  switch (cfg.kind) {
    case pipeline_kind::c1_linear: {
      out.fits.emplace_back("c1", fit_shifted_power_fixed(build_c1_series(table, ns), cfg.fixed_c, cfg.fixed_e));
      break;
    }
    case pipeline_kind::c1_iterate: {
      out.fits.emplace_back("c1", iterate_c1_fit(build_c1_series(table, ns), cfg.iteration));
      break;
    }
    case pipeline_kind::c1_grid: {
      auto r = grid_refine(build_c1_series(table, ns), fit_model::shifted_power, grid, cfg.fixed_e);
      if (cfg.fixed_e == real("0.5")) {
        out.refit = detail::refit_set(estimator_kind::rh1, {{"a1", r.get("a")}, {"b1", r.get("b")}, {"c1", r.get("c")}});
      }
      out.fits.emplace_back("c1", std::move(r));
      break;
    }
    case pipeline_kind::c2_grid: {
      auto r = grid_refine(build_c2_series(table, ns), fit_model::shifted_sqrt, grid);
      out.refit = detail::refit_set(estimator_kind::rh2, {{"a2", r.get("a")}, {"b2", r.get("b")}, {"c2", r.get("c")}});
      out.fits.emplace_back("c2", std::move(r));
      break;
    }
    case pipeline_kind::ratio_line: {
      auto r = fit_ratio_line(table, ns);
      out.refit = detail::refit_set(estimator_kind::rd3, {{"a3", r.get("slope")}, {"b3", r.get("intercept")}});
      out.fits.emplace_back("ratio", std::move(r));
      break;
    }
    case pipeline_kind::c3_cubic: {
      auto r = fit_c3_cubic(table, ns);
      out.refit = detail::refit_set(estimator_kind::f3, {{"a1", r.get("a")}, {"b1", r.get("b")},
                                                         {"c1", r.get("c")}, {"d1", r.get("d")}});
      out.fits.emplace_back("c3", std::move(r));
      break;
    }
    case pipeline_kind::c4_t0: {
      auto r = fit_t0_and_c4(table, ns, grid);
      out.refit = detail::refit_set(estimator_kind::rh3, {{"t0", r.get("t0")}, {"a2", r.get("a")}, {"b2", r.get("b")},
                                                          {"c2", r.get("c")}, {"d2", r.get("d")}});
      out.fits.emplace_back("c4", std::move(r));
      break;
    }
    case pipeline_kind::c5: {
      auto r = fit_c5(table, ns);
      out.refit = detail::refit_set(estimator_kind::rh4, {{"a3", r.get("a")}, {"b3", r.get("b")},
                                                          {"c3", r.get("c")}, {"d3", r.get("d")}});
      out.fits.emplace_back("c5", std::move(r));
      break;
    }
    case pipeline_kind::c2prime: {
      auto fits = fit_c2prime_piecewise(table, grid, n_range{ns.front(), ns.back(), 1});
      out.refit = detail::refit_set(estimator_kind::rh0, {{"odd_scale", fits.first.get("a")},
                                                          {"odd_shift", fits.first.get("c")},
                                                          {"odd_offset", fits.first.get("b")},
                                                          {"even_scale", fits.second.get("a")},
                                                          {"even_shift", fits.second.get("c")},
                                                          {"even_offset", fits.second.get("b")}});
      out.fits.emplace_back("odd", std::move(fits.first));
      out.fits.emplace_back("even", std::move(fits.second));
      break;
    }
    case pipeline_kind::odd_c2_cubics: {
      auto fits = fit_odd_c2_cubics(table, registry.get(estimator_kind::rh1), n_range{ns.front(), ns.back(), 2});
      out.fits.emplace_back("part_a", std::move(fits.first));
      out.fits.emplace_back("part_b", std::move(fits.second));
      break;
    }
  }
  return out;
}

// ---- JSON ----

inline nlohmann::json coefficients_to_json(const coefficient_list& list) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& nv : list) j[nv.name] = format_real(nv.value, 0);
  return j;
}

inline coefficient_list coefficients_from_json(const nlohmann::json& j, const std::vector<std::string>& order = {}) {
  coefficient_list out;
  if (!order.empty()) {
    for (const auto& name : order) out.push_back({name, parse_real(j.at(name).get<std::string>())});
    return out;
  }
  for (const auto& [name, v] : j.items()) out.push_back({name, parse_real(v.get<std::string>())});
  return out;
}

inline nlohmann::json to_json(const fit_result& r, bool with_trace = true) {
  nlohmann::json names = nlohmann::json::array();
  for (const auto& nv : r.coeffs) names.push_back(nv.name);
  nlohmann::json j{{"model", std::string(to_string(r.model))},
                   {"label", r.label},
                   {"coefficient_order", names},
                   {"coefficients", coefficients_to_json(r.coeffs)},
                   {"avg_error", format_real(r.avg_error, 0)},
                   {"score", format_real(r.score, 0)},
                   {"orthogonality", format_real(r.orthogonality, 0)},
                   {"diverged", r.diverged},
                   {"divergence_reason", r.divergence_reason}};
  if (with_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"index", t.index}, {"coefficients", coefficients_to_json(t.coeffs)}, {"score", format_real(t.score, 0)}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

inline fit_result fit_result_from_json(const nlohmann::json& j) {
  try {
    fit_result r;
    r.model = parse_fit_model(j.at("model").get<std::string>());
    r.label = j.value("label", std::string());
    r.coeffs = coefficients_from_json(j.at("coefficients"), j.value("coefficient_order", std::vector<std::string>{}));
    r.avg_error = parse_real(j.at("avg_error").get<std::string>());
    r.score = parse_real(j.value("score", j.at("avg_error").get<std::string>()));
    r.orthogonality = parse_real(j.value("orthogonality", std::string("0")));
    r.diverged = j.value("diverged", false);
    r.divergence_reason = j.value("divergence_reason", std::string());
    std::vector<std::string> order;
    for (const auto& nv : r.coeffs) order.push_back(nv.name);
    if (j.contains("trace")) {
      for (const auto& t : j.at("trace")) {
        trace_entry e;
        e.index = t.at("index").get<std::int64_t>();
        e.coeffs = coefficients_from_json(t.at("coefficients"));
        e.score = parse_real(t.at("score").get<std::string>());
        r.trace.push_back(std::move(e));
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed fit result: ") + e.what());
  }
}

inline nlohmann::json to_json(const pipeline_output& out, bool with_trace = true) {
  nlohmann::json fits = nlohmann::json::object();
  for (const auto& [name, r] : out.fits) fits[name] = to_json(r, with_trace);
  nlohmann::json j{{"pipeline", std::string(to_string(out.kind))}, {"fits", std::move(fits)}};
  if (out.refit) j["refit"] = to_json(*out.refit);
  return j;
}

// {"pipeline": name,
//  "range": {"start", "stop", "step"} | "n_values": [...],
//  "grid": {"c_low", "c_high", "step", "digits"},
//  "iteration": {"init_c2", "init_e2", "max_iter", "fix_e2", "double_a", "divergence_ratio"},
//  "fixed_c", "fixed_e"}
// Real values are decimal strings.
inline pipeline_config pipeline_config_from_json(const nlohmann::json& j, std::optional<pipeline_kind> kind = std::nullopt) {
  try {
    pipeline_config cfg;
    if (j.contains("pipeline")) {
      cfg.kind = parse_pipeline(j.at("pipeline").get<std::string>());
    } else if (kind) {
      cfg.kind = *kind;
    } else {
      throw config_error("fit config names no pipeline");
    }
    if (j.contains("range") && j.contains("n_values")) throw config_error("give either range or n_values");
    if (j.contains("range")) {
      const auto& r = j.at("range");
      n_range nr{r.at("start").get<std::int64_t>(), r.at("stop").get<std::int64_t>(), r.value("step", std::int64_t{1})};
      cfg.n_values = nr.values();
    }
    if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<std::int64_t>>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      grid_config gc{parse_real(g.at("c_low").get<std::string>()), parse_real(g.at("c_high").get<std::string>()),
                     parse_real(g.at("step").get<std::string>()), g.at("digits").get<int>()};
      gc.validate();
      cfg.grid = gc;
    }
    if (j.contains("iteration")) {
      const auto& it = j.at("iteration");
      if (it.contains("init_c2")) cfg.iteration.init_c2 = parse_real(it.at("init_c2").get<std::string>());
      if (it.contains("init_e2")) cfg.iteration.init_e2 = parse_real(it.at("init_e2").get<std::string>());
      cfg.iteration.max_iter = it.value("max_iter", cfg.iteration.max_iter);
      cfg.iteration.fix_e2 = it.value("fix_e2", cfg.iteration.fix_e2);
      cfg.iteration.double_a = it.value("double_a", cfg.iteration.double_a);
      if (it.contains("divergence_ratio")) {
        cfg.iteration.divergence_ratio = parse_real(it.at("divergence_ratio").get<std::string>());
      }
    }
    if (j.contains("fixed_c")) cfg.fixed_c = parse_real(j.at("fixed_c").get<std::string>());
    if (j.contains("fixed_e")) cfg.fixed_e = parse_real(j.at("fixed_e").get<std::string>());
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed fit config: ") + e.what());
  }
}

}  // namespace hrpart
