#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "fitting.hpp"
#include "range.hpp"
#include "real.hpp"

namespace hrpart {

inline constexpr std::string_view error_marker = "ERROR";

struct report_row {
  std::int64_t n = 0;
  std::optional<real> estimate;  // empty when the estimator is undefined at n
  bigint exact;
  real rel_error = 0;  // (estimate - exact) / exact
  real abs_rel_error = 0;
  std::string error;

  bool ok() const { return estimate.has_value(); }

  friend bool operator==(const report_row&, const report_row&) = default;
};

struct report_summary {
  std::size_t valid = 0;
  std::size_t invalid = 0;
  real min_abs = 0;
  real max_abs = 0;
  real mean_abs = 0;
  std::int64_t argmax_n = 0;
};

struct error_report {
  estimator_kind kind = estimator_kind::rh;
  bool rounded = false;
  n_range range;
  std::vector<report_row> rows;

  report_summary summary() const {
    report_summary s;
    real total = 0;
    for (const auto& r : rows) {
      if (!r.ok()) {
        ++s.invalid;
        continue;
      }
      if (s.valid == 0 || r.abs_rel_error < s.min_abs) s.min_abs = r.abs_rel_error;
      if (s.valid == 0 || r.abs_rel_error > s.max_abs) {
        s.max_abs = r.abs_rel_error;
        s.argmax_n = r.n;
      }
      total += r.abs_rel_error;
      ++s.valid;
    }
    if (s.valid > 0) s.mean_abs = total / s.valid;
    return s;
  }

  const report_row* find(std::int64_t n) const {
    for (const auto& r : rows) {
      if (r.n == n) return &r;
    }
    return nullptr;
  }
};

inline report_row make_row(std::int64_t n, const real& estimate, const bigint& exact) {
  report_row row;
  row.n = n;
  row.estimate = estimate;
  row.exact = exact;
  real e(exact);
  row.rel_error = (estimate - e) / e;
  row.abs_rel_error = abs(row.rel_error);
  return row;
}

// Relative error of `kind` against the table over `range`. Rounded scans
// compare round_half_up(estimate). Points where the estimator is undefined
// carry an error marker instead of a value.
inline error_report scan(const partition_table& table, estimator_kind kind, const n_range& range,
                         const coefficient_registry& registry, bool rounded = false) {
  range.validate();
  if (range.start < 0 || static_cast<std::uint64_t>(range.last()) > table.max_n()) {
    throw config_error("range " + range.str() + " exceeds the exact table (max_n " + std::to_string(table.max_n()) + ")");
  }
  error_report report{kind, rounded, range, {}};
  for (auto n : range.values()) {
    const bigint& exact = table.at(n);
    try {
      real v = estimate(kind, n, registry);
      if (rounded) v = real(round_half_up(v));
      report.rows.push_back(make_row(n, v, exact));
    } catch (const domain_error& e) {
      report_row row;
      row.n = n;
      row.exact = exact;
      row.error = e.what();
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

// ---- thresholds ----

enum class threshold_direction { all_below, all_above, exact };

inline std::string_view to_string(threshold_direction d) {
  switch (d) {
    case threshold_direction::all_below: return "all_below";
    case threshold_direction::all_above: return "all_above";
    case threshold_direction::exact: return "exact";
  }
  return "?";
}

// Every integer n in [n_low, n_high] must satisfy abs_rel_error < bound
// (all_below), > bound (all_above) or == 0 (exact).
struct threshold_clause {
  std::int64_t n_low = 0;
  std::int64_t n_high = 0;
  real bound = 0;
  threshold_direction direction = threshold_direction::all_below;
  std::vector<std::int64_t> only;  // when nonempty, the clause covers exactly these n

  void validate() const {
    if (only.empty() && n_low > n_high) throw config_error("threshold clause has n_low > n_high");
    if (direction != threshold_direction::exact && !(bound > 0)) throw config_error("threshold bound must be positive");
  }

  std::vector<std::int64_t> points() const {
    if (!only.empty()) return only;
    std::vector<std::int64_t> out;
    for (auto n = n_low; n <= n_high; ++n) out.push_back(n);
    return out;
  }

  std::string describe() const {
    std::string where = std::to_string(n_low) + ".." + std::to_string(n_high);
    if (!only.empty()) {
      where = "n in {";
      for (std::size_t i = 0; i < only.size(); ++i) where += (i ? "," : "") + std::to_string(only[i]);
      where += "}";
    }
    switch (direction) {
      case threshold_direction::all_below: return where + " |rel| < " + format_real(bound, 4);
      case threshold_direction::all_above: return where + " |rel| > " + format_real(bound, 4);
      case threshold_direction::exact: return where + " exact";
    }
    return where;
  }
};

struct clause_result {
  threshold_clause clause;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // rows carrying an error marker
  std::vector<std::int64_t> violations;
  std::optional<std::int64_t> witness_n;  // first violation
  real witness_value = 0;
  std::int64_t worst_n = 0;  // row closest to (or furthest past) the bound
  real worst_value = 0;
};

inline clause_result check_clause(const error_report& report, const threshold_clause& clause) {
  clause.validate();
  std::map<std::int64_t, const report_row*> index;
  for (const auto& r : report.rows) index[r.n] = &r;
  clause_result res{clause, true, 0, 0, {}, std::nullopt, 0, 0, 0};
  bool have_worst = false;
  for (auto n : clause.points()) {
    auto it = index.find(n);
    if (it == index.end()) {
      throw config_error("report does not cover n=" + std::to_string(n) + " required by clause " + clause.describe());
    }
    const auto& row = *it->second;
    if (!row.ok()) {
      ++res.skipped;
      continue;
    }
    ++res.checked;
    const real& v = row.abs_rel_error;
    bool ok = false;
    bool worse = false;
    switch (clause.direction) {
      case threshold_direction::all_below:
        ok = v < clause.bound;
        worse = !have_worst || v > res.worst_value;
        break;
      case threshold_direction::all_above:
        ok = v > clause.bound;
        worse = !have_worst || v < res.worst_value;
        break;
      case threshold_direction::exact:
        ok = v == 0;
        worse = !have_worst || v > res.worst_value;
        break;
    }
    if (worse) {
      res.worst_n = n;
      res.worst_value = v;
      have_worst = true;
    }
    if (!ok) {
      res.passed = false;
      res.violations.push_back(n);
      if (!res.witness_n) {
        res.witness_n = n;
        res.witness_value = v;
      }
    }
  }
  if (res.checked == 0) throw config_error("clause " + clause.describe() + " has no valid rows");
  return res;
}

inline std::vector<clause_result> check_thresholds(const error_report& report, const std::vector<threshold_clause>& clauses) {
  std::vector<clause_result> out;
  out.reserve(clauses.size());
  for (const auto& c : clauses) out.push_back(check_clause(report, c));
  return out;
}

// ---- CSV ----

namespace detail {

inline void write_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline constexpr std::string_view report_csv_header = "n,estimate,exact,rel_error,abs_rel_error";

// digits == 0 writes every stored digit, so parse_report_csv restores the
// rows exactly.
inline void emit_csv(const error_report& report, std::ostream& os, int digits = 0) {
  os << report_csv_header << '\n';
  for (const auto& r : report.rows) {
    if (r.ok()) {
      detail::write_line(os, {std::to_string(r.n), format_real(*r.estimate, digits), format_bigint(r.exact),
                              format_real(r.rel_error, digits), format_real(r.abs_rel_error, digits)});
    } else {
      detail::write_line(os, {std::to_string(r.n), std::string(error_marker), format_bigint(r.exact), "", ""});
    }
  }
}

inline std::vector<report_row> parse_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != report_csv_header) throw config_error("not a report CSV");
  std::vector<report_row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != 5) throw config_error("report CSV row needs 5 cells: " + line);
    report_row row;
    try {
      row.n = std::stoll(cells[0]);
    } catch (const std::exception&) {
      throw config_error("bad n in report CSV: " + cells[0]);
    }
    row.exact = parse_bigint(cells[2]);
    if (cells[1] == error_marker) {
      row.error = std::string(error_marker);
    } else {
      row.estimate = parse_real(cells[1]);
      row.rel_error = parse_real(cells[3]);
      row.abs_rel_error = parse_real(cells[4]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// index, score, then one column per coefficient of the first trace entry.
inline void emit_csv(const fit_result& fit, std::ostream& os, int digits = 0) {
  std::vector<std::string> header{"index", "score"};
  const auto& names = fit.trace.empty() ? fit.coeffs : fit.trace.front().coeffs;
  for (const auto& nv : names) header.push_back(nv.name);
  detail::write_line(os, header);
  auto row = [&](const std::string& idx, const real& score, const coefficient_list& coeffs) {
    std::vector<std::string> cells{idx, format_real(score, digits)};
    for (const auto& nv : names) cells.push_back(format_real(find_value(coeffs, nv.name), digits));
    detail::write_line(os, cells);
  };
  if (fit.trace.empty()) {
    row("result", fit.score, fit.coeffs);
  } else {
    for (const auto& t : fit.trace) row(std::to_string(t.index), t.score, t.coeffs);
  }
}

inline void emit_csv(const data_series& series, std::ostream& os, int digits = 0) {
  os << "x,y\n";
  for (const auto& p : series.points()) detail::write_line(os, {format_real(p.x, digits), format_real(p.y, digits)});
}

template <class T>
void emit_csv_file(const T& value, const std::filesystem::path& path, int digits = 0) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot write " + path.string());
  emit_csv(value, os, digits);
  if (!os) throw io_error("write failed for " + path.string());
}

// ---- JSON mirror ----

inline nlohmann::json to_json(const error_report& report, int digits = 0) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j{{"n", r.n}, {"exact", format_bigint(r.exact)}};
    if (r.ok()) {
      j["estimate"] = format_real(*r.estimate, digits);
      j["rel_error"] = format_real(r.rel_error, digits);
      j["abs_rel_error"] = format_real(r.abs_rel_error, digits);
    } else {
      j["estimate"] = nullptr;
      j["error"] = r.error;
    }
    rows.push_back(std::move(j));
  }
  auto s = report.summary();
  return {{"kind", std::string(to_string(report.kind))},
          {"rounded", report.rounded},
          {"range", {{"start", report.range.start}, {"stop", report.range.stop}, {"step", report.range.step}}},
          {"summary",
           {{"valid", s.valid},
            {"invalid", s.invalid},
            {"min_abs_rel_error", format_real(s.min_abs, 10)},
            {"max_abs_rel_error", format_real(s.max_abs, 10)},
            {"mean_abs_rel_error", format_real(s.mean_abs, 10)},
            {"argmax_n", s.argmax_n}}},
          {"rows", std::move(rows)}};
}

}  // namespace hrpart
