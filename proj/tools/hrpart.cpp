// hrpart: exact partition numbers, closed-form estimates, coefficient fits
// and the reproduction report.
//
// Exit codes: 0 success, 1 reproduction failure, 2 usage error, 3 fit divergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hrpart/analysis.hpp"
#include "hrpart/coefficients.hpp"
#include "hrpart/estimators.hpp"
#include "hrpart/exact.hpp"
#include "hrpart/pipelines.hpp"
#include "hrpart/range.hpp"
#include "hrpart/repro.hpp"
#include "hrpart/table_io.hpp"

namespace fs = std::filesystem;
using namespace hrpart;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_repro_failure = 1;
constexpr int exit_usage = 2;
constexpr int exit_diverged = 3;

constexpr const char* version = "1.0.0";

struct usage_failure : error {
  using error::error;
};

struct global_options {
  int precision = default_output_digits;
  std::string coeffs;
  std::string cache_dir;
  std::string config;
};

struct selection_options {
  std::optional<std::int64_t> n;
  std::string range;
  std::string format = "plain";
  std::string output;
};

std::vector<std::int64_t> requested_ns(const selection_options& s) {
  if (s.n && !s.range.empty()) throw usage_failure("give either n or --range, not both");
  if (s.n) return {*s.n};
  if (!s.range.empty()) return parse_range(s.range).values();
  throw usage_failure("give n or --range");
}

coefficient_registry load_registry(const global_options& g) {
  auto registry = coefficient_registry::published_defaults();
  if (!g.coeffs.empty()) registry = registry.with(load_coefficient_sets(g.coeffs));
  return registry;
}

partition_table load_table_upto(const global_options& g, std::int64_t max_n) {
  if (max_n < 0) throw usage_failure("n must be >= 0");
  auto cache = g.cache_dir.empty() ? table_cache::from_environment() : table_cache(fs::path(g.cache_dir));
  return cache.get(static_cast<std::size_t>(max_n));
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Run metadata lives beside the data file so the data itself stays deterministic.
void write_sidecar(const fs::path& data_path, const std::vector<std::string>& argv, const global_options& g) {
  nlohmann::json meta{{"tool", "hrpart"},
                      {"version", version},
                      {"created_utc", utc_timestamp()},
                      {"argv", argv},
                      {"output_digits", g.precision},
                      {"working_digits", working_digits},
                      {"coefficients", g.coeffs.empty() ? "built-in" : g.coeffs}};
  fs::path meta_path = data_path;
  meta_path += ".meta.json";
  std::ofstream os(meta_path, std::ios::binary);
  if (!os) throw io_error("cannot write " + meta_path.string());
  os << meta.dump(2) << '\n';
}

// Writes `text` to `path`, or to stdout when path is empty.
void emit(const std::string& text, const std::string& path, const std::vector<std::string>& argv,
          const global_options& g) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot write " + path);
  os << text;
  if (!os) throw io_error("write failed for " + path);
  write_sidecar(path, argv, g);
}

void check_format(const std::string& f) {
  if (f != "plain" && f != "csv" && f != "json") throw usage_failure("unknown format '" + f + "'");
}

// ---- exact ----

int cmd_exact(const global_options& g, const selection_options& s, const std::vector<std::string>& argv) {
  check_format(s.format);
  auto ns = requested_ns(s);
  for (auto n : ns) {
    if (n < 0) throw usage_failure("n must be >= 0, got " + std::to_string(n));
  }
  auto table = load_table_upto(g, *std::max_element(ns.begin(), ns.end()));
  std::ostringstream os;
  if (s.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (auto n : ns) rows.push_back({{"n", n}, {"p", format_bigint(table.at(n))}});
    os << rows.dump(2) << '\n';
  } else if (s.format == "csv") {
    os << "n,p\n";
    for (auto n : ns) os << n << ',' << format_bigint(table.at(n)) << '\n';
  } else if (ns.size() == 1) {
    os << format_bigint(table.at(ns.front())) << '\n';
  } else {
    for (auto n : ns) os << n << ' ' << format_bigint(table.at(n)) << '\n';
  }
  emit(os.str(), s.output, argv, g);
  return exit_ok;
}

// ---- estimate ----

int cmd_estimate(const global_options& g, const std::string& kind_name, const selection_options& s, bool rounded,
                 const std::vector<std::string>& argv) {
  check_format(s.format);
  auto kind = parse_estimator_kind(kind_name);
  auto registry = load_registry(g);
  auto ns = requested_ns(s);
  struct row {
    std::int64_t n;
    std::string value;
    std::string error;
  };
  std::vector<row> rows;
  bool any_ok = false;
  for (auto n : ns) {
    try {
      real v = estimate(kind, n, registry);
      rows.push_back({n, rounded ? format_bigint(round_half_up(v)) : format_real(v, g.precision), ""});
      any_ok = true;
    } catch (const domain_error& e) {
      rows.push_back({n, std::string(error_marker), e.what()});
    } catch (const range_error& e) {
      rows.push_back({n, std::string(error_marker), e.what()});
    }
  }
  std::ostringstream os;
  if (s.format == "json") {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j{{"n", r.n}};
      if (r.error.empty()) {
        j["estimate"] = r.value;
      } else {
        j["estimate"] = nullptr;
        j["error"] = r.error;
      }
      out.push_back(std::move(j));
    }
    os << out.dump(2) << '\n';
  } else if (s.format == "csv") {
    os << "n,estimate\n";
    for (const auto& r : rows) os << r.n << ',' << r.value << '\n';
  } else {
    for (const auto& r : rows) {
      if (ns.size() > 1) os << r.n << ' ';
      os << r.value;
      if (!r.error.empty()) os << ' ' << r.error;
      os << '\n';
    }
  }
  emit(os.str(), s.output, argv, g);
  return any_ok ? exit_ok : exit_usage;
}

// ---- fit ----

struct fit_options {
  std::string pipeline;
  std::string fit_config;
  std::string range;
  std::string init_c2;
  std::string init_e2;
  std::optional<int> max_iter;
  bool fix_e2 = false;
  bool double_a = false;
  std::string divergence_ratio;
  std::string grid;  // low:high:step:digits
  std::string fixed_c;
  std::string fixed_e;
  std::string output;
  std::string emit_refit;
  std::string trace_csv;
};

grid_config parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw usage_failure("--grid needs low:high:step:digits");
  int digits = 0;
  try {
    digits = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw usage_failure("bad grid digit count '" + parts[3] + "'");
  }
  grid_config cfg{parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]), digits};
  cfg.validate();
  return cfg;
}

pipeline_config build_fit_config(const fit_options& f) {
  auto kind = parse_pipeline(f.pipeline);
  pipeline_config cfg;
  if (!f.fit_config.empty()) {
    std::ifstream in(f.fit_config);
    if (!in) throw io_error("cannot read " + f.fit_config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw config_error(std::string("malformed fit config: ") + e.what());
    }
    cfg = pipeline_config_from_json(j, kind);
    if (cfg.kind != kind) throw usage_failure("fit config names a different pipeline");
  }
  cfg.kind = kind;
  if (!f.range.empty()) cfg.n_values = parse_range(f.range).values();
  if (!f.init_c2.empty()) cfg.iteration.init_c2 = parse_real(f.init_c2);
  if (!f.init_e2.empty()) cfg.iteration.init_e2 = parse_real(f.init_e2);
  if (f.max_iter) cfg.iteration.max_iter = *f.max_iter;
  if (f.fix_e2) cfg.iteration.fix_e2 = true;
  if (f.double_a) cfg.iteration.double_a = true;
  if (!f.divergence_ratio.empty()) cfg.iteration.divergence_ratio = parse_real(f.divergence_ratio);
  if (!f.grid.empty()) cfg.grid = parse_grid(f.grid);
  if (!f.fixed_c.empty()) cfg.fixed_c = parse_real(f.fixed_c);
  if (!f.fixed_e.empty()) cfg.fixed_e = parse_real(f.fixed_e);
  return cfg;
}

void print_trace(const fit_result& fit, std::ostream& os) {
  os << "trace (" << fit.trace.size() << " entries):\n";
  emit_csv(fit, os, 12);
}

int cmd_fit(const global_options& g, const fit_options& f, const std::vector<std::string>& argv) {
  auto cfg = build_fit_config(f);
  auto registry = load_registry(g);
  auto table = load_table_upto(g, required_max_n(cfg));
  pipeline_output out;
  try {
    out = run_pipeline(table, cfg, registry);
  } catch (const fit_diverged_error& e) {
    std::cerr << "fit diverged: " << e.what() << '\n';
    return exit_diverged;
  }
  emit(to_json(out).dump(2) + "\n", f.output, argv, g);
  if (!f.emit_refit.empty()) {
    if (!out.refit) throw usage_failure("pipeline " + f.pipeline + " does not produce estimator coefficients");
    emit(to_json(*out.refit).dump(2) + "\n", f.emit_refit, argv, g);
  }
  if (!f.trace_csv.empty()) {
    std::ostringstream os;
    emit_csv(out.fits.front().second, os);
    emit(os.str(), f.trace_csv, argv, g);
  }
  for (const auto& [name, fit] : out.fits) {
    std::ostream& os = f.output.empty() ? std::cerr : std::cout;
    os << f.pipeline << '/' << name << ':';
    for (const auto& nv : fit.coeffs) os << ' ' << nv.name << '=' << format_real(nv.value, 11);
    os << " avg_error=" << format_real(fit.avg_error, 10);
    if (fit.score != fit.avg_error) os << " objective=" << format_real(fit.score, 10);
    if (fit.diverged) os << " DIVERGED (" << fit.divergence_reason << ')';
    os << '\n';
  }
  if (out.diverged()) {
    for (const auto& [name, fit] : out.fits) {
      if (fit.diverged) print_trace(fit, std::cerr);
    }
    return exit_diverged;
  }
  return exit_ok;
}

// ---- report ----

int cmd_report(const global_options& g, const std::string& kind_name, const std::string& range_text, bool rounded,
               const std::string& format, const std::string& output, const std::vector<std::string>& argv) {
  if (format != "csv" && format != "json") throw usage_failure("report format is csv or json");
  auto kind = parse_estimator_kind(kind_name);
  auto range = parse_range(range_text);
  auto table = load_table_upto(g, range.last());
  auto report = scan(table, kind, range, load_registry(g), rounded);
  std::ostringstream os;
  if (format == "csv") {
    emit_csv(report, os);
  } else {
    os << to_json(report).dump(2) << '\n';
  }
  emit(os.str(), output, argv, g);
  auto s = report.summary();
  std::cerr << to_string(kind) << (rounded ? " (rounded)" : "") << ' ' << range.str() << ": " << s.valid << " rows, "
            << s.invalid << " undefined, |rel| min " << format_real(s.min_abs, 4) << " max " << format_real(s.max_abs, 4)
            << " (n=" << s.argmax_n << ") mean " << format_real(s.mean_abs, 4) << '\n';
  return exit_ok;
}

// ---- repro ----

int cmd_repro(const global_options& g, const std::string& only, const std::string& emit_dir,
              const std::vector<std::string>& argv) {
  auto ids = parse_selection(only);
  auto table = load_table_upto(g, claims::table_size);
  criteria_runner runner(table, load_registry(g));
  auto results = runner.run(ids);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  [" << r.group << "] " << r.title
              << '\n';
    for (const auto& d : r.details) std::cout << "          " << d << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";

  if (!emit_dir.empty()) {
    fs::path dir(emit_dir);
    fs::create_directories(dir);
    for (const auto& [name, report] : runner.standard_reports()) emit_csv_file(report, dir / (name + ".csv"));
    for (auto kind : all_pipelines) {
      const auto& out = runner.pipeline(kind);
      std::ofstream js(dir / ("fit_" + std::string(to_string(kind)) + ".json"), std::ios::binary);
      js << to_json(out).dump(2) << '\n';
      for (const auto& [name, fit] : out.fits) {
        emit_csv_file(fit, dir / ("fit_" + std::string(to_string(kind)) + "_" + name + "_trace.csv"));
      }
    }
    write_sidecar(dir / "repro", argv, g);
  }
  return failed == 0 ? exit_ok : exit_repro_failure;
}

// ---- config file ----

// Flags from a JSON file: top-level keys are global options, nested objects
// keyed by subcommand hold that subcommand's options. Options already given
// on the command line win.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw usage_failure("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw usage_failure(std::string("malformed config file: ") + e.what());
  }
  if (!j.is_object()) throw usage_failure("config file must hold a JSON object");

  auto given = [&](const std::string& name) {
    for (const auto& a : args) {
      if (a == "--" + name || a.rfind("--" + name + "=", 0) == 0) return true;
    }
    return false;
  };
  auto to_args = [&](const nlohmann::json& obj, std::vector<std::string>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object() || key == "config" || given(key)) continue;
      if (value.is_boolean()) {
        if (value.get<bool>()) out.push_back("--" + key);
      } else if (value.is_string()) {
        out.push_back("--" + key);
        out.push_back(value.get<std::string>());
      } else if (value.is_number()) {
        out.push_back("--" + key);
        out.push_back(value.dump());
      } else {
        throw usage_failure("unsupported value for config key '" + key + "'");
      }
    }
  };
  static const std::vector<std::string> subcommands = {"exact", "estimate", "fit", "report", "repro"};
  std::vector<std::string> merged{args.front()};
  std::vector<std::string> globals;
  to_args(j, globals);
  merged.insert(merged.end(), globals.begin(), globals.end());
  for (std::size_t i = 1; i < args.size(); ++i) {
    merged.push_back(args[i]);
    if (std::find(subcommands.begin(), subcommands.end(), args[i]) != subcommands.end() && j.contains(args[i])) {
      std::vector<std::string> sub;
      to_args(j.at(args[i]), sub);
      merged.insert(merged.end(), sub.begin(), sub.end());
    }
  }
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  std::vector<std::string> args;
  try {
    args = merge_config_file(raw);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }

  CLI::App app{"Exact partition numbers, Hardy-Ramanujan type estimates and their fitted coefficients"};
  app.name("hrpart");
  app.set_version_flag("--version", version);
  app.require_subcommand(1);
  global_options g;
  app.add_option("--precision", g.precision, "Significant digits printed for real values")
      ->check(CLI::Range(30, working_digits));
  app.add_option("--coeffs", g.coeffs, "Coefficient registry JSON overriding the built-in constants");
  app.add_option("--cache-dir", g.cache_dir, "Directory caching exact tables (default: $HRPART_CACHE_DIR)");
  app.add_option("--config", g.config, "JSON file with default option values");

  selection_options sel;

  auto* exact_cmd = app.add_subcommand("exact", "Print exact p(n)");
  exact_cmd->add_option("n", sel.n, "Index n");
  exact_cmd->add_option("--range", sel.range, "start:stop[:step]");
  exact_cmd->add_option("--format", sel.format, "plain, csv or json");
  exact_cmd->add_option("--output", sel.output, "Write to a file instead of stdout");

  std::string kind_name;
  bool rounded = false;
  auto* estimate_cmd = app.add_subcommand("estimate", "Evaluate an estimator");
  estimate_cmd->add_option("kind", kind_name, "rh, rh1, rh2, rd3, f3, rh3, rh4 or rh0")->required();
  estimate_cmd->add_option("n", sel.n, "Index n");
  estimate_cmd->add_option("--range", sel.range, "start:stop[:step]");
  estimate_cmd->add_flag("--round", rounded, "Round half up to an integer");
  estimate_cmd->add_option("--format", sel.format, "plain, csv or json");
  estimate_cmd->add_option("--output", sel.output, "Write to a file instead of stdout");

  fit_options fo;
  auto* fit_cmd = app.add_subcommand("fit", "Run a coefficient-fitting pipeline");
  fit_cmd->add_option("pipeline", fo.pipeline,
                      "c1-linear, c1-iterate, c1-grid, c2-grid, ratio-line, c3-cubic, c4-t0, c5, c2prime, "
                      "odd-c2-cubics")
      ->required();
  fit_cmd->add_option("--fit-config", fo.fit_config, "Pipeline configuration JSON");
  fit_cmd->add_option("--range", fo.range, "Dataset n values start:stop[:step]");
  fit_cmd->add_option("--init-c2", fo.init_c2, "Initial shift for c1-iterate");
  fit_cmd->add_option("--init-e2", fo.init_e2, "Initial exponent for c1-iterate");
  fit_cmd->add_option("--max-iter", fo.max_iter, "Iteration cap for c1-iterate");
  fit_cmd->add_flag("--fix-e2", fo.fix_e2, "Hold the exponent fixed");
  fit_cmd->add_flag("--double-a", fo.double_a, "Re-estimate the scale before the shift step (holds the exponent)");
  fit_cmd->add_option("--divergence-ratio", fo.divergence_ratio, "Error growth that counts as divergence");
  fit_cmd->add_option("--grid", fo.grid, "low:high:step:digits");
  fit_cmd->add_option("--fixed-c", fo.fixed_c, "Shift for c1-linear");
  fit_cmd->add_option("--fixed-e", fo.fixed_e, "Exponent for c1-linear and c1-grid");
  fit_cmd->add_option("--output", fo.output, "Write the fit result JSON to a file");
  fit_cmd->add_option("--emit-refit", fo.emit_refit, "Write the refit coefficient set (usable with --coeffs)");
  fit_cmd->add_option("--trace-csv", fo.trace_csv, "Write the trace of the first fit as CSV");

  std::string report_range;
  std::string report_format = "csv";
  std::string report_output;
  bool report_rounded = false;
  std::string report_kind;
  auto* report_cmd = app.add_subcommand("report", "Relative-error report against exact values");
  report_cmd->add_option("kind", report_kind, "Estimator")->required();
  report_cmd->add_option("--range", report_range, "start:stop[:step]")->required();
  report_cmd->add_flag("--round", report_rounded, "Compare the rounded estimate");
  report_cmd->add_option("--format", report_format, "csv or json");
  report_cmd->add_option("--output", report_output, "Write to a file instead of stdout");

  std::string only;
  std::string emit_tables;
  auto* repro_cmd = app.add_subcommand("repro", "Run the acceptance criteria");
  repro_cmd->add_option("--only", only, "Criterion ids or groups (exactness, estimators, thresholds, fitting, properties)");
  repro_cmd->add_option("--emit-tables", emit_tables, "Directory for CSV tables and fit results");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*exact_cmd) return cmd_exact(g, sel, raw);
    if (*estimate_cmd) return cmd_estimate(g, kind_name, sel, rounded, raw);
    if (*fit_cmd) return cmd_fit(g, fo, raw);
    if (*report_cmd) return cmd_report(g, report_kind, report_range, report_rounded, report_format, report_output, raw);
    if (*repro_cmd) return cmd_repro(g, only, emit_tables, raw);
  } catch (const fit_diverged_error& e) {
    std::cerr << "fit diverged: " << e.what() << '\n';
    return exit_diverged;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
