#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hrpart/analysis.hpp"

using namespace hrpart;

namespace {

const partition_table& table() {
  static const partition_table t = build_table(1000);
  return t;
}

const coefficient_registry& published() {
  static const coefficient_registry r = coefficient_registry::published_defaults();
  return r;
}

std::string csv_text(const error_report& r) {
  std::ostringstream os;
  emit_csv(r, os);
  return os.str();
}

}  // namespace

TEST(Scan, RowsSortedAndConsistent) {
  auto r = scan(table(), estimator_kind::rh, {1, 1000, 1}, published());
  ASSERT_EQ(r.rows.size(), 1000u);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    ASSERT_EQ(row.n, static_cast<std::int64_t>(i + 1));
    ASSERT_TRUE(row.ok());
    ASSERT_EQ(row.abs_rel_error, abs(row.rel_error));
    ASSERT_EQ(*row.estimate, rh(row.n));
  }
  EXPECT_TRUE(agrees_to_digits(r.find(100)->rel_error, real("0.045713563073635769795"), 18));
}

TEST(Scan, MinimumErrorOfPlainAsymptotic) {
  auto s = scan(table(), estimator_kind::rh, {1, 1000, 1}, published()).summary();
  EXPECT_GT(s.min_abs, real("0.014"));
  EXPECT_EQ(s.argmax_n, 1);
}

TEST(Scan, RoundedComparesIntegers) {
  auto r = scan(table(), estimator_kind::rh1, {100, 100, 1}, published(), true);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(*r.rows[0].estimate, real(190569177));
  EXPECT_EQ(real(r.rows[0].exact) - *r.rows[0].estimate, 115);
}

TEST(Scan, DomainErrorsAreMarked) {
  auto r = scan(table(), estimator_kind::rd3, {10, 20, 1}, published());
  for (const auto& row : r.rows) EXPECT_EQ(row.ok(), row.n >= 15) << row.n;
  auto s = r.summary();
  EXPECT_EQ(s.invalid, 5u);
  EXPECT_EQ(s.valid, 6u);
  auto h0 = scan(table(), estimator_kind::rh0, {1, 5, 1}, published(), true);
  EXPECT_FALSE(h0.find(2)->ok());
  EXPECT_TRUE(h0.find(3)->ok());
}

TEST(Scan, BadRanges) {
  EXPECT_THROW(scan(table(), estimator_kind::rh, {5, 4, 1}, published()), config_error);
  EXPECT_THROW(scan(table(), estimator_kind::rh, {1, 1001, 1}, published()), config_error);
  EXPECT_THROW(scan(table(), estimator_kind::rh, {1, 10, 0}, published()), config_error);
}

TEST(Thresholds, PassFailAndWitness) {
  auto r = scan(table(), estimator_kind::rh, {1, 1000, 1}, published());
  threshold_clause above{1, 25, real("0.09"), threshold_direction::all_above, {}};
  threshold_clause below{1, 25, real("0.09"), threshold_direction::all_below, {}};
  auto res = check_thresholds(r, {above, below});
  EXPECT_TRUE(res[0].passed);
  EXPECT_EQ(res[0].checked, 25u);
  EXPECT_FALSE(res[1].passed);
  ASSERT_TRUE(res[1].witness_n.has_value());
  EXPECT_EQ(*res[1].witness_n, 1);
  EXPECT_EQ(res[1].violations.size(), 25u);
}

TEST(Thresholds, ExactDirectionAndSkippedRows) {
  auto r = scan(table(), estimator_kind::rh3, {1, 20, 1}, published(), true);
  threshold_clause c{0, 0, real(0), threshold_direction::exact, {3, 4, 5}};
  auto res = check_clause(r, c);
  EXPECT_TRUE(res.passed);
  EXPECT_EQ(res.checked, 3u);
  auto d3 = scan(table(), estimator_kind::rd3, {10, 30, 1}, published());
  auto skip = check_clause(d3, {10, 30, real("0.5"), threshold_direction::all_below, {}});
  EXPECT_EQ(skip.skipped, 5u);
  EXPECT_EQ(skip.checked, 16u);
}

TEST(Thresholds, ConfigErrors) {
  auto r = scan(table(), estimator_kind::rh, {10, 20, 2}, published());
  EXPECT_THROW(check_clause(r, {10, 12, real("0.1"), threshold_direction::all_below, {}}), config_error);
  EXPECT_THROW(check_clause(r, {12, 10, real("0.1"), threshold_direction::all_below, {}}), config_error);
  EXPECT_THROW(check_clause(r, {10, 10, real(0), threshold_direction::all_below, {}}), config_error);
  auto d3 = scan(table(), estimator_kind::rd3, {1, 5, 1}, published());
  EXPECT_THROW(check_clause(d3, {1, 5, real("0.1"), threshold_direction::all_below, {}}), config_error);
}

TEST(Csv, EmptyHeaderOnly) {
  error_report empty;
  EXPECT_EQ(csv_text(empty), std::string(report_csv_header) + "\n");
}

TEST(Csv, LineCountAndDeterminism) {
  auto r = scan(table(), estimator_kind::rh2, {10, 12, 1}, published());
  auto text = csv_text(r);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text, csv_text(r));
}

TEST(Csv, RoundTripIsLossless) {
  auto r = scan(table(), estimator_kind::rd3, {1, 60, 1}, published());
  std::istringstream is(csv_text(r));
  auto rows = parse_report_csv(is);
  ASSERT_EQ(rows.size(), r.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].n, r.rows[i].n);
    EXPECT_EQ(rows[i].exact, r.rows[i].exact);
    EXPECT_EQ(rows[i].ok(), r.rows[i].ok());
    if (rows[i].ok()) {
      EXPECT_EQ(*rows[i].estimate, *r.rows[i].estimate);
      EXPECT_EQ(rows[i].rel_error, r.rows[i].rel_error);
      EXPECT_EQ(rows[i].abs_rel_error, r.rows[i].abs_rel_error);
    }
  }
}

TEST(Csv, RejectsForeignInput) {
  std::istringstream bad("a,b\n1,2\n");
  EXPECT_THROW(parse_report_csv(bad), config_error);
  std::istringstream short_row(std::string(report_csv_header) + "\n1,2\n");
  EXPECT_THROW(parse_report_csv(short_row), config_error);
}

TEST(Csv, FitAndSeriesAndFiles) {
  auto series = build_c2_series(table(), {10, 20, 30, 40, 50});
  auto fit = grid_refine(series, fit_model::shifted_sqrt, {real(0), real(2), real("0.5"), 2});
  std::ostringstream fos;
  emit_csv(fit, fos);
  auto text = fos.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,score,a,b,c");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), fit.trace.size() + 1);
  std::ostringstream sos;
  emit_csv(series, sos, 12);
  auto stext = sos.str();
  EXPECT_EQ(std::count(stext.begin(), stext.end(), '\n'), 6);

  auto dir = std::filesystem::temp_directory_path() / "hrpart_test_csv";
  std::filesystem::create_directories(dir);
  emit_csv_file(scan(table(), estimator_kind::rh, {1, 5, 1}, published()), dir / "r.csv");
  EXPECT_TRUE(std::filesystem::exists(dir / "r.csv"));
  EXPECT_THROW(emit_csv_file(series, dir / "missing" / "x.csv"), io_error);
  std::filesystem::remove_all(dir);
}

TEST(Json, MirrorsReport) {
  auto r = scan(table(), estimator_kind::rh0, {1, 4, 1}, published(), true);
  auto j = to_json(r);
  EXPECT_EQ(j["kind"], "rh0");
  EXPECT_EQ(j["rounded"], true);
  ASSERT_EQ(j["rows"].size(), 4u);
  EXPECT_TRUE(j["rows"][1]["estimate"].is_null());
  EXPECT_EQ(j["rows"][0]["exact"], "1");
  EXPECT_EQ(j["summary"]["invalid"], 1);
}
