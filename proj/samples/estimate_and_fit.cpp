// Builds p(n) up to 2000, compares a few estimators, refits the rh2
// correction on a small range and reports the refit's error.

#include <iostream>

#include "hrpart/analysis.hpp"
#include "hrpart/estimators.hpp"
#include "hrpart/exact.hpp"
#include "hrpart/fitting.hpp"

int main() {
  using namespace hrpart;
  auto table = build_table(2000);
  auto registry = coefficient_registry::published_defaults();

  std::cout << "p(1000) = " << format_bigint(table.at(1000)) << "\n\n";
  for (auto kind : {estimator_kind::rh, estimator_kind::rh1, estimator_kind::rh2, estimator_kind::rh3}) {
    real v = estimate(kind, 1000, registry);
    real rel = v / real(table.at(1000)) - 1;
    std::cout << to_string(kind) << "(1000) = " << format_real(v, 20) << "  rel " << format_real(rel, 3) << '\n';
  }

  n_range range{120, 2000, 20};
  auto series = build_c2_series(table, range.values());
  auto fit = grid_refine(series, fit_model::shifted_sqrt, default_c2_grid());
  std::cout << "\nC2 fit on " << range.str() << ":";
  for (const auto& nv : fit.coeffs) std::cout << ' ' << nv.name << '=' << format_real(nv.value, 10);
  std::cout << "  avg_error " << format_real(fit.avg_error, 4) << '\n';

  auto refit = coefficient_set::from_values(estimator_kind::rh2, provenance::refit,
                                            {{"a2", fit.get("a")}, {"b2", fit.get("b")}, {"c2", fit.get("c")}});
  auto report = scan(table, estimator_kind::rh2, range, registry.with({refit}), true);
  auto s = report.summary();
  std::cout << "refit rh2, rounded: max |rel| " << format_real(s.max_abs, 4) << " at n=" << s.argmax_n << '\n';
}
