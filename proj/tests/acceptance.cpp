// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Tolerances are fixed in hrpart::claims and in each criterion body.

#include <chrono>
#include <iostream>

#include "hrpart/coefficients.hpp"
#include "hrpart/exact.hpp"
#include "hrpart/repro.hpp"
#include "hrpart/table_io.hpp"

int main(int argc, char** argv) {
  using namespace hrpart;
  try {
    auto ids = parse_selection(argc > 1 ? argv[1] : "all");
    auto start = std::chrono::steady_clock::now();
    auto table = table_cache::from_environment().get(claims::table_size);
    criteria_runner runner(table, coefficient_registry::published_defaults());

    int failed = 0;
    for (int id : ids) {
      auto r = runner.run_one(id);
      std::cout << (r.passed ? "[PASS]" : "[FAIL]") << " criterion " << r.id << ": " << r.title << '\n';
      for (const auto& d : r.details) std::cout << "    " << d << '\n';
      if (!r.passed) ++failed;
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << ids.size() - failed << "/" << ids.size() << " criteria passed (" << secs << " s)\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << '\n';
    return 2;
  }
}
