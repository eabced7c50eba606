#pragma once

#include <stdexcept>
#include <string>

namespace hrpart {

// Base of everything the library throws on purpose.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value outside the real domain of a formula (negative radicand, log of a
// nonpositive number, zero denominator).
struct domain_error : error {
  using error::error;
};

// n outside the declared validity range of an estimator.
struct range_error : error {
  using error::error;
};

// Table lookup past max_n.
struct index_error : error {
  using error::error;
};

// Bad configuration: unknown kind, missing coefficient, empty range, ...
struct config_error : error {
  using error::error;
};

struct singular_fit_error : error {
  using error::error;
};

struct fit_diverged_error : error {
  using error::error;
};

struct io_error : error {
  using error::error;
};

}  // namespace hrpart
