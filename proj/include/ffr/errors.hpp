#pragma once

#include <stdexcept>
#include <string>

namespace ffr {

// Rank-deficient least-squares system in the smoothing step.
struct singular_fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested factor count exceeds the numerically positive spectrum.
struct degenerate_factor_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Design covariance matrix is singular or ill-conditioned.
struct multicollinearity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigenvalue gap too small for the correction-term denominators.
struct near_degenerate_spectrum_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or incomplete market data file.
struct ingestion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A feature row at or after the forecast target leaked into training.
struct leakage_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace ffr
