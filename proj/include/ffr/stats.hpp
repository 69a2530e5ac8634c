#pragma once

namespace ffr {

// Standard normal CDF, absolute error below 1e-12 on [-8, 8].
double normal_cdf(double x);

// Inverse of normal_cdf for p in (0,1).
double normal_quantile(double p);

}  // namespace ffr
