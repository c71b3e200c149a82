#pragma once

namespace tavc {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile z_p for p in (0, 1). Acklam's rational
// approximation refined by one Halley step; absolute error well below 1e-12
// over (1e-300, 1 - 1e-16). Throws ParameterError outside (0, 1).
double normal_quantile(double p);

}  // namespace tavc
