#pragma once

namespace fairmix {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF via erfc; accurate in both tails.
double norm_cdf(double x);

// Standard normal quantile (inverse CDF), Wichura's rational approximation.
// Relative accuracy ~1e-15 over (0,1); p in {0,1} or outside [0,1] throws.
// Pinned implementation: identical results on every platform, which keeps
// seeded normal draws and threshold computations bit-reproducible.
double norm_quantile(double p);

}  // namespace fairmix
