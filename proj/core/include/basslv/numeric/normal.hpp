#pragma once

namespace basslv {

/// Standard normal density, CDF and inverse CDF.
///
/// norm_cdf is evaluated through erfc and is accurate to full double
/// precision including the far tails. norm_ppf uses Wichura's PPND16
/// rational approximation followed by one Halley refinement step; the
/// relative error is below 1e-15 on (0,1). Bit-exactness across libm
/// implementations is not guaranteed and not required.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_ppf(double p);

/// Density / CDF of a centered Gaussian with the given variance.
double gauss_pdf(double x, double variance);
double gauss_cdf(double x, double variance);

}  // namespace basslv
