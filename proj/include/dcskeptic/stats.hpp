// Scalar distribution helpers. Thin wrappers over Boost.Math plus the
// asymptotic Kolmogorov tail, which our Boost (1.74) predates.
#pragma once

namespace dcs {

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse standard normal cdf; InputError unless u is strictly inside (0,1).
double norm_quantile(double u);

// Upper tail P(X > x) for chi-square with df degrees of freedom.
double chi2_sf(double x, double df);

// cdf of Student t with (real) df degrees of freedom.
double t_cdf(double x, double df);

// cdf of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);

// Asymptotic Kolmogorov tail Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2),
// clamped to [0, 1].
double kolmogorov_sf(double x);

}  // namespace dcs
