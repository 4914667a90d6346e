#pragma once

// Limit distributions arising for the scaled population size:
//  - one-sided (positive) stable laws with Laplace transform exp(-lambda^alpha),
//    alpha in (0,1): the limit under power-law normalization;
//  - the "compressed" limit with Laplace transform (1 + lambda^gamma)^{-C rho}
//    appearing under balanced tail exponents.
//
// Each CDF has a primary evaluation route and at least one independent
// cross-check route (single-integral representation, Talbot inversion,
// Gaver-Stehfest inversion, and closed forms at special parameters).

namespace mbpnpi::limit {

// exp(-lambda^alpha), lambda >= 0.
double stable_lt(double alpha, double lambda);

// CDF of the one-sided stable law, via its single-integral representation
// (the same integrand family that powers the exact sampler).
double stable_cdf(double alpha, double x);

// Same CDF via Talbot inversion of (1 - exp(-s^alpha))/s. Cross-check route.
double stable_cdf_lt_inversion(double alpha, double x);

// Closed form at alpha = 1/2: erfc(1 / (2 sqrt(x))).
double stable_cdf_half(double x);

// First-order tail approximation 1 - F(x) ~ x^{-alpha} / Gamma(1-alpha).
double stable_tail_approx(double alpha, double x);

// (1 + lambda^gamma)^{-c_rho}, lambda >= 0.
double compressed_lt(double gamma, double c_rho, double lambda);

// CDF with the transform above, via Talbot inversion.
double compressed_cdf(double gamma, double c_rho, double x);

// Same CDF via Gaver-Stehfest inversion. Cross-check route.
double compressed_cdf_gs(double gamma, double c_rho, double x);

// CDF of the uniform law on [0,1] (limit of the doubly-compressed ratio).
double uniform_cdf(double x);

}  // namespace mbpnpi::limit
