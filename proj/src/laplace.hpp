#pragma once

// Numerical inversion of Laplace transforms, used to evaluate and
// cross-check limit distribution functions.

#include <complex>
#include <functional>

namespace mbpnpi::laplace {

// Fixed-Talbot inversion of f(t) from F(s) = int_0^inf e^{-st} f(t) dt,
// evaluated with M nodes on the Talbot contour. Requires t > 0 and an F
// analytic off the negative real axis (true for the transforms used here).
double talbot(const std::function<std::complex<double>(std::complex<double>)>& F,
              double t, int M = 64);

// Gaver-Stehfest inversion with n (even) terms, using only real evaluations
// of F. Lower accuracy than Talbot; serves as an independent cross-check.
double gaver_stehfest(const std::function<double(double)>& F, double t, int n = 12);

}  // namespace mbpnpi::laplace
