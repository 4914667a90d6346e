#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"

namespace mbpnpi::num {

// Controls for adaptive quadrature. `rel_tol` is the requested relative
// accuracy of the integral estimate; `max_depth` bounds adaptive bisection.
struct QuadControl {
  double rel_tol = 1e-8;
  int max_depth = 15;
};

// Controls for bracketed root finding. `tol` is interpreted by callers as a
// relative tolerance on the located root; `growth` is the bracket expansion
// factor used while hunting for a sign change.
struct RootControl {
  double tol = 1e-10;
  double growth = 2.0;
};

// Adaptive Gauss-Kronrod (15-point) integration of `f` over the finite
// interval [a, b]. Throws NumericError when the requested tolerance was not
// achieved within the subdivision budget.
template <typename F>
double integrate(const F& f, double a, double b, const QuadControl& qc,
                 const char* what) {
  if (!(a <= b)) throw DomainError(std::string(what) + ": inverted integration range");
  if (a == b) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, qc.max_depth, qc.rel_tol, &err, &l1);
  if (!std::isfinite(val)) {
    throw NumericError(std::string(what) + ": integral is not finite");
  }
  // `err` is an absolute error estimate; accept when it is small relative to
  // the L1 mass (the natural scale for these nonnegative integrands), with a
  // modest slack factor over the requested tolerance and an absolute floor.
  const double scale = std::max(l1, std::abs(val));
  if (err > 100.0 * qc.rel_tol * scale + 1e-300) {
    throw NumericError(std::string(what) + ": quadrature did not converge (requested rel " +
                       std::to_string(qc.rel_tol) + ", achieved abs " + std::to_string(err) +
                       " on scale " + std::to_string(scale) + ")");
  }
  return val;
}

// Root of a continuous increasing function on [lo, hi], given f(lo) <= 0 <= f(hi).
// Uses TOMS 748 bracketing iterations; the returned abscissa x satisfies
// |interval| <= tol * (1 + |x|).
template <typename F>
double root_increasing(const F& f, double lo, double hi, double flo, double fhi,
                       const RootControl& rc, const char* what) {
  if (flo > 0.0 || fhi < 0.0) {
    throw NumericError(std::string(what) + ": root bracket does not straddle zero");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  auto stop = [&rc](double l, double r) {
    return (r - l) <= rc.tol * (1.0 + std::max(std::abs(l), std::abs(r)));
  };
  std::uintmax_t max_iter = 200;
  const auto ival = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, max_iter);
  if (max_iter >= 200) {
    throw NumericError(std::string(what) + ": root finding exceeded iteration budget");
  }
  return 0.5 * (ival.first + ival.second);
}

// Expands `hi` geometrically until f(hi) >= 0, then solves. `f` must be
// increasing with f(lo) <= 0. `hi_cap` bounds the search and triggers a
// NumericError when exceeded (callers map this to "argument out of range").
template <typename F>
double root_increasing_grow(const F& f, double lo, double hi0, double hi_cap,
                            const RootControl& rc, const char* what) {
  const double flo = f(lo);
  if (flo > 0.0) throw NumericError(std::string(what) + ": lower bracket not below root");
  double hi = std::max(hi0, lo + rc.tol);
  double fhi = f(hi);
  while (fhi < 0.0) {
    if (hi >= hi_cap) {
      throw NumericError(std::string(what) + ": root exceeds search cap " +
                         std::to_string(hi_cap));
    }
    hi = std::min(hi_cap, hi * rc.growth + rc.tol);
    fhi = f(hi);
  }
  return root_increasing(f, lo, hi, flo, fhi, rc, what);
}

}  // namespace mbpnpi::num
