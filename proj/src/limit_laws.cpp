#include "limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "errors.hpp"
#include "laplace.hpp"
#include "numerics.hpp"

namespace mbpnpi::limit {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("stable law: alpha must be in (0,1)");
  }
}

}  // namespace

double stable_lt(double alpha, double lambda) {
  check_alpha(alpha);
  if (!(lambda >= 0.0)) throw DomainError("stable_lt: lambda must be >= 0");
  return std::exp(-std::pow(lambda, alpha));
}

double stable_cdf(double alpha, double x) {
  check_alpha(alpha);
  if (!(x == x)) throw DomainError("stable_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  // F(x) = (1/pi) int_0^pi exp(-x^{-alpha/(1-alpha)} a(u)) du with
  // a(u) = [sin(alpha u)/sin u]^{alpha/(1-alpha)} sin((1-alpha)u)/sin u,
  // which is the sampler's representation S = (a(U)/E)^{(1-alpha)/alpha}
  // read as an expectation over U.
  //
  // a blows up like (pi-u)^{-1/(1-alpha)} at the right endpoint, so for large
  // x the integrand drops from 1 to 0 in a layer of width ~ x^{-alpha} there.
  // The right half is therefore integrated in w = log(pi - u), where the
  // layer is O(1) wide at every x; it is evaluated in v = pi - u directly so
  // sin(pi - v) never suffers cancellation.
  const double pi = std::acos(-1.0);
  const double expo = alpha / (1.0 - alpha);
  const double xfac = std::exp(-expo * std::log(x));  // x^{-alpha/(1-alpha)}
  auto from_sines = [&](double su, double sau, double sbu) {
    const double log_a = expo * (std::log(sau) - std::log(su)) +
                         std::log(sbu) - std::log(su);
    const double arg = -xfac * std::exp(log_a);
    return arg < -700.0 ? 0.0 : std::exp(arg);
  };
  auto left = [&](double u) {
    if (u < 1e-12) {
      const double a0 = std::exp(expo * std::log(alpha)) * (1.0 - alpha);
      return std::exp(-xfac * a0);
    }
    return from_sines(std::sin(u), std::sin(alpha * u),
                      std::sin((1.0 - alpha) * u));
  };
  auto right = [&](double w) {  // u = pi - e^w
    const double v = std::exp(w);
    return v * from_sines(std::sin(v), std::sin(alpha * (pi - v)),
                          std::sin((1.0 - alpha) * (pi - v)));
  };
  num::QuadControl qc;
  qc.rel_tol = 1e-10;
  const double mid = 0.5 * pi;
  const double w_hi = std::log(mid);
  const double w_lo = w_hi - 60.0;  // truncates < e^{-60} of the u-measure
  const double val = (num::integrate(left, 0.0, mid, qc, "stable CDF") +
                      num::integrate(right, w_lo, w_hi, qc, "stable CDF")) / pi;
  return std::clamp(val, 0.0, 1.0);
}

double stable_cdf_lt_inversion(double alpha, double x) {
  check_alpha(alpha);
  if (x <= 0.0) return 0.0;
  // Invert the transform of the survival function (1 - exp(-s^alpha))/s,
  // which stays accurate in the far tail.
  auto F = [alpha](std::complex<double> s) {
    const std::complex<double> sa = std::exp(alpha * std::log(s));
    return (1.0 - std::exp(-sa)) / s;
  };
  const double surv = laplace::talbot(F, x, 32);
  return std::clamp(1.0 - surv, 0.0, 1.0);
}

double stable_cdf_half(double x) {
  if (x <= 0.0) return 0.0;
  return std::erfc(1.0 / (2.0 * std::sqrt(x)));
}

double stable_tail_approx(double alpha, double x) {
  check_alpha(alpha);
  if (!(x > 0.0)) throw DomainError("stable_tail_approx: x must be > 0");
  return std::pow(x, -alpha) / std::tgamma(1.0 - alpha);
}

double compressed_lt(double gamma, double c_rho, double lambda) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DomainError("compressed_lt: gamma must be in (0,1]");
  }
  if (!(c_rho > 0.0)) throw DomainError("compressed_lt: c_rho must be > 0");
  if (!(lambda >= 0.0)) throw DomainError("compressed_lt: lambda must be >= 0");
  return std::exp(-c_rho * std::log1p(std::pow(lambda, gamma)));
}

double compressed_cdf(double gamma, double c_rho, double x) {
  if (!(gamma > 0.0 && gamma <= 1.0) || !(c_rho > 0.0)) {
    throw DomainError("compressed_cdf: invalid parameters");
  }
  if (x <= 0.0) return 0.0;
  auto F = [gamma, c_rho](std::complex<double> s) {
    const std::complex<double> sg = std::exp(gamma * std::log(s));
    const std::complex<double> phi = std::exp(-c_rho * std::log(1.0 + sg));
    return (1.0 - phi) / s;
  };
  const double surv = laplace::talbot(F, x, 32);
  return std::clamp(1.0 - surv, 0.0, 1.0);
}

double compressed_cdf_gs(double gamma, double c_rho, double x) {
  if (!(gamma > 0.0 && gamma <= 1.0) || !(c_rho > 0.0)) {
    throw DomainError("compressed_cdf_gs: invalid parameters");
  }
  if (x <= 0.0) return 0.0;
  auto F = [gamma, c_rho](double s) {
    const double phi = std::exp(-c_rho * std::log1p(std::pow(s, gamma)));
    return (1.0 - phi) / s;
  };
  const double surv = laplace::gaver_stehfest(F, x, 12);
  return std::clamp(1.0 - surv, 0.0, 1.0);
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace mbpnpi::limit
