#include "laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "errors.hpp"

namespace mbpnpi {

namespace {

double digamma(double x) { return boost::math::digamma(x); }

void check_prob_arg(double s, const char* who) {
  if (!(s >= 0.0 && s <= 1.0))
    throw DomainError(std::string(who) + ": s must lie in [0,1], got " +
                      std::to_string(s));
}

// Smallest m in (lo, cap] with tail(m) < target, for a decreasing tail;
// used for exact inverse-transform sampling beyond the pmf table.
template <class TailFn>
std::uint64_t tail_inverse(TailFn&& tail, std::uint64_t lo, std::uint64_t cap,
                           double target) {
  std::uint64_t hi = lo < (cap >> 1) ? lo * 2 : cap;
  while (hi < cap && tail(hi) >= target) {
    hi = hi < (cap >> 1) ? hi * 2 : cap;
  }
  if (tail(hi) >= target) return cap;
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (tail(mid) < target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

// ------------------------------------------------------------- OffspringLaw

OffspringLaw::OffspringLaw(OffspringFamily fam, double gamma, double c,
                           double d, std::uint64_t table, bool adjusted)
    : family_(fam), gamma_(gamma), c_(c), d_(d), table_(table),
      c_adjusted_(adjusted) {
  validate();
  build_table();
}

OffspringLaw OffspringLaw::pure_power(double gamma, double c,
                                      std::uint64_t table) {
  return OffspringLaw(OffspringFamily::PurePower, gamma, c, 0.0, table, false);
}

OffspringLaw OffspringLaw::log_power(double gamma, double c, double d,
                                     std::uint64_t table) {
  return OffspringLaw(OffspringFamily::LogPower, gamma, c, d, table, false);
}

OffspringLaw OffspringLaw::log_power_default(std::uint64_t table) {
  double gamma = 0.5, c = 0.4, d = 0.25;
  for (int attempt = 0; attempt < 200; ++attempt) {
    try {
      return OffspringLaw(OffspringFamily::LogPower, gamma, c, d, table,
                          attempt > 0);
    } catch (const ConfigError&) {
      c *= 0.9;
    }
  }
  throw ConfigError("log_power_default: could not find a valid c");
}

void OffspringLaw::validate() const {
  if (!(gamma_ > 0.0 && gamma_ <= 1.0))
    throw ConfigError("offspring: gamma must lie in (0,1], got " +
                      std::to_string(gamma_));
  if (!(c_ > 0.0))
    throw ConfigError("offspring: c must be > 0, got " + std::to_string(c_));
  if (!(d_ >= 0.0))
    throw ConfigError("offspring: d must be >= 0, got " + std::to_string(d_));
  if (family_ == OffspringFamily::PurePower) {
    if (c_ * (1.0 + gamma_) > 1.0 + 1e-12)
      throw ConfigError(
          "offspring: PurePower requires c <= 1/(1+gamma) so the s^1 "
          "coefficient is nonnegative; got c = " +
          std::to_string(c_) + ", 1/(1+gamma) = " +
          std::to_string(1.0 / (1.0 + gamma_)));
  } else {
    // Numeric nonnegativity of the power-series coefficients up to kNCheck.
    if (1.0 - c_ * (1.0 + gamma_) + c_ * d_ < -1e-12)
      throw ConfigError("offspring: LogPower p_1 = 1 - c(1+gamma) + c d < 0");
    double a = gamma_ * (1.0 + gamma_) / 2.0;   // a_2
    double b = -(1.0 + 2.0 * gamma_) / 2.0;     // b_2
    for (std::uint64_t k = 2; k <= kNCheck; ++k) {
      double pk = c_ * (a + d_ * b);
      if (pk < -1e-12)
        throw ConfigError(
            "offspring: LogPower coefficient p_" + std::to_string(k) +
            " = " + std::to_string(pk) + " < 0; parameters invalid");
      double kk = double(k);
      double a_next = a * (kk - 1.0 - gamma_) / (kk + 1.0);
      double b_next = ((kk - 1.0 - gamma_) * b + a) / (kk + 1.0);
      a = a_next;
      b = b_next;
    }
  }
}

double OffspringLaw::pgf(double s) const {
  check_prob_arg(s, "offspring_pgf");
  if (s == 1.0) return 1.0;
  return s + pgf_minus_s_at(1.0 - s);
}

double OffspringLaw::pgf_minus_s_at(double eps) const {
  double base = c_ * std::pow(eps, 1.0 + gamma_);
  if (family_ == OffspringFamily::PurePower) return base;
  return base * (1.0 + d_ * std::log(1.0 / eps));
}

double OffspringLaw::pgf_deriv(double s) const {
  check_prob_arg(s, "offspring_pgf_deriv");
  if (s == 1.0) return 1.0;
  double eps = 1.0 - s;
  double epg = std::pow(eps, gamma_);
  if (family_ == OffspringFamily::PurePower)
    return 1.0 - c_ * (1.0 + gamma_) * epg;
  double nu = std::log(1.0 / eps);
  return 1.0 - epg * c_ * ((1.0 + gamma_) * (1.0 + d_ * nu) - d_);
}

double OffspringLaw::slowly_varying(double x) const {
  if (!(x >= 1.0))
    throw DomainError("offspring slowly_varying: x must be >= 1");
  if (family_ == OffspringFamily::PurePower) return c_;
  return c_ * (1.0 + d_ * std::log(x));
}

double OffspringLaw::pmf(std::uint64_t k) const {
  if (k == 0) return c_;
  if (k == 1) {
    double p = 1.0 - c_ * (1.0 + gamma_);
    if (family_ == OffspringFamily::LogPower) p += c_ * d_;
    return std::max(p, 0.0);
  }
  if (gamma_ == 1.0) {
    // Finite-variance corner: the power part stops at k = 2.
    if (family_ == OffspringFamily::PurePower) return k == 2 ? c_ : 0.0;
    if (k == 2) return c_ * (1.0 - 1.5 * d_);
    double kk = double(k);
    return 2.0 * c_ * d_ / (kk * (kk - 1.0) * (kk - 2.0));
  }
  double kk = double(k);
  double la = std::log(gamma_) + std::log1p(gamma_) +
              std::lgamma(kk - 1.0 - gamma_) - std::lgamma(kk + 1.0) -
              std::lgamma(1.0 - gamma_);
  double a = std::exp(la);
  if (family_ == OffspringFamily::PurePower) return c_ * a;
  double b = a * (digamma(kk - 1.0 - gamma_) - digamma(-1.0 - gamma_));
  return c_ * (a + d_ * b);
}

std::vector<double> OffspringLaw::pmf_prefix(std::uint64_t kmax) const {
  std::vector<double> p(kmax + 1, 0.0);
  p[0] = c_;
  if (kmax >= 1) {
    p[1] = 1.0 - c_ * (1.0 + gamma_);
    if (family_ == OffspringFamily::LogPower) p[1] += c_ * d_;
  }
  double a = gamma_ * (1.0 + gamma_) / 2.0;
  double b = -(1.0 + 2.0 * gamma_) / 2.0;
  for (std::uint64_t k = 2; k <= kmax; ++k) {
    double pk = family_ == OffspringFamily::PurePower ? c_ * a
                                                      : c_ * (a + d_ * b);
    p[k] = std::max(pk, 0.0);
    double kk = double(k);
    double a_next = a * (kk - 1.0 - gamma_) / (kk + 1.0);
    double b_next = ((kk - 1.0 - gamma_) * b + a) / (kk + 1.0);
    a = a_next;
    b = b_next;
  }
  return p;
}

double OffspringLaw::tail(std::uint64_t n) const {
  if (n == 0) return 1.0 - c_;
  if (gamma_ == 1.0) {
    if (family_ == OffspringFamily::PurePower)
      return n == 1 ? c_ : 0.0;
    if (n == 1) return c_ * (1.0 - d_);
    double nn = double(n);
    return c_ * d_ / (nn * (nn - 1.0));
  }
  double nn = double(n);
  double lta = std::log(gamma_) + std::lgamma(nn - gamma_) -
               std::lgamma(nn + 1.0) - std::lgamma(1.0 - gamma_);
  double ta = std::exp(lta);
  if (family_ == OffspringFamily::PurePower) return c_ * ta;
  double corr =
      1.0 - d_ / gamma_ + d_ * (digamma(nn - gamma_) - digamma(1.0 - gamma_));
  return c_ * ta * std::max(corr, 0.0);
}

void OffspringLaw::build_table() {
  std::vector<double> p = pmf_prefix(table_);
  cdf_.resize(table_ + 1);
  double acc = 0.0;
  for (std::uint64_t k = 0; k <= table_; ++k) {
    acc += p[k];
    cdf_[k] = std::min(acc, 1.0);
  }
  tail_at_table_ = tail(table_);
}

std::uint64_t OffspringLaw::sample(Rng& rng) const {
  double u = rng.uniform();
  double top = cdf_.back();
  if (u < top) {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::uint64_t(it - cdf_.begin());
  }
  if (tail_at_table_ <= 0.0) return table_;
  // Conditional inverse transform on the closed-form tail: rescale the
  // leftover uniform mass (1-u) in (0, 1-top) onto (0, tail(table_)).
  double target = tail_at_table_ * (1.0 - u) / (1.0 - top);
  return tail_inverse([this](std::uint64_t m) { return tail(m); }, table_,
                      kTailCap, target);
}

// ----------------------------------------------------------- ImmigrationLaw

ImmigrationLaw::ImmigrationLaw(ImmigrationFamily fam, double alpha,
                               double c_imm, std::uint64_t table)
    : family_(fam), alpha_(alpha), c_imm_(c_imm), table_(table) {
  if (!(alpha_ > 0.0 && alpha_ <= 1.0))
    throw ConfigError("immigration: alpha must lie in (0,1], got " +
                      std::to_string(alpha_));
  if (!(c_imm_ > 0.0 && c_imm_ <= 1.0))
    throw ConfigError("immigration: cImm must lie in (0,1], got " +
                      std::to_string(c_imm_));
  if (family_ == ImmigrationFamily::ScaledSibuya) build_table();
}

ImmigrationLaw ImmigrationLaw::scaled_sibuya(double alpha, double c_imm,
                                             std::uint64_t table) {
  return ImmigrationLaw(ImmigrationFamily::ScaledSibuya, alpha, c_imm, table);
}

ImmigrationLaw ImmigrationLaw::bernoulli(double m) {
  return ImmigrationLaw(ImmigrationFamily::Bernoulli, 1.0, m, 0);
}

double ImmigrationLaw::pgf(double s) const {
  check_prob_arg(s, "immigration_pgf");
  if (s == 1.0) return 1.0;
  return 1.0 - one_minus_pgf_at(1.0 - s);
}

double ImmigrationLaw::one_minus_pgf_at(double eps) const {
  if (family_ == ImmigrationFamily::Bernoulli) return c_imm_ * eps;
  return c_imm_ * std::pow(eps, alpha_);
}

double ImmigrationLaw::slowly_varying(double x) const {
  if (!(x >= 1.0))
    throw DomainError("immigration slowly_varying: x must be >= 1");
  return c_imm_;
}

double ImmigrationLaw::pmf(std::uint64_t k) const {
  if (family_ == ImmigrationFamily::Bernoulli) {
    if (k == 0) return 1.0 - c_imm_;
    return k == 1 ? c_imm_ : 0.0;
  }
  if (k == 0) return 1.0 - c_imm_;
  if (alpha_ == 1.0) return k == 1 ? c_imm_ : 0.0;
  double kk = double(k);
  double lq = std::log(alpha_) + std::lgamma(kk - alpha_) -
              std::lgamma(kk + 1.0) - std::lgamma(1.0 - alpha_);
  return c_imm_ * std::exp(lq);
}

double ImmigrationLaw::tail(std::uint64_t n) const {
  if (family_ == ImmigrationFamily::Bernoulli || alpha_ == 1.0)
    return n == 0 ? c_imm_ : 0.0;
  double nn = double(n);
  double lt = std::lgamma(nn + 1.0 - alpha_) - std::lgamma(nn + 1.0) -
              std::lgamma(1.0 - alpha_);
  return c_imm_ * std::exp(lt);
}

void ImmigrationLaw::build_table() {
  // Table for the *pure* Sibuya(alpha): p_1 = alpha, p_{k+1} = p_k (k-alpha)/(k+1).
  cdf_.resize(table_ + 1);
  cdf_[0] = 0.0;
  if (alpha_ == 1.0) {
    for (std::uint64_t k = 1; k <= table_; ++k) cdf_[k] = 1.0;
    tail_at_table_ = 0.0;
    return;
  }
  double q = alpha_;
  double acc = 0.0;
  for (std::uint64_t k = 1; k <= table_; ++k) {
    acc += q;
    cdf_[k] = std::min(acc, 1.0);
    double kk = double(k);
    q *= (kk - alpha_) / (kk + 1.0);
  }
  // Pure-Sibuya tail at the table edge (cImm scaling applied at sample time).
  tail_at_table_ = tail(table_) / c_imm_;
}

std::uint64_t ImmigrationLaw::sample(Rng& rng) const {
  double u = rng.uniform();
  if (u >= c_imm_) return 0;  // mixture: mass 1-cImm at zero
  if (family_ == ImmigrationFamily::Bernoulli || alpha_ == 1.0) return 1;
  double v = rng.uniform();
  double top = cdf_.back();
  if (v < top) {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), v);
    return std::uint64_t(it - cdf_.begin());
  }
  if (tail_at_table_ <= 0.0) return table_;
  double target = tail_at_table_ * (1.0 - v) / (1.0 - top);
  return tail_inverse(
      [this](std::uint64_t m) { return tail(m) / c_imm_; }, table_, kTailCap,
      target);
}

double ImmigrationLaw::psi(double x) const {
  if (!(x >= 1.0)) throw DomainError("psi: x must be >= 1");
  if (family_ == ImmigrationFamily::Bernoulli) return x / c_imm_;
  return std::pow(x, alpha_) / c_imm_;
}

double ImmigrationLaw::log_psi(double log_x) const {
  if (family_ == ImmigrationFamily::Bernoulli)
    return log_x - std::log(c_imm_);
  return alpha_ * log_x - std::log(c_imm_);
}

double ImmigrationLaw::psi_inv(double y) const {
  double y_min = 1.0 / c_imm_;
  if (!(y >= y_min * (1.0 - 1e-12)))
    throw DomainError("psi_inv: y must be >= psi(1) = 1/cImm");
  if (family_ == ImmigrationFamily::Bernoulli) return c_imm_ * y;
  return std::pow(c_imm_ * y, 1.0 / alpha_);
}

// ---------------------------------------------------------------- IntensityFn

IntensityFn::IntensityFn(IntensityFamily fam, double rho, double a, double b)
    : family_(fam), rho_(rho), a_(a), b_(b) {
  if (!(rho_ > 0.0))
    throw ConfigError("intensity: rho must be > 0, got " + std::to_string(rho_));
  if (family_ == IntensityFamily::ExpApproach) {
    if (!(a_ > -1.0))
      throw ConfigError("intensity: a must be > -1, got " + std::to_string(a_));
    if (!(b_ > 0.0))
      throw ConfigError("intensity: b must be > 0, got " + std::to_string(b_));
  }
}

IntensityFn IntensityFn::constant(double rho) {
  return IntensityFn(IntensityFamily::Constant, rho, 0.0, 1.0);
}

IntensityFn IntensityFn::exp_approach(double rho, double a, double b) {
  return IntensityFn(IntensityFamily::ExpApproach, rho, a, b);
}

IntensityFn IntensityFn::rational_approach(double rho) {
  return IntensityFn(IntensityFamily::RationalApproach, rho, 0.0, 1.0);
}

double IntensityFn::value(double t) const {
  if (!(t >= 0.0)) throw DomainError("intensity: t must be >= 0");
  switch (family_) {
    case IntensityFamily::Constant:
      return rho_;
    case IntensityFamily::ExpApproach:
      return rho_ * (1.0 + a_ * std::exp(-b_ * t));
    case IntensityFamily::RationalApproach:
      return rho_ * t / (1.0 + t);
  }
  return rho_;
}

double IntensityFn::integral(double t) const {
  if (!(t >= 0.0)) throw DomainError("intensity integral: t must be >= 0");
  switch (family_) {
    case IntensityFamily::Constant:
      return rho_ * t;
    case IntensityFamily::ExpApproach:
      return rho_ * (t + a_ * (-std::expm1(-b_ * t)) / b_);
    case IntensityFamily::RationalApproach:
      return rho_ * (t - std::log1p(t));
  }
  return rho_ * t;
}

double IntensityFn::sup_on(double t0, double t1) const {
  if (!(t0 >= 0.0 && t1 >= t0))
    throw DomainError("intensity sup_on: need 0 <= t0 <= t1");
  // All families are monotone in t, so the sup sits at an endpoint.
  double v0 = value(t0);
  double v1 = std::isinf(t1) ? rho_ : value(t1);
  return std::max(v0, v1);
}

}  // namespace mbpnpi
