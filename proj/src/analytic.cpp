#include "analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "errors.hpp"

namespace mbpnpi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Integrates f over [w0, w1] in fixed-width chunks. Used with integrands of
// the form e^w h(e^w) (a log substitution u = e^w), where a single adaptive
// call over hundreds of log units would under-resolve the small-u end.
template <typename F>
double chunked_log_integral(const F& f, double w0, double w1,
                            const num::QuadControl& qc, const char* what) {
  double total = 0.0;
  const double width = 3.0;
  double lo = w0;
  while (lo < w1) {
    const double hi = std::min(w1, lo + width);
    total += num::integrate(f, lo, hi, qc, what);
    lo = hi;
  }
  return total;
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::I: return "I";
    case Regime::II: return "II";
    case Regime::III: return "III";
    case Regime::IV: return "IV";
  }
  return "?";
}

AnalyticContext::AnalyticContext(ModelSpec model, num::QuadControl quad,
                                 num::RootControl root, bool force_generic)
    : model_(std::move(model)), quad_(quad), root_(root) {
  closed_ = !force_generic &&
            model_.offspring.family() == OffspringFamily::PurePower &&
            model_.immigration.family() == ImmigrationFamily::ScaledSibuya;
}

double AnalyticContext::alpha_eff() const { return model_.immigration.alpha(); }

// --------------------------------------------------------------------- V

double AnalyticContext::v_generic_lx(double lx) const {
  // From V(x) = int_0^{1-1/x} du/(f(u)-u), substituting u = 1 - 1/v and then
  // v = e^{w/gamma}: V(x) = (1/gamma) int_0^{gamma ln x} e^w / L(e^{w/gamma}) dw.
  const auto& off = model_.offspring;
  const double g = off.gamma();
  const double wmax = g * lx;
  if (wmax <= 0.0) return 0.0;
  auto f = [&](double w) {
    return std::exp(w) / off.slowly_varying(std::exp(w / g));
  };
  if (wmax <= 1e-6) {
    // Adaptive quadrature error estimates have an absolute noise floor that
    // dwarfs integrals over intervals this narrow. The integrand is analytic
    // at 0, so the midpoint rule is accurate to O(wmax^2/24) relative error,
    // far below the quadrature tolerance.
    return f(0.5 * wmax) * wmax / g;
  }
  return chunked_log_integral(f, 0.0, wmax, quad_, "V") / g;
}

double AnalyticContext::v_of_x(double x) const {
  if (!(x >= 1.0)) throw DomainError("V: argument must be >= 1");
  if (x == 1.0) return 0.0;
  const auto& off = model_.offspring;
  if (closed_) {
    const double g = off.gamma();
    return std::expm1(g * std::log(x)) / (off.c() * g);
  }
  return v_generic_lx(std::log(x));
}

double AnalyticContext::v_eps(double eps) const {
  // V(1/eps) for eps = 1 - s, evaluated without forming 1/eps.
  const auto& off = model_.offspring;
  if (eps >= 1.0) return 0.0;
  if (closed_) {
    const double g = off.gamma();
    return std::expm1(-g * std::log(eps)) / (off.c() * g);
  }
  return v_generic_lx(-std::log(eps));
}

// --------------------------------------------------------------------- W

double AnalyticContext::log_w_generic(double y) const {
  if (y == 0.0) return 0.0;
  const auto& off = model_.offspring;
  const double g = off.gamma();
  constexpr double cap = 720.0;  // ln x; beyond this x is not representable
  auto fz = [&](double z) { return v_generic_lx(z) - y; };
  // Pure-power-like initial guess (slowly varying part frozen at L(1)).
  const double guess = std::log1p(off.c() * g * y) / g;
  double lo = 0.0, flo = -y;
  double hi = std::min(cap, std::max(guess, 1e-6));
  double fhi = fz(hi);
  while (fhi < 0.0) {
    lo = hi;
    flo = fhi;
    if (hi >= cap) throw NumericError("W: argument out of representable range");
    hi = std::min(cap, hi * root_.growth + 0.5);
    fhi = fz(hi);
  }
  return num::root_increasing(fz, lo, hi, flo, fhi, root_, "W");
}

double AnalyticContext::log_w_of_y(double y) const {
  if (!(y >= 0.0)) throw DomainError("W: argument must be >= 0");
  if (closed_) {
    const auto& off = model_.offspring;
    return std::log1p(off.c() * off.gamma() * y) / off.gamma();
  }
  return log_w_generic(y);
}

double AnalyticContext::w_of_y(double y) const {
  const double lw = log_w_of_y(y);
  if (lw > 709.0) {
    throw DomainError("W: value exceeds double range; use the log form");
  }
  return std::exp(lw);
}

// ------------------------------------------------------------------- Psi

double AnalyticContext::psi(double x) const {
  if (!(x >= 1.0)) throw DomainError("Psi: argument must be >= 1");
  return model_.immigration.psi(x);
}

double AnalyticContext::log_psi_of_logw(double log_w) const {
  return model_.immigration.log_psi(log_w);
}

double AnalyticContext::psi_inv(double y) const {
  const double y0 = model_.immigration.psi(1.0);
  if (!(y >= y0)) throw DomainError("Psi^{-1}: argument below Psi(1)");
  if (closed_) return model_.immigration.psi_inv(y);
  const double target = std::log(y);
  auto fz = [&](double z) { return model_.immigration.log_psi(z) - target; };
  return std::exp(
      num::root_increasing_grow(fz, 0.0, 1.0, 720.0, root_, "Psi^{-1}"));
}

// ------------------------------------------------------------------ F, q

double AnalyticContext::f_ts(double t, double s) const {
  if (!(t >= 0.0)) throw DomainError("F: t must be >= 0");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("F: s must be in [0,1]");
  if (s == 1.0) return 1.0;
  const double arg = model_.mu * t + v_eps(1.0 - s);
  return -std::expm1(-log_w_of_y(arg));
}

double AnalyticContext::q_ts(double t, double s) const {
  if (!(t >= 0.0)) throw DomainError("q: t must be >= 0");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("q: s must be in [0,1]");
  if (s == 1.0) return 0.0;
  const double arg = model_.mu * t + v_eps(1.0 - s);
  return std::exp(-log_psi_of_logw(log_w_of_y(arg)));
}

double AnalyticContext::q0(double t) const { return q_ts(t, 0.0); }

// -------------------------------------------- accumulated survival mass

double AnalyticContext::inv_psi_w_integrand(double u, double v0, double m) const {
  return std::exp(-log_psi_of_logw(log_w_of_y(m * u + v0)));
}

double AnalyticContext::inv_psi_w_integral(double T, double v0, double m) const {
  if (T <= 0.0) return 0.0;
  if (closed_) {
    // 1/Psi(W(m u + v0)) = cImm (1 + c g (m u + v0))^{-alpha/g}; integrate in
    // z = 1 + c g (m u + v0) between z0 and z1.
    const auto& off = model_.offspring;
    const auto& imm = model_.immigration;
    const double g = off.gamma(), c = off.c(), al = imm.alpha();
    const double lz0 = std::log1p(c * g * v0);
    const double lz1 = std::log1p(c * g * (m * T + v0));
    const double p = 1.0 - al / g;
    const double pref = imm.c_imm() / (c * g * m);
    if (std::abs(p) < 1e-12) return pref * (lz1 - lz0);
    return pref * std::exp(p * lz0) * std::expm1(p * (lz1 - lz0)) / p;
  }
  auto h = [&](double u) { return inv_psi_w_integrand(u, v0, m); };
  const double t1 = std::min(T, 1.0);
  double total = num::integrate(h, 0.0, t1, quad_, "survival-mass integral");
  if (T > 1.0) {
    auto hw = [&](double w) {
      const double u = std::exp(w);
      return u * inv_psi_w_integrand(u, v0, m);
    };
    total +=
        chunked_log_integral(hw, 0.0, std::log(T), quad_, "survival-mass integral");
  }
  return total;
}

double AnalyticContext::q_cum(double t) const {
  if (!(t >= 0.0)) throw DomainError("Q_cum: t must be >= 0");
  return inv_psi_w_integral(t, 0.0, model_.mu);
}

double AnalyticContext::tail_integral_to_infinity(double v0) const {
  const double g = model_.offspring.gamma();
  const double al = alpha_eff();
  if (al <= g + 1e-12) return kInf;
  if (closed_) {
    // int_0^inf cImm (1 + c g (mu u + v0))^{-al/g} du
    //   = cImm (1 + c g v0)^{1-al/g} / (c mu (al - g)).
    const double c = model_.offspring.c();
    const double pow0 = std::exp((1.0 - al / g) * std::log1p(c * g * v0));
    return model_.immigration.c_imm() * pow0 / (c * model_.mu * (al - g));
  }
  // Head integral to T plus a power-tail estimate, with T grown until the
  // combination stabilizes.
  const double ratio = al / g - 1.0;
  double T = 1e3;
  double prev = kInf;
  while (T <= 3e17) {
    const double head = inv_psi_w_integral(T, v0, model_.mu);
    const double tail = inv_psi_w_integrand(T, v0, model_.mu) * T / ratio;
    const double val = head + tail;
    if (std::isfinite(prev) && std::abs(val - prev) <= 3e-9 * val) return val;
    prev = val;
    T *= 4.0;
  }
  throw NumericError("total survival-mass integral did not stabilize");
}

double AnalyticContext::q_total() const { return tail_integral_to_infinity(0.0); }

// ------------------------------------------------------ I, Phi, survival

double AnalyticContext::i_conv(double t, double s) const {
  if (!(t >= 0.0)) throw DomainError("I: t must be >= 0");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("I: s must be in [0,1]");
  if (t == 0.0 || s == 1.0) return 0.0;
  const double v0 = v_eps(1.0 - s);
  const auto& inten = model_.intensity;
  if (inten.family() == IntensityFamily::Constant) {
    return inten.rho() * inv_psi_w_integral(t, v0, model_.mu);
  }
  // r(t-u) varies near u = t on a short scale; integrate that window
  // directly and the long-range remainder on a log grid in u.
  const double width = inten.family() == IntensityFamily::ExpApproach
                           ? std::min(t, 40.0 / inten.b())
                           : std::min(t, 50.0);
  auto e = [&](double u) {
    return inten.value(t - u) * inv_psi_w_integrand(u, v0, model_.mu);
  };
  const double ts = t - width;
  double total = 0.0;
  if (ts > 0.0) {
    total += num::integrate(e, 0.0, std::min(ts, 1.0), quad_, "I convolution");
    if (ts > 1.0) {
      auto ew = [&](double w) {
        const double u = std::exp(w);
        return u * e(u);
      };
      total += chunked_log_integral(ew, 0.0, std::log(ts), quad_, "I convolution");
    }
  }
  total += num::integrate(e, std::max(ts, 0.0), t, quad_, "I convolution");
  return total;
}

double AnalyticContext::phi(double t, double s) const {
  return std::exp(-i_conv(t, s));
}

double AnalyticContext::survival_prob(double t) const {
  return -std::expm1(-i_conv(t, 0.0));
}

double AnalyticContext::survival_limit() const {
  const double q = q_total();
  if (!std::isfinite(q)) return 1.0;
  return -std::expm1(-model_.intensity.limit() * q);
}

double AnalyticContext::t_eps(double eps, double t_cap) const {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("t_eps: eps must be in (0,1)");
  const double target = std::log(1.0 / eps) / model_.intensity.limit();
  const double qt = q_total();
  if (std::isfinite(qt) && qt <= target) {
    throw RegimeError(
        "t_eps: survival probability plateaus below the requested level");
  }
  auto f = [&](double t) { return q_cum(t) - target; };
  return num::root_increasing_grow(f, 0.0, 1.0, t_cap, root_, "t_eps");
}

// ------------------------------------------- limit-conditional structure

double AnalyticContext::delta_s(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("Delta: s must be in [0,1]");
  if (alpha_eff() <= model_.offspring.gamma() + 1e-12) {
    throw RegimeError("Delta: defined only when the total survival mass is finite");
  }
  if (s == 1.0) return 0.0;
  return tail_integral_to_infinity(v_eps(1.0 - s));
}

double AnalyticContext::h_pgf(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("H: s must be in [0,1]");
  const double qt = q_total();
  if (!std::isfinite(qt)) {
    throw RegimeError("H: defined only when the total survival mass is finite");
  }
  if (s == 1.0) return 1.0;
  const double rho = model_.intensity.limit();
  return 1.0 - std::expm1(-rho * delta_s(s)) / std::expm1(-rho * qt);
}

// ------------------------------------------- slowly-growing normalizers

double AnalyticContext::log_b_fn(double x) const {
  if (!(x >= 0.0)) throw DomainError("B: argument must be >= 0");
  return inv_psi_w_integral(x, 0.0, 1.0);
}

double AnalyticContext::b_fn(double x) const { return std::exp(log_b_fn(x)); }

double AnalyticContext::b_inv(double y) const {
  if (!(y >= 1.0)) throw DomainError("B^{-1}: argument must be >= 1");
  if (y == 1.0) return 0.0;
  const double target = std::log(y);
  const double g = model_.offspring.gamma();
  const double al = alpha_eff();
  if (al > g + 1e-12) {
    // B is bounded here: log B(inf) = mu * Q_total.
    const double log_b_max = model_.mu * q_total();
    if (target >= log_b_max) {
      throw DomainError("B^{-1}: argument beyond the range of B");
    }
  }
  if (closed_) {
    const auto& off = model_.offspring;
    const auto& imm = model_.immigration;
    const double c = off.c(), ci = imm.c_imm();
    if (std::abs(g - al) < 1e-12) {
      return std::expm1(target * c * g / ci) / (c * g);
    }
    const double inner = 1.0 + c * (g - al) * target / ci;
    return std::expm1(std::log(inner) * g / (g - al)) / (c * g);
  }
  auto f = [&](double z) { return log_b_fn(std::expm1(z)) - target; };
  const double z = num::root_increasing_grow(f, 0.0, 1.0, 44.0, root_, "B^{-1}");
  return std::expm1(z);
}

double AnalyticContext::log_a_fn(double x) const {
  if (!(x >= 1.0)) throw DomainError("A: argument must be >= 1");
  return log_b_fn(v_of_x(x));
}

double AnalyticContext::a_fn(double x) const { return std::exp(log_a_fn(x)); }

// -------------------------------------------------------- classification

RegimeClass AnalyticContext::classify() const {
  const auto& off = model_.offspring;
  const double g = off.gamma();
  const double al = alpha_eff();

  RegimeClass rc{Regime::I, kNaN, kInf, ""};
  std::ostringstream notes;
  notes.precision(6);

  const bool equal = std::abs(al - g) <= 1e-12;
  if (!equal && al < g) {
    rc.regime = Regime::I;
    notes << "immigration tail heavier than offspring tail (alpha=" << al
          << " < gamma=" << g << "): survival probability -> 1 and the "
          << "power-normalized population has a one-sided stable limit; ";
  } else if (!equal) {
    rc.regime = Regime::III;
    rc.q_total = q_total();
    notes << "offspring tail heavier (alpha=" << al << " > gamma=" << g
          << "): total survival mass Q=" << rc.q_total << " is finite and "
          << "the survival probability plateaus below 1; ";
  } else if (off.family() == OffspringFamily::LogPower && off.d() > 0.0) {
    rc.regime = Regime::IV;
    notes << "balanced tail exponents (alpha = gamma) with a logarithmic "
          << "offspring correction: survival probability -> 1, normalization "
          << "is slowly varying; ";
  } else {
    rc.regime = Regime::II;
    rc.c_const = model_.immigration.c_imm() / (off.c() * g * model_.mu);
    notes << "balanced tail exponents (alpha = gamma): t*q(t;0) -> C="
          << rc.c_const << " and the log-compressed population has a "
          << "generalized-gamma-type limit; ";
  }

  // Numeric cross-check of the claimed large-t behaviour of t*q(t;0).
  const double ts[3] = {1e3, 1e4, 1e5};
  double tq[3];
  for (int i = 0; i < 3; ++i) tq[i] = ts[i] * q0(ts[i]);
  notes << "t*q(t;0) at t={1e3,1e4,1e5}: {" << tq[0] << ", " << tq[1] << ", "
        << tq[2] << "}";
  switch (rc.regime) {
    case Regime::I:
      notes << ((tq[0] < tq[1] && tq[1] < tq[2])
                    ? " increases, consistent with the classification"
                    : " -- warning: expected an increasing trend");
      break;
    case Regime::II: {
      const double rel = std::abs(tq[2] / rc.c_const - 1.0);
      notes << (rel < 0.15 ? " approaches C, consistent with the classification"
                           : " -- warning: not approaching C");
      break;
    }
    case Regime::III:
      notes << ((tq[0] > tq[1] && tq[1] > tq[2])
                    ? " decreases, consistent with the classification"
                    : " -- warning: expected a decreasing trend");
      break;
    case Regime::IV: {
      const bool dec = tq[0] > tq[1] && tq[1] > tq[2];
      notes << ((dec && tq[2] / tq[0] > 0.3)
                    ? " decreases slowly, consistent with the classification"
                    : (dec ? " decreases" : " -- warning: expected a slow decrease"));
      break;
    }
  }
  rc.notes = notes.str();
  return rc;
}

}  // namespace mbpnpi
