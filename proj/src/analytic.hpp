#pragma once

// Analytic machinery for the critical branching-with-immigration model.
//
// Core objects, for offspring p.g.f. f and immigration p.g.f. g:
//   V(x)      = int_0^{1-1/x} du / (f(u) - u),  V(1) = 0, increasing
//   W         = V^{-1}
//   F(t; s)   via 1/(1 - F(t;s)) = W(mu t + V(1/(1-s)))   (single-clan p.g.f.)
//   Psi(x)    = 1/(1 - g(1 - 1/x))
//   q(t; s)   = 1 - g(F(t; s)) = 1/Psi(W(mu t + V(1/(1-s))))
//   Q_cum(t)  = int_0^t q(u; 0) du,   Q_total = lim Q_cum
//   I(t; s)   = int_0^t r(t-u) q(u; s) du,   Phi(t; s) = exp(-I(t; s))
//   P{Y(t) > 0} = 1 - exp(-I(t; 0))
//   Delta(s)  = int_0^infty q(u; s) du           (finite-total-mass regime)
//   H(s)      = 1 - (1 - e^{-rho Delta(s)}) / (1 - e^{-rho Q_total})
//   B(x)      = exp(int_0^x du / Psi(W(u))),  A(x) = B(V(x))
//
// Every quantity has two routes: a closed form, available exactly for the
// PurePower offspring + ScaledSibuya immigration pair, and a generic route
// built from adaptive quadrature and bracketed root finding on the p.g.f.s
// themselves. `force_generic` disables the closed route (used by tests that
// cross-validate the two).

#include <string>

#include "laws.hpp"
#include "numerics.hpp"

namespace mbpnpi {

enum class Regime { I = 1, II = 2, III = 3, IV = 4 };

std::string regime_name(Regime r);

// Result of asymptotic classification of a model.
struct RegimeClass {
  Regime regime;
  // lim_{t->inf} t * q(t;0); positive and finite exactly in regime II.
  double c_const;
  // int_0^inf q(u;0) du; finite exactly in regime III.
  double q_total;
  // Human-readable diagnostics, including numeric consistency checks of the
  // claimed asymptotics at large t.
  std::string notes;
};

class AnalyticContext {
 public:
  explicit AnalyticContext(ModelSpec model, num::QuadControl quad = {},
                           num::RootControl root = {},
                           bool force_generic = false);

  const ModelSpec& model() const { return model_; }
  // True when the closed-form route is in use (PurePower + ScaledSibuya and
  // not forced generic).
  bool closed_form() const { return closed_; }

  // --- p.g.f. calculus --------------------------------------------------
  double v_of_x(double x) const;       // V(x), x >= 1
  double w_of_y(double y) const;       // W(y), y >= 0 (throws if > ~1e307)
  double log_w_of_y(double y) const;   // log W(y)
  double psi(double x) const;          // Psi(x), x >= 1
  double psi_inv(double y) const;      // inverse of Psi on [Psi(1), inf)
  double f_ts(double t, double s) const;   // F(t; s), s in [0,1]
  double q_ts(double t, double s) const;   // q(t; s) = 1 - g(F(t; s))
  double q0(double t) const;               // q(t; 0)

  // --- accumulated survival mass -----------------------------------------
  double q_cum(double t) const;        // int_0^t q(u;0) du
  double q_total() const;              // int_0^inf q(u;0) du (may be +inf)

  // --- immigration-process functionals ------------------------------------
  double i_conv(double t, double s) const;  // int_0^t r(t-u) q(u;s) du
  double phi(double t, double s) const;     // exp(-I(t;s)), p.g.f. of Y(t)
  double survival_prob(double t) const;     // P{Y(t) > 0} = 1 - exp(-I(t;0))
  double survival_limit() const;   // lim P{Y(t)>0}: 1 unless finite Q_total
  // Smallest t with rho * Q_cum(t) = ln(1/eps); regimes with Q_total = inf.
  // `t_cap` bounds the search (NumericError beyond; RegimeError if finite
  // Q_total makes the level unreachable).
  double t_eps(double eps, double t_cap = 1e7) const;

  // --- limit-conditional structure (finite Q_total regime) ----------------
  double delta_s(double s) const;      // Delta(s) = int_0^inf q(u;s) du
  double h_pgf(double s) const;        // H(s), p.g.f. of the limit of Y | Y>0

  // --- slowly-growing normalizers -----------------------------------------
  double b_fn(double x) const;         // B(x), x >= 0
  double log_b_fn(double x) const;     // log B(x)
  double b_inv(double y) const;        // inverse of B on [1, sup B)
  double a_fn(double x) const;         // A(x) = B(V(x)), x >= 1
  double log_a_fn(double x) const;     // log A(x)

  RegimeClass classify() const;

 private:
  double v_generic_lx(double lx) const;     // V(e^{lx}) by quadrature
  double v_eps(double eps) const;           // V(1/eps), eps in (0,1]
  double log_w_generic(double y) const;     // root-find on v_generic
  double log_psi_of_logw(double log_w) const;
  // int_0^T du / Psi(W(m u + v0)), closed or quadrature route.
  double inv_psi_w_integral(double T, double v0, double m) const;
  double inv_psi_w_integrand(double u, double v0, double m) const;
  // int_0^inf du / Psi(W(mu u + v0)); +inf when the exponent balance makes
  // the integral divergent.
  double tail_integral_to_infinity(double v0) const;
  double alpha_eff() const;

  ModelSpec model_;
  num::QuadControl quad_;
  num::RootControl root_;
  bool closed_;
};

}  // namespace mbpnpi
