#pragma once

// Parametric offspring/immigration/intensity families.
//
// Offspring p.g.f.:  f(s) = s + (1-s)^{1+gamma} * L(1/(1-s)) with
//   PurePower: L(x) = c            (so f(s) = s + c(1-s)^{1+gamma})
//   LogPower:  L(x) = c(1 + d ln x)
// Both are critical: f'(1) = 1, and for gamma < 1 the offspring variance is
// infinite. Immigration p.g.f.:  g(s) = 1 - (1-s)^alpha * l(1/(1-s)) with
//   ScaledSibuya: l(x) = cImm      (g(s) = 1 - cImm(1-s)^alpha)
//   Bernoulli:    alpha = 1, l(x) = m (finite-mean sanity family)
// Intensity r(t) -> rho as t -> infinity:
//   Constant: rho;  ExpApproach: rho(1 + a e^{-bt});  RationalApproach: rho t/(1+t).
//
// Samplers are exact: inversion on a pmf table up to a threshold K_table,
// then inverse-transform on the closed-form tail beyond it.

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace mbpnpi {

enum class OffspringFamily { PurePower, LogPower };

class OffspringLaw {
 public:
  static constexpr std::uint64_t kDefaultTable = 1u << 16;
  // Numeric nonnegativity scan depth for LogPower coefficients.
  static constexpr std::uint64_t kNCheck = 10'000;
  // Values above this returned by the tail sampler indicate an astronomically
  // rare draw that will necessarily breach any population budget.
  static constexpr std::uint64_t kTailCap = 1ull << 62;

  static OffspringLaw pure_power(double gamma, double c,
                                 std::uint64_t table = kDefaultTable);
  static OffspringLaw log_power(double gamma, double c, double d,
                                std::uint64_t table = kDefaultTable);
  // gamma=0.5, c=0.4, d=0.25; c reduced automatically if validation fails.
  static OffspringLaw log_power_default(std::uint64_t table = kDefaultTable);

  OffspringFamily family() const { return family_; }
  double gamma() const { return gamma_; }
  double c() const { return c_; }
  double d() const { return d_; }
  bool c_was_adjusted() const { return c_adjusted_; }

  double pgf(double s) const;          // f(s), s in [0,1]
  double pgf_deriv(double s) const;    // f'(s)
  // f(1-eps) - (1-eps) = eps^{1+gamma} L(1/eps), evaluated without
  // cancellation; defined for eps in (0,1].
  double pgf_minus_s_at(double eps) const;
  double slowly_varying(double x) const;  // L(x), x >= 1

  double pmf(std::uint64_t k) const;     // P(xi = k), closed form, any k
  std::vector<double> pmf_prefix(std::uint64_t kmax) const;  // [p_0..p_kmax]
  double tail(std::uint64_t n) const;    // P(xi > n), closed form
  std::uint64_t sample(Rng& rng) const;

  std::uint64_t table_size() const { return table_; }

 private:
  OffspringLaw(OffspringFamily fam, double gamma, double c, double d,
               std::uint64_t table, bool adjusted);
  void validate() const;
  void build_table();

  OffspringFamily family_;
  double gamma_, c_, d_;
  std::uint64_t table_;
  bool c_adjusted_ = false;
  std::vector<double> cdf_;   // cdf_[k] = P(xi <= k), k = 0..table_
  double tail_at_table_ = 0;  // closed-form P(xi > table_)
};

enum class ImmigrationFamily { ScaledSibuya, Bernoulli };

class ImmigrationLaw {
 public:
  static constexpr std::uint64_t kDefaultTable = 1u << 16;
  static constexpr std::uint64_t kTailCap = 1ull << 62;

  static ImmigrationLaw scaled_sibuya(double alpha, double c_imm,
                                      std::uint64_t table = kDefaultTable);
  static ImmigrationLaw bernoulli(double m);

  ImmigrationFamily family() const { return family_; }
  double alpha() const { return alpha_; }      // Bernoulli reports alpha = 1
  double c_imm() const { return c_imm_; }

  double pgf(double s) const;  // g(s), s in [0,1]
  // 1 - g(1-eps) = eps^alpha l(1/eps), cancellation-free; eps in (0,1].
  double one_minus_pgf_at(double eps) const;
  double slowly_varying(double x) const;  // l(x)

  double pmf(std::uint64_t k) const;
  double tail(std::uint64_t n) const;     // P(I > n)
  std::uint64_t sample(Rng& rng) const;

  // Psi(x) = 1/(1 - g(1 - 1/x)), x >= 1: closed per family.
  double psi(double x) const;
  double log_psi(double log_x) const;     // log Psi(e^{log_x})
  double psi_inv(double y) const;         // inverse of psi on [psi(1), inf)

 private:
  ImmigrationLaw(ImmigrationFamily fam, double alpha, double c_imm,
                 std::uint64_t table);
  void build_table();

  ImmigrationFamily family_;
  double alpha_, c_imm_;
  std::uint64_t table_;
  // For ScaledSibuya the table holds the *pure* Sibuya(alpha) cdf; sampling
  // mixes {0 w.p. 1-cImm, Sibuya w.p. cImm}.
  std::vector<double> cdf_;
  double tail_at_table_ = 0;
};

enum class IntensityFamily { Constant, ExpApproach, RationalApproach };

class IntensityFn {
 public:
  static IntensityFn constant(double rho);
  static IntensityFn exp_approach(double rho, double a, double b);
  static IntensityFn rational_approach(double rho);

  IntensityFamily family() const { return family_; }
  double rho() const { return rho_; }
  double a() const { return a_; }
  double b() const { return b_; }

  double value(double t) const;              // r(t), t >= 0
  double integral(double t) const;           // R(t) = int_0^t r, closed form
  double sup_on(double t0, double t1) const; // sup of r on [t0,t1] (t1 may be inf)
  double limit() const { return rho_; }      // rho = lim r(t)

 private:
  IntensityFn(IntensityFamily fam, double rho, double a, double b);

  IntensityFamily family_;
  double rho_, a_, b_;
};

struct ModelSpec {
  double mu;  // lifetime rate, > 0
  OffspringLaw offspring;
  ImmigrationLaw immigration;
  IntensityFn intensity;
};

}  // namespace mbpnpi
