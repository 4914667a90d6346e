#pragma once

// Deterministic random number generation.
//
// Everything here is hand-rolled on purpose: the standard library's
// distribution objects are implementation-defined, and this project promises
// byte-identical output across runs, worker counts, and toolchains for a given
// seed. The generator is xoshiro256++; per-replicate child streams are derived
// from (master_seed, replicate_index) with splitmix64 so that replicate i has
// the same stream no matter which thread runs it.

#include <cstdint>
#include <limits>

namespace mbpnpi {

std::uint64_t splitmix64_next(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for one Monte Carlo replicate.
  static Rng for_replicate(std::uint64_t master_seed, std::uint64_t replicate);

  // Derive a child generator (used to give each time point / experiment its
  // own stream without coupling draw counts).
  Rng child(std::uint64_t tag);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform();

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate);

  // Standard normal (Box-Muller, cosine branch).
  double normal();

  // Gamma(shape, scale=1), Marsaglia-Tsang; valid for any shape > 0.
  double gamma(double shape);

  // Beta(a, b) via two gammas.
  double beta(double a, double b);

  // Exact Binomial(n, p) for any n up to 2^63: recursive beta-median splitting
  // (order-statistic decomposition), O(log n) gamma draws, Bernoulli loop at
  // the base. Exact in distribution, no normal approximation.
  std::uint64_t binomial(std::uint64_t n, double p);

  // One-sided (positive) stable with Laplace transform exp(-lambda^alpha),
  // 0 < alpha < 1. Kanter's method.
  double stable_one_sided(double alpha);

  // Centered spectrally-positive stable with Laplace transform
  // exp(theta^beta / gamma_scale_exponent-free form): E exp(-theta Z) =
  // exp(theta^beta * kappa), beta in (1,2), kappa > 0. Used for aggregating
  // huge i.i.d. sums of heavy-tailed summands.
  double stable_spectrally_positive(double beta, double kappa);

 private:
  std::uint64_t s_[4];
};

}  // namespace mbpnpi
