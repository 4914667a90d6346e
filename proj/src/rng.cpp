#include "rng.hpp"

#include <cmath>

namespace mbpnpi {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& s : s_) s = splitmix64_next(st);
  if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[3] = 0x9E3779B97F4A7C15ULL;
}

Rng Rng::for_replicate(std::uint64_t master_seed, std::uint64_t replicate) {
  std::uint64_t st = master_seed;
  std::uint64_t h = splitmix64_next(st);
  return Rng(h ^ (0xD1B54A32D192ED03ULL * (replicate + 0x632BE59BD9B4E019ULL)));
}

Rng Rng::child(std::uint64_t tag) {
  std::uint64_t h = next_u64();
  return Rng(h ^ (0x9E3779B97F4A7C15ULL * (tag + 0xBF58476D1CE4E5B9ULL)));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

double Rng::uniform() {
  // 53 random bits, offset by half an ulp: strictly inside (0,1).
  return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost the shape and correct with a power of a uniform.
    double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  double x = gamma(a);
  double y = gamma(b);
  double s = x + y;
  if (s <= 0.0) return (uniform() < a / (a + b)) ? 1.0 : 0.0;
  return x / s;
}

std::uint64_t Rng::binomial(std::uint64_t n, double p) {
  if (!(p > 0.0) || n == 0) return 0;
  if (p >= 1.0) return n;
  std::uint64_t count = 0;
  while (n > 64) {
    // Realize the k-th order statistic V of n i.i.d. uniforms: V ~ Beta(k, n-k+1).
    // Conditionally on V = v, uniforms below v are i.i.d. U(0,v) and those above
    // are i.i.d. U(v,1), which splits the count recursively.
    const std::uint64_t k = n / 2;
    const double v = beta(double(k), double(n - k + 1));
    if (p < v) {
      n = k - 1;
      p = p / v;
    } else {
      count += k;
      n = n - k;
      p = (p - v) / (1.0 - v);
    }
    if (!(p > 0.0)) return count;
    if (p >= 1.0) return count + n;
  }
  for (std::uint64_t i = 0; i < n; ++i)
    if (uniform() < p) ++count;
  return count;
}

double Rng::stable_one_sided(double alpha) {
  // Kanter's representation for the positive stable law with LT exp(-lambda^alpha).
  if (alpha >= 1.0) return 1.0;
  const double th = kPi * uniform();
  const double w = exponential(1.0);
  const double r = alpha / (1.0 - alpha);
  const double a = std::pow(std::sin(alpha * th) / std::sin(th), r) *
                   (std::sin((1.0 - alpha) * th) / std::sin(th));
  return std::pow(a / w, (1.0 - alpha) / alpha);
}

double Rng::stable_spectrally_positive(double beta, double kappa) {
  // Chambers-Mallows-Stuck for the maximally right-skewed stable with index
  // beta in (1,2), centered, scaled so that E exp(-theta Z) = exp(kappa * theta^beta).
  const double cosp = std::cos(kPi * beta / 2.0);  // negative on (1,2)
  const double sigma = std::pow(kappa * std::fabs(cosp), 1.0 / beta);
  const double bth0 = -kPi * (2.0 - beta) / 2.0;  // beta * theta0 for skew +1
  const double th0 = bth0 / beta;
  const double v = kPi * (uniform() - 0.5);
  const double w = exponential(1.0);
  const double z = std::sin(beta * (th0 + v)) /
                       std::pow(std::cos(bth0) * std::cos(v), 1.0 / beta) *
                   std::pow(std::cos(bth0 + (beta - 1.0) * v) / w,
                            (1.0 - beta) / beta);
  return sigma * z;
}

}  // namespace mbpnpi
