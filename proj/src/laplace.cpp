#include "laplace.hpp"

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace mbpnpi::laplace {

double talbot(const std::function<std::complex<double>(std::complex<double>)>& F,
              double t, int M) {
  if (!(t > 0.0)) throw DomainError("talbot: t must be > 0");
  if (M < 8) throw DomainError("talbot: need at least 8 nodes");
  // Abate-Valko fixed-Talbot contour: s(theta) = r theta (cot theta + i),
  // r = 2M/(5t).
  const double r = 2.0 * M / (5.0 * t);
  const double pi = std::acos(-1.0);
  double sum = 0.5 * std::exp(r * t) * F(std::complex<double>(r, 0.0)).real();
  for (int k = 1; k < M; ++k) {
    const double theta = k * pi / M;
    const double cot = std::cos(theta) / std::sin(theta);
    const std::complex<double> s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    const std::complex<double> weight(1.0, sigma);
    sum += (std::exp(s * t) * F(s) * weight).real();
  }
  return sum * r / M;
}

double gaver_stehfest(const std::function<double(double)>& F, double t, int n) {
  if (!(t > 0.0)) throw DomainError("gaver_stehfest: t must be > 0");
  if (n < 2 || n % 2 != 0) throw DomainError("gaver_stehfest: n must be even, >= 2");
  const long double ln2 = 0.6931471805599453094L;
  const int half = n / 2;
  // Stehfest weights a_k, accumulated in extended precision since they grow
  // combinatorially and alternate in sign.
  std::vector<long double> a(static_cast<std::size_t>(n) + 1, 0.0L);
  for (int k = 1; k <= n; ++k) {
    long double sum = 0.0L;
    const int j0 = (k + 1) / 2;
    const int j1 = std::min(k, half);
    for (int j = j0; j <= j1; ++j) {
      long double term = std::pow(static_cast<long double>(j), half) /
                         (std::tgammal(static_cast<long double>(half - j) + 1.0L) *
                          std::tgammal(static_cast<long double>(j) + 1.0L) *
                          std::tgammal(static_cast<long double>(j)) *
                          std::tgammal(static_cast<long double>(k - j) + 1.0L) *
                          std::tgammal(static_cast<long double>(2 * j - k) + 1.0L));
      term *= std::tgammal(static_cast<long double>(2 * j) + 1.0L);
      sum += term;
    }
    const bool negative = (half + k) % 2 != 0;
    a[static_cast<std::size_t>(k)] = negative ? -sum : sum;
  }
  long double total = 0.0L;
  for (int k = 1; k <= n; ++k) {
    const long double s = ln2 * k / t;
    total += a[static_cast<std::size_t>(k)] *
             static_cast<long double>(F(static_cast<double>(s)));
  }
  return static_cast<double>(total * ln2 / t);
}

}  // namespace mbpnpi::laplace
