#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "doctest.h"
#include "laplace.hpp"
#include "limit_laws.hpp"

using namespace mbpnpi;

TEST_CASE("Laplace transforms: closed values") {
  CHECK(limit::stable_lt(0.5, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(limit::stable_lt(0.4, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(limit::stable_lt(0.9, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(limit::compressed_lt(0.5, 4.0, 1.0) ==
        doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(limit::compressed_lt(0.5, 4.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("stable CDF: closed form, limits, tail") {
  CHECK(limit::stable_cdf(0.5, 1.0) ==
        doctest::Approx(0.47950012218695346).epsilon(1e-9));
  CHECK(limit::stable_cdf_half(1.0) ==
        doctest::Approx(0.47950012218695346).epsilon(1e-12));
  CHECK(limit::stable_cdf(0.5, 1e-4) < 1e-6);
  CHECK(limit::stable_cdf(0.5, 1e6) >= 0.999);

  // Tail: (1 - F(x)) x^alpha Gamma(1-alpha) -> 1.
  const double alpha = 0.5;
  const double tail = 1.0 - limit::stable_cdf(alpha, 1e4);
  const double ratio = tail * std::pow(1e4, alpha) * std::tgamma(1.0 - alpha);
  CHECK(std::fabs(ratio - 1.0) < 0.02);
  CHECK(limit::stable_tail_approx(alpha, 1e4) ==
        doctest::Approx(tail).epsilon(0.02));
}

TEST_CASE("stable CDF: two independent evaluation routes agree") {
  for (double alpha : {0.4, 0.5, 0.7}) {
    for (double x : {0.05, 0.2, 1.0, 5.0, 25.0, 200.0}) {
      const double direct = limit::stable_cdf(alpha, x);
      const double inverted = limit::stable_cdf_lt_inversion(alpha, x);
      CHECK(std::fabs(direct - inverted) <= 1e-6);
    }
  }
}

TEST_CASE("stable CDF is nondecreasing") {
  for (double alpha : {0.4, 0.8}) {
    double prev = 0.0;
    for (double x = 0.01; x < 1e3; x *= 1.6) {
      const double F = limit::stable_cdf(alpha, x);
      CHECK(F >= prev - 1e-12);
      CHECK(F <= 1.0 + 1e-12);
      prev = F;
    }
  }
}

TEST_CASE("compressed CDF: special case, monotonicity, route agreement") {
  // gamma = 1, c_rho = 1: transform (1+lambda)^{-1} is the unit exponential.
  CHECK(limit::compressed_cdf(1.0, 1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));

  double prev = 0.0;
  for (double x = 0.1; x <= 100.0; x *= 1.5) {
    const double F = limit::compressed_cdf(0.5, 4.0, x);
    CHECK(F >= prev - 1e-10);
    prev = F;
    CHECK(std::fabs(F - limit::compressed_cdf_gs(0.5, 4.0, x)) <= 1e-4);
  }
  CHECK(limit::compressed_cdf(0.5, 4.0, 1e-3) < 0.01);
  CHECK(limit::uniform_cdf(-0.5) == doctest::Approx(0.0));
  CHECK(limit::uniform_cdf(0.25) == doctest::Approx(0.25));
  CHECK(limit::uniform_cdf(2.0) == doctest::Approx(1.0));
}

TEST_CASE("CDF integrates back to the Laplace transform") {
  // Tabulate F once on a log grid, then Stieltjes-sum e^{-lambda x} dF(x).
  // Mass beyond the last node contributes at most e^{-lambda x_max} ~ 0.
  auto tabulate = [](const std::function<double(double)>& cdf) {
    const int nodes = 2000;
    const double x_lo = 1e-7, x_hi = 1e12;
    std::vector<std::pair<double, double>> grid(nodes + 1);
    for (int i = 0; i <= nodes; ++i) {
      const double x = x_lo * std::pow(x_hi / x_lo, double(i) / nodes);
      grid[i] = {x, cdf(x)};
    }
    return grid;
  };
  auto lt_from_grid = [](const std::vector<std::pair<double, double>>& grid,
                         double lambda) {
    double sum = grid.front().second;  // mass below the first node
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double xm = 0.5 * (grid[i].first + grid[i - 1].first);
      sum += std::exp(-lambda * xm) * (grid[i].second - grid[i - 1].second);
    }
    return sum;
  };

  const auto stable_grid =
      tabulate([](double x) { return limit::stable_cdf(0.5, x); });
  const auto compressed_grid =
      tabulate([](double x) { return limit::compressed_cdf(0.5, 4.0, x); });
  for (double lambda : {0.5, 1.0, 2.0}) {
    CHECK(std::fabs(lt_from_grid(stable_grid, lambda) -
                    limit::stable_lt(0.5, lambda)) <= 1e-3);
    CHECK(std::fabs(lt_from_grid(compressed_grid, lambda) -
                    limit::compressed_lt(0.5, 4.0, lambda)) <= 1e-3);
  }
}

TEST_CASE("transforms are completely monotone on sampled grids") {
  // Alternating finite-difference signs up to order 3.
  auto check_cm = [](const std::function<double(double)>& lt) {
    std::vector<double> v;
    for (double l = 0.0; l <= 6.0; l += 0.25) v.push_back(lt(l));
    for (std::size_t order = 1; order <= 3; ++order) {
      std::vector<double> d(v.size() - 1);
      for (std::size_t i = 0; i + 1 < v.size(); ++i) d[i] = v[i + 1] - v[i];
      const double sign = (order % 2 == 1) ? -1.0 : 1.0;
      for (double x : d) CHECK(sign * x >= -1e-12);
      v = std::move(d);
    }
  };
  check_cm([](double l) { return limit::stable_lt(0.6, l); });
  check_cm([](double l) { return limit::compressed_lt(0.5, 4.0, l); });
}

TEST_CASE("Laplace inversion engines recover elementary transforms") {
  using cplx = std::complex<double>;
  // F(s) = 1/(s+1)  <->  f(t) = e^{-t}
  auto F1 = [](cplx s) { return 1.0 / (s + 1.0); };
  for (double t : {0.25, 1.0, 4.0}) {
    CHECK(laplace::talbot(F1, t, 32) ==
          doctest::Approx(std::exp(-t)).epsilon(1e-9));
  }
  // F(s) = 1/s^2  <->  f(t) = t
  auto F2 = [](cplx s) { return 1.0 / (s * s); };
  CHECK(laplace::talbot(F2, 3.0, 32) == doctest::Approx(3.0).epsilon(1e-9));

  // The n=12 Stehfest series has intrinsic truncation error ~3e-5 on e^{-t}
  // even in exact arithmetic; gate at the method's accuracy, not the
  // machine's.
  auto G1 = [](double s) { return 1.0 / (s + 1.0); };
  for (double t : {0.25, 1.0, 4.0}) {
    CHECK(laplace::gaver_stehfest(G1, t, 12) ==
          doctest::Approx(std::exp(-t)).epsilon(1e-4));
  }
}
