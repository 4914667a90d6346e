#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "analytic.hpp"
#include "doctest.h"
#include "experiments.hpp"
#include "laws.hpp"
#include "rng.hpp"
#include "simulate.hpp"

using namespace mbpnpi;

namespace {

ModelSpec balanced_model() {
  return ModelSpec{1.0, OffspringLaw::pure_power(0.5, 0.5),
                   ImmigrationLaw::scaled_sibuya(0.5, 1.0),
                   IntensityFn::constant(1.0)};
}

ModelSpec finite_mass_model() {
  return ModelSpec{1.0, OffspringLaw::pure_power(0.45, 0.5),
                   ImmigrationLaw::scaled_sibuya(0.9, 1.0),
                   IntensityFn::constant(1.0)};
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    ks = std::max(ks, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return ks;
}

}  // namespace

TEST_CASE("single-clan simulation basics") {
  Rng rng(11);
  const OffspringLaw law = OffspringLaw::pure_power(0.5, 0.5);
  const SimBudget budget;
  ClanResult r = simulate_clan(law, 1.0, 0.0, budget, rng);
  CHECK(r.size == 1);  // the founder, untouched at duration zero
  CHECK_FALSE(r.truncated);
}

TEST_CASE("clan survival matches the inverse growth function") {
  struct Case {
    double gamma, c, t, target;
  };
  // 1/W(mu t) with W(y) = (1 + c gamma y)^{1/gamma}.
  const std::vector<Case> cases = {
      {0.5, 0.5, 12.0, 1.0 / 16.0},
      {1.0, 0.5, 10.0, 1.0 / 6.0},
  };
  std::uint64_t seed = 3100;
  for (const auto& cs : cases) {
    CAPTURE(cs.gamma);
    const OffspringLaw law = OffspringLaw::pure_power(cs.gamma, cs.c);
    const SimBudget budget;
    Rng rng(seed++);
    const int n = 100000;
    int alive = 0;
    for (int i = 0; i < n; ++i) {
      alive += simulate_clan(law, 1.0, cs.t, budget, rng).size > 0;
    }
    const double emp = double(alive) / n;
    const double se = std::sqrt(cs.target * (1 - cs.target) / n);
    CHECK(std::fabs(emp - cs.target) < 4 * se);
  }
}

TEST_CASE("immigration arrival times: counts match the integrated intensity") {
  {
    Rng rng(41);
    const IntensityFn fn = IntensityFn::constant(2.0);
    CHECK(poisson_jumps(fn, 0.0, rng).empty());
    const int reps = 4000;
    double total = 0;
    for (int i = 0; i < reps; ++i) {
      const auto jumps = poisson_jumps(fn, 100.0, rng);
      for (std::size_t k = 1; k < jumps.size(); ++k)
        REQUIRE(jumps[k] > jumps[k - 1]);
      total += double(jumps.size());
    }
    const double mean = total / reps;  // Poisson(200)
    const double se = std::sqrt(200.0 / reps);
    CHECK(std::fabs(mean - 200.0) < 4 * se);
  }
  {
    Rng rng(42);
    const IntensityFn fn = IntensityFn::exp_approach(1.0, 1.0, 0.1);
    const double target = fn.integral(50.0);  // 50 + 10 (1 - e^{-5})
    const int reps = 4000;
    double total = 0;
    for (int i = 0; i < reps; ++i) total += double(poisson_jumps(fn, 50.0, rng).size());
    const double se = std::sqrt(target / reps);
    CHECK(std::fabs(total / reps - target) < 4 * se);
  }
  {
    Rng rng(43);
    const IntensityFn fn = IntensityFn::rational_approach(1.0);
    const double target = fn.integral(9.0);  // 9 - ln 10
    const int reps = 4000;
    double total = 0;
    for (int i = 0; i < reps; ++i) total += double(poisson_jumps(fn, 9.0, rng).size());
    const double se = std::sqrt(target / reps);
    CHECK(std::fabs(total / reps - target) < 4 * se);
  }
}

TEST_CASE("population at time zero is empty") {
  YSimulator sim(balanced_model(), 0.0);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const YSample s = sim.replicate(777, i);
    CHECK(s.value == 0.0);
    CHECK_FALSE(s.truncated);
  }
}

TEST_CASE("void probability matches the analytic transform, unit immigration") {
  // Point-mass immigration (one immigrant per arrival), finite-variance
  // offspring: every code path is elementary.
  const ModelSpec m{1.0, OffspringLaw::pure_power(1.0, 0.5),
                    ImmigrationLaw::bernoulli(1.0), IntensityFn::constant(1.0)};
  AnalyticContext ctx(m);
  const double target = std::exp(-ctx.i_conv(5.0, 0.0));
  SampleSet ss = monte_carlo(m, 5.0, 10000, 616, 1);
  double zeros = 0;
  for (const auto& v : ss.values) zeros += (v == 0);
  const double emp = zeros / double(ss.n);
  const double se = std::sqrt(target * (1 - target) / double(ss.n));
  CHECK(std::fabs(emp - target) < 4 * se);
}

TEST_CASE("survival probability matches the analytic transform, heavy tails") {
  const ModelSpec m = finite_mass_model();
  AnalyticContext ctx(m);
  const double target = ctx.survival_prob(100.0);
  SampleSet ss = monte_carlo(m, 100.0, 4000, 909, 1);
  double alive = 0;
  for (const auto& v : ss.values) alive += (v > 0);
  const double emp = alive / double(ss.n);
  const double se = std::sqrt(target * (1 - target) / double(ss.n));
  CHECK(std::fabs(emp - target) < 4 * se);
}

TEST_CASE("binomial-thinning batch path agrees with the literal path") {
  // One immigration batch of size I <= 1000 observed at age 12: simulate
  // every clan literally vs. thin survivors binomially and draw each
  // survivor by rejection. Two-sample KS over paired draws.
  const ModelSpec m = balanced_model();
  YSimulator sim(m, 12.0);
  const double age = 12.0;
  const double p = sim.survival_p(age);
  CHECK(p == doctest::Approx(1.0 / 16.0).epsilon(1e-12));

  const SimBudget budget;
  Rng rng_batch(5501);
  Rng rng_naive(5502);
  Rng rng_fast(5503);
  const int pairs = 10000;
  std::vector<double> naive(pairs), fast(pairs);
  for (int i = 0; i < pairs; ++i) {
    const std::uint64_t batch =
        1 + std::uint64_t(rng_batch.uniform() * 1000.0);
    std::uint64_t sum_naive = 0;
    for (std::uint64_t k = 0; k < batch; ++k) {
      sum_naive += simulate_clan(m.offspring, m.mu, age, budget, rng_naive).size;
    }
    naive[i] = double(sum_naive);
    const std::uint64_t survivors = rng_fast.binomial(batch, p);
    std::uint64_t sum_fast = 0;
    for (std::uint64_t k = 0; k < survivors; ++k) {
      sum_fast += sim.draw_conditioned_exact(age, rng_fast);
    }
    fast[i] = double(sum_fast);
  }
  CHECK(two_sample_ks(naive, fast) < 0.02);
}

TEST_CASE("rejection-conditioned clan draw matches the conditional transform") {
  // E[s^Z | alive at age a] = 1 - W(mu a) (1 - F(a; s)).
  const ModelSpec m = balanced_model();
  AnalyticContext ctx(m);
  YSimulator sim(m, 16.0);
  const double age = 16.0;
  const double w = std::exp(sim.log_w_mu_u(age));
  Rng rng(7601);
  const int n = 20000;
  for (double lambda : {0.25, 1.0, 4.0}) {
    const double s = std::exp(-lambda / w);
    const double target = 1.0 - w * (1.0 - ctx.f_ts(age, s));
    double sum = 0, sumsq = 0;
    Rng draw_rng = rng.child(std::uint64_t(lambda * 100));
    for (int i = 0; i < n; ++i) {
      const double v =
          std::exp(-lambda * double(sim.draw_conditioned_exact(age, draw_rng)) / w);
      sum += v;
      sumsq += v * v;
    }
    const double emp = sum / n;
    const double se = std::sqrt(std::max(sumsq / n - emp * emp, 0.0) / n);
    CHECK(std::fabs(emp - target) <= std::max(0.01, 4 * se));
  }
}

TEST_CASE("tabulated-limit clan draw matches the conditional transform") {
  const ModelSpec m = balanced_model();
  AnalyticContext ctx(m);
  YSimulator sim(m, 800.0);
  Rng rng(8802);
  const int n = 20000;
  for (double age : {32.0, 64.0, 200.0, 800.0}) {
    CAPTURE(age);
    const double w = std::exp(sim.log_w_mu_u(age));
    for (double lambda : {0.25, 1.0, 4.0}) {
      CAPTURE(lambda);
      const double s = std::exp(-lambda / w);
      const double target = 1.0 - w * (1.0 - ctx.f_ts(age, s));
      double sum = 0, sumsq = 0;
      Rng draw_rng = rng.child(std::uint64_t(age * 10 + lambda * 100));
      for (int i = 0; i < n; ++i) {
        const double v = std::exp(
            -lambda * double(sim.draw_conditioned_limit(age, draw_rng)) / w);
        sum += v;
        sumsq += v * v;
      }
      const double emp = sum / n;
      const double se = std::sqrt(std::max(sumsq / n - emp * emp, 0.0) / n);
      CHECK(std::fabs(emp - target) <= std::max(0.012, 4 * se));
    }
  }
}

TEST_CASE("stable aggregation of many conditioned clans matches the transform") {
  const ModelSpec m = balanced_model();
  AnalyticContext ctx(m);
  YSimulator sim(m, 400.0);
  const double age = 100.0;
  const double w = std::exp(sim.log_w_mu_u(age));
  const std::uint64_t survivors = 100000;
  Rng rng(9903);
  const int n = 1500;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sim.aggregate_survivors(survivors, age, rng);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double theta = lambda / (double(survivors) * w);
    const double s = std::exp(-theta);
    // target = (E[s^Z | alive])^survivors, computed on the log scale
    const double cond = 1.0 - w * (1.0 - ctx.f_ts(age, s));
    const double target = std::exp(double(survivors) * std::log(cond));
    double sum = 0, sumsq = 0;
    for (double d : draws) {
      const double v = std::exp(-theta * d);
      sum += v;
      sumsq += v * v;
    }
    const double emp = sum / n;
    const double se = std::sqrt(std::max(sumsq / n - emp * emp, 0.0) / n);
    CHECK(std::fabs(emp - target) <= std::max(0.015, 4 * se));
  }
}

TEST_CASE("replicates are pure functions of (seed, index)") {
  YSimulator sim(balanced_model(), 50.0);
  const YSample a = sim.replicate(1234, 17);
  const YSample b = sim.replicate(1234, 17);
  CHECK(a.value == b.value);
  CHECK(a.truncated == b.truncated);

  const auto serial = sim.run(1234, 60, 1);
  const auto parallel = sim.run(1234, 60, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].value == parallel[i].value);
    CHECK(serial[i].value_u64 == parallel[i].value_u64);
    CHECK(serial[i].truncated == parallel[i].truncated);
  }
}

TEST_CASE("sample sets are identical for any worker count") {
  const ModelSpec m = balanced_model();
  SampleSet w1 = monte_carlo(m, 50.0, 200, 31337, 1);
  SampleSet w4 = monte_carlo(m, 50.0, 200, 31337, 4);
  SampleSet w16 = monte_carlo(m, 50.0, 200, 31337, 16);
  REQUIRE(w1.values.size() == 200);
  CHECK(w1.values == w4.values);
  CHECK(w1.values == w16.values);
  CHECK(w1.truncated == w4.truncated);
  CHECK(w1.truncated == w16.truncated);

  SampleSet other = monte_carlo(m, 50.0, 200, 31338, 1);
  CHECK(other.values != w1.values);
}

TEST_CASE("truncation is rare at desk scale") {
  SampleSet ss = monte_carlo(balanced_model(), 100.0, 2000, 112233, 1);
  CHECK(ss.trunc_fraction() < 0.01);
}

TEST_CASE("empirical Laplace transform edge cases") {
  SampleSet zeros;
  zeros.t = 1.0;
  zeros.n = 100;
  zeros.values.assign(100, 0);
  zeros.truncated.assign(100, false);
  for (const auto& pt : empirical_lt(zeros, 10.0, {0.0, 0.5, 1.0, 2.0})) {
    CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-12));
  }

  SampleSet point;
  point.t = 1.0;
  point.n = 50;
  point.values.assign(50, 7);
  point.truncated.assign(50, false);
  const auto pts = empirical_lt(point, 7.0, {0.0, 0.5, 1.0, 2.0});
  CHECK(pts[0].value == doctest::Approx(1.0));
  CHECK(pts[1].value == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(pts[2].value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(pts[3].value == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  auto identity_cdf = [](double x) { return std::min(std::max(x, 0.0), 1.0); };
  CHECK(ks_distance({0.5}, identity_cdf) == doctest::Approx(0.5));

  Rng rng(2718);
  std::vector<double> u(10000);
  for (auto& x : u) x = rng.uniform();
  CHECK(ks_distance(u, identity_cdf) < 0.02);

  // Samples at the mid-quantiles (i - 0.5)/n: the distance is exactly 1/(2n).
  std::vector<double> mids = {0.1, 0.3, 0.5, 0.7, 0.9};
  CHECK(ks_distance(mids, identity_cdf) == doctest::Approx(0.1).epsilon(1e-12));
}
