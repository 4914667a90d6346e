#include <cmath>
#include <vector>

#include "analytic.hpp"
#include "doctest.h"
#include "errors.hpp"

using namespace mbpnpi;

namespace {

ModelSpec balanced_model() {  // alpha = gamma: survival decays like 1/t
  return ModelSpec{1.0, OffspringLaw::pure_power(0.5, 0.5),
                   ImmigrationLaw::scaled_sibuya(0.5, 1.0),
                   IntensityFn::constant(1.0)};
}

ModelSpec finite_mass_model() {  // alpha > gamma: integrable survival kernel
  return ModelSpec{1.0, OffspringLaw::pure_power(0.45, 0.5),
                   ImmigrationLaw::scaled_sibuya(0.9, 1.0),
                   IntensityFn::constant(1.0)};
}

ModelSpec heavy_immigration_model() {  // alpha < gamma
  return ModelSpec{1.0, OffspringLaw::pure_power(0.8, 0.5),
                   ImmigrationLaw::scaled_sibuya(0.4, 1.0),
                   IntensityFn::constant(1.0)};
}

}  // namespace

TEST_CASE("V and W closed values and inverse pairing") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.closed_form());
  CHECK(ctx.v_of_x(4.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ctx.v_of_x(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ctx.v_of_x(37.0) == doctest::Approx(20.331050121192879).epsilon(1e-12));
  CHECK(ctx.w_of_y(4.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ctx.w_of_y(0.0) == doctest::Approx(1.0).epsilon(1e-14));

  AnalyticContext quad_model(
      ModelSpec{1.0, OffspringLaw::pure_power(1.0, 0.5),
                ImmigrationLaw::bernoulli(1.0), IntensityFn::constant(1.0)});
  CHECK(quad_model.v_of_x(10.0) == doctest::Approx(18.0).epsilon(1e-12));

  for (double x : {1.0, 1.5, 4.0, 40.0, 4000.0, 4e6}) {
    CHECK(ctx.w_of_y(ctx.v_of_x(x)) == doctest::Approx(x).epsilon(1e-9));
  }
  for (double y : {0.0, 0.1, 1.0, 10.0, 100.0, 1e6}) {
    CHECK(ctx.v_of_x(ctx.w_of_y(y)) == doctest::Approx(y).epsilon(1e-9));
  }
}

TEST_CASE("generic quadrature route agrees with closed forms") {
  AnalyticContext closed(balanced_model());
  AnalyticContext generic(balanced_model(), {}, {}, /*force_generic=*/true);
  CHECK_FALSE(generic.closed_form());

  for (double y : {0.1, 1.0, 10.0, 100.0}) {
    CHECK(generic.w_of_y(y) ==
          doctest::Approx(closed.w_of_y(y)).epsilon(1e-8));
  }
  for (double x : {1.0, 2.0, 37.0, 1000.0}) {
    CHECK(generic.v_of_x(x) == doctest::Approx(closed.v_of_x(x)).epsilon(1e-8));
  }
  CHECK(generic.q_cum(800.0) ==
        doctest::Approx(21.213219632236303).epsilon(1e-7));
  CHECK(generic.i_conv(50.0, 0.3) ==
        doctest::Approx(9.7548400940455235).epsilon(1e-7));
  CHECK(generic.f_ts(5.0, 0.3) ==
        doctest::Approx(0.83275194989593133).epsilon(1e-8));
  CHECK(generic.b_fn(10.0) == doctest::Approx(150.0625).epsilon(1e-7));
}

TEST_CASE("Psi and its inverse") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.psi(81.0) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(ctx.psi_inv(9.0) == doctest::Approx(81.0).epsilon(1e-9));
  for (double x : {1.0, 2.0, 1e4}) {
    CHECK(ctx.psi_inv(ctx.psi(x)) == doctest::Approx(x).epsilon(1e-8));
  }
  // Power-law normalizer used for the heavy-immigration limit: (cImm y)^{1/alpha}.
  AnalyticContext heavy(heavy_immigration_model());
  CHECK(heavy.psi_inv(800.0) ==
        doctest::Approx(std::pow(800.0, 2.5)).epsilon(1e-9));
}

TEST_CASE("single-clan transform F(t;s)") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.f_ts(12.0, 0.0) == doctest::Approx(0.9375).epsilon(1e-12));
  CHECK(ctx.f_ts(0.0, 0.3) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(ctx.f_ts(5.0, 0.3) ==
        doctest::Approx(0.83275194989593133).epsilon(1e-10));
  for (double t : {1.0, 10.0, 100.0}) {
    CHECK(1.0 - ctx.f_ts(t, 0.0) ==
          doctest::Approx(1.0 / ctx.w_of_y(t)).epsilon(1e-9));
  }
}

TEST_CASE("backward equation residual at the transform level") {
  // dF/dt = mu (f(F) - F), checked by central differences.
  for (const ModelSpec& m : {balanced_model(), finite_mass_model()}) {
    AnalyticContext ctx(m);
    const double h = 1e-4;
    for (double t : {0.5, 1.0, 5.0, 12.0, 50.0}) {
      for (double s : {0.0, 0.25, 0.5, 0.75, 0.9}) {
        const double dF = (ctx.f_ts(t + h, s) - ctx.f_ts(t - h, s)) / (2 * h);
        const double F = ctx.f_ts(t, s);
        const double rhs = m.mu * (m.offspring.pgf(F) - F);
        CHECK(std::fabs(dF - rhs) <= 1e-6);
      }
    }
  }
}

TEST_CASE("semigroup property of F") {
  AnalyticContext ctx(balanced_model());
  for (double t : {0.5, 2.0, 10.0}) {
    for (double u : {0.5, 2.0, 10.0}) {
      for (double s : {0.0, 0.3, 0.7}) {
        CHECK(ctx.f_ts(t + u, s) ==
              doctest::Approx(ctx.f_ts(t, ctx.f_ts(u, s))).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("survival kernel q and its cumulative integral") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.q0(12.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ctx.q_ts(3.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ctx.q_cum(12.0) ==
        doctest::Approx(5.5451774444795625).epsilon(1e-10));
  CHECK(ctx.q_cum(800.0) ==
        doctest::Approx(21.213219632236303).epsilon(1e-10));
  CHECK(std::isinf(ctx.q_total()));

  AnalyticContext fm(finite_mass_model());
  CHECK(fm.q_total() == doctest::Approx(4.4444444444444444).epsilon(1e-9));
}

TEST_CASE("population transform I and Phi") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.i_conv(12.0, 0.0) ==
        doctest::Approx(5.5451774444795625).epsilon(1e-9));
  CHECK(ctx.phi(12.0, 0.0) == doctest::Approx(0.00390625).epsilon(1e-8));
  CHECK(ctx.i_conv(0.0, 0.3) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ctx.phi(0.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ctx.i_conv(7.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ctx.phi(7.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ctx.i_conv(50.0, 0.3) ==
        doctest::Approx(9.7548400940455235).epsilon(1e-9));
  // Tiny transform value: compare on the log scale to keep the check relative.
  CHECK(-std::log(ctx.phi(200.0, 0.5)) ==
        doctest::Approx(-std::log(5.7243634835024101e-7)).epsilon(1e-9));
}

TEST_CASE("survival probability") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.survival_prob(12.0) ==
        doctest::Approx(1.0 - 0.00390625).epsilon(1e-10));
  CHECK(ctx.survival_prob(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ctx.survival_limit() == doctest::Approx(1.0));

  AnalyticContext fm(finite_mass_model());
  CHECK(fm.survival_limit() ==
        doctest::Approx(0.98825637154297864).epsilon(1e-9));
}

TEST_CASE("limit conditional transform Delta and H") {
  AnalyticContext fm(finite_mass_model());
  CHECK(fm.delta_s(0.0) == doctest::Approx(4.4444444444444444).epsilon(1e-9));
  CHECK(fm.h_pgf(0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fm.delta_s(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fm.h_pgf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fm.delta_s(0.5) == doctest::Approx(3.2535237687680565).epsilon(1e-9));
  CHECK(fm.h_pgf(0.25) == doctest::Approx(0.0085018756847084677).epsilon(1e-7));
  CHECK(fm.h_pgf(0.5) == doctest::Approx(0.027213776963833002).epsilon(1e-7));
  CHECK(fm.h_pgf(0.75) == doctest::Approx(0.081606364050662651).epsilon(1e-7));

  // Generic route agrees.
  AnalyticContext gen(finite_mass_model(), {}, {}, true);
  CHECK(gen.delta_s(0.5) == doctest::Approx(3.2535237687680565).epsilon(1e-6));

  // Divergent total mass: the limit conditional law does not exist.
  AnalyticContext bal(balanced_model());
  CHECK_THROWS_AS((void)bal.delta_s(0.5), RegimeError);
}

TEST_CASE("slowly-growing normalizers B and A") {
  AnalyticContext ctx(balanced_model());
  CHECK(ctx.b_fn(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ctx.b_fn(12.0) == doctest::Approx(256.0).epsilon(1e-9));
  CHECK(ctx.b_fn(10.0) == doctest::Approx(150.0625).epsilon(1e-9));
  CHECK(ctx.a_fn(37.0) == doctest::Approx(1369.0).epsilon(1e-9));
  for (double x : {1.0, 10.0, 100.0}) {
    CHECK(ctx.b_inv(ctx.b_fn(x)) == doctest::Approx(x).epsilon(1e-6));
  }
}

TEST_CASE("threshold time t_eps for near-certain survival") {
  AnalyticContext bal(balanced_model());
  CHECK(bal.t_eps(0.01) == doctest::Approx(8.6491106406735173).epsilon(1e-8));
  AnalyticContext heavy(heavy_immigration_model());
  CHECK(heavy.t_eps(0.01) == doctest::Approx(6.7259294301794506).epsilon(1e-7));
  // Finite total mass: survival never reaches 1 - eps for small eps.
  AnalyticContext fm(finite_mass_model());
  CHECK_THROWS_AS((void)fm.t_eps(0.001), RegimeError);
}

TEST_CASE("regime classification") {
  {
    RegimeClass rc = AnalyticContext(heavy_immigration_model()).classify();
    CHECK(rc.regime == Regime::I);
  }
  {
    RegimeClass rc = AnalyticContext(balanced_model()).classify();
    CHECK(rc.regime == Regime::II);
    CHECK(rc.c_const == doctest::Approx(4.0).epsilon(1e-9));
  }
  {
    RegimeClass rc = AnalyticContext(finite_mass_model()).classify();
    CHECK(rc.regime == Regime::III);
    CHECK(rc.q_total == doctest::Approx(4.4444444444444444).epsilon(1e-9));
  }
  {
    ModelSpec m{1.0, OffspringLaw::log_power(0.5, 0.4, 0.25),
                ImmigrationLaw::scaled_sibuya(0.5, 0.1),
                IntensityFn::constant(1.0)};
    RegimeClass rc = AnalyticContext(m).classify();
    CHECK(rc.regime == Regime::IV);
  }
}

TEST_CASE("domain errors") {
  AnalyticContext ctx(balanced_model());
  CHECK_THROWS_AS((void)ctx.v_of_x(0.5), DomainError);
  CHECK_THROWS_AS((void)ctx.w_of_y(-1.0), DomainError);
  CHECK_THROWS_AS((void)ctx.f_ts(-1.0, 0.3), DomainError);
  CHECK_THROWS_AS((void)ctx.psi(0.5), DomainError);
}
