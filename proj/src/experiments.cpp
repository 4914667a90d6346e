#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "errors.hpp"
#include "limit_laws.hpp"

namespace mbpnpi {

namespace {

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// Binomial-proportion standard error, kept positive by blending the
// empirical and theoretical rates so a degenerate sample (all successes)
// cannot silently zero the gate.
double prop_se(double emp, double theo, double n) {
  const double v = std::max(emp * (1.0 - emp), theo * (1.0 - theo));
  return std::sqrt(std::max(v, 1e-12) / n);
}

struct MeanSe {
  double mean = 0, se = 0;
};

template <typename It, typename F>
MeanSe mean_se(It begin, It end, F&& f) {
  double s = 0, s2 = 0, n = 0;
  for (It it = begin; it != end; ++it) {
    const double v = f(*it);
    s += v;
    s2 += v * v;
    n += 1;
  }
  if (n == 0) return {};
  const double m = s / n;
  const double var = std::max(s2 / n - m * m, 0.0);
  return {m, std::sqrt(var / n)};
}

// err(t_{k+1}) <= err(t_k) + 4 (se_k + se_{k+1}): nonincreasing up to noise.
void add_trend_verdict(VerificationReport& rep, const std::string& name,
                       const std::vector<double>& err,
                       const std::vector<double>& se) {
  Verdict v;
  v.criterion = name;
  v.pass = true;
  double worst = 0, worst_gate = 0;
  std::string seq;
  for (std::size_t k = 0; k < err.size(); ++k) {
    seq += (k ? " -> " : "") + fmt("%.4g", err[k]);
    if (k + 1 < err.size()) {
      const double allow = 4.0 * (se[k] + se[k + 1]);
      const double rise = err[k + 1] - err[k];
      if (rise > allow) v.pass = false;
      if (rise - allow > worst - worst_gate) {
        worst = rise;
        worst_gate = allow;
      }
    }
  }
  v.value = worst;
  v.gate = worst_gate;
  v.detail = "max error along tgrid: " + seq;
  rep.verdicts.push_back(std::move(v));
}

void add_gap_verdict(VerificationReport& rep, const std::string& name,
                     double err, double tol, double se4,
                     const std::string& detail) {
  Verdict v;
  v.criterion = name;
  v.value = err;
  v.gate = std::max(tol, se4);
  v.pass = err <= v.gate;
  v.detail = detail;
  rep.verdicts.push_back(std::move(v));
}

// Empirical-vs-theoretical CDF rows for the cdf.csv artifact, subsampled.
void add_cdf_rows(VerificationReport& rep, const std::string& stat, double t,
                  std::vector<double> xs,
                  const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const std::size_t step = std::max<std::size_t>(1, n / 200);
  for (std::size_t i = 0; i < n; i += step) {
    StatRow r;
    r.statistic = stat;
    r.t = t;
    r.arg = xs[i];
    r.empirical = static_cast<double>(i + 1) / static_cast<double>(n);
    r.theoretical = cdf(xs[i]);
    r.abs_err = std::fabs(r.empirical - r.theoretical);
    rep.rows.push_back(std::move(r));
  }
}

RegimeClass require_regime(const AnalyticContext& ctx, Regime want) {
  RegimeClass rc = ctx.classify();
  if (rc.regime != want) {
    throw RegimeError("model classifies as regime " + regime_name(rc.regime) +
                      ", experiment requires " + regime_name(want));
  }
  return rc;
}

}  // namespace

double SampleSet::trunc_fraction() const {
  if (truncated.empty()) return 0.0;
  double c = 0;
  for (bool b : truncated) c += b;
  return c / static_cast<double>(truncated.size());
}

SampleSet monte_carlo(const ModelSpec& model, double t, std::uint64_t n,
                      std::uint64_t master_seed, int workers,
                      const SimBudget& budget, const SimTuning& tuning) {
  YSimulator sim(model, t, budget, tuning);
  const std::vector<YSample> raw = sim.run(master_seed, n, workers);
  SampleSet out;
  out.t = t;
  out.master_seed = master_seed;
  out.n = n;
  out.values.reserve(n);
  out.truncated.reserve(n);
  for (const YSample& s : raw) {
    out.values.push_back(static_cast<unsigned __int128>(s.value_u64));
    out.truncated.push_back(s.truncated);
  }
  return out;
}

std::vector<LtPoint> empirical_lt(const SampleSet& samples, double normalizer,
                                  const std::vector<double>& lambda_grid) {
  if (!(normalizer > 0)) throw DomainError("empirical_lt: normalizer must be > 0");
  std::vector<LtPoint> out;
  out.reserve(lambda_grid.size());
  for (const double lam : lambda_grid) {
    const MeanSe ms =
        mean_se(samples.values.begin(), samples.values.end(),
                [&](unsigned __int128 v) {
                  return std::exp(-lam * static_cast<double>(v) / normalizer);
                });
    out.push_back({lam, ms.mean, ms.se});
  }
  return out;
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return ks;
}

bool VerificationReport::all_pass() const {
  for (const Verdict& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Regime I: Y(t) / PsiInv(rho t) -> one-sided stable, LT e^{-lambda^alpha}.
// ---------------------------------------------------------------------------

VerificationReport run_regime_i(const ModelSpec& model, const ExperimentParams& p) {
  AnalyticContext ctx(model);
  VerificationReport rep;
  rep.regime = require_regime(ctx, Regime::I);
  rep.master_seed = p.seed;
  const double alpha = model.immigration.alpha();
  const double rho = model.intensity.limit();

  std::vector<double> max_err, max_se;
  SampleSet last;
  double last_norm = 1;
  for (const double t : p.tgrid) {
    SampleSet ss = monte_carlo(model, t, p.n, p.seed, p.workers, p.budget, p.tuning);
    const double norm = ctx.psi_inv(rho * t);
    const auto pts = empirical_lt(ss, norm, p.lambda_grid);
    double err = 0, se = 0;
    for (const LtPoint& pt : pts) {
      StatRow r;
      r.statistic = "lt";
      r.t = t;
      r.arg = pt.lambda;
      r.empirical = pt.value;
      r.theoretical = limit::stable_lt(alpha, pt.lambda);
      r.abs_err = std::fabs(r.empirical - r.theoretical);
      r.se = pt.se;
      r.trunc_fraction = ss.trunc_fraction();
      err = std::max(err, r.abs_err);
      se = std::max(se, r.se);
      rep.rows.push_back(std::move(r));
    }
    max_err.push_back(err);
    max_se.push_back(se);
    last = std::move(ss);
    last_norm = norm;
  }
  add_gap_verdict(rep, "lt_final", max_err.back(), p.tol.lt, 4 * max_se.back(),
                  fmt("max-lambda LT error %.4g at final t", max_err.back()));
  add_trend_verdict(rep, "lt_trend", max_err, max_se);

  if (std::fabs(alpha - 0.5) < 1e-9) {
    std::vector<double> xs;
    xs.reserve(last.values.size());
    for (std::size_t i = 0; i < last.values.size(); ++i) {
      xs.push_back(last.value_as_double(i) / last_norm);
    }
    const auto cdf = [](double x) { return limit::stable_cdf_half(x); };
    const double ks = ks_distance(xs, cdf);
    StatRow r;
    r.statistic = "ks";
    r.t = last.t;
    r.empirical = ks;
    r.theoretical = 0;
    r.abs_err = ks;
    r.se = 0.26 / std::sqrt(static_cast<double>(xs.size()));
    r.trunc_fraction = last.trunc_fraction();
    rep.rows.push_back(r);
    add_gap_verdict(rep, "ks_final", ks, p.tol.ks, 0,
                    fmt("KS vs closed-form stable CDF at final t: %.4g", ks));
    add_cdf_rows(rep, "cdf", last.t, xs, cdf);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Regime II: Y(t) / W(mu t) -> law with LT (1 + lambda^gamma)^{-C rho}.
// ---------------------------------------------------------------------------

VerificationReport run_regime_ii(const ModelSpec& model, const ExperimentParams& p) {
  AnalyticContext ctx(model);
  VerificationReport rep;
  rep.regime = require_regime(ctx, Regime::II);
  rep.master_seed = p.seed;
  const double gamma = model.offspring.gamma();
  const double c_rho = rep.regime.c_const * model.intensity.limit();

  std::vector<double> max_err, max_se;
  for (const double t : p.tgrid) {
    SampleSet ss = monte_carlo(model, t, p.n, p.seed, p.workers, p.budget, p.tuning);
    const double norm = ctx.w_of_y(model.mu * t);
    const auto pts = empirical_lt(ss, norm, p.lambda_grid);
    double err = 0, se = 0;
    for (const LtPoint& pt : pts) {
      StatRow r;
      r.statistic = "lt";
      r.t = t;
      r.arg = pt.lambda;
      r.empirical = pt.value;
      r.theoretical = limit::compressed_lt(gamma, c_rho, pt.lambda);
      r.abs_err = std::fabs(r.empirical - r.theoretical);
      r.se = pt.se;
      r.trunc_fraction = ss.trunc_fraction();
      err = std::max(err, r.abs_err);
      se = std::max(se, r.se);
      rep.rows.push_back(std::move(r));
    }
    max_err.push_back(err);
    max_se.push_back(se);
  }
  add_gap_verdict(rep, "lt_final", max_err.back(), p.tol.lt, 4 * max_se.back(),
                  fmt("max-lambda LT error %.4g at final t", max_err.back()));
  add_trend_verdict(rep, "lt_trend", max_err, max_se);
  return rep;
}

// ---------------------------------------------------------------------------
// Regime III: survival plateau and conditional p.g.f. H(s).
// ---------------------------------------------------------------------------

VerificationReport run_regime_iii(const ModelSpec& model, const ExperimentParams& p) {
  AnalyticContext ctx(model);
  VerificationReport rep;
  rep.regime = require_regime(ctx, Regime::III);
  rep.master_seed = p.seed;
  const double n = static_cast<double>(p.n);

  SampleSet last;
  for (const double t : p.tgrid) {
    SampleSet ss = monte_carlo(model, t, p.n, p.seed, p.workers, p.budget, p.tuning);
    double alive = 0;
    for (const auto& v : ss.values) alive += v > 0;
    const double emp = alive / n;
    StatRow r;
    r.statistic = "survival";
    r.t = t;
    r.empirical = emp;
    r.theoretical = ctx.survival_prob(t);
    r.abs_err = std::fabs(emp - r.theoretical);
    r.se = prop_se(emp, r.theoretical, n);
    r.trunc_fraction = ss.trunc_fraction();
    rep.rows.push_back(r);
    add_gap_verdict(rep, fmt("survival_t%g", t), r.abs_err, 0, 4 * r.se,
                    fmt("P(Y>0) at t=%g: empirical %.5f vs analytic %.5f", t,
                        emp, r.theoretical));
    last = std::move(ss);
  }

  // Plateau: empirical survival at the last t against the t->inf limit.
  {
    double alive = 0;
    for (const auto& v : last.values) alive += v > 0;
    const double emp = alive / n;
    StatRow r;
    r.statistic = "survival_limit";
    r.t = last.t;
    r.empirical = emp;
    r.theoretical = ctx.survival_limit();
    r.abs_err = std::fabs(emp - r.theoretical);
    r.se = prop_se(emp, r.theoretical, n);
    rep.rows.push_back(r);
    add_gap_verdict(rep, "survival_plateau", r.abs_err, p.tol.survival, 4 * r.se,
                    fmt("plateau %.5f vs 1-exp(-rho Q) = %.5f", emp,
                        r.theoretical));
  }

  // Conditional p.g.f. E[s^Y | Y>0] at the last t.
  for (const double s : p.s_grid) {
    const double ls = std::log(s);
    std::vector<double> vals;
    vals.reserve(last.values.size());
    for (const auto& v : last.values) {
      if (v > 0) vals.push_back(std::exp(static_cast<double>(v) * ls));
    }
    const MeanSe ms = mean_se(vals.begin(), vals.end(), [](double x) { return x; });
    StatRow r;
    r.statistic = "cond_pgf";
    r.t = last.t;
    r.arg = s;
    r.empirical = ms.mean;
    r.theoretical = ctx.h_pgf(s);
    r.abs_err = std::fabs(ms.mean - r.theoretical);
    r.se = ms.se;
    r.trunc_fraction = last.trunc_fraction();
    rep.rows.push_back(r);
    add_gap_verdict(rep, fmt("cond_pgf_s%.2f", s), r.abs_err, p.tol.cond_pgf,
                    4 * r.se,
                    fmt("E[s^Y | Y>0] at s=%.2f: %.5f vs H(s)=%.5f", s, ms.mean,
                        r.theoretical));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Regime IV: quadrature identity I(t; s(t)) -> -ln sigma, and the uniform
// limit of A(Y)/A(W(mu t)).
// ---------------------------------------------------------------------------

VerificationReport run_regime_iv(const ModelSpec& model, const ExperimentParams& p) {
  AnalyticContext ctx(model);
  VerificationReport rep;
  rep.regime = require_regime(ctx, Regime::IV);
  rep.master_seed = p.seed;

  // (a) Formula level, no simulation: s(t) = exp(-1/W(Binv(sigma B(mu t)))).
  const double T = p.iv_formula_t;
  const double log_b_t = ctx.log_b_fn(model.mu * T);
  for (const double sigma : p.sigma_grid) {
    StatRow r;
    r.statistic = "formula_iv";
    r.t = T;
    r.arg = sigma;
    r.theoretical = -std::log(sigma);
    const double x = ctx.b_inv(std::exp(std::log(sigma) + log_b_t));
    const double s = std::exp(-1.0 / ctx.w_of_y(x));
    r.empirical = ctx.i_conv(T, s);
    r.abs_err = std::fabs(r.empirical - r.theoretical);
    rep.rows.push_back(r);
    add_gap_verdict(rep, fmt("formula_iv_sigma%.2f", sigma), r.abs_err,
                    p.tol.iv_formula, 0,
                    fmt("I(t; s(t)) = %.5f vs -ln sigma = %.5f at t=%g",
                        r.empirical, r.theoretical, T));
  }

  // (b) Monte Carlo trend: KS of A(Y)/A(W(mu t)) vs Uniform(0,1).
  const auto unit_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  std::vector<double> ks_seq, ks_se;
  for (const double t : p.tgrid) {
    SampleSet ss = monte_carlo(model, t, p.n, p.seed, p.workers, p.budget, p.tuning);
    const double denom = ctx.log_b_fn(model.mu * t);  // log A(W(mu t)) = log B(mu t)
    std::unordered_map<std::uint64_t, double> cache;
    std::vector<double> ratios;
    ratios.reserve(ss.values.size());
    std::size_t zeros = 0;
    for (const auto& v : ss.values) {
      if (v == 0) {
        ++zeros;
        continue;
      }
      const auto key = static_cast<std::uint64_t>(v);
      auto it = cache.find(key);
      if (it == cache.end()) {
        const double la = ctx.log_a_fn(static_cast<double>(v));
        it = cache.emplace(key, std::exp(la - denom)).first;
      }
      ratios.push_back(it->second);
    }
    const double ks = ks_distance(ratios, unit_cdf);
    StatRow r;
    r.statistic = "ks";
    r.t = t;
    r.empirical = ks;
    r.theoretical = 0;
    r.abs_err = ks;
    r.se = 0.26 / std::sqrt(static_cast<double>(ratios.size()));
    r.trunc_fraction = ss.trunc_fraction();
    r.note = fmt("excluded Y=0 fraction %.4f", static_cast<double>(zeros) /
                                                   static_cast<double>(p.n));
    rep.rows.push_back(r);
    ks_seq.push_back(ks);
    ks_se.push_back(0.26 / std::sqrt(static_cast<double>(ratios.size())));
    if (t == p.tgrid.back()) add_cdf_rows(rep, "cdf", t, ratios, unit_cdf);
  }
  add_trend_verdict(rep, "ks_trend", ks_seq, ks_se);
  return rep;
}

// ---------------------------------------------------------------------------
// Survival vs analytic probability, any regime; t_eps check when Q = inf.
// ---------------------------------------------------------------------------

VerificationReport run_survival(const ModelSpec& model, const ExperimentParams& p) {
  AnalyticContext ctx(model);
  VerificationReport rep;
  rep.regime = ctx.classify();
  rep.master_seed = p.seed;
  const double n = static_cast<double>(p.n);

  auto survival_row = [&](double t, const char* stat) -> StatRow {
    SampleSet ss = monte_carlo(model, t, p.n, p.seed, p.workers, p.budget, p.tuning);
    double alive = 0;
    for (const auto& v : ss.values) alive += v > 0;
    const double emp = alive / n;
    StatRow r;
    r.statistic = stat;
    r.t = t;
    r.empirical = emp;
    r.theoretical = ctx.survival_prob(t);
    r.abs_err = std::fabs(emp - r.theoretical);
    r.se = prop_se(emp, r.theoretical, n);
    r.trunc_fraction = ss.trunc_fraction();
    return r;
  };

  for (const double t : p.tgrid) {
    StatRow r = survival_row(t, "survival");
    rep.rows.push_back(r);
    add_gap_verdict(rep, fmt("survival_t%g", t), r.abs_err, 0, 4 * r.se,
                    fmt("P(Y>0) at t=%g: empirical %.5f vs analytic %.5f", t,
                        r.empirical, r.theoretical));
  }

  if (std::isinf(rep.regime.q_total)) {
    const double eps = p.t_eps_level;
    try {
      const double teps = ctx.t_eps(eps);
      StatRow r = survival_row(teps, "survival_t_eps");
      r.theoretical = 1.0 - eps;  // the level t_eps is defined to reach
      r.abs_err = std::fabs(r.empirical - r.theoretical);
      rep.rows.push_back(r);
      const double gate = std::max(p.tol.survival, 4 * r.se);
      Verdict v;
      v.criterion = "survival_at_t_eps";
      v.value = (1.0 - eps) - r.empirical;  // shortfall below the level
      v.gate = gate;
      v.pass = v.value <= gate;
      v.detail = fmt("P(Y>0)=%.5f at t_eps=%.5f, level %.3f", r.empirical, teps,
                     1.0 - eps);
      rep.verdicts.push_back(std::move(v));
    } catch (const NumericError& e) {
      StatRow r;
      r.statistic = "survival_t_eps";
      r.note = std::string("skipped: ") + e.what();
      rep.rows.push_back(std::move(r));
    }
  }
  return rep;
}

VerificationReport run_auto(const ModelSpec& model, const ExperimentParams& p) {
  AnalyticContext ctx(model);
  switch (ctx.classify().regime) {
    case Regime::I:
      return run_regime_i(model, p);
    case Regime::II:
      return run_regime_ii(model, p);
    case Regime::III:
      return run_regime_iii(model, p);
    case Regime::IV:
      return run_regime_iv(model, p);
  }
  throw NumericError("unreachable regime dispatch");
}

}  // namespace mbpnpi
