#pragma once

// Desk-scale verification experiments: normalize Monte Carlo samples of Y(t),
// compare empirical transforms/CDFs against the analytic and limit-law
// targets, and produce pass/fail reports.
//
// Verdict rule everywhere: PASS iff |empirical - theoretical| is within
// max(tolerance, 4 * MC standard error). Trend verdicts (error nonincreasing
// along the time grid) allow a noise margin of 4 * combined SE.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "laws.hpp"
#include "simulate.hpp"

namespace mbpnpi {

struct SampleSet {
  double t = 0;
  std::vector<unsigned __int128> values;
  std::vector<bool> truncated;
  std::uint64_t master_seed = 0;
  std::uint64_t n = 0;

  double value_as_double(std::size_t i) const {
    return static_cast<double>(values[i]);
  }
  double trunc_fraction() const;
};

// n replicates of Y(t); replicate i depends only on (master_seed, i).
SampleSet monte_carlo(const ModelSpec& model, double t, std::uint64_t n,
                      std::uint64_t master_seed, int workers,
                      const SimBudget& budget = {}, const SimTuning& tuning = {});

struct LtPoint {
  double lambda = 0, value = 0, se = 0;
};

// Mean of exp(-lambda * y / normalizer) per lambda, with MC standard errors.
std::vector<LtPoint> empirical_lt(const SampleSet& samples, double normalizer,
                                  const std::vector<double>& lambda_grid);

// Sup distance between the empirical CDF of `samples` and `cdf`.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

struct Tolerances {
  double lt = 0.05;
  double ks = 0.08;
  double survival = 0.005;
  double cond_pgf = 0.03;
  double iv_formula = 0.02;
};

struct ExperimentParams {
  std::vector<double> tgrid;
  std::uint64_t n = 5000;
  std::vector<double> lambda_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> s_grid = {0.25, 0.5, 0.75};
  std::vector<double> sigma_grid = {0.2, 0.5, 0.8};
  double iv_formula_t = 1e6;   // horizon of the quadrature-only identity check
  double t_eps_level = 0.01;   // survival level for the t_eps check
  Tolerances tol;
  std::uint64_t seed = 0;
  int workers = 1;
  SimBudget budget;
  SimTuning tuning;
};

struct StatRow {
  std::string statistic;  // "lt" | "survival" | "cond_pgf" | "ks" | "cdf" | ...
  double t = 0;
  double arg = 0;  // lambda, s, sigma, or x depending on statistic
  double empirical = 0;
  double theoretical = 0;
  double abs_err = 0;
  double se = 0;
  double trunc_fraction = 0;
  std::string note;
};

struct Verdict {
  std::string criterion;
  bool pass = false;
  double value = 0;  // the checked quantity (error or statistic)
  double gate = 0;   // threshold it was compared against
  std::string detail;
};

struct VerificationReport {
  RegimeClass regime{Regime::I, 0, 0, ""};
  std::vector<StatRow> rows;
  std::vector<Verdict> verdicts;
  std::uint64_t master_seed = 0;

  bool all_pass() const;
};

// Theorem-by-theorem experiment drivers. Each classifies the model first and
// throws RegimeError on a mismatch.
VerificationReport run_regime_i(const ModelSpec& model, const ExperimentParams& p);
VerificationReport run_regime_ii(const ModelSpec& model, const ExperimentParams& p);
VerificationReport run_regime_iii(const ModelSpec& model, const ExperimentParams& p);
VerificationReport run_regime_iv(const ModelSpec& model, const ExperimentParams& p);
// Survival check for any regime: per-t empirical vs analytic survival
// probability; for infinite-Q models also the t_eps threshold check.
VerificationReport run_survival(const ModelSpec& model, const ExperimentParams& p);

// Dispatch on the classified (or overridden) regime.
VerificationReport run_auto(const ModelSpec& model, const ExperimentParams& p);

}  // namespace mbpnpi
