#pragma once

// Monte Carlo simulation of the immigration-driven population Y(t).
//
// The literal generative model (simulate every clan event by event) has
// infinite expected work per replicate: immigration batch sizes have infinite
// mean and clan event counts grow linearly in age. The simulator is therefore
// a hybrid with exact marginal law where feasible and tightly-controlled
// approximations elsewhere:
//   1. young / small batches: literal event-driven simulation (exact);
//   2. otherwise, the number of survivors of a batch of I clans of age u is
//      Binomial(I, 1/W(mu u)) (exact), and each survivor's size is drawn
//      conditioned on survival:
//      a. by rejection of event-driven runs when expected work is small
//         (exact);
//      b. from the scaling limit of the conditioned size, with an exact
//         second-order age correction for the PurePower family;
//      c. for huge survivor counts, whole batches are aggregated through the
//         matching stable central limit for the i.i.d. sum (mean-exact).
// Every replicate is a deterministic function of (master_seed, index), so
// results are independent of thread count and scheduling.

#include <cstdint>
#include <memory>
#include <vector>

#include "analytic.hpp"
#include "laws.hpp"
#include "rng.hpp"

namespace mbpnpi {

// Hard resource limits for one replicate.
struct SimBudget {
  std::uint64_t max_total_population = 1'000'000'000'000ull;  // truncate-and-flag
  std::uint64_t max_events_per_clan = 10'000'000;
};

// Switching thresholds of the hybrid simulator. Tests override these to force
// specific paths; defaults keep every hand-off far below study tolerances.
struct SimTuning {
  double plain_event_age = 32.0;   // literal path age bound (units of 1/mu)
  double plain_work_cap = 262144.0;      // literal path bound on I*(1+mu*u)
  double cond_work_cap = 4194304.0;      // rejection bound on M*(1+mu*u)*W(mu*u)
  std::uint64_t batch_agg_threshold = 65536;  // survivors -> stable aggregation
  double corrected_head_cut = 4.0;       // small-size cut of the corrected sampler
  std::uint64_t max_cond_retries = 4'000'000;
};

struct ClanResult {
  std::uint64_t size = 0;
  std::uint64_t events = 0;
  bool truncated = false;
};

// Exact event-driven simulation of one clan founded by a single individual,
// observed `duration` after founding. Lifetimes are Exp(mu); on death an
// individual is replaced by an offspring draw.
ClanResult simulate_clan(const OffspringLaw& offspring, double mu, double duration,
                         const SimBudget& budget, Rng& rng);

// Exact arrival times of the non-homogeneous Poisson immigration process on
// [0, horizon], by thinning. Strictly increasing.
std::vector<double> poisson_jumps(const IntensityFn& intensity, double horizon,
                                  Rng& rng);

// Tabulated scaling limit of (clan size at age u) / W(mu u) conditioned on
// survival: the law with Laplace transform 1 - (1 + theta^{-gamma})^{-1/gamma}
// (mean 1, tail ~ x^{-(1+gamma)}/Gamma(1-gamma)). Built once per gamma by
// Laplace inversion; sampling is inverse-transform on the table with exact
// power head/tail continuations, normalized to unit mean.
class ClanSizeLimit {
 public:
  static const ClanSizeLimit& for_gamma(double gamma);

  double gamma() const { return gamma_; }
  // Raw table draw; multiply by mean_norm() for a unit-mean sample.
  double sample_raw(Rng& rng) const;
  double cdf_raw(double x) const;
  // 1 / (mean of the raw sampler); the raw mean differs from 1 only through
  // table discretization (observed ~1e-3).
  double mean_norm() const { return mean_norm_; }

  double sample(Rng& rng) const { return sample_raw(rng) * mean_norm_; }

 private:
  explicit ClanSizeLimit(double gamma);

  double gamma_ = 0;
  double beta_ = 0;           // 1 + gamma
  double ln_x0_ = 0, dln_ = 0;  // log grid
  std::vector<double> cdf_;   // CDF at grid nodes
  double head_f_ = 0;         // CDF at first node
  double tail_coeff_ = 0;     // survival ~ tail_coeff * x^{-beta} past last node
  double mean_norm_ = 1.0;
};

struct YSample {
  double value = 0.0;
  std::uint64_t value_u64 = 0;
  bool truncated = false;
};

class YSimulator {
 public:
  YSimulator(ModelSpec model, double t, SimBudget budget = {},
             SimTuning tuning = {});

  const ModelSpec& model() const { return model_; }
  double t() const { return t_; }

  // Replicate `index` of the population at time t; a pure function of
  // (master_seed, index).
  YSample replicate(std::uint64_t master_seed, std::uint64_t index) const;

  // n replicates, identical output for any worker count.
  std::vector<YSample> run(std::uint64_t master_seed, std::uint64_t n,
                           int workers) const;

  // --- exposed internals (unit-tested individually) ----------------------
  double log_w_mu_u(double age) const;     // log W(mu * age)
  double survival_p(double age) const;     // 1 / W(mu * age)
  std::uint64_t draw_conditioned_exact(double age, Rng& rng) const;
  std::uint64_t draw_conditioned_limit(double age, Rng& rng) const;
  // Sum of `survivors` i.i.d. conditioned sizes at one age via the stable
  // aggregation path.
  double aggregate_survivors(std::uint64_t survivors, double age, Rng& rng) const;

 private:
  std::uint64_t integerize(double v, Rng& rng) const;

  ModelSpec model_;
  double t_;
  SimBudget budget_;
  SimTuning tuning_;
  bool closed_w_ = false;      // PurePower: W in closed form
  bool corrected_ = false;     // exact second-order age correction applies
  const ClanSizeLimit* limit_ = nullptr;
  // log W(mu u) interpolant for families without closed W (log-log grid).
  double grid_ln_y0_ = 0, grid_dln_ = 0;
  std::vector<double> grid_lw_;
};

}  // namespace mbpnpi
