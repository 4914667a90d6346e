#include "simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <thread>

#include "errors.hpp"
#include "laplace.hpp"

namespace mbpnpi {

namespace {
constexpr double kTailCapD = 4.0e18;  // keeps u64 accumulation overflow-free
}

// ---------------------------------------------------------------------------
// Event-driven clan simulation.
// ---------------------------------------------------------------------------

ClanResult simulate_clan(const OffspringLaw& offspring, double mu, double duration,
                         const SimBudget& budget, Rng& rng) {
  ClanResult r;
  if (duration <= 0.0) {
    r.size = 1;
    return r;
  }
  std::uint64_t n = 1;
  double tau = 0.0;
  while (n > 0) {
    tau += rng.exponential(mu * static_cast<double>(n));
    if (tau >= duration) break;
    n = n - 1 + offspring.sample(rng);
    ++r.events;
    if (r.events >= budget.max_events_per_clan ||
        n > budget.max_total_population) {
      r.truncated = true;
      break;
    }
  }
  r.size = n;
  return r;
}

std::vector<double> poisson_jumps(const IntensityFn& intensity, double horizon,
                                  Rng& rng) {
  std::vector<double> out;
  if (horizon <= 0.0) return out;
  const double bound = intensity.sup_on(0.0, horizon);
  if (!(bound > 0.0)) return out;
  double tau = 0.0;
  for (;;) {
    tau += rng.exponential(bound);
    if (tau >= horizon) break;
    if (rng.uniform() * bound < intensity.value(tau)) out.push_back(tau);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ClanSizeLimit: tabulated limit law of (size at age u)/W(mu u) given survival.
// ---------------------------------------------------------------------------

ClanSizeLimit::ClanSizeLimit(double gamma) : gamma_(gamma), beta_(1.0 + gamma) {
  // Survival function S(x) has Laplace transform (1 + theta^gamma)^{-1/gamma}.
  const auto lt_survival = [gamma](std::complex<double> s) {
    return std::pow(1.0 + std::pow(s, gamma), -1.0 / gamma);
  };
  constexpr int kNodes = 4096;
  constexpr double kXMin = 1e-6, kXMax = 1e5;
  constexpr int kTalbotM = 32;  // ~1e-11 inversion accuracy (roundoff-optimal)
  ln_x0_ = std::log(kXMin);
  dln_ = (std::log(kXMax) - ln_x0_) / (kNodes - 1);
  std::vector<double> surv(kNodes);
  int jmax = 0;
  for (int j = 0; j < kNodes; ++j) {
    const double x = std::exp(ln_x0_ + j * dln_);
    surv[j] = std::clamp(laplace::talbot(lt_survival, x, kTalbotM), 0.0, 1.0);
    if (surv[j] >= 1e-6) jmax = j;  // beyond this the power tail takes over
  }
  jmax = std::max(jmax, 8);
  cdf_.resize(jmax + 1);
  double prev = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    double f = 1.0 - surv[j];
    f = std::clamp(f, prev + 1e-15, 1.0 - 1e-12);
    cdf_[j] = f;
    prev = f;
  }
  head_f_ = cdf_.front();
  const double x_last = std::exp(ln_x0_ + jmax * dln_);
  const double s_last = 1.0 - cdf_.back();
  tail_coeff_ = s_last * std::pow(x_last, beta_);

  // Mean of the piecewise sampler (head power + log-linear segments + power
  // tail); dividing by it makes sample() exactly unit-mean.
  double mean = kXMin * head_f_ * gamma_ / (1.0 + gamma_);
  const double seg = std::expm1(dln_) / dln_;
  for (int j = 0; j + 1 <= jmax; ++j) {
    mean += (cdf_[j + 1] - cdf_[j]) * std::exp(ln_x0_ + j * dln_) * seg;
  }
  mean += x_last * s_last * beta_ / gamma_;
  mean_norm_ = 1.0 / mean;
}

double ClanSizeLimit::sample_raw(Rng& rng) const {
  const double u = rng.uniform();
  if (u < head_f_) {
    return std::exp(ln_x0_) * std::pow(u / head_f_, 1.0 / gamma_);
  }
  if (u >= cdf_.back()) {
    return std::pow(tail_coeff_ / (1.0 - u), 1.0 / beta_);
  }
  // Largest j with cdf_[j] <= u.
  std::size_t lo = 0, hi = cdf_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (cdf_[mid] <= u ? lo : hi) = mid;
  }
  const double frac = (u - cdf_[lo]) / (cdf_[lo + 1] - cdf_[lo]);
  return std::exp(ln_x0_ + (static_cast<double>(lo) + frac) * dln_);
}

double ClanSizeLimit::cdf_raw(double x) const {
  if (!(x > 0.0)) return 0.0;
  const double lnx = std::log(x);
  if (lnx <= ln_x0_) return head_f_ * std::exp(gamma_ * (lnx - ln_x0_));
  const double pos = (lnx - ln_x0_) / dln_;
  if (pos >= static_cast<double>(cdf_.size() - 1)) {
    return 1.0 - tail_coeff_ * std::pow(x, -beta_);
  }
  const auto j = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(j);
  return cdf_[j] + frac * (cdf_[j + 1] - cdf_[j]);
}

const ClanSizeLimit& ClanSizeLimit::for_gamma(double gamma) {
  static std::mutex mu;
  static std::map<long long, std::unique_ptr<ClanSizeLimit>> cache;
  const long long key = std::llround(gamma * 1e12);
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot.reset(new ClanSizeLimit(gamma));
  return *slot;
}

// ---------------------------------------------------------------------------
// YSimulator
// ---------------------------------------------------------------------------

YSimulator::YSimulator(ModelSpec model, double t, SimBudget budget,
                       SimTuning tuning)
    : model_(std::move(model)), t_(t), budget_(budget), tuning_(tuning) {
  if (!(t >= 0.0)) throw DomainError("simulation horizon must be >= 0");
  const auto& off = model_.offspring;
  closed_w_ = off.family() == OffspringFamily::PurePower ||
              (off.family() == OffspringFamily::LogPower && off.d() == 0.0);
  corrected_ = closed_w_;
  limit_ = &ClanSizeLimit::for_gamma(off.gamma());
  if (!closed_w_) {
    // Tabulate log W(y) on a log grid; relative error of the interpolant is
    // ~1e-5, entering only through the Binomial survival parameter.
    constexpr int kNodes = 4096;
    const double y_lo = 1e-8;
    const double y_hi = std::max(model_.mu * t_, 1e-6) * (1.0 + 1e-9);
    AnalyticContext ctx(model_);
    grid_ln_y0_ = std::log(y_lo);
    grid_dln_ = (std::log(y_hi) - grid_ln_y0_) / (kNodes - 1);
    grid_lw_.resize(kNodes);
    for (int j = 0; j < kNodes; ++j) {
      grid_lw_[j] = ctx.log_w_of_y(std::exp(grid_ln_y0_ + j * grid_dln_));
    }
  }
}

double YSimulator::log_w_mu_u(double age) const {
  const double y = model_.mu * age;
  if (y <= 0.0) return 0.0;
  const auto& off = model_.offspring;
  if (closed_w_) {
    return std::log1p(off.c() * off.gamma() * y) / off.gamma();
  }
  if (y < 1e-8) return std::log1p(off.slowly_varying(1.0) * y);  // W ~ 1 + L(1) y
  double pos = (std::log(y) - grid_ln_y0_) / grid_dln_;
  pos = std::clamp(pos, 0.0, static_cast<double>(grid_lw_.size() - 1));
  const auto j = std::min(static_cast<std::size_t>(pos), grid_lw_.size() - 2);
  const double frac = pos - static_cast<double>(j);
  return grid_lw_[j] + frac * (grid_lw_[j + 1] - grid_lw_[j]);
}

double YSimulator::survival_p(double age) const {
  return std::exp(-log_w_mu_u(age));
}

std::uint64_t YSimulator::integerize(double v, Rng& rng) const {
  if (!(v > 1.0)) return 1;
  if (v >= kTailCapD) return static_cast<std::uint64_t>(kTailCapD);
  const double fl = std::floor(v);
  auto k = static_cast<std::uint64_t>(fl);
  if (rng.uniform() < v - fl) ++k;
  return std::max<std::uint64_t>(k, 1);
}

std::uint64_t YSimulator::draw_conditioned_exact(double age, Rng& rng) const {
  bool trunc = false;
  for (std::uint64_t a = 0; a < tuning_.max_cond_retries; ++a) {
    const ClanResult r = simulate_clan(model_.offspring, model_.mu, age, budget_, rng);
    trunc |= r.truncated;
    if (r.size > 0) return r.size;
  }
  (void)trunc;
  return draw_conditioned_limit(age, rng);  // unreachable at sane parameters
}

std::uint64_t YSimulator::draw_conditioned_limit(double age, Rng& rng) const {
  const double lw = log_w_mu_u(age);
  const double w = std::exp(lw);
  const double corr = limit_->mean_norm();
  if (!corrected_) {
    return integerize(w * corr * limit_->sample_raw(rng), rng);
  }
  const double gamma = model_.offspring.gamma();
  const double om = -std::expm1(-gamma * lw);  // 1 - W^{-gamma}
  if (om <= 1e-12) return 1;                   // age ~ 0: survivor is a singleton
  // Exact conditional transform for constant L: the limit law scaled by
  // w_tilde = W (1-delta)^{1/gamma}, with excess head mass eps/(1+eps)
  // removed below the cut by thinning.
  const double w_tilde = std::exp(lw + std::log(om) / gamma);
  const double eps = std::expm1(-std::log(om) / gamma);
  const double cut = tuning_.corrected_head_cut;
  const double f0 = limit_->cdf_raw(cut / (w_tilde * corr));
  const double p_thin =
      f0 > 0.0 ? std::min(eps / ((1.0 + eps) * f0), 1.0) : 0.0;
  for (;;) {
    const double v = w_tilde * corr * limit_->sample_raw(rng);
    if (v <= cut && rng.uniform() < p_thin) continue;
    return integerize(v, rng);
  }
}

double YSimulator::aggregate_survivors(std::uint64_t survivors, double age,
                                       Rng& rng) const {
  const double m = static_cast<double>(survivors);
  const double gamma = model_.offspring.gamma();
  const double beta = 1.0 + gamma;
  const double lw = log_w_mu_u(age);
  const double w = std::exp(lw);
  double eff = m;
  if (corrected_) eff = m * -std::expm1(-gamma * lw);
  // Sum of i.i.d. conditioned sizes: mean m*W plus a spectrally positive
  // stable fluctuation of index beta (exact scaling limit of the sum).
  const double scale = w * std::pow(eff, 1.0 / beta);
  double total = m * w;
  if (scale > 0.0) total += scale * rng.stable_spectrally_positive(beta, 1.0 / gamma);
  total = std::clamp(total, m, kTailCapD);
  return total;
}

YSample YSimulator::replicate(std::uint64_t master_seed,
                              std::uint64_t index) const {
  Rng rng = Rng::for_replicate(master_seed, index);
  YSample out;
  const auto jumps = poisson_jumps(model_.intensity, t_, rng);
  unsigned __int128 total = 0;
  bool trunc = false;
  const unsigned __int128 cap = budget_.max_total_population;

  for (const double tau : jumps) {
    if (total >= cap) {
      trunc = true;
      break;
    }
    const std::uint64_t batch = model_.immigration.sample(rng);
    if (batch == 0) continue;
    const double age = t_ - tau;
    const double y = model_.mu * age;
    const double ib = static_cast<double>(batch);

    if (y <= tuning_.plain_event_age && ib * (1.0 + y) <= tuning_.plain_work_cap) {
      for (std::uint64_t i = 0; i < batch && total < cap; ++i) {
        const ClanResult r =
            simulate_clan(model_.offspring, model_.mu, age, budget_, rng);
        total += r.size;
        trunc |= r.truncated;
      }
      continue;
    }

    const double lw = log_w_mu_u(age);
    const double w = std::exp(lw);
    const std::uint64_t m = rng.binomial(batch, std::exp(-lw));
    if (m == 0) continue;
    if (m >= tuning_.batch_agg_threshold) {
      total += static_cast<std::uint64_t>(aggregate_survivors(m, age, rng));
    } else if (y <= tuning_.plain_event_age &&
               static_cast<double>(m) * (1.0 + y) * w <= tuning_.cond_work_cap) {
      for (std::uint64_t i = 0; i < m && total < cap; ++i) {
        total += draw_conditioned_exact(age, rng);
      }
    } else {
      for (std::uint64_t i = 0; i < m && total < cap; ++i) {
        total += draw_conditioned_limit(age, rng);
      }
    }
  }

  if (total >= cap) trunc = true;
  const unsigned __int128 u64cap = (unsigned __int128)1 << 63;
  out.value_u64 = static_cast<std::uint64_t>(total < u64cap ? total : u64cap);
  out.value = static_cast<double>(out.value_u64);
  out.truncated = trunc;
  return out;
}

std::vector<YSample> YSimulator::run(std::uint64_t master_seed, std::uint64_t n,
                                     int workers) const {
  std::vector<YSample> out(n);
  if (workers <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) out[i] = replicate(master_seed, i);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      out[i] = replicate(master_seed, i);
    }
  };
  std::vector<std::thread> pool;
  const int extra = std::min(workers - 1, 63);
  pool.reserve(extra);
  for (int i = 0; i < extra; ++i) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace mbpnpi
