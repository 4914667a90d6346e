#include "mbpnpi/mbpnpi.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "simulate.hpp"

using namespace mbpnpi;

extern "C" {

struct mbpnpi_run {
  RunConfig cfg;
  std::unique_ptr<AnalyticContext> ctx{};          // lazily built, closed route
  std::unique_ptr<AnalyticContext> ctx_generic{};  // lazily built, forced generic
  std::optional<RegimeClass> classification{};
  std::string scratch{};  // backing storage for returned const char* strings
};

struct mbpnpi_samples {
  std::vector<SampleSet> sets;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

mbpnpi_status set_error(mbpnpi_status st, const char* what) {
  g_last_error = what ? what : "";
  return st;
}

template <typename F>
mbpnpi_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MBPNPI_OK;
  } catch (const ConfigError& e) {
    return set_error(MBPNPI_ERR_CONFIG, e.what());
  } catch (const DomainError& e) {
    return set_error(MBPNPI_ERR_DOMAIN, e.what());
  } catch (const RegimeError& e) {
    return set_error(MBPNPI_ERR_REGIME, e.what());
  } catch (const NumericError& e) {
    return set_error(MBPNPI_ERR_NUMERIC, e.what());
  } catch (const IoError& e) {
    return set_error(MBPNPI_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(MBPNPI_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(MBPNPI_ERR_INTERNAL, "unknown error");
  }
}

mbpnpi_status need(bool ok, const char* what) {
  return ok ? MBPNPI_OK : set_error(MBPNPI_ERR_ARGUMENT, what);
}

AnalyticContext& context(mbpnpi_run* run, bool force_generic) {
  auto& slot = force_generic ? run->ctx_generic : run->ctx;
  if (!slot) {
    slot = std::make_unique<AnalyticContext>(run->cfg.model, num::QuadControl{},
                                             num::RootControl{}, force_generic);
  }
  return *slot;
}

const RegimeClass& classification(mbpnpi_run* run) {
  if (!run->classification) run->classification = context(run, false).classify();
  return *run->classification;
}

double eval_fn(AnalyticContext& ctx, mbpnpi_fn fn, double arg) {
  switch (fn) {
    case MBPNPI_FN_V: return ctx.v_of_x(arg);
    case MBPNPI_FN_W: return ctx.w_of_y(arg);
    case MBPNPI_FN_PSI: return ctx.psi(arg);
    case MBPNPI_FN_PSI_INV: return ctx.psi_inv(arg);
    case MBPNPI_FN_Q0: return ctx.q0(arg);
    case MBPNPI_FN_Q_CUM: return ctx.q_cum(arg);
    case MBPNPI_FN_I0: return ctx.i_conv(arg, 0.0);
    case MBPNPI_FN_PHI0: return ctx.phi(arg, 0.0);
    case MBPNPI_FN_SURVIVAL: return ctx.survival_prob(arg);
    case MBPNPI_FN_DELTA: return ctx.delta_s(arg);
    case MBPNPI_FN_H: return ctx.h_pgf(arg);
    case MBPNPI_FN_B: return ctx.b_fn(arg);
    case MBPNPI_FN_B_INV: return ctx.b_inv(arg);
    case MBPNPI_FN_A: return ctx.a_fn(arg);
    case MBPNPI_FN_T_EPS: return ctx.t_eps(arg);
  }
  throw DomainError("unknown analytic function selector");
}

const char* fn_name(mbpnpi_fn fn) {
  switch (fn) {
    case MBPNPI_FN_V: return "V";
    case MBPNPI_FN_W: return "W";
    case MBPNPI_FN_PSI: return "Psi";
    case MBPNPI_FN_PSI_INV: return "PsiInv";
    case MBPNPI_FN_Q0: return "q0";
    case MBPNPI_FN_Q_CUM: return "Qcum";
    case MBPNPI_FN_I0: return "I0";
    case MBPNPI_FN_PHI0: return "Phi0";
    case MBPNPI_FN_SURVIVAL: return "survival";
    case MBPNPI_FN_DELTA: return "Delta";
    case MBPNPI_FN_H: return "H";
    case MBPNPI_FN_B: return "B";
    case MBPNPI_FN_B_INV: return "Binv";
    case MBPNPI_FN_A: return "A";
    case MBPNPI_FN_T_EPS: return "t_eps";
  }
  return "unknown";
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

VerificationReport dispatch_verify(const RunConfig& cfg) {
  const ModelSpec& m = cfg.model;
  if (cfg.regime == "I") return run_regime_i(m, cfg.params);
  if (cfg.regime == "II") return run_regime_ii(m, cfg.params);
  if (cfg.regime == "III") return run_regime_iii(m, cfg.params);
  if (cfg.regime == "IV") return run_regime_iv(m, cfg.params);
  return run_auto(m, cfg.params);
}

// The t_eps companion check for infinite-Q models (mirrors run_survival).
void append_t_eps(const RunConfig& cfg, VerificationReport& rep) {
  if (!std::isinf(rep.regime.q_total)) return;
  ExperimentParams p = cfg.params;
  p.tgrid.clear();
  VerificationReport extra = run_survival(cfg.model, p);
  for (auto& r : extra.rows) rep.rows.push_back(std::move(r));
  for (auto& v : extra.verdicts) rep.verdicts.push_back(std::move(v));
}

}  // namespace

extern "C" {

const char* mbpnpi_version(void) { return "0.1.0"; }

const char* mbpnpi_last_error(void) { return g_last_error.c_str(); }

mbpnpi_status mbpnpi_run_create(const char* config_json, mbpnpi_run** out) {
  if (auto st = need(config_json && out, "config_json and out must be non-null"))
    return st;
  *out = nullptr;
  return guarded([&] {
    auto run = std::unique_ptr<mbpnpi_run>(new mbpnpi_run{parse_config(config_json)});
    *out = run.release();
  });
}

void mbpnpi_run_destroy(mbpnpi_run* run) { delete run; }

mbpnpi_status mbpnpi_run_set_seed(mbpnpi_run* run, uint64_t seed) {
  if (auto st = need(run != nullptr, "run must be non-null")) return st;
  run->cfg.params.seed = seed;
  return MBPNPI_OK;
}

mbpnpi_status mbpnpi_run_set_workers(mbpnpi_run* run, int workers) {
  if (auto st = need(run != nullptr, "run must be non-null")) return st;
  if (auto st = need(workers >= 1 && workers <= 256, "workers must be in [1, 256]"))
    return st;
  run->cfg.params.workers = workers;
  return MBPNPI_OK;
}

mbpnpi_status mbpnpi_run_set_out_dir(mbpnpi_run* run, const char* dir) {
  if (auto st = need(run && dir, "run and dir must be non-null")) return st;
  run->cfg.out_dir = dir;
  return MBPNPI_OK;
}

mbpnpi_status mbpnpi_run_digest(const mbpnpi_run* run, char* buf, size_t bufsize) {
  if (auto st = need(run && buf, "run and buf must be non-null")) return st;
  if (auto st = need(bufsize >= 17, "buf must hold at least 17 bytes")) return st;
  return guarded([&] {
    const std::string d = config_digest(run->cfg);
    std::memcpy(buf, d.c_str(), d.size() + 1);
  });
}

mbpnpi_status mbpnpi_run_canonical_config(mbpnpi_run* run, const char** out) {
  if (auto st = need(run && out, "run and out must be non-null")) return st;
  return guarded([&] {
    run->scratch = canonical_config(run->cfg);
    *out = run->scratch.c_str();
  });
}

mbpnpi_status mbpnpi_classify(mbpnpi_run* run, mbpnpi_classification* out) {
  if (auto st = need(run && out, "run and out must be non-null")) return st;
  return guarded([&] {
    const RegimeClass& rc = classification(run);
    out->regime = static_cast<int>(rc.regime);
    out->c_const = rc.c_const;
    out->q_total = rc.q_total;
  });
}

mbpnpi_status mbpnpi_classify_notes(mbpnpi_run* run, const char** out) {
  if (auto st = need(run && out, "run and out must be non-null")) return st;
  return guarded([&] {
    run->scratch = classification(run).notes;
    *out = run->scratch.c_str();
  });
}

mbpnpi_status mbpnpi_classify_text(mbpnpi_run* run, char* buf, size_t bufsize) {
  if (auto st = need(run && buf && bufsize > 0, "run and buf must be non-null"))
    return st;
  return guarded([&] {
    const RegimeClass& rc = classification(run);
    std::string text = regime_name(rc.regime);
    char num[64];
    if (rc.regime == Regime::II && std::isfinite(rc.c_const)) {
      std::snprintf(num, sizeof num, ", C=%.4f", rc.c_const);
      text += num;
    } else if (rc.regime == Regime::III && std::isfinite(rc.q_total)) {
      std::snprintf(num, sizeof num, ", Q=%.4f", rc.q_total);
      text += num;
    }
    std::snprintf(buf, bufsize, "%s", text.c_str());
  });
}

mbpnpi_status mbpnpi_analytic_eval(mbpnpi_run* run, mbpnpi_fn fn, double arg,
                                   int force_generic, double* out) {
  if (auto st = need(run && out, "run and out must be non-null")) return st;
  return guarded([&] { *out = eval_fn(context(run, force_generic != 0), fn, arg); });
}

mbpnpi_status mbpnpi_simulate(mbpnpi_run* run, double t, uint64_t n,
                              mbpnpi_samples** out) {
  if (auto st = need(run && out, "run and out must be non-null")) return st;
  if (auto st = need(n >= 1, "n must be >= 1")) return st;
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<mbpnpi_samples>();
    s->sets.push_back(monte_carlo(run->cfg.model, t, n, run->cfg.params.seed,
                                  run->cfg.params.workers, run->cfg.params.budget,
                                  run->cfg.params.tuning));
    *out = s.release();
  });
}

void mbpnpi_samples_destroy(mbpnpi_samples* s) { delete s; }

mbpnpi_status mbpnpi_samples_count(const mbpnpi_samples* s, uint64_t* n) {
  if (auto st = need(s && n, "samples and n must be non-null")) return st;
  uint64_t total = 0;
  for (const auto& ss : s->sets) total += ss.values.size();
  *n = total;
  return MBPNPI_OK;
}

mbpnpi_status mbpnpi_samples_value(const mbpnpi_samples* s, uint64_t i,
                                   uint64_t* lo, uint64_t* hi, int* truncated) {
  if (auto st = need(s && lo && hi && truncated, "all out-pointers must be non-null"))
    return st;
  uint64_t offset = i;
  for (const auto& ss : s->sets) {
    if (offset < ss.values.size()) {
      const unsigned __int128 v = ss.values[offset];
      *lo = static_cast<uint64_t>(v);
      *hi = static_cast<uint64_t>(v >> 64);
      *truncated = ss.truncated[offset] ? 1 : 0;
      return MBPNPI_OK;
    }
    offset -= ss.values.size();
  }
  return set_error(MBPNPI_ERR_ARGUMENT, "sample index out of range");
}

mbpnpi_status mbpnpi_cmd_analytic(mbpnpi_run* run, mbpnpi_fn fn, double lo,
                                  double hi, int points, int log_spacing) {
  if (auto st = need(run != nullptr, "run must be non-null")) return st;
  if (auto st = need(points >= 2, "points must be >= 2")) return st;
  if (auto st = need(hi > lo, "grid requires hi > lo")) return st;
  if (auto st = need(!log_spacing || lo > 0, "log spacing requires lo > 0"))
    return st;
  return guarded([&] {
    AnalyticContext& closed = context(run, false);
    const bool has_closed = closed.closed_form();
    std::string out = io::repro_header(config_digest(run->cfg), run->cfg.params.seed);
    out += "argument,value,method\n";
    for (int j = 0; j < points; ++j) {
      const double f = static_cast<double>(j) / (points - 1);
      const double x = log_spacing
                           ? lo * std::exp(f * std::log(hi / lo))
                           : lo + f * (hi - lo);
      if (has_closed) {
        out += io::format_real(x) + ',' + io::format_real(eval_fn(closed, fn, x)) +
               ",closed\n";
      }
      out += io::format_real(x) + ',' +
             io::format_real(eval_fn(context(run, true), fn, x)) + ",quadrature\n";
    }
    const std::string path = join_path(
        run->cfg.out_dir, std::string("analytic_") + fn_name(fn) + ".csv");
    io::write_file_atomic(path, out);
  });
}

mbpnpi_status mbpnpi_cmd_simulate(mbpnpi_run* run) {
  if (auto st = need(run != nullptr, "run must be non-null")) return st;
  return guarded([&] {
    const RunConfig& cfg = run->cfg;
    std::vector<SampleSet> sets;
    for (const double t : cfg.params.tgrid) {
      sets.push_back(monte_carlo(cfg.model, t, cfg.params.n, cfg.params.seed,
                                 cfg.params.workers, cfg.params.budget,
                                 cfg.params.tuning));
    }
    const std::string digest = config_digest(cfg);
    io::write_samples_csv(join_path(cfg.out_dir, "samples.csv"), digest, sets);
    io::write_run_json(join_path(cfg.out_dir, "run.json"), cfg, digest, sets);
  });
}

mbpnpi_status mbpnpi_cmd_verify(mbpnpi_run* run, int* all_pass) {
  if (auto st = need(run && all_pass, "run and all_pass must be non-null")) return st;
  return guarded([&] {
    const RunConfig& cfg = run->cfg;
    VerificationReport rep = dispatch_verify(cfg);
    append_t_eps(cfg, rep);
    const std::string digest = config_digest(cfg);
    io::write_report_json(join_path(cfg.out_dir, "report.json"), cfg, digest, rep);
    io::write_lt_csv(join_path(cfg.out_dir, "lt.csv"), digest, rep.master_seed, rep);
    io::write_cdf_csv(join_path(cfg.out_dir, "cdf.csv"), digest, rep.master_seed, rep);
    io::write_survival_csv(join_path(cfg.out_dir, "survival.csv"), digest,
                           rep.master_seed, rep);
    *all_pass = rep.all_pass() ? 1 : 0;
  });
}

}  // extern "C"
