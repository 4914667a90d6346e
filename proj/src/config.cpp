#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "errors.hpp"

namespace mbpnpi {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw ConfigError(path + ": " + reason);
}

const json& member(const json& obj, const std::string& path,
                   const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required key missing");
  return *it;
}

void check_known(const json& obj, const std::string& path,
                 const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
  }
}

double get_real(const json& obj, const std::string& path, const std::string& key) {
  const json& v = member(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_real_or(const json& obj, const std::string& path,
                   const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_real(obj, path, key);
}

std::uint64_t get_uint(const json& obj, const std::string& path,
                       const std::string& key) {
  const json& v = member(obj, path, key);
  if (!v.is_number_unsigned()) fail(path + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_str(const json& obj, const std::string& path,
                    const std::string& key) {
  const json& v = member(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_grid(const json& obj, const std::string& path,
                             const std::string& key,
                             std::vector<double> fallback, double lo, double hi,
                             bool strictly_increasing) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string p = path + "." + key;
  if (!v.is_array() || v.empty()) fail(p, "expected a nonempty array of numbers");
  std::vector<double> out;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& e : v) {
    if (!e.is_number()) fail(p, "expected a nonempty array of numbers");
    const double x = e.get<double>();
    if (!(x > lo && x < hi)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "entries must be in (%g, %g)", lo, hi);
      fail(p, buf);
    }
    if (strictly_increasing && !(x > prev)) fail(p, "entries must be strictly increasing");
    prev = x;
    out.push_back(x);
  }
  return out;
}

OffspringLaw parse_offspring(const json& j, const std::string& path) {
  const std::string fam = get_str(j, path, "family");
  if (fam == "pure_power") {
    check_known(j, path, {"family", "gamma", "c"});
    const double gamma = get_real(j, path, "gamma");
    const double c = get_real(j, path, "c");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail(path + ".gamma", "gamma must be in (0, 1]");
    if (!(c > 0.0 && c <= 1.0 / (1.0 + gamma))) {
      fail(path + ".c", "c must be in (0, 1/(1+gamma)]");
    }
    return OffspringLaw::pure_power(gamma, c);
  }
  if (fam == "log_power") {
    check_known(j, path, {"family", "gamma", "c", "d"});
    const double gamma = get_real(j, path, "gamma");
    const double c = get_real(j, path, "c");
    const double d = get_real(j, path, "d");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail(path + ".gamma", "gamma must be in (0, 1]");
    if (!(c > 0.0)) fail(path + ".c", "c must be > 0");
    if (!(d >= 0.0)) fail(path + ".d", "d must be >= 0");
    return OffspringLaw::log_power(gamma, c, d);
  }
  fail(path + ".family", "expected \"pure_power\" or \"log_power\"");
}

ImmigrationLaw parse_immigration(const json& j, const std::string& path) {
  const std::string fam = get_str(j, path, "family");
  if (fam == "scaled_sibuya") {
    check_known(j, path, {"family", "alpha", "c_imm"});
    const double alpha = get_real(j, path, "alpha");
    const double c_imm = get_real(j, path, "c_imm");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(path + ".alpha", "alpha must be in (0, 1)");
    if (!(c_imm > 0.0 && c_imm <= 1.0)) fail(path + ".c_imm", "c_imm must be in (0, 1]");
    return ImmigrationLaw::scaled_sibuya(alpha, c_imm);
  }
  if (fam == "bernoulli") {
    check_known(j, path, {"family", "m"});
    const double m = get_real(j, path, "m");
    if (!(m > 0.0 && m <= 1.0)) fail(path + ".m", "m must be in (0, 1]");
    return ImmigrationLaw::bernoulli(m);
  }
  fail(path + ".family", "expected \"scaled_sibuya\" or \"bernoulli\"");
}

IntensityFn parse_intensity(const json& j, const std::string& path) {
  const std::string fam = get_str(j, path, "family");
  if (fam == "constant") {
    check_known(j, path, {"family", "rho"});
    const double rho = get_real(j, path, "rho");
    if (!(rho > 0.0)) fail(path + ".rho", "rho must be > 0");
    return IntensityFn::constant(rho);
  }
  if (fam == "exp_approach") {
    check_known(j, path, {"family", "rho", "a", "b"});
    const double rho = get_real(j, path, "rho");
    const double a = get_real(j, path, "a");
    const double b = get_real(j, path, "b");
    if (!(rho > 0.0)) fail(path + ".rho", "rho must be > 0");
    if (!(a >= -1.0)) fail(path + ".a", "a must be >= -1 (intensity must stay >= 0)");
    if (!(b > 0.0)) fail(path + ".b", "b must be > 0");
    return IntensityFn::exp_approach(rho, a, b);
  }
  if (fam == "rational_approach") {
    check_known(j, path, {"family", "rho"});
    const double rho = get_real(j, path, "rho");
    if (!(rho > 0.0)) fail(path + ".rho", "rho must be > 0");
    return IntensityFn::rational_approach(rho);
  }
  fail(path + ".family",
       "expected \"constant\", \"exp_approach\" or \"rational_approach\"");
}

json grid_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_known(root, "config", {"model", "experiment", "budget", "seed", "out_dir"});

  const json& jm = member(root, "config", "model");
  check_known(jm, "config.model", {"mu", "offspring", "immigration", "intensity"});
  const double mu = get_real(jm, "config.model", "mu");
  if (!(mu > 0.0)) fail("config.model.mu", "mu must be > 0");

  ModelSpec model{
      mu,
      parse_offspring(member(jm, "config.model", "offspring"),
                      "config.model.offspring"),
      parse_immigration(member(jm, "config.model", "immigration"),
                        "config.model.immigration"),
      parse_intensity(member(jm, "config.model", "intensity"),
                      "config.model.intensity"),
  };
  RunConfig cfg{std::move(model), "auto", {}, "out"};

  if (!root.contains("seed")) throw ConfigError("config.seed: seed required");
  cfg.params.seed = get_uint(root, "config", "seed");

  const json& je = member(root, "config", "experiment");
  check_known(je, "config.experiment",
              {"regime", "tgrid", "n", "lambda_grid", "s_grid", "sigma_grid",
               "iv_formula_t", "t_eps_level", "tolerances"});
  if (je.contains("regime")) {
    cfg.regime = get_str(je, "config.experiment", "regime");
    static const std::set<std::string> kRegimes = {"auto", "I", "II", "III", "IV"};
    if (!kRegimes.count(cfg.regime)) {
      fail("config.experiment.regime", "expected \"auto\", \"I\", \"II\", \"III\" or \"IV\"");
    }
  }
  cfg.params.tgrid = get_grid(je, "config.experiment", "tgrid", {}, 0.0,
                              std::numeric_limits<double>::infinity(), true);
  if (cfg.params.tgrid.empty()) fail("config.experiment.tgrid", "required key missing");
  cfg.params.n = get_uint(je, "config.experiment", "n");
  if (cfg.params.n == 0) fail("config.experiment.n", "n must be >= 1");
  cfg.params.lambda_grid =
      get_grid(je, "config.experiment", "lambda_grid", cfg.params.lambda_grid,
               0.0, std::numeric_limits<double>::infinity(), true);
  cfg.params.s_grid = get_grid(je, "config.experiment", "s_grid",
                               cfg.params.s_grid, 0.0, 1.0, true);
  cfg.params.sigma_grid = get_grid(je, "config.experiment", "sigma_grid",
                                   cfg.params.sigma_grid, 0.0, 1.0, true);
  cfg.params.iv_formula_t =
      get_real_or(je, "config.experiment", "iv_formula_t", cfg.params.iv_formula_t);
  if (!(cfg.params.iv_formula_t > 0)) fail("config.experiment.iv_formula_t", "must be > 0");
  cfg.params.t_eps_level =
      get_real_or(je, "config.experiment", "t_eps_level", cfg.params.t_eps_level);
  if (!(cfg.params.t_eps_level > 0 && cfg.params.t_eps_level < 1)) {
    fail("config.experiment.t_eps_level", "must be in (0, 1)");
  }
  if (je.contains("tolerances")) {
    const json& jt = je.at("tolerances");
    check_known(jt, "config.experiment.tolerances",
                {"lt", "ks", "survival", "cond_pgf", "iv_formula"});
    Tolerances& tol = cfg.params.tol;
    tol.lt = get_real_or(jt, "config.experiment.tolerances", "lt", tol.lt);
    tol.ks = get_real_or(jt, "config.experiment.tolerances", "ks", tol.ks);
    tol.survival =
        get_real_or(jt, "config.experiment.tolerances", "survival", tol.survival);
    tol.cond_pgf =
        get_real_or(jt, "config.experiment.tolerances", "cond_pgf", tol.cond_pgf);
    tol.iv_formula = get_real_or(jt, "config.experiment.tolerances", "iv_formula",
                                 tol.iv_formula);
    for (double v : {tol.lt, tol.ks, tol.survival, tol.cond_pgf, tol.iv_formula}) {
      if (!(v > 0)) fail("config.experiment.tolerances", "tolerances must be > 0");
    }
  }

  if (root.contains("budget")) {
    const json& jb = root.at("budget");
    check_known(jb, "config.budget",
                {"max_events_per_clan", "max_total_population"});
    if (jb.contains("max_events_per_clan")) {
      cfg.params.budget.max_events_per_clan =
          get_uint(jb, "config.budget", "max_events_per_clan");
    }
    if (jb.contains("max_total_population")) {
      cfg.params.budget.max_total_population =
          get_uint(jb, "config.budget", "max_total_population");
    }
    if (cfg.params.budget.max_events_per_clan == 0 ||
        cfg.params.budget.max_total_population == 0) {
      fail("config.budget", "limits must be positive");
    }
  }

  if (root.contains("out_dir")) cfg.out_dir = get_str(root, "config", "out_dir");
  return cfg;
}

namespace {

// Canonical JSON; with_run_fields=false drops seed/out_dir, leaving the
// experiment identity that the digest hashes (seed is reported separately in
// every output header, and the output path is not part of what was computed).
json canonical_tree(const RunConfig& cfg, bool with_run_fields) {
  json jm;
  jm["mu"] = cfg.model.mu;
  {
    json o;
    const auto& off = cfg.model.offspring;
    o["family"] =
        off.family() == OffspringFamily::PurePower ? "pure_power" : "log_power";
    o["gamma"] = off.gamma();
    o["c"] = off.c();
    if (off.family() == OffspringFamily::LogPower) o["d"] = off.d();
    jm["offspring"] = std::move(o);
  }
  {
    json i;
    const auto& imm = cfg.model.immigration;
    if (imm.family() == ImmigrationFamily::ScaledSibuya) {
      i["family"] = "scaled_sibuya";
      i["alpha"] = imm.alpha();
      i["c_imm"] = imm.c_imm();
    } else {
      i["family"] = "bernoulli";
      i["m"] = imm.c_imm();
    }
    jm["immigration"] = std::move(i);
  }
  {
    json r;
    const auto& in = cfg.model.intensity;
    switch (in.family()) {
      case IntensityFamily::Constant:
        r["family"] = "constant";
        r["rho"] = in.rho();
        break;
      case IntensityFamily::ExpApproach:
        r["family"] = "exp_approach";
        r["rho"] = in.rho();
        r["a"] = in.a();
        r["b"] = in.b();
        break;
      case IntensityFamily::RationalApproach:
        r["family"] = "rational_approach";
        r["rho"] = in.rho();
        break;
    }
    jm["intensity"] = std::move(r);
  }

  json je;
  je["regime"] = cfg.regime;
  je["tgrid"] = grid_json(cfg.params.tgrid);
  je["n"] = cfg.params.n;
  je["lambda_grid"] = grid_json(cfg.params.lambda_grid);
  je["s_grid"] = grid_json(cfg.params.s_grid);
  je["sigma_grid"] = grid_json(cfg.params.sigma_grid);
  je["iv_formula_t"] = cfg.params.iv_formula_t;
  je["t_eps_level"] = cfg.params.t_eps_level;
  {
    json jt;
    jt["lt"] = cfg.params.tol.lt;
    jt["ks"] = cfg.params.tol.ks;
    jt["survival"] = cfg.params.tol.survival;
    jt["cond_pgf"] = cfg.params.tol.cond_pgf;
    jt["iv_formula"] = cfg.params.tol.iv_formula;
    je["tolerances"] = std::move(jt);
  }

  json root;
  root["model"] = std::move(jm);
  root["experiment"] = std::move(je);
  {
    json jb;
    jb["max_events_per_clan"] = cfg.params.budget.max_events_per_clan;
    jb["max_total_population"] = cfg.params.budget.max_total_population;
    root["budget"] = std::move(jb);
  }
  if (with_run_fields) {
    root["seed"] = cfg.params.seed;
    root["out_dir"] = cfg.out_dir;
  }
  return root;
}

}  // namespace

std::string canonical_config(const RunConfig& cfg) {
  return canonical_tree(cfg, true).dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_digest(const RunConfig& cfg) {
  const std::uint64_t h = fnv1a64(canonical_tree(cfg, false).dump(2));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mbpnpi
