// Command-line front end. Talks to the library exclusively through the
// public C API in mbpnpi/mbpnpi.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mbpnpi/mbpnpi.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerifyFail = 2;

struct RunDeleter {
  void operator()(mbpnpi_run* r) const { mbpnpi_run_destroy(r); }
};
using RunPtr = std::unique_ptr<mbpnpi_run, RunDeleter>;

int fail(const char* context) {
  std::cerr << "error: " << context;
  const char* msg = mbpnpi_last_error();
  if (msg && *msg) std::cerr << ": " << msg;
  std::cerr << '\n';
  return kExitError;
}

const std::map<std::string, mbpnpi_fn>& fn_table() {
  static const std::map<std::string, mbpnpi_fn> table = {
      {"V", MBPNPI_FN_V},          {"W", MBPNPI_FN_W},
      {"Psi", MBPNPI_FN_PSI},      {"PsiInv", MBPNPI_FN_PSI_INV},
      {"q0", MBPNPI_FN_Q0},        {"Qcum", MBPNPI_FN_Q_CUM},
      {"I0", MBPNPI_FN_I0},        {"Phi0", MBPNPI_FN_PHI0},
      {"survival", MBPNPI_FN_SURVIVAL},
      {"Delta", MBPNPI_FN_DELTA},  {"H", MBPNPI_FN_H},
      {"B", MBPNPI_FN_B},          {"Binv", MBPNPI_FN_B_INV},
      {"A", MBPNPI_FN_A},          {"t_eps", MBPNPI_FN_T_EPS},
  };
  return table;
}

std::string fn_names_joined() {
  std::string out;
  for (const auto& [name, fn] : fn_table()) {
    (void)fn;
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for critical branching "
               "processes with heavy-tailed immigration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mbpnpi_version()));

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides config)");
    sub->add_option("--seed", seed, "Master seed (overrides config)");
    sub->add_option("--workers", workers, "Worker thread count (overrides config)")
        ->check(CLI::Range(1, 256));
  };

  CLI::App* cmd_analytic =
      app.add_subcommand("analytic", "Tabulate an analytic function over a grid");
  add_common(cmd_analytic);
  std::string fn_name;
  double grid_min = 0, grid_max = 0;
  int grid_points = 65;
  bool log_spacing = false, linear_spacing = false;
  cmd_analytic->add_option("--fn", fn_name, "Function: " + fn_names_joined())
      ->required();
  cmd_analytic->add_option("--min", grid_min, "Grid lower endpoint")->required();
  cmd_analytic->add_option("--max", grid_max, "Grid upper endpoint")->required();
  cmd_analytic->add_option("--points", grid_points, "Grid size")
      ->check(CLI::Range(2, 1000000));
  cmd_analytic->add_flag("--log", log_spacing, "Logarithmic grid spacing");
  cmd_analytic->add_flag("--linear", linear_spacing, "Linear grid spacing (default)");

  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "Monte Carlo replicates over the config tgrid");
  add_common(cmd_simulate);

  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "Run the regime-appropriate verification experiment");
  add_common(cmd_verify);

  CLI::App* cmd_classify =
      app.add_subcommand("classify", "Print the model's asymptotic regime");
  add_common(cmd_classify);
  bool classify_notes = false;
  cmd_classify->add_flag("--notes", classify_notes,
                         "Also print classification diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config file: " << config_path << '\n';
    return kExitError;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string config_text = buf.str();

  mbpnpi_run* raw = nullptr;
  if (mbpnpi_run_create(config_text.c_str(), &raw) != MBPNPI_OK)
    return fail("invalid config");
  RunPtr run(raw);

  if (cmd_analytic->count("--seed") || cmd_simulate->count("--seed") ||
      cmd_verify->count("--seed") || cmd_classify->count("--seed")) {
    if (mbpnpi_run_set_seed(run.get(), seed) != MBPNPI_OK)
      return fail("--seed");
  }
  if (workers > 0 && mbpnpi_run_set_workers(run.get(), workers) != MBPNPI_OK)
    return fail("--workers");
  if (!out_dir.empty() && mbpnpi_run_set_out_dir(run.get(), out_dir.c_str()) != MBPNPI_OK)
    return fail("--out");

  if (cmd_classify->parsed()) {
    char text[128];
    if (mbpnpi_classify_text(run.get(), text, sizeof text) != MBPNPI_OK)
      return fail("classify");
    std::cout << text << '\n';
    if (classify_notes) {
      const char* notes = nullptr;
      if (mbpnpi_classify_notes(run.get(), &notes) != MBPNPI_OK)
        return fail("classify notes");
      std::cout << notes << '\n';
    }
    return kExitOk;
  }

  if (cmd_analytic->parsed()) {
    if (log_spacing && linear_spacing) {
      std::cerr << "error: --log and --linear are mutually exclusive\n";
      return kExitError;
    }
    const auto it = fn_table().find(fn_name);
    if (it == fn_table().end()) {
      std::cerr << "error: unknown --fn '" << fn_name
                << "'; expected one of: " << fn_names_joined() << '\n';
      return kExitError;
    }
    if (mbpnpi_cmd_analytic(run.get(), it->second, grid_min, grid_max,
                            grid_points, log_spacing ? 1 : 0) != MBPNPI_OK)
      return fail("analytic");
    return kExitOk;
  }

  if (cmd_simulate->parsed()) {
    if (mbpnpi_cmd_simulate(run.get()) != MBPNPI_OK) return fail("simulate");
    return kExitOk;
  }

  if (cmd_verify->parsed()) {
    int all_pass = 0;
    if (mbpnpi_cmd_verify(run.get(), &all_pass) != MBPNPI_OK)
      return fail("verify");
    if (!all_pass) {
      std::cerr << "verification FAIL (see report.json)\n";
      return kExitVerifyFail;
    }
    std::cout << "verification PASS\n";
    return kExitOk;
  }

  std::cerr << "error: no subcommand\n";
  return kExitError;
}
