#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "analytic.hpp"
#include "config.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "io.hpp"

using namespace mbpnpi;

namespace {

const char* kMinimalConfig = R"({
  "model": {
    "mu": 1.0,
    "offspring": {"family": "pure_power", "gamma": 0.5, "c": 0.5},
    "immigration": {"family": "scaled_sibuya", "alpha": 0.5, "c_imm": 1.0},
    "intensity": {"family": "constant", "rho": 1.0}
  },
  "experiment": {"tgrid": [10, 50], "n": 1000},
  "seed": 42
})";

std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config parses and classifies") {
  RunConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.model.mu == 1.0);
  CHECK(cfg.params.seed == 42);
  CHECK(cfg.params.n == 1000);
  CHECK(cfg.regime == "auto");
  CHECK(cfg.out_dir == "out");
  RegimeClass rc = AnalyticContext(cfg.model).classify();
  CHECK(rc.regime == Regime::II);
}

TEST_CASE("canonical serialization round-trips") {
  RunConfig cfg = parse_config(kMinimalConfig);
  const std::string canon = canonical_config(cfg);
  RunConfig cfg2 = parse_config(canon);
  CHECK(canonical_config(cfg2) == canon);
  CHECK(config_digest(cfg) == config_digest(cfg2));
}

TEST_CASE("config digest is stable under run-only fields") {
  RunConfig a = parse_config(kMinimalConfig);
  RunConfig b = a;
  b.params.seed = 777;
  b.out_dir = "elsewhere";
  b.params.workers = 8;
  CHECK(config_digest(a) == config_digest(b));

  RunConfig c = a;
  c.params.n = 2000;  // part of the experiment: must change the digest
  CHECK(config_digest(a) != config_digest(c));

  const std::string d = config_digest(a);
  CHECK(d.size() == 16);
  for (char ch : d) CHECK(std::string("0123456789abcdef").find(ch) != std::string::npos);
}

TEST_CASE("config validation errors name the violated invariant") {
  auto message_of = [](const std::string& text) -> std::string {
    try {
      (void)parse_config(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };

  const std::string bad_gamma =
      replace_once(kMinimalConfig, "\"gamma\": 0.5", "\"gamma\": 1.5");
  CHECK(message_of(bad_gamma).find("gamma must be in (0, 1]") != std::string::npos);

  const std::string bad_c =
      replace_once(kMinimalConfig, "\"c\": 0.5", "\"c\": 0.9");
  CHECK(message_of(bad_c).find("c must be in (0, 1/(1+gamma)]") !=
        std::string::npos);

  const std::string no_seed = replace_once(kMinimalConfig, "\"seed\": 42", "\"seed2\": 42");
  CHECK(message_of(no_seed).find("seed") != std::string::npos);

  std::string missing_seed = kMinimalConfig;
  missing_seed = replace_once(missing_seed, ",\n  \"seed\": 42", "");
  CHECK(message_of(missing_seed).find("seed required") != std::string::npos);

  const std::string unknown_key =
      replace_once(kMinimalConfig, "\"mu\": 1.0", "\"mu\": 1.0, \"nu\": 2.0");
  const std::string msg = message_of(unknown_key);
  CHECK(msg.find("unknown key") != std::string::npos);
  CHECK(msg.find("config.model.nu") != std::string::npos);

  CHECK(message_of("{ not json").find("not valid JSON") != std::string::npos);
}

TEST_CASE("real formatting: 17 significant digits, locale-free, round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, 1e300, 0.0,
                   -2.5, 4.4444444444444446}) {
    const std::string s = io::format_real(v);
    CHECK(s.find(',') == std::string::npos);
    double back = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(back == v);
  }
  CHECK(io::format_real(std::nan("")) == "nan");
  CHECK(io::format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("128-bit decimal formatting") {
  CHECK(io::format_u128(0) == "0");
  CHECK(io::format_u128(12345) == "12345");
  const unsigned __int128 big =
      (unsigned __int128)0xFFFFFFFFFFFFFFFFull * 1000000 + 999999;
  CHECK(io::format_u128(big) == "18446744073709551615999999");
}

TEST_CASE("atomic file writes land with the reproducibility header") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mbpnpi_io_test";
  fs::remove_all(dir);
  const fs::path file = dir / "nested" / "x.csv";
  io::write_file_atomic(file.string(),
                        io::repro_header("0123456789abcdef", 42) + "a,b\n");
  std::ifstream in(file);
  REQUIRE(in.good());
  std::string line1, line2;
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(line1 == "# config=0123456789abcdef seed=42");
  CHECK(line2 == "a,b");
  // No temp litter left behind.
  int entries = 0;
  for (const auto& e : fs::directory_iterator(file.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
  fs::remove_all(dir);
}

TEST_CASE("samples CSV layout") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mbpnpi_io_test2";
  fs::remove_all(dir);

  SampleSet ss;
  ss.t = 5.0;
  ss.n = 3;
  ss.master_seed = 99;
  ss.values = {0, 17, (unsigned __int128)1 << 70};
  ss.truncated = {false, false, true};
  const std::string path = (dir / "samples.csv").string();
  io::write_samples_csv(path, "deadbeefdeadbeef", {ss});

  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(all.find("# config=deadbeefdeadbeef seed=99") == 0);
  CHECK(all.find("replicate,t,y,truncated") != std::string::npos);
  CHECK(all.find("0,5,0,0") != std::string::npos);
  CHECK(all.find("1,5,17,0") != std::string::npos);
  CHECK(all.find("2,5,1180591620717411303424,1") != std::string::npos);
  fs::remove_all(dir);
}
