#include "io.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "errors.hpp"

namespace mbpnpi::io {

namespace {

using json = nlohmann::ordered_json;

// JSON has no inf/nan literals; represent them explicitly instead of
// nlohmann's silent null.
json real_or_tag(double v) {
  if (std::isnan(v)) return json("nan");
  if (std::isinf(v)) return json(v > 0 ? "infinity" : "-infinity");
  return json(v);
}

json rows_json(const std::vector<StatRow>& rows) {
  json arr = json::array();
  for (const StatRow& r : rows) {
    json j;
    j["statistic"] = r.statistic;
    j["t"] = real_or_tag(r.t);
    j["arg"] = real_or_tag(r.arg);
    j["empirical"] = real_or_tag(r.empirical);
    j["theoretical"] = real_or_tag(r.theoretical);
    j["abs_err"] = real_or_tag(r.abs_err);
    j["se"] = real_or_tag(r.se);
    j["trunc_fraction"] = real_or_tag(r.trunc_fraction);
    j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr;
}

json model_json(const ModelSpec& m) {
  // Reuse the canonical config encoding of the model block.
  RunConfig shell{m, "auto", {}, "out"};
  return json::parse(canonical_config(shell)).at("model");
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_u128(unsigned __int128 v) {
  if (v == 0) return "0";
  char buf[48];
  int pos = 48;
  while (v > 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return std::string(buf + pos, 48 - pos);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string());
  }
  const std::string tmp =
      path + ".tmp" + std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

std::string repro_header(const std::string& digest, std::uint64_t seed) {
  return "# config=" + digest + " seed=" + std::to_string(seed) + "\n";
}

void write_samples_csv(const std::string& path, const std::string& digest,
                       const std::vector<SampleSet>& sets) {
  std::string out;
  if (!sets.empty()) out += repro_header(digest, sets.front().master_seed);
  out += "replicate,t,y,truncated\n";
  for (const SampleSet& ss : sets) {
    const std::string t = format_real(ss.t);
    for (std::size_t i = 0; i < ss.values.size(); ++i) {
      out += std::to_string(i);
      out += ',';
      out += t;
      out += ',';
      out += format_u128(ss.values[i]);
      out += ',';
      out += ss.truncated[i] ? '1' : '0';
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

void write_run_json(const std::string& path, const RunConfig& cfg,
                    const std::string& digest,
                    const std::vector<SampleSet>& sets) {
  json j;
  j["config_digest"] = digest;
  j["seed"] = cfg.params.seed;
  j["n"] = cfg.params.n;
  j["model"] = model_json(cfg.model);
  {
    json b;
    b["max_events_per_clan"] = cfg.params.budget.max_events_per_clan;
    b["max_total_population"] = cfg.params.budget.max_total_population;
    j["budget"] = std::move(b);
  }
  json tg = json::array(), tf = json::array();
  double total = 0, count = 0;
  for (const SampleSet& ss : sets) {
    tg.push_back(ss.t);
    tf.push_back(ss.trunc_fraction());
    total += ss.trunc_fraction() * static_cast<double>(ss.values.size());
    count += static_cast<double>(ss.values.size());
  }
  j["tgrid"] = std::move(tg);
  j["truncation_fraction_per_t"] = std::move(tf);
  j["truncation_fraction"] = count > 0 ? total / count : 0.0;
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_report_json(const std::string& path, const RunConfig& cfg,
                       const std::string& digest, const VerificationReport& rep) {
  json j;
  j["config_digest"] = digest;
  j["seed"] = rep.master_seed;
  j["model"] = model_json(cfg.model);
  {
    json r;
    r["regime"] = regime_name(rep.regime.regime);
    r["c_const"] = real_or_tag(rep.regime.c_const);
    r["q_total"] = real_or_tag(rep.regime.q_total);
    r["notes"] = rep.regime.notes;
    j["classification"] = std::move(r);
  }
  j["rows"] = rows_json(rep.rows);
  {
    json arr = json::array();
    for (const Verdict& v : rep.verdicts) {
      json e;
      e["criterion"] = v.criterion;
      e["pass"] = v.pass;
      e["value"] = real_or_tag(v.value);
      e["gate"] = real_or_tag(v.gate);
      e["detail"] = v.detail;
      arr.push_back(std::move(e));
    }
    j["verdicts"] = std::move(arr);
  }
  j["all_pass"] = rep.all_pass();
  write_file_atomic(path, j.dump(2) + "\n");
}

namespace {

// Shared CSV writer: one statistic family, fixed columns, rows grouped by t.
void write_stat_csv(const std::string& path, const std::string& digest,
                    std::uint64_t seed, const VerificationReport& rep,
                    const std::vector<std::string>& stats,
                    const std::string& columns, bool lead_with_t,
                    bool arg_col, bool se_col) {
  std::string out = repro_header(digest, seed);
  out += columns + "\n";
  double cur_t = -1;
  bool first = true;
  for (const StatRow& r : rep.rows) {
    bool match = false;
    for (const auto& s : stats) match |= r.statistic == s;
    if (!match) continue;
    if (!lead_with_t && (first || r.t != cur_t)) {
      out += "# t=" + format_real(r.t) + "\n";
      cur_t = r.t;
      first = false;
    }
    std::string line;
    if (lead_with_t) {
      line += format_real(r.t);
    } else if (arg_col) {
      line += format_real(r.arg);
    }
    line += ',' + format_real(r.empirical);
    line += ',' + format_real(r.theoretical);
    if (!lead_with_t && se_col) line += ',' + format_real(r.abs_err);
    if (se_col) line += ',' + format_real(r.se);
    out += line + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace

void write_lt_csv(const std::string& path, const std::string& digest,
                  std::uint64_t seed, const VerificationReport& rep) {
  write_stat_csv(path, digest, seed, rep, {"lt"},
                 "lambda,empirical,theoretical,abs_err,se", false, true, true);
}

void write_cdf_csv(const std::string& path, const std::string& digest,
                   std::uint64_t seed, const VerificationReport& rep) {
  write_stat_csv(path, digest, seed, rep, {"cdf"}, "x,empirical,theoretical",
                 false, true, false);
}

void write_survival_csv(const std::string& path, const std::string& digest,
                        std::uint64_t seed, const VerificationReport& rep) {
  write_stat_csv(path, digest, seed, rep,
                 {"survival", "survival_limit", "survival_t_eps"},
                 "t,empirical,theoretical,se", true, false, true);
}

}  // namespace mbpnpi::io
