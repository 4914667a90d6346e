#pragma once

// Deterministic file output: CSV with 17-significant-digit reals, LF line
// endings, '.' decimal separator, and atomic writes (temp file + rename).
// Every file carries the config digest and master seed, either as a leading
// `# config=<hex> seed=<n>` comment (CSV) or as top-level fields (JSON).

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "experiments.hpp"

namespace mbpnpi::io {

std::string format_real(double v);                  // 17 significant digits
std::string format_u128(unsigned __int128 v);       // decimal digits

void write_file_atomic(const std::string& path, const std::string& content);

std::string repro_header(const std::string& digest, std::uint64_t seed);

// samples.csv: `replicate,t,y,truncated` over one or more sample sets.
void write_samples_csv(const std::string& path, const std::string& digest,
                       const std::vector<SampleSet>& sets);

// run.json sidecar: model, seed, n, budget, truncation fraction.
void write_run_json(const std::string& path, const RunConfig& cfg,
                    const std::string& digest,
                    const std::vector<SampleSet>& sets);

// report.json: the full verification report.
void write_report_json(const std::string& path, const RunConfig& cfg,
                       const std::string& digest, const VerificationReport& rep);

// Per-statistic CSVs; rows grouped by t under `# t=<value>` comments.
// lt.csv: `lambda,empirical,theoretical,abs_err,se`
void write_lt_csv(const std::string& path, const std::string& digest,
                  std::uint64_t seed, const VerificationReport& rep);
// cdf.csv: `x,empirical,theoretical`
void write_cdf_csv(const std::string& path, const std::string& digest,
                   std::uint64_t seed, const VerificationReport& rep);
// survival.csv: `t,empirical,theoretical,se`
void write_survival_csv(const std::string& path, const std::string& digest,
                        std::uint64_t seed, const VerificationReport& rep);

}  // namespace mbpnpi::io
