#pragma once

#include "dsc/descent.hpp"
#include "dsc/init.hpp"
#include "dsc/types.hpp"

#include <string>
#include <vector>

namespace dsc {

/// Benchmark method: `ours` runs truncated initialization plus projected
/// descent; `plain` and `plain_ht` run the full-covariance variants followed
/// by unprojected descent.
enum class Method { Ours, Plain, PlainHT };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

struct ExperimentSpec {
  GenerativeConfig model;
  InitConfig init;            ///< p1/p2 of 0 resolve per sample size (see split rule)
  DescentConfig descent;
  std::vector<Method> methods = {Method::Ours};
  std::vector<Index> sample_sizes;
  Index trials = 20;
  std::uint64_t master_seed = 0;
  double success_threshold = 1e-4;
  std::string out_path = "results.csv";

  void validate() const;
};

/// Parses a spec from JSON text. Unknown keys anywhere are rejected.
ExperimentSpec spec_from_json_text(const std::string& text, const std::string& context);
ExperimentSpec load_spec(const std::string& path);

struct ResultRow {
  std::string method;
  Index p = 0;
  double recovery_rate = 0.0;
  double mean_fro_error = 0.0;  ///< over trials with a completed pipeline; inf when none
  double mean_wall_s = 0.0;
  Index trials = 0;
};

/// Outcome of one (method, p, trial) cell.
struct TrialRecord {
  Method method = Method::Ours;
  Index p = 0;
  Index trial = 0;
  bool recovered = false;
  double fro_error = 0.0;  ///< +inf when initialization or descent failed
  double wall_seconds = 0.0;
  bool incomplete = false;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<TrialRecord> records;
};

/// Default pair-pool/averaging split for a sample budget p.
std::pair<Index, Index> default_sample_split(Index p);

/// Runs one Monte Carlo cell with its own derived RNG streams, so any subset
/// of trials reproduces the exact per-trial outcomes of a combined run.
TrialRecord run_single_trial(const ExperimentSpec& spec, Method method, Index p, Index trial);

/// Full sweep over (method, p, trial) in deterministic order.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// Writes the CSV atomically (temp file + rename).
void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows);

}  // namespace dsc
