#include "dsc/harness.hpp"

#include "dsc/eval.hpp"
#include "dsc/matrix_io.hpp"
#include "dsc/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace dsc {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGenSalt = 0;
constexpr std::uint64_t kInitSalt = 1;
constexpr std::uint64_t kDescentSalt = 2;

std::uint64_t method_stream_id(Method method) {
  switch (method) {
    case Method::Ours: return 0;
    case Method::Plain: return 1;
    case Method::PlainHT: return 2;
  }
  throw ConfigError("unknown method");
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (allowed.find(it.key()) == allowed.end())
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
}

Structure structure_from_name(const std::string& name) {
  if (name == "block_diagonal") return Structure::BlockDiagonal;
  if (name == "random_sparse") return Structure::RandomSparse;
  if (name == "identity") return Structure::Identity;
  throw ConfigError("config: unknown structure \"" + name + "\"");
}

CoeffLaw coeff_law_from_name(const std::string& name) {
  if (name == "rademacher") return CoeffLaw::Rademacher;
  if (name == "uniform_signed") return CoeffLaw::UniformSigned;
  throw ConfigError("config: unknown coeff_law \"" + name + "\"");
}

InitMode init_mode_from_name(const std::string& name) {
  if (name == "truncated") return InitMode::Truncated;
  if (name == "plain_full") return InitMode::PlainFull;
  if (name == "full_with_ht") return InitMode::FullWithHT;
  throw ConfigError("config: unknown init mode \"" + name + "\"");
}

GenerativeConfig model_from_json(const json& obj) {
  require_keys(obj,
               {"n", "m", "k", "r", "sigma_eps", "coeff_min", "structure", "coeff_law", "seed",
                "tau_floor"},
               "model");
  GenerativeConfig cfg;
  cfg.n = obj.at("n").get<Index>();
  cfg.m = obj.at("m").get<Index>();
  cfg.k = obj.at("k").get<Index>();
  cfg.r = obj.value("r", Index{1});
  cfg.sigma_eps = obj.value("sigma_eps", 0.0);
  cfg.coeff_min = obj.value("coeff_min", 1.0);
  cfg.structure = structure_from_name(obj.value("structure", std::string("random_sparse")));
  cfg.coeff_law = coeff_law_from_name(obj.value("coeff_law", std::string("rademacher")));
  cfg.seed = obj.value("seed", std::uint64_t{0});
  cfg.tau_floor = obj.value("tau_floor", 0.5);
  return cfg;
}

InitConfig init_from_json(const json& obj) {
  require_keys(obj,
               {"p1", "p2", "score_floor_c", "ratio_c", "ratio_log_exponent", "sv1_floor_c",
                "sv2_cap_c", "dedup_dist", "max_trials", "mode", "clip_target_norm"},
               "init");
  InitConfig cfg;
  cfg.p1 = obj.value("p1", Index{0});
  cfg.p2 = obj.value("p2", Index{0});
  cfg.score_floor_c = obj.value("score_floor_c", cfg.score_floor_c);
  cfg.ratio_c = obj.value("ratio_c", cfg.ratio_c);
  cfg.ratio_log_exponent = obj.value("ratio_log_exponent", cfg.ratio_log_exponent);
  cfg.sv1_floor_c = obj.value("sv1_floor_c", cfg.sv1_floor_c);
  cfg.sv2_cap_c = obj.value("sv2_cap_c", cfg.sv2_cap_c);
  cfg.dedup_dist = obj.value("dedup_dist", 0.0);
  cfg.max_trials = obj.value("max_trials", Index{0});
  cfg.mode = init_mode_from_name(obj.value("mode", std::string("truncated")));
  cfg.clip_target_norm = obj.value("clip_target_norm", 0.0);
  return cfg;
}

DescentConfig descent_from_json(const json& obj) {
  require_keys(obj, {"steps", "eta_c", "code_threshold", "projected", "fresh_samples", "batch"},
               "descent");
  DescentConfig cfg;
  cfg.steps = obj.value("steps", cfg.steps);
  cfg.eta_c = obj.value("eta_c", cfg.eta_c);
  cfg.code_threshold = obj.value("code_threshold", 0.0);
  cfg.projected = obj.value("projected", true);
  cfg.fresh_samples = obj.value("fresh_samples", false);
  cfg.batch = obj.value("batch", Index{0});
  return cfg;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::Ours: return "ours";
    case Method::Plain: return "plain";
    case Method::PlainHT: return "plain_ht";
  }
  throw ConfigError("unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "ours") return Method::Ours;
  if (name == "plain") return Method::Plain;
  if (name == "plain_ht") return Method::PlainHT;
  throw ConfigError("config: unknown method \"" + name + "\"");
}

void ExperimentSpec::validate() const {
  model.validate();
  descent.validate();
  if (methods.empty()) throw ConfigError("experiment: methods must be nonempty");
  if (sample_sizes.empty()) throw ConfigError("experiment: sample_sizes must be nonempty");
  if (!std::is_sorted(sample_sizes.begin(), sample_sizes.end()) ||
      std::adjacent_find(sample_sizes.begin(), sample_sizes.end()) != sample_sizes.end())
    throw ConfigError("experiment: sample_sizes must be strictly ascending");
  for (Index p : sample_sizes)
    if (p < 3) throw ConfigError("experiment: each sample size must be >= 3");
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (!(success_threshold > 0.0)) throw ConfigError("experiment: success_threshold must be > 0");
  if (out_path.empty()) throw ConfigError("experiment: out_path must be nonempty");
}

ExperimentSpec spec_from_json_text(const std::string& text, const std::string& context) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError("config: JSON parse error in " + context + ": " + err.what());
  }
  require_keys(root,
               {"model", "init", "descent", "methods", "sample_sizes", "trials", "master_seed",
                "success_threshold", "out_path"},
               "top level");
  ExperimentSpec spec;
  if (!root.contains("model")) throw ConfigError("config: missing \"model\" section");
  spec.model = model_from_json(root.at("model"));
  if (root.contains("init")) spec.init = init_from_json(root.at("init"));
  if (root.contains("descent")) spec.descent = descent_from_json(root.at("descent"));
  if (root.contains("methods")) {
    spec.methods.clear();
    for (const auto& name : root.at("methods"))
      spec.methods.push_back(method_from_name(name.get<std::string>()));
  }
  if (root.contains("sample_sizes"))
    spec.sample_sizes = root.at("sample_sizes").get<std::vector<Index>>();
  spec.trials = root.value("trials", spec.trials);
  spec.master_seed = root.value("master_seed", std::uint64_t{0});
  spec.success_threshold = root.value("success_threshold", 1e-4);
  spec.out_path = root.value("out_path", std::string("results.csv"));
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream oss;
  oss << in.rdbuf();
  return spec_from_json_text(oss.str(), path);
}

std::pair<Index, Index> default_sample_split(Index p) {
  const Index p1 = std::max<Index>(2, std::min<Index>(1000, p / 2));
  return {p1, p - p1};
}

TrialRecord run_single_trial(const ExperimentSpec& spec, Method method, Index p, Index trial) {
  // One root stream per cell; sub-streams per pipeline phase. The derivation
  // depends only on (master_seed, method, p, trial), never on which other
  // cells run.
  RngStream cell = RngStream(spec.master_seed)
                       .derive(method_stream_id(method))
                       .derive(static_cast<std::uint64_t>(p))
                       .derive(static_cast<std::uint64_t>(trial));
  RngStream gen_rng = cell.derive(kGenSalt);
  RngStream init_rng = cell.derive(kInitSalt);
  RngStream descent_rng = cell.derive(kDescentSalt);

  GenerativeConfig model = spec.model;
  model.seed = gen_rng.next_u64();

  InitConfig init_cfg = spec.init;
  if (init_cfg.p1 == 0 || init_cfg.p2 == 0) {
    const auto [p1, p2] = default_sample_split(p);
    init_cfg.p1 = p1;
    init_cfg.p2 = p2;
  }
  if (init_cfg.p1 + init_cfg.p2 > p)
    throw ConfigError("experiment: p1 + p2 exceeds sample budget p=" + std::to_string(p));
  switch (method) {
    case Method::Ours: init_cfg.mode = InitMode::Truncated; break;
    case Method::Plain: init_cfg.mode = InitMode::PlainFull; break;
    case Method::PlainHT: init_cfg.mode = InitMode::FullWithHT; break;
  }

  DescentConfig descent_cfg = spec.descent;
  descent_cfg.projected = method == Method::Ours;

  TrialRecord record;
  record.method = method;
  record.p = p;
  record.trial = trial;

  const Dictionary truth = generate_dictionary(model);
  const SampleSet samples = draw_samples(truth, model, p, gen_rng);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    InitResult init = initialize(samples, model, init_cfg, init_rng);
    const SupportMask mask = method == Method::Ours ? mask_from_dictionary(init.a0)
                                                    : full_mask(model.n, model.m);
    BatchSource source;
    if (descent_cfg.fresh_samples) {
      const Index batch_size = descent_cfg.batch > 0 ? descent_cfg.batch : p;
      GenerativeConfig batch_model = model;
      source = [batch_model, batch_size, rng = descent_rng](Index step) mutable {
        RngStream step_rng = rng.derive(static_cast<std::uint64_t>(step));
        Dictionary dict = generate_dictionary(batch_model);
        return draw_samples(dict, batch_model, batch_size, step_rng).observations;
      };
    } else {
      source = fixed_batch(samples.observations);
    }
    const DescentResult descent = descend(init.a0, mask, source, model, descent_cfg);
    const EvalReport rep = report(truth, descent.dictionary, spec.success_threshold);
    record.recovered = rep.recovered;
    record.fro_error = rep.fro_error;
  } catch (const IncompleteInit&) {
    record.incomplete = true;
    record.fro_error = std::numeric_limits<double>::infinity();
  } catch (const NoConvergence&) {
    record.incomplete = true;
    record.fro_error = std::numeric_limits<double>::infinity();
  } catch (const NonFinite&) {
    record.fro_error = std::numeric_limits<double>::infinity();
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return record;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  for (Method method : spec.methods) {
    for (Index p : spec.sample_sizes) {
      Index recovered = 0;
      double fro_sum = 0.0;
      Index fro_count = 0;
      double wall_sum = 0.0;
      for (Index trial = 0; trial < spec.trials; ++trial) {
        TrialRecord record = run_single_trial(spec, method, p, trial);
        if (record.recovered) ++recovered;
        if (std::isfinite(record.fro_error)) {
          fro_sum += record.fro_error;
          ++fro_count;
        }
        wall_sum += record.wall_seconds;
        result.records.push_back(record);
      }
      ResultRow row;
      row.method = method_name(method);
      row.p = p;
      row.trials = spec.trials;
      row.recovery_rate = static_cast<double>(recovered) / static_cast<double>(spec.trials);
      row.mean_fro_error = fro_count > 0 ? fro_sum / static_cast<double>(fro_count)
                                         : std::numeric_limits<double>::infinity();
      row.mean_wall_s = wall_sum / static_cast<double>(spec.trials);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream oss;
  oss << "method,p,recovery_rate,mean_fro_error,mean_wall_s,trials\n";
  char buf[200];
  for (const ResultRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%lld,%.17g,%.17g,%.6f,%lld\n", row.method.c_str(),
                  static_cast<long long>(row.p), row.recovery_rate, row.mean_fro_error,
                  row.mean_wall_s, static_cast<long long>(row.trials));
    oss << buf;
  }
  return oss.str();
}

void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  write_file_atomic(path, rows_to_csv(rows));
}

}  // namespace dsc
