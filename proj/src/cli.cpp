#include "dsc/cli.hpp"

#include "dsc/eval.hpp"
#include "dsc/harness.hpp"
#include "dsc/matrix_io.hpp"
#include "dsc/model.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace dsc {

namespace {

struct CommonOpts {
  std::string config;
  std::string out = "dsc_out";
  std::optional<std::uint64_t> seed;
};

ExperimentSpec load_with_seed(const CommonOpts& opts) {
  ExperimentSpec spec = load_spec(opts.config);
  if (opts.seed) {
    spec.master_seed = *opts.seed;
    spec.model.seed = *opts.seed;
  }
  return spec;
}

void resolve_split(InitConfig& cfg, Index p) {
  if (cfg.p1 == 0 || cfg.p2 == 0) {
    const auto [p1, p2] = default_sample_split(p);
    cfg.p1 = p1;
    cfg.p2 = p2;
  }
}

int cmd_generate(const CommonOpts& opts, Index p, bool with_codes) {
  ExperimentSpec spec = load_with_seed(opts);
  const Dictionary dict = generate_dictionary(spec.model);
  RngStream rng = RngStream(spec.model.seed).derive(1);
  const SampleSet samples = draw_samples(dict, spec.model, p, rng);
  write_matrix(opts.out + ".dict.mat", dict.entries);
  write_matrix(opts.out + ".samples.mat", samples.observations);
  if (with_codes && samples.truth_codes) {
    Matrix codes(spec.model.m, p);
    for (Index t = 0; t < p; ++t) codes.col(t) = (*samples.truth_codes)[static_cast<std::size_t>(t)].values;
    write_matrix(opts.out + ".codes.mat", codes);
  }
  std::cout << "wrote " << opts.out << ".dict.mat and " << opts.out << ".samples.mat\n";
  return 0;
}

int cmd_init(const CommonOpts& opts, const std::string& samples_path) {
  ExperimentSpec spec = load_with_seed(opts);
  SampleSet samples;
  samples.observations = read_matrix(samples_path);
  samples.noise_sigma = spec.model.sigma_eps;
  InitConfig init_cfg = spec.init;
  resolve_split(init_cfg, samples.count());
  RngStream rng = RngStream(spec.master_seed).derive(2);
  const InitResult result = initialize(samples, spec.model, init_cfg, rng);
  write_matrix(opts.out + ".init.mat", result.a0.entries);
  write_file_atomic(opts.out + ".stats.txt", result.stats.to_kv());
  std::cout << "wrote " << opts.out << ".init.mat (trials=" << result.stats.trials << ")\n";
  return 0;
}

int cmd_learn(const CommonOpts& opts, Index p) {
  ExperimentSpec spec = load_with_seed(opts);
  if (p == 0) {
    if (spec.sample_sizes.empty())
      throw ConfigError("learn: pass --p or put sample_sizes in the config");
    p = spec.sample_sizes.back();
  }
  const Dictionary truth = generate_dictionary(spec.model);
  RngStream root(spec.master_seed);
  RngStream gen_rng = root.derive(0);
  RngStream init_rng = root.derive(1);
  const SampleSet samples = draw_samples(truth, spec.model, p, gen_rng);
  InitConfig init_cfg = spec.init;
  resolve_split(init_cfg, p);
  const InitResult init = initialize(samples, spec.model, init_cfg, init_rng);
  const SupportMask mask = spec.descent.projected ? mask_from_dictionary(init.a0)
                                                  : full_mask(spec.model.n, spec.model.m);
  const DescentResult learned = descend(init.a0, mask, fixed_batch(samples.observations),
                                        spec.model, spec.descent, &truth);
  write_matrix(opts.out + ".truth.mat", truth.entries);
  write_matrix(opts.out + ".init.mat", init.a0.entries);
  write_matrix(opts.out + ".learned.mat", learned.dictionary.entries);
  learned.trace.write_csv(opts.out + ".trace.csv");
  write_file_atomic(opts.out + ".stats.txt", init.stats.to_kv());
  const EvalReport rep = report(truth, learned.dictionary, spec.success_threshold);
  std::cout << rep.csv_header() << '\n' << rep.csv_row() << '\n';
  return 0;
}

int cmd_eval(const std::string& truth_path, const std::string& est_path, double threshold) {
  const Dictionary truth = dictionary_from_entries(read_matrix(truth_path));
  const Dictionary est = dictionary_from_entries(read_matrix(est_path));
  const EvalReport rep = report(truth, est, threshold);
  std::cout << rep.csv_header() << '\n' << rep.csv_row() << '\n';
  return 0;
}

int cmd_experiment(const CommonOpts& opts, const std::string& out_override) {
  ExperimentSpec spec = load_with_seed(opts);
  if (!out_override.empty()) spec.out_path = out_override;
  const ExperimentResult result = run_experiment(spec);
  write_rows_csv(spec.out_path, result.rows);
  std::cout << "wrote " << spec.out_path << " (" << result.rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"double-sparse dictionary learning"};
  app.require_subcommand(1);

  CommonOpts opts;
  Index p = 0;
  bool with_codes = false;
  std::string samples_path, truth_path, est_path, out_override;
  double threshold = 1e-4;

  auto* generate = app.add_subcommand("generate", "generate a dictionary and samples");
  generate->add_option("--config", opts.config, "model config (JSON)")->required();
  generate->add_option("--p", p, "number of samples")->required();
  generate->add_option("--out", opts.out, "output prefix");
  generate->add_option("--seed", opts.seed, "override the config seed");
  generate->add_flag("--with-codes", with_codes, "also write the true codes");

  auto* init_cmd = app.add_subcommand("init", "run one initialization on a sample file");
  init_cmd->add_option("--config", opts.config, "model+init config (JSON)")->required();
  init_cmd->add_option("--samples", samples_path, "sample matrix file")->required();
  init_cmd->add_option("--out", opts.out, "output prefix");
  init_cmd->add_option("--seed", opts.seed, "override the config seed");

  auto* learn = app.add_subcommand("learn", "generate data, initialize, and descend");
  learn->add_option("--config", opts.config, "full config (JSON)")->required();
  learn->add_option("--p", p, "number of samples (default: last sample_sizes entry)");
  learn->add_option("--out", opts.out, "output prefix");
  learn->add_option("--seed", opts.seed, "override the config seed");

  auto* eval_cmd = app.add_subcommand("eval", "compare two dictionary files");
  eval_cmd->add_option("truth", truth_path, "reference dictionary file")->required();
  eval_cmd->add_option("estimate", est_path, "estimated dictionary file")->required();
  eval_cmd->add_option("--threshold", threshold, "recovery threshold on the Frobenius error");

  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo sweep from a config");
  experiment->add_option("--config", opts.config, "experiment config (JSON)")->required();
  experiment->add_option("--out", out_override, "override the config out_path");
  experiment->add_option("--seed", opts.seed, "override master_seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {  // --help
      app.exit(err);
      return 0;
    }
    std::cerr << "usage error: " << err.what() << '\n';
    return 1;
  }

  try {
    if (generate->parsed()) return cmd_generate(opts, p, with_codes);
    if (init_cmd->parsed()) return cmd_init(opts, samples_path);
    if (learn->parsed()) return cmd_learn(opts, p);
    if (eval_cmd->parsed()) return cmd_eval(truth_path, est_path, threshold);
    if (experiment->parsed()) return cmd_experiment(opts, out_override);
    std::cerr << "usage error: no subcommand\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace dsc
