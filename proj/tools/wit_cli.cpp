// Command-line driver for the index-tuning engine: workload generation,
// single tuning runs, experiment sweeps, and cost-model validation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wit/wit.hpp"

namespace {

wit::Algorithm parse_algorithm(const std::string& name) {
  if (name == "vanilla_greedy") return wit::Algorithm::vanilla_greedy;
  if (name == "two_phase_greedy") return wit::Algorithm::two_phase_greedy;
  if (name == "mcts") return wit::Algorithm::mcts;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::int64_t parse_budget(const std::string& text) {
  if (text == "inf" || text == "unlimited") return -1;
  const std::int64_t value = std::stoll(text);
  if (value < 0) throw std::invalid_argument("budget must be nonnegative or 'inf'");
  return value;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  nlohmann::json doc;
  in >> doc;
  return doc;
}

void print_report(const wit::RunRecord& rec) {
  const wit::TuningReport& r = rec.report;
  std::cout << "algorithm:        " << rec.algorithm << " (" << rec.variant
            << ")\n"
            << "final config:     " << r.final_configuration.to_string() << "\n"
            << "final cost:       " << r.final_cost << "\n"
            << "improvement:      " << r.improvement_pct << " %\n"
            << "charged calls:    " << r.charged_calls << "\n"
            << "exempt setup:     " << r.exempt_setup_calls << "\n"
            << "skipped calls:    " << r.skipped_calls << "\n"
            << "cached hits:      " << r.cached_hits << "\n"
            << "exhausted evals:  " << r.exhausted_evals << "\n"
            << "bound time:       " << r.bound_time_ms << " ms over "
            << r.bound_computations << " computations\n"
            << "mean what-if:     " << r.mean_what_if_time_ms << " ms\n"
            << "phase times:      " << r.phase1_ms << " ms / " << r.phase2_ms
            << " ms\n";
  if (!r.notes.empty()) std::cout << "notes:            " << r.notes << "\n";
}

int run_generate(const std::string& params_path, const std::string& out_path) {
  const wit::GeneratorParams params =
      wit::params_from_json(load_json(params_path));
  auto [workload, model] = wit::generate(params);
  wit::save_instance(out_path, workload, model);
  std::cout << "wrote " << out_path << " (" << workload.queries.size()
            << " queries, " << workload.candidate_indexes.size() << " indexes, "
            << model.total_violation_pairs() << " interaction pairs)\n";
  return 0;
}

int run_tune(const std::string& workload_path, const std::string& algo,
             const std::string& budget_text, int k, double alpha,
             const std::string& variant_text, double storage_mult,
             std::uint64_t seed, bool charge_setup,
             const std::string& eval_log_path) {
  auto [workload, model] = wit::load_instance(workload_path);
  const wit::Variant variant = wit::Variant::parse(variant_text);
  wit::SearchOptions opts = wit::options_for_cell(
      workload, parse_algorithm(algo), variant, parse_budget(budget_text), k,
      alpha, storage_mult, seed);
  opts.charge_setup = charge_setup;

  wit::CostOracle oracle(workload, model);
  const wit::SearchResult result =
      wit::tune(workload, workload.candidate_indexes, oracle, opts);

  wit::RunRecord rec;
  rec.algorithm = algo;
  rec.variant = variant.name();
  rec.report = result.report;
  print_report(rec);

  if (!eval_log_path.empty()) {
    wit::write_eval_log_csv(eval_log_path, result.eval_log);
    std::cout << "eval log:         " << eval_log_path << "\n";
  }
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir) {
  wit::ExperimentConfig config =
      wit::experiment_config_from_json(load_json(config_path));
  config.out_dir = out_dir;
  config.validate();

  wit::Workload workload;
  wit::CostModel model;
  if (config.generate_params) {
    std::tie(workload, model) = wit::generate(*config.generate_params);
  } else {
    std::tie(workload, model) = wit::load_instance(config.workload_file);
  }

  std::filesystem::create_directories(out_dir);
  const auto rows = wit::run_sweep(workload, model, config);
  const std::string csv_path =
      (std::filesystem::path(out_dir) / "runs.csv").string();
  wit::write_run_csv(csv_path, rows);

  std::size_t failures = 0;
  for (const auto& row : rows)
    if (!row.error.empty()) ++failures;
  std::cout << "wrote " << csv_path << " (" << rows.size() << " rows, "
            << failures << " failed cells)\n";
  return 0;
}

int run_validate(const std::string& workload_path, const std::string& out_dir) {
  auto [workload, model] = wit::load_instance(workload_path);
  wit::write_validation_csvs(out_dir, workload, model);

  const auto [mono, submod] = wit::collect_validation_points(workload, model);
  const wit::ValidationStats mono_stats = wit::check_monotonicity(mono);
  const wit::ValidationStats submod_stats = wit::check_submodularity(submod);
  std::cout << "monotonicity:   " << mono_stats.holds << "/" << mono_stats.total
            << " hold (" << mono_stats.pct_holds << " %)\n"
            << "submodularity:  " << submod_stats.holds << "/"
            << submod_stats.total << " hold (" << submod_stats.pct_holds
            << " %)\n";
  if (!submod_stats.deltas.empty())
    std::cout << "violation magnitude: mean " << submod_stats.delta_mean
              << ", median " << submod_stats.delta_median << ", p95 "
              << submod_stats.delta_p95 << "\n";
  std::cout << "wrote mono.csv, submod.csv, coverage_err.csv under " << out_dir
            << "\n";
  return 0;
}

}  // namespace

namespace {

int run_cli(int argc, char** argv) {
  CLI::App app{"budget-aware index tuning engine with what-if call interception"};
  app.require_subcommand(1);

  std::string params_path, out_path;
  auto* generate = app.add_subcommand("generate", "generate a synthetic instance");
  generate->add_option("--params", params_path, "generator parameter JSON file")
      ->required();
  generate->add_option("--out", out_path, "output instance file")->required();

  std::string workload_path, algo = "two_phase_greedy", budget_text = "500";
  std::string variant_text = "wii", eval_log_path;
  int k = 10;
  double alpha = 0.9, storage_mult = 0.0;
  std::uint64_t seed = 1;
  bool charge_setup = false;
  auto* tune = app.add_subcommand("tune", "run one tuning session");
  tune->add_option("--workload", workload_path, "instance file")->required();
  tune->add_option("--algo", algo,
                   "vanilla_greedy | two_phase_greedy | mcts");
  tune->add_option("--budget", budget_text, "what-if call budget or 'inf'");
  tune->add_option("--k", k, "maximum configuration size");
  tune->add_option("--alpha", alpha, "confidence threshold in [0,1]");
  tune->add_option("--variant", variant_text,
                   "off | wii | wii_coverage | random_skip(p) | mean_return");
  tune->add_option("--storage-mult", storage_mult,
                   "storage limit as a multiple of total table size");
  tune->add_option("--seed", seed, "session seed");
  tune->add_flag("--charge-setup", charge_setup,
                 "count setup calls against the budget");
  tune->add_option("--eval-log", eval_log_path,
                   "write the per-evaluation trace CSV here");

  std::string sweep_config_path, sweep_out_dir;
  auto* sweep = app.add_subcommand("sweep", "run an experiment matrix");
  sweep->add_option("--config", sweep_config_path, "experiment JSON file")
      ->required();
  sweep->add_option("--out-dir", sweep_out_dir, "output directory")->required();

  std::string validate_workload, validate_out_dir;
  auto* validate =
      app.add_subcommand("validate", "cost-model property validation");
  validate->add_option("--workload", validate_workload, "instance file")
      ->required();
  validate->add_option("--out-dir", validate_out_dir, "output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) return run_generate(params_path, out_path);
  if (tune->parsed())
    return run_tune(workload_path, algo, budget_text, k, alpha, variant_text,
                    storage_mult, seed, charge_setup, eval_log_path);
  if (sweep->parsed()) return run_sweep(sweep_config_path, sweep_out_dir);
  if (validate->parsed()) return run_validate(validate_workload, validate_out_dir);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
