// Recomputes every frozen regression constant used by the test suite and
// prints them in a copy-paste friendly form. Run after intentional engine
// changes and update tests/frozen.hpp accordingly.

#include <cstdio>
#include <iostream>

#include "wit/wit.hpp"
#include "test_instances.hpp"

using namespace wit;

namespace {

void tiny_instance_facts() {
  auto [w, model] = generate(wit_test::tiny_params(1, 0.15));
  std::printf("tiny seed-1 (p=0.15): digest=0x%016llx violation_pairs=%zu\n",
              static_cast<unsigned long long>(instance_digest(w, model)),
              model.total_violation_pairs());

  auto [w0, m0] = generate(wit_test::tiny_params(1, 0.0));
  auto [best, cost] = brute_force_best(w0, m0, Constraints{2, 0.0});
  std::printf("tiny seed-1 (p=0): brute_force K=2 config=%s cost=%.17g\n",
              best.to_string().c_str(), cost);

  CostOracle oracle(w0, m0);
  SearchOptions opts;
  opts.algorithm = Algorithm::vanilla_greedy;
  opts.budget = Budget::unlimited();
  opts.constraints.cardinality_k = 2;
  auto result = greedy_search(w0, w0.candidate_indexes, oracle, opts);
  std::printf("tiny seed-1 (p=0): greedy K=2 config=%s eta=%.17g\n",
              result.config.to_string().c_str(), result.report.improvement_pct);

  std::vector<int> all;
  for (const Index& z : w0.candidate_indexes) all.push_back(z.id);
  CostOracle ceiling(w0, m0);
  const double eta_omega =
      compute_improvement(w0, Configuration(all), ceiling);
  std::printf("tiny seed-1 (p=0): eta(omega)=%.17g\n", eta_omega);

  const auto [mono, submod] = collect_validation_points(w, model);
  std::printf("tiny seed-1 (p=0.15): alg6 mono=%zu submod=%zu\n", mono.size(),
              submod.size());
}

void reference_budget_scan() {
  for (std::int64_t budget : {30, 40, 60, 80, 120}) {
    int wins = 0, positive_skips = 0;
    double eta_w1 = 0, eta_b1 = 0;
    std::int64_t skips1 = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto [w, model] = generate(wit_test::reference_params(seed));
      const RunRecord base =
          run_single(w, model, Algorithm::two_phase_greedy,
                     Variant::parse("off"), budget, 2, 0.9, 0.0, 1);
      const RunRecord wii =
          run_single(w, model, Algorithm::two_phase_greedy,
                     Variant::parse("wii"), budget, 2, 0.9, 0.0, 1);
      if (wii.report.improvement_pct >= base.report.improvement_pct) ++wins;
      if (wii.report.skipped_calls > 0) ++positive_skips;
      if (seed == 1) {
        eta_w1 = wii.report.improvement_pct;
        eta_b1 = base.report.improvement_pct;
        skips1 = wii.report.skipped_calls;
      }
    }
    std::printf(
        "reference B=%lld: wins=%d/10 positive_skips=%d/10 seed1{eta_wii=%.17g "
        "eta_base=%.17g skipped=%lld}\n",
        static_cast<long long>(budget), wins, positive_skips, eta_w1, eta_b1,
        static_cast<long long>(skips1));
  }
}

void unlimited_budget_scan() {
  int wins = 0;
  std::int64_t charged_w1 = 0, charged_b1 = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [w, model] = generate(wit_test::reference_params(seed));
    const RunRecord base = run_single(w, model, Algorithm::two_phase_greedy,
                                      Variant::parse("off"), -1, 2, 0.9, 0.0, 1);
    const RunRecord wii = run_single(w, model, Algorithm::two_phase_greedy,
                                     Variant::parse("wii"), -1, 2, 0.9, 0.0, 1);
    const bool fewer = wii.report.charged_calls < base.report.charged_calls;
    const bool close = std::abs(wii.report.improvement_pct -
                                base.report.improvement_pct) <= 2.0;
    if (fewer && close) ++wins;
    if (seed == 1) {
      charged_w1 = wii.report.charged_calls;
      charged_b1 = base.report.charged_calls;
    }
  }
  std::printf("reference B=inf: wins=%d/10 seed1{charged_wii=%lld charged_base=%lld}\n",
              wins, static_cast<long long>(charged_w1),
              static_cast<long long>(charged_b1));
}

void coverage_and_mcts_facts() {
  auto [w, model] = generate(wit_test::reference_params(1));
  const CoverageErrorSummary summary = coverage_error_distribution(w, model);
  std::printf("reference seed-1: coverage points=%zu mean_err=%.17g\n",
              summary.points.size(), summary.mean);

  const RunRecord mcts = run_single(w, model, Algorithm::mcts,
                                    Variant::parse("wii"), 60, 2, 0.9, 0.0, 1);
  std::printf("reference seed-1: mcts B=60 config=%s eta=%.17g charged=%lld\n",
              mcts.report.final_configuration.to_string().c_str(),
              mcts.report.improvement_pct,
              static_cast<long long>(mcts.report.charged_calls));

  const RunRecord cell = run_single(w, model, Algorithm::two_phase_greedy,
                                    Variant::parse("wii"), 60, 2, 0.9, 0.0, 1);
  std::printf(
      "reference seed-1: two_phase B=60 config=%s eta=%.17g charged=%lld "
      "skipped=%lld cached=%lld exhausted=%lld exempt=%lld\n",
      cell.report.final_configuration.to_string().c_str(),
      cell.report.improvement_pct,
      static_cast<long long>(cell.report.charged_calls),
      static_cast<long long>(cell.report.skipped_calls),
      static_cast<long long>(cell.report.cached_hits),
      static_cast<long long>(cell.report.exhausted_evals),
      static_cast<long long>(cell.report.exempt_setup_calls));
}

void sweep_digest_fact() {
  auto [w, model] = generate(wit_test::tiny_params(1, 0.1));
  ExperimentConfig config;
  config.generate_params = wit_test::tiny_params(1, 0.1);
  config.algorithms = {Algorithm::two_phase_greedy, Algorithm::mcts};
  config.variants = {Variant::parse("off"), Variant::parse("wii")};
  config.budgets = {10, 25};
  config.seeds = {1, 2};
  const auto rows = run_sweep(w, model, config);
  std::printf("tiny sweep: rows=%zu digest=0x%016llx\n", rows.size(),
              static_cast<unsigned long long>(wit_test::sweep_digest(rows)));

  const RunRecord base = run_single(generate(wit_test::reference_params(1)).first,
                                    generate(wit_test::reference_params(1)).second,
                                    Algorithm::two_phase_greedy,
                                    Variant::parse("off"), 60, 2, 0.9, 0.0, 1);
  std::printf("reference seed-1: two_phase B=60 baseline eta=%.17g\n",
              base.report.improvement_pct);
}

void violation_frequency_facts() {
  auto [w, model] = generate(wit_test::violation_params(1));
  const double density =
      static_cast<double>(model.total_violation_pairs()) /
      static_cast<double>(eligible_violation_pairs(w));
  const auto [mono, submod] = collect_validation_points(w, model);
  const ValidationStats stats = check_submodularity(submod);
  const double frequency = static_cast<double>(stats.violations) /
                           static_cast<double>(stats.total);
  std::printf(
      "violation instance: points=%lld density=%.17g frequency=%.17g diff=%.3g\n",
      static_cast<long long>(stats.total), density, frequency,
      std::abs(frequency - density));
}

}  // namespace

int main() {
  tiny_instance_facts();
  reference_budget_scan();
  unlimited_budget_scan();
  coverage_and_mcts_facts();
  sweep_digest_fact();
  violation_frequency_facts();
  return 0;
}
