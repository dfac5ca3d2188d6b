#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wit/costing.hpp"
#include "wit/coverage.hpp"
#include "wit/model.hpp"
#include "wit/oracle.hpp"
#include "wit/rng.hpp"

namespace wit {

enum class Algorithm { vanilla_greedy, two_phase_greedy, mcts };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::vanilla_greedy: return "vanilla_greedy";
    case Algorithm::two_phase_greedy: return "two_phase_greedy";
    case Algorithm::mcts: return "mcts";
  }
  return "?";
}

struct SearchOptions {
  Algorithm algorithm = Algorithm::two_phase_greedy;
  Budget budget = Budget::unlimited();
  double alpha_threshold = 0.9;
  bool wii_enabled = true;
  bool coverage_enabled = false;
  SkipPolicy skip_policy = SkipPolicy::confidence;
  double random_skip_probability = 0.9;
  ReturnOnSkip return_on_skip = ReturnOnSkip::upper;
  // Opt-in: anchor the lower bound at every cached subset instead of the
  // single subset provided by the search algorithm.
  bool use_generalized_bound = false;
  double epsilon = 0.2;  // MCTS exploration rate
  std::uint64_t seed = 1;
  Constraints constraints;
  bool charge_setup = false;

  void validate() const {
    if (alpha_threshold < 0.0 || alpha_threshold > 1.0)
      throw std::invalid_argument("alpha threshold outside [0,1]");
    if (epsilon < 0.0 || epsilon > 1.0)
      throw std::invalid_argument("epsilon outside [0,1]");
    if (random_skip_probability < 0.0 || random_skip_probability > 1.0)
      throw std::invalid_argument("skip probability outside [0,1]");
    if (coverage_enabled && !wii_enabled)
      throw std::invalid_argument("coverage refinement requires interception");
    if (constraints.cardinality_k < 0)
      throw std::invalid_argument("cardinality constraint must be nonnegative");
  }
};

struct TuningReport {
  Configuration final_configuration;
  double final_cost = 0.0;
  double improvement_pct = 0.0;
  std::int64_t charged_calls = 0;
  std::int64_t exempt_setup_calls = 0;
  std::int64_t skipped_calls = 0;
  std::int64_t cached_hits = 0;
  std::int64_t exhausted_evals = 0;
  std::int64_t issued_evals = 0;
  std::int64_t missing_bound_events = 0;
  // per-phase split for two-stage algorithms (phase 2 is the remainder)
  std::int64_t phase1_charged_calls = 0;
  std::int64_t phase1_skipped_calls = 0;
  std::int64_t phase1_cached_hits = 0;
  std::int64_t phase1_exhausted_evals = 0;
  double phase1_ms = 0.0;
  double phase2_ms = 0.0;
  double bound_time_ms = 0.0;
  std::int64_t bound_computations = 0;
  double mean_what_if_time_ms = 0.0;
  std::string notes;

  double mean_bound_time_ms() const {
    return bound_computations == 0 ? 0.0
                                   : bound_time_ms / static_cast<double>(bound_computations);
  }
};

/// Workload percentage improvement of configuration C over the existing
/// (empty) configuration, measured with exempt oracle calls.
inline double compute_improvement(const Workload& w, const Configuration& config,
                                  CostOracle& oracle) {
  double base = 0.0;
  double with_config = 0.0;
  for (const Query& q : w.queries) {
    base += oracle.what_if(q, Configuration::empty(), false);
    with_config += oracle.what_if(q, config, false);
  }
  return (1.0 - with_config / base) * 100.0;
}

/// One tuning run: owns the cache, the MCI bounds, the budget, and the eval
/// log. Single-threaded; concurrent sweeps use one session each.
class TuningSession {
 public:
  TuningSession(const Workload& w, CostOracle& oracle, const SearchOptions& opts)
      : workload_(&w),
        oracle_(&oracle),
        opts_(opts),
        budget_(opts.budget),
        rng_(opts.seed, "tuning-session"),
        charged_at_start_(oracle.meter().charged_calls()) {
    opts_.validate();
    for (const Query& q : w.queries) {
      candidates_.emplace_back();
      for (const Index& z : candidate_indexes_for_query(q, w.candidate_indexes))
        candidates_.back().push_back(z.id);
    }
  }

  /// Fetches c(q, empty) and c(q, omega_q) for every query and initializes
  /// the MCI bounds. Setup calls are exempt unless charge_setup is on.
  void setup() {
    const bool charge = opts_.charge_setup;
    for (const Query& q : workload_->queries) {
      if (charge && budget_.exhausted())
        throw std::invalid_argument("budget too small to charge setup calls");
      cache_.put(q.id, Configuration::empty(),
                 oracle_->what_if(q, Configuration::empty(), charge));
      if (charge)
        budget_.consume();
      else
        ++exempt_setup_calls_;
    }
    // One call per query against the full candidate set; its witness set
    // omega_q carries the same cost and powers bounds and coverage.
    std::vector<int> all_ids;
    for (const Index& z : workload_->candidate_indexes) all_ids.push_back(z.id);
    const Configuration full(all_ids);
    for (const Query& q : workload_->queries) {
      if (charge && budget_.exhausted()) break;  // naive bounds still work
      const Configuration omega_q = oracle_->optimal_plan_indexes(q);
      const double cost = oracle_->what_if(q, full, charge);
      cache_.put(q.id, full, cost);
      cache_.set_omega(q.id, omega_q, cost);
      if (charge)
        budget_.consume();
      else
        ++exempt_setup_calls_;
    }

    if (!opts_.wii_enabled) return;
    init_mci_bounds(*workload_, workload_->candidate_indexes, cache_, bounds_);
    if (opts_.coverage_enabled) apply_coverage_overlay();
  }

  EvalOutcome eval_cost(const Query& q, const Configuration& config,
                        const Configuration& anchor) {
    ++steps_;
    EvalOutcome out;

    if (auto cached = cache_.get(q.id, config)) {
      if (opts_.wii_enabled)
        update_mci_bounds(q.id, config, update_anchor(q.id, config, anchor),
                          cache_, bounds_);
      ++cached_hits_;
      out = {*cached, budget_, EvalKind::cached, {}, {}, {}};
      log(q.id, config, out);
      return out;
    }

    if (budget_.exhausted()) {
      ++exhausted_evals_;
      out = {derived_cost(q.id, config, cache_), budget_,
             EvalKind::budget_exhausted, {}, {}, {}};
      log(q.id, config, out);
      return out;
    }

    std::optional<double> lower, upper, alpha;
    if (opts_.wii_enabled) {
      const auto t0 = std::chrono::steady_clock::now();
      upper = derived_cost(q.id, config, cache_);
      double lb;
      if (opts_.use_generalized_bound || !cache_.contains(q.id, anchor))
        lb = generalized_lower_bound(q.id, config, bounds_, cache_,
                                     &missing_bound_events_);
      else
        lb = lower_bound(q.id, config, anchor, bounds_, cache_,
                         &missing_bound_events_);
      lower = std::min(lb, *upper);  // interaction effects can push L past U
      alpha = confidence(*lower, *upper);
      bound_time_ += std::chrono::steady_clock::now() - t0;
      ++bound_computations_;

      bool skip = false;
      switch (opts_.skip_policy) {
        case SkipPolicy::confidence: skip = *alpha >= opts_.alpha_threshold; break;
        case SkipPolicy::random: skip = rng_.bernoulli(opts_.random_skip_probability); break;
        case SkipPolicy::never: skip = false; break;
      }
      if (skip) {
        ++skipped_calls_;
        const double value = opts_.return_on_skip == ReturnOnSkip::mean
                                 ? (*lower + *upper) / 2.0
                                 : *upper;
        out = {value, budget_, EvalKind::skipped, alpha, lower, upper};
        log(q.id, config, out);
        return out;
      }
    }

    const double cost = oracle_->what_if(q, config, true);
    budget_.consume();
    cache_.put(q.id, config, cost);
    if (opts_.wii_enabled)
      update_mci_bounds(q.id, config, update_anchor(q.id, config, anchor),
                        cache_, bounds_);
    ++issued_evals_;
    out = {cost, budget_, EvalKind::what_if_issued, alpha, lower, upper};
    log(q.id, config, out);
    return out;
  }

  /// One pass of budget-aware greedy search over the given queries and index
  /// pool. Extends the incumbent while some index strictly improves the total
  /// cost; ties break toward the smallest index id.
  Configuration greedy(const std::vector<int>& query_ids,
                       std::vector<int> index_pool, int max_size) {
    std::sort(index_pool.begin(), index_pool.end());
    Configuration incumbent;
    double incumbent_cost = 0.0;
    for (int qid : query_ids) incumbent_cost += cache_.empty_cost(qid);

    while (!index_pool.empty() &&
           static_cast<int>(incumbent.size()) < max_size) {
      int best_z = -1;
      double best_cost = incumbent_cost;
      for (int z : index_pool) {
        const Configuration extended = incumbent.with_index(z);
        if (opts_.constraints.has_storage_limit() &&
            storage_of(extended, *workload_) > opts_.constraints.storage_limit_mb)
          continue;
        double total = 0.0;
        for (int qid : query_ids)
          total += eval_cost(workload_->query(qid), extended, incumbent).cost;
        if (total < best_cost) {
          best_cost = total;
          best_z = z;
        }
      }
      if (best_z < 0) break;
      incumbent = incumbent.with_index(best_z);
      incumbent_cost = best_cost;
      index_pool.erase(std::find(index_pool.begin(), index_pool.end(), best_z));
    }
    return incumbent;
  }

  const std::vector<int>& candidates_of(int query_id) const {
    return candidates_[static_cast<std::size_t>(query_id)];
  }

  const Workload& workload() const { return *workload_; }
  CostOracle& oracle() { return *oracle_; }
  const SearchOptions& options() const { return opts_; }
  Budget budget() const { return budget_; }
  const WhatIfCache& cache() const { return cache_; }
  const MciBounds& bounds() const { return bounds_; }
  const std::vector<EvalRow>& eval_log() const { return eval_log_; }
  RngStream& rng() { return rng_; }

  TuningReport report_counters() const {
    TuningReport r;
    r.charged_calls = oracle_->meter().charged_calls() - charged_at_start_;
    r.exempt_setup_calls = exempt_setup_calls_;
    r.skipped_calls = skipped_calls_;
    r.cached_hits = cached_hits_;
    r.exhausted_evals = exhausted_evals_;
    r.issued_evals = issued_evals_;
    r.missing_bound_events = missing_bound_events_;
    r.bound_time_ms =
        std::chrono::duration<double, std::milli>(bound_time_).count();
    r.bound_computations = bound_computations_;
    r.mean_what_if_time_ms = oracle_->meter().mean_call_time_ms();
    return r;
  }

 private:
  // Bound updates need a cached anchor; fall back to the empty configuration,
  // whose difference bounds the marginal improvement of every member.
  Configuration update_anchor(int query_id, const Configuration& config,
                              const Configuration& requested) const {
    if (requested.is_subset_of(config) && cache_.contains(query_id, requested))
      return requested;
    return Configuration::empty();
  }

  void apply_coverage_overlay() {
    const FeatureDomain domain = FeatureDomain::of_workload(*workload_);
    for (const Query& q : workload_->queries) {
      const auto omega_cost = cache_.omega_cost(q.id);
      if (!omega_cost) continue;
      const auto omega_q = cache_.omega(q.id);
      const double delta = cache_.empty_cost(q.id) - *omega_cost;
      for (int z : candidates_of(q.id)) {
        if (cache_.contains(q.id, Configuration{z})) continue;
        const CoverageEstimate rho =
            coverage_similarity(workload_->index(z), *omega_q, q, domain,
                                *workload_);
        bounds_.set_estimate(q.id, z, rho.rho_hat * delta);
      }
    }
  }

  void log(int query_id, const Configuration& config, const EvalOutcome& out) {
    eval_log_.push_back({steps_, query_id, config, out.kind, out.cost, out.lower,
                         out.upper, out.confidence,
                         budget_.is_unlimited ? -1 : budget_.remaining});
  }

  const Workload* workload_;
  CostOracle* oracle_;
  SearchOptions opts_;
  WhatIfCache cache_;
  MciBounds bounds_;
  Budget budget_;
  RngStream rng_;
  std::vector<std::vector<int>> candidates_;
  std::vector<EvalRow> eval_log_;
  std::int64_t steps_ = 0;
  std::int64_t cached_hits_ = 0;
  std::int64_t skipped_calls_ = 0;
  std::int64_t exhausted_evals_ = 0;
  std::int64_t issued_evals_ = 0;
  std::int64_t missing_bound_events_ = 0;
  std::int64_t exempt_setup_calls_ = 0;
  std::int64_t charged_at_start_ = 0;
  std::chrono::nanoseconds bound_time_{0};
  std::int64_t bound_computations_ = 0;
};

struct SearchResult {
  Configuration config;
  Budget remaining_budget;
  TuningReport report;
  std::vector<EvalRow> eval_log;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - since)
      .count();
}

inline SearchResult finish(TuningSession& session, Configuration config) {
  SearchResult result;
  result.report = session.report_counters();
  result.report.final_configuration = config;
  double base = 0.0, with_config = 0.0;
  for (const Query& q : session.workload().queries) {
    base += session.oracle().what_if(q, Configuration::empty(), false);
    with_config += session.oracle().what_if(q, config, false);
  }
  result.report.final_cost = with_config;
  result.report.improvement_pct = (1.0 - with_config / base) * 100.0;
  result.remaining_budget = session.budget();
  result.eval_log = session.eval_log();
  result.config = std::move(config);
  return result;
}

inline std::vector<int> all_query_ids(const Workload& w) {
  std::vector<int> ids;
  for (const Query& q : w.queries) ids.push_back(q.id);
  return ids;
}

inline std::vector<int> ids_of(const std::vector<Index>& indexes) {
  std::vector<int> ids;
  for (const Index& z : indexes) ids.push_back(z.id);
  return ids;
}

}  // namespace detail

namespace detail {

inline void apply_phase1(TuningReport& report, const TuningReport& snapshot) {
  report.phase1_charged_calls = snapshot.charged_calls;
  report.phase1_skipped_calls = snapshot.skipped_calls;
  report.phase1_cached_hits = snapshot.cached_hits;
  report.phase1_exhausted_evals = snapshot.exhausted_evals;
}

}  // namespace detail

/// Vanilla budget-aware greedy over the whole workload.
inline SearchResult greedy_search(const Workload& w,
                                  const std::vector<Index>& indexes,
                                  CostOracle& oracle, const SearchOptions& opts) {
  TuningSession session(w, oracle, opts);
  session.setup();
  const auto t0 = std::chrono::steady_clock::now();
  Configuration best =
      session.greedy(detail::all_query_ids(w), detail::ids_of(indexes),
                     opts.constraints.cardinality_k);
  SearchResult result = detail::finish(session, std::move(best));
  result.report.phase1_ms = detail::elapsed_ms(t0);
  return result;
}

/// Phase 1 tunes each query alone over its own candidates; phase 2 tunes the
/// workload over the union of the per-query winners. Cache, bounds, and
/// budget are shared across both phases.
inline SearchResult two_phase_greedy(const Workload& w,
                                     const std::vector<Index>& indexes,
                                     CostOracle& oracle,
                                     const SearchOptions& opts) {
  TuningSession session(w, oracle, opts);
  session.setup();

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> union_pool;
  for (const Query& q : w.queries) {
    std::vector<int> pool;
    for (const Index& z : candidate_indexes_for_query(q, indexes))
      pool.push_back(z.id);
    const Configuration winner =
        session.greedy({q.id}, pool, opts.constraints.cardinality_k);
    for (int z : winner) union_pool.push_back(z);
  }
  std::sort(union_pool.begin(), union_pool.end());
  union_pool.erase(std::unique(union_pool.begin(), union_pool.end()),
                   union_pool.end());
  const double phase1_ms = detail::elapsed_ms(t0);
  const TuningReport phase1 = session.report_counters();

  const auto t1 = std::chrono::steady_clock::now();
  Configuration best = session.greedy(detail::all_query_ids(w), union_pool,
                                      opts.constraints.cardinality_k);
  SearchResult result = detail::finish(session, std::move(best));
  detail::apply_phase1(result.report, phase1);
  result.report.phase1_ms = phase1_ms;
  result.report.phase2_ms = detail::elapsed_ms(t1);
  return result;
}

/// Epsilon-greedy exploration over query/index proposals, one cost evaluation
/// per iteration, followed by a greedy pass over everything learned. The
/// reward bookkeeping and query selection here are engine-specific choices.
inline SearchResult mcts_search(const Workload& w,
                                const std::vector<Index>& indexes,
                                CostOracle& oracle, const SearchOptions& opts) {
  TuningSession session(w, oracle, opts);
  session.setup();

  const auto t0 = std::chrono::steady_clock::now();
  RngStream query_rng = session.rng().derive("mcts-query");
  RngStream policy_rng = session.rng().derive("mcts-policy");

  const int k = opts.constraints.cardinality_k;
  std::map<int, Configuration> incumbent;
  std::map<int, double> incumbent_cost;
  std::map<int, std::map<int, double>> reward;  // query -> index -> best CI ratio
  for (const Query& q : w.queries) {
    incumbent[q.id] = Configuration::empty();
    incumbent_cost[q.id] = session.cache().empty_cost(q.id);
  }

  const std::int64_t iteration_cap =
      opts.budget.is_unlimited ? 16384 : 64 * opts.budget.remaining + 512;
  for (std::int64_t iter = 0;
       iter < iteration_cap && !session.budget().exhausted(); ++iter) {
    const Query& q = w.queries[static_cast<std::size_t>(query_rng.uniform_int(
        0, static_cast<std::int64_t>(w.queries.size()) - 1))];
    const auto& cands = session.candidates_of(q.id);
    if (cands.empty()) continue;
    const Configuration& base = incumbent[q.id];

    auto feasible = [&](int z) {
      if (base.contains(z)) return false;
      if (static_cast<int>(base.size()) >= k) return false;
      const Configuration ext = base.with_index(z);
      return !opts.constraints.has_storage_limit() ||
             storage_of(ext, w) <= opts.constraints.storage_limit_mb;
    };

    int pick = -1;
    if (policy_rng.bernoulli(opts.epsilon)) {
      std::vector<int> pool;
      for (int z : cands)
        if (feasible(z)) pool.push_back(z);
      if (!pool.empty())
        pick = pool[static_cast<std::size_t>(policy_rng.uniform_int(
            0, static_cast<std::int64_t>(pool.size()) - 1))];
    }
    if (pick < 0) {
      double best_reward = -1.0;
      for (int z : cands) {
        double r = 0.0;
        auto qit = reward.find(q.id);
        if (qit != reward.end()) {
          auto it = qit->second.find(z);
          if (it != qit->second.end()) r = it->second;
        }
        if (r > best_reward) {
          best_reward = r;
          pick = z;
        }
      }
    }
    if (pick < 0) continue;

    Configuration proposal = base.contains(pick) ? base : base.with_index(pick);
    if (static_cast<int>(proposal.size()) > k) continue;
    if (opts.constraints.has_storage_limit() &&
        storage_of(proposal, w) > opts.constraints.storage_limit_mb)
      continue;

    const EvalOutcome out =
        session.eval_cost(q, proposal, Configuration::empty());
    const double base_cost = session.cache().empty_cost(q.id);
    const double ci_ratio =
        base_cost > 0.0 ? (base_cost - out.cost) / base_cost : 0.0;
    for (int z : proposal) {
      double& r = reward[q.id][z];
      r = std::max(r, ci_ratio);
    }
    if (out.cost < incumbent_cost[q.id]) {
      incumbent_cost[q.id] = out.cost;
      incumbent[q.id] = proposal;
    }
  }
  const double phase1_ms = detail::elapsed_ms(t0);
  const TuningReport phase1 = session.report_counters();

  const auto t1 = std::chrono::steady_clock::now();
  Configuration best = session.greedy(detail::all_query_ids(w),
                                      detail::ids_of(indexes), k);
  SearchResult result = detail::finish(session, std::move(best));
  detail::apply_phase1(result.report, phase1);
  result.report.phase1_ms = phase1_ms;
  result.report.phase2_ms = detail::elapsed_ms(t1);
  result.report.notes = "mcts reward and query selection are engine-specific";
  return result;
}

inline SearchResult tune(const Workload& w, const std::vector<Index>& indexes,
                         CostOracle& oracle, const SearchOptions& opts) {
  switch (opts.algorithm) {
    case Algorithm::vanilla_greedy: return greedy_search(w, indexes, oracle, opts);
    case Algorithm::two_phase_greedy: return two_phase_greedy(w, indexes, oracle, opts);
    case Algorithm::mcts: return mcts_search(w, indexes, oracle, opts);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace wit
