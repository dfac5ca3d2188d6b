#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wit/model.hpp"
#include "wit/rng.hpp"

namespace wit {

/// Synthetic stand-in for the query optimizer's cost function. For each query
/// the cost of a configuration C is
///
///   base_cost - sum over plan slots of max_{z in C} benefit[slot][z]
///             - sum of bonuses for interaction pairs fully contained in C.
///
/// Slot maxima make the improvement monotone and submodular; pair bonuses add
/// super-additive improvement (two indexes worth more together than apart),
/// which breaks submodularity while keeping monotonicity intact.
struct QueryCostModel {
  double base_cost = 0.0;
  // slot -> (index id -> benefit >= 0)
  std::vector<std::map<int, double>> slots;
  // unordered pair (a < b) -> bonus >= 0
  std::map<std::pair<int, int>, double> violation_pairs;
};

struct CostModel {
  // indexed by query id
  std::vector<QueryCostModel> per_query;

  std::size_t total_violation_pairs() const {
    std::size_t n = 0;
    for (const auto& qm : per_query) n += qm.violation_pairs.size();
    return n;
  }
};

struct GeneratorParams {
  std::uint64_t seed = 1;
  int n_queries = 8;
  int n_tables = 3;
  int n_indexes = 16;
  int slots_per_query = 3;
  double violation_probability = 0.0;
  double violation_magnitude = 0.25;  // bonus as a fraction of base cost
};

struct MeterEntry {
  int query_id;
  Configuration config;
  double cost;
  bool charged;
};

/// Call accounting for a tuning session. Charged calls are the ones that count
/// against the budget; setup and reporting calls are exempt.
class OracleMeter {
 public:
  void record(int query_id, const Configuration& config, double cost,
              bool charged) {
    if (charged)
      ++charged_calls_;
    else
      ++exempt_calls_;
    log_.push_back({query_id, config, cost, charged});
  }

  std::int64_t charged_calls() const { return charged_calls_; }
  std::int64_t exempt_calls() const { return exempt_calls_; }
  const std::vector<MeterEntry>& log() const { return log_; }

  void add_call_time(std::chrono::nanoseconds d) { total_call_time_ += d; }
  std::chrono::nanoseconds total_call_time() const { return total_call_time_; }
  double mean_call_time_ms() const {
    const std::int64_t n = charged_calls_ + exempt_calls_;
    if (n == 0) return 0.0;
    return std::chrono::duration<double, std::milli>(total_call_time_).count() /
           static_cast<double>(n);
  }

 private:
  std::int64_t charged_calls_ = 0;
  std::int64_t exempt_calls_ = 0;
  std::chrono::nanoseconds total_call_time_{0};
  std::vector<MeterEntry> log_;
};

/// The what-if cost interface backed by a CostModel. One oracle per tuning
/// session; the meter is owned here and mutated only by the session thread.
class CostOracle {
 public:
  CostOracle(const Workload& workload, const CostModel& model)
      : workload_(&workload), model_(&model) {
    if (model.per_query.size() != workload.queries.size())
      throw std::invalid_argument("cost model does not match workload");
  }

  /// Simulates the latency of a real optimizer call; used by overhead
  /// experiments. Zero by default.
  void set_artificial_delay(std::chrono::microseconds d) { delay_ = d; }

  double what_if(const Query& q, const Configuration& config, bool charge) {
    const auto start = std::chrono::steady_clock::now();
    const double cost = evaluate(q.id, config);
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    meter_.add_call_time(std::chrono::steady_clock::now() - start);
    meter_.record(q.id, config, cost, charge);
    return cost;
  }

  double what_if(int query_id, const Configuration& config, bool charge) {
    return what_if(workload_->query(query_id), config, charge);
  }

  /// Indexes that contribute to the best plan of q when every candidate is
  /// available: those with strictly positive last-in marginal benefit, plus a
  /// greedy completion in the rare tie case, so that c(q, omega_q) always
  /// equals c(q, Omega). Does not touch the meter.
  Configuration optimal_plan_indexes(const Query& q) const {
    std::vector<int> all_ids;
    for (const Index& z : workload_->candidate_indexes) all_ids.push_back(z.id);
    const Configuration omega(all_ids);
    const double best = evaluate(q.id, omega);

    std::vector<int> members;
    for (int z : omega)
      if (evaluate(q.id, omega.without_index(z)) > best) members.push_back(z);
    Configuration omega_q(members);

    // Ties inside a slot can leave the positive-marginal set short of the
    // optimum; extend greedily until the cost matches.
    while (evaluate(q.id, omega_q) > best) {
      int pick = -1;
      double pick_cost = evaluate(q.id, omega_q);
      for (int z : omega) {
        if (omega_q.contains(z)) continue;
        const double c = evaluate(q.id, omega_q.with_index(z));
        if (c < pick_cost) {
          pick_cost = c;
          pick = z;
        }
      }
      if (pick < 0) break;
      omega_q = omega_q.with_index(pick);
    }
    return omega_q;
  }

  OracleMeter& meter() { return meter_; }
  const OracleMeter& meter() const { return meter_; }
  const Workload& workload() const { return *workload_; }
  const CostModel& model() const { return *model_; }

 private:
  double evaluate(int query_id, const Configuration& config) const {
    if (query_id < 0 ||
        static_cast<std::size_t>(query_id) >= model_->per_query.size())
      throw std::invalid_argument("unknown query id " +
                                  std::to_string(query_id));
    for (int id : config) workload_->index(id);  // validates ids
    const QueryCostModel& qm = model_->per_query[query_id];
    double cost = qm.base_cost;
    for (const auto& slot : qm.slots) {
      double best = 0.0;
      for (int z : config) {
        auto it = slot.find(z);
        if (it != slot.end()) best = std::max(best, it->second);
      }
      cost -= best;
    }
    for (const auto& [pair, bonus] : qm.violation_pairs)
      if (config.contains(pair.first) && config.contains(pair.second))
        cost -= bonus;
    return cost;
  }

  const Workload* workload_;
  const CostModel* model_;
  OracleMeter meter_;
  std::chrono::microseconds delay_{0};
};

namespace detail {

// Caps the total achievable benefit of each query at 95% of its base cost so
// costs stay strictly positive.
inline void rescale_benefits(QueryCostModel& qm) {
  double max_total = 0.0;
  for (const auto& slot : qm.slots) {
    double best = 0.0;
    for (const auto& [z, b] : slot) best = std::max(best, b);
    max_total += best;
  }
  for (const auto& [pair, bonus] : qm.violation_pairs) max_total += bonus;
  const double cap = 0.95 * qm.base_cost;
  if (max_total <= cap || max_total <= 0.0) return;
  const double scale = cap / max_total;
  for (auto& slot : qm.slots)
    for (auto& [z, b] : slot) b *= scale;
  for (auto& [pair, bonus] : qm.violation_pairs) bonus *= scale;
}

}  // namespace detail

/// Builds a workload and matching cost model, deterministically in the seed.
inline std::pair<Workload, CostModel> generate(const GeneratorParams& params) {
  if (params.n_queries < 1 || params.n_indexes < 1)
    throw std::invalid_argument("generator needs at least one query and index");
  if (params.n_tables < 1 || params.slots_per_query < 1)
    throw std::invalid_argument("generator needs tables and plan slots");
  if (params.violation_probability < 0.0 || params.violation_probability > 1.0)
    throw std::invalid_argument("violation_probability outside [0,1]");
  if (params.violation_magnitude < 0.0)
    throw std::invalid_argument("violation_magnitude must be nonnegative");

  RngStream root(params.seed, "workload-generator");
  Workload w;

  RngStream table_rng = root.derive("tables");
  std::vector<std::vector<int>> table_columns(params.n_tables);
  for (int t = 0; t < params.n_tables; ++t) {
    Table tab;
    tab.id = t;
    tab.name = "t" + std::to_string(t);
    tab.row_count =
        static_cast<std::int64_t>(std::floor(std::exp2(table_rng.uniform_real(7.0, 20.0))));
    tab.size_mb = std::max(0.5, static_cast<double>(tab.row_count) *
                                    table_rng.uniform_real(0.0002, 0.0008));
    w.tables.push_back(tab);
    const int n_cols = static_cast<int>(table_rng.uniform_int(3, 6));
    for (int j = 0; j < n_cols; ++j) {
      Column col;
      col.id = static_cast<int>(w.column_domain.size());
      col.table_id = t;
      col.name = tab.name + "_c" + std::to_string(j);
      table_columns[t].push_back(col.id);
      w.column_domain.push_back(col);
    }
  }

  RngStream query_rng = root.derive("queries");
  for (int qi = 0; qi < params.n_queries; ++qi) {
    Query q;
    q.id = qi;
    const int n_ref =
        static_cast<int>(query_rng.uniform_int(1, std::min(3, params.n_tables)));
    std::vector<int> tables_left;
    for (int t = 0; t < params.n_tables; ++t) tables_left.push_back(t);
    for (int r = 0; r < n_ref; ++r) {
      const auto pick = static_cast<std::size_t>(
          query_rng.uniform_int(0, static_cast<std::int64_t>(tables_left.size()) - 1));
      const int t = tables_left[pick];
      tables_left.erase(tables_left.begin() + static_cast<std::ptrdiff_t>(pick));
      q.referenced_tables.push_back(t);
      const auto& cols = table_columns[t];
      const int take = static_cast<int>(query_rng.uniform_int(
          1, std::min<std::int64_t>(4, static_cast<std::int64_t>(cols.size()))));
      std::vector<int> cols_left = cols;
      for (int c = 0; c < take; ++c) {
        const auto cpick = static_cast<std::size_t>(query_rng.uniform_int(
            0, static_cast<std::int64_t>(cols_left.size()) - 1));
        q.indexable_columns.push_back(cols_left[cpick]);
        cols_left.erase(cols_left.begin() + static_cast<std::ptrdiff_t>(cpick));
      }
    }
    std::sort(q.indexable_columns.begin(), q.indexable_columns.end());
    std::sort(q.referenced_tables.begin(), q.referenced_tables.end());
    w.queries.push_back(q);
  }

  // Indexes are spawned from queries round-robin, so every index is a
  // candidate of at least its spawning query.
  RngStream index_rng = root.derive("indexes");
  std::vector<int> spawner(params.n_indexes);
  for (int zi = 0; zi < params.n_indexes; ++zi) {
    const Query& q = w.queries[static_cast<std::size_t>(zi % params.n_queries)];
    spawner[zi] = q.id;
    // group the query's columns by table, pick a table with columns
    std::map<int, std::vector<int>> by_table;
    for (int c : q.indexable_columns)
      by_table[w.column(c).table_id].push_back(c);
    std::vector<int> host_tables;
    for (const auto& [t, cols] : by_table) host_tables.push_back(t);
    const int t = host_tables[static_cast<std::size_t>(index_rng.uniform_int(
        0, static_cast<std::int64_t>(host_tables.size()) - 1))];
    std::vector<int> pool = by_table[t];

    Index z;
    z.id = zi;
    z.table_id = t;
    const int n_keys = static_cast<int>(index_rng.uniform_int(
        1, std::min<std::int64_t>(3, static_cast<std::int64_t>(pool.size()))));
    for (int k = 0; k < n_keys; ++k) {
      const auto pick = static_cast<std::size_t>(
          index_rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
      z.key_columns.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (!pool.empty() && index_rng.bernoulli(0.3)) {
      const int n_inc = static_cast<int>(index_rng.uniform_int(
          1, std::min<std::int64_t>(2, static_cast<std::int64_t>(pool.size()))));
      for (int k = 0; k < n_inc; ++k) {
        const auto pick = static_cast<std::size_t>(
            index_rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
        z.included_columns.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      std::sort(z.included_columns.begin(), z.included_columns.end());
    }
    z.size_mb = w.table(t).size_mb * index_rng.uniform_real(0.05, 0.35);
    w.candidate_indexes.push_back(z);
  }

  CostModel model;
  model.per_query.resize(w.queries.size());
  RngStream cost_rng = root.derive("costs");
  RngStream pair_rng = root.derive("violation-pairs");

  std::vector<std::vector<int>> cand_ids(w.queries.size());
  for (const Query& q : w.queries)
    for (const Index& z : candidate_indexes_for_query(q, w.candidate_indexes))
      cand_ids[q.id].push_back(z.id);

  for (const Query& q : w.queries) {
    QueryCostModel& qm = model.per_query[q.id];
    qm.base_cost = cost_rng.uniform_real(50.0, 500.0);
    const int n_slots =
        static_cast<int>(cost_rng.uniform_int(1, params.slots_per_query));
    qm.slots.resize(static_cast<std::size_t>(n_slots));
    const auto& cands = cand_ids[q.id];
    for (auto& slot : qm.slots) {
      for (int z : cands)
        if (cost_rng.bernoulli(0.6))
          slot[z] = qm.base_cost * cost_rng.uniform_real(0.05, 0.35);
      if (slot.empty() && !cands.empty()) {
        const int z = cands[static_cast<std::size_t>(cost_rng.uniform_int(
            0, static_cast<std::int64_t>(cands.size()) - 1))];
        slot[z] = qm.base_cost * cost_rng.uniform_real(0.05, 0.35);
      }
    }
  }

  // Every index must benefit at least one slot of at least one query; patch
  // orphans through their spawning query.
  for (const Index& z : w.candidate_indexes) {
    bool benefits = false;
    for (const auto& qm : model.per_query)
      for (const auto& slot : qm.slots)
        if (slot.count(z.id)) benefits = true;
    if (benefits) continue;
    QueryCostModel& qm = model.per_query[spawner[z.id]];
    auto& slot = qm.slots[static_cast<std::size_t>(cost_rng.uniform_int(
        0, static_cast<std::int64_t>(qm.slots.size()) - 1))];
    slot[z.id] = qm.base_cost * cost_rng.uniform_real(0.05, 0.35);
  }

  if (params.violation_probability > 0.0) {
    for (const Query& q : w.queries) {
      QueryCostModel& qm = model.per_query[q.id];
      const auto& cands = cand_ids[q.id];
      for (std::size_t i = 0; i < cands.size(); ++i)
        for (std::size_t j = i + 1; j < cands.size(); ++j)
          if (pair_rng.bernoulli(params.violation_probability))
            qm.violation_pairs[{cands[i], cands[j]}] =
                params.violation_magnitude * qm.base_cost;
    }
  }

  for (auto& qm : model.per_query) detail::rescale_benefits(qm);
  return {std::move(w), std::move(model)};
}

/// Number of candidate pairs the generator considered for violation bonuses.
inline std::size_t eligible_violation_pairs(const Workload& w) {
  std::size_t total = 0;
  for (const Query& q : w.queries) {
    const std::size_t n =
        candidate_indexes_for_query(q, w.candidate_indexes).size();
    total += n * (n - 1) / 2;
  }
  return total;
}

/// Exhaustive minimizer over all feasible configurations; test oracle only.
/// Uses exempt calls. Ties break toward the lexicographically smallest id set.
inline std::pair<Configuration, double> brute_force_best(
    const Workload& w, const CostModel& model, const Constraints& constraints) {
  const std::size_t n = w.candidate_indexes.size();
  if (n > 20)
    throw std::invalid_argument(
        "brute_force_best refuses more than 20 candidate indexes");
  CostOracle oracle(w, model);

  auto total_cost = [&](const Configuration& c) {
    double sum = 0.0;
    for (const Query& q : w.queries) sum += oracle.what_if(q, c, false);
    return sum;
  };

  Configuration best;
  double best_cost = total_cost(best);
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    if (std::popcount(mask) > constraints.cardinality_k) continue;
    std::vector<int> ids;
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (1u << b)) ids.push_back(w.candidate_indexes[b].id);
    Configuration c(ids);
    if (constraints.has_storage_limit() &&
        storage_of(c, w) > constraints.storage_limit_mb)
      continue;
    const double cost = total_cost(c);
    if (cost < best_cost ||
        (cost == best_cost && c.ids() < best.ids())) {
      best_cost = cost;
      best = c;
    }
  }
  return {best, best_cost};
}

}  // namespace wit
