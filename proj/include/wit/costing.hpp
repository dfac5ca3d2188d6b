#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wit/model.hpp"
#include "wit/oracle.hpp"
#include "wit/rng.hpp"

namespace wit {

/// Remaining allowance of charged what-if calls.
struct Budget {
  bool is_unlimited = false;
  std::int64_t remaining = 0;

  static Budget finite(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("budget must be nonnegative");
    return {false, n};
  }
  static Budget unlimited() { return {true, 0}; }

  bool exhausted() const { return !is_unlimited && remaining == 0; }
  void consume() {
    if (!is_unlimited) --remaining;
  }
};

/// All true what-if costs known so far, per query. Entries always come from
/// the oracle and are never overwritten with different values. The empty
/// configuration is cached for every query; the per-query optimal-plan set
/// omega_q is remembered when its cost is known.
class WhatIfCache {
 public:
  void put(int query_id, const Configuration& config, double cost) {
    auto& per_query = entries_[query_id];
    auto [it, inserted] = per_query.emplace(config, cost);
    if (!inserted && it->second != cost)
      throw std::logic_error("cache entry rewritten with a different cost");
  }

  std::optional<double> get(int query_id, const Configuration& config) const {
    auto qit = entries_.find(query_id);
    if (qit == entries_.end()) return std::nullopt;
    auto it = qit->second.find(config);
    if (it == qit->second.end()) return std::nullopt;
    return it->second;
  }

  bool contains(int query_id, const Configuration& config) const {
    return get(query_id, config).has_value();
  }

  double empty_cost(int query_id) const {
    auto c = get(query_id, Configuration::empty());
    if (!c) throw std::logic_error("cost of the empty configuration unknown");
    return *c;
  }

  /// Remembers the optimal-plan index set of q and its cost. The cost equals
  /// c(q, full candidate set), which is the configuration the call was
  /// actually issued for; it is kept out of the subset scan of derived_cost
  /// and feeds only the bound and coverage machinery.
  void set_omega(int query_id, const Configuration& omega_q, double cost) {
    omega_[query_id] = {omega_q, cost};
  }
  std::optional<Configuration> omega(int query_id) const {
    auto it = omega_.find(query_id);
    if (it == omega_.end()) return std::nullopt;
    return it->second.first;
  }
  std::optional<double> omega_cost(int query_id) const {
    auto it = omega_.find(query_id);
    if (it == omega_.end()) return std::nullopt;
    return it->second.second;
  }

  const std::map<Configuration, double>& per_query(int query_id) const {
    static const std::map<Configuration, double> kEmpty;
    auto it = entries_.find(query_id);
    return it == entries_.end() ? kEmpty : it->second;
  }

 private:
  std::map<int, std::map<Configuration, double>> entries_;
  std::map<int, std::pair<Configuration, double>> omega_;
};

/// Per (query, index) upper bound on the marginal cost improvement. The bound
/// maintained from true costs never increases; a coverage-based estimate may
/// sit alongside it and is dropped permanently once the true singleton cost
/// becomes known.
class MciBounds {
 public:
  void init(int query_id, int index_id, double value) {
    auto& u = true_bound_[query_id];
    auto it = u.find(index_id);
    if (it == u.end())
      u[index_id] = std::max(0.0, value);
    else
      it->second = std::min(it->second, std::max(0.0, value));
  }

  void set_estimate(int query_id, int index_id, double value) {
    estimate_[query_id][index_id] = std::max(0.0, value);
  }

  void drop_estimate(int query_id, int index_id) {
    auto qit = estimate_.find(query_id);
    if (qit != estimate_.end()) qit->second.erase(index_id);
  }

  bool has(int query_id, int index_id) const {
    auto qit = true_bound_.find(query_id);
    return qit != true_bound_.end() && qit->second.count(index_id) > 0;
  }

  /// Bound used by lower-bound computations; missing pairs yield nullopt.
  std::optional<double> get(int query_id, int index_id) const {
    auto qit = true_bound_.find(query_id);
    if (qit == true_bound_.end()) return std::nullopt;
    auto it = qit->second.find(index_id);
    if (it == qit->second.end()) return std::nullopt;
    double u = it->second;
    auto eqit = estimate_.find(query_id);
    if (eqit != estimate_.end()) {
      auto eit = eqit->second.find(index_id);
      if (eit != eqit->second.end()) u = std::min(u, eit->second);
    }
    return u;
  }

  /// The true-cost lane only; monotonically non-increasing over a session.
  std::optional<double> true_bound(int query_id, int index_id) const {
    auto qit = true_bound_.find(query_id);
    if (qit == true_bound_.end()) return std::nullopt;
    auto it = qit->second.find(index_id);
    if (it == qit->second.end()) return std::nullopt;
    return it->second;
  }

  void tighten(int query_id, int index_id, double value) {
    auto qit = true_bound_.find(query_id);
    if (qit == true_bound_.end()) return;
    auto it = qit->second.find(index_id);
    if (it == qit->second.end()) return;  // outside the candidate domain
    it->second = std::min(it->second, std::max(0.0, value));
  }

  const std::map<int, double>& per_query(int query_id) const {
    static const std::map<int, double> kEmpty;
    auto it = true_bound_.find(query_id);
    return it == true_bound_.end() ? kEmpty : it->second;
  }

 private:
  std::map<int, std::map<int, double>> true_bound_;
  std::map<int, std::map<int, double>> estimate_;
};

enum class EvalKind { cached, budget_exhausted, skipped, what_if_issued };

inline const char* to_string(EvalKind k) {
  switch (k) {
    case EvalKind::cached: return "cached";
    case EvalKind::budget_exhausted: return "budget_exhausted";
    case EvalKind::skipped: return "skipped";
    case EvalKind::what_if_issued: return "what_if_issued";
  }
  return "?";
}

struct EvalOutcome {
  double cost = 0.0;
  Budget remaining_budget;
  EvalKind kind = EvalKind::cached;
  std::optional<double> confidence;
  std::optional<double> lower;
  std::optional<double> upper;
};

enum class SkipPolicy { confidence, random, never };
enum class ReturnOnSkip { upper, mean };

struct EvalRow {
  std::int64_t step;
  int query_id;
  Configuration config;
  EvalKind kind;
  double cost;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> alpha;
  std::int64_t budget_left;  // -1 for unlimited
};

/// Initializes u(q, z) for every query and candidate index: the improvement of
/// the full candidate set when its cost is known, the cost of the empty
/// configuration otherwise. Re-initialization never loosens existing bounds.
inline void init_mci_bounds(const Workload& w, const std::vector<Index>& indexes,
                            const WhatIfCache& cache, MciBounds& bounds) {
  for (const Query& q : w.queries) {
    const double base = cache.empty_cost(q.id);
    const std::optional<double> omega_cost = cache.omega_cost(q.id);
    const double init = omega_cost ? base - *omega_cost : base;
    for (const Index& z : candidate_indexes_for_query(q, indexes))
      bounds.init(q.id, z.id, init);
  }
}

inline MciBounds init_mci_bounds(const Workload& w,
                                 const std::vector<Index>& indexes,
                                 const WhatIfCache& cache) {
  MciBounds bounds;
  init_mci_bounds(w, indexes, cache, bounds);
  return bounds;
}

/// Minimum known cost over cached subsets of C; the derived cost U(q, C).
inline double derived_cost(int query_id, const Configuration& config,
                           const WhatIfCache& cache) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [subset, cost] : cache.per_query(query_id))
    if (subset.is_subset_of(config)) best = std::min(best, cost);
  if (!std::isfinite(best))
    throw std::logic_error("derived cost needs the empty configuration cached");
  return best;
}

namespace detail {

// Sum of u(q, x) over x in config - subset. Missing pairs fall back to the
// most conservative bound c(q, empty); the caller counts those events.
inline double bound_gap_sum(int query_id, const Configuration& config,
                            const Configuration& subset, const MciBounds& u,
                            const WhatIfCache& cache,
                            std::int64_t* missing_bound_events) {
  double sum = 0.0;
  for (int x : config) {
    if (subset.contains(x)) continue;
    if (auto b = u.get(query_id, x)) {
      sum += *b;
    } else {
      sum += cache.empty_cost(query_id);
      if (missing_bound_events) ++*missing_bound_events;
    }
  }
  return sum;
}

}  // namespace detail

/// Lower bound on c(q, C) anchored at one known subset S:
/// max{0, c(q, omega_q), c(q, S) - sum of u over C - S}.
inline double lower_bound(int query_id, const Configuration& config,
                          const Configuration& subset, const MciBounds& u,
                          const WhatIfCache& cache,
                          std::int64_t* missing_bound_events = nullptr) {
  if (!subset.is_subset_of(config))
    throw std::invalid_argument("S must be a subset of C");
  const std::optional<double> anchor = cache.get(query_id, subset);
  if (!anchor) throw std::logic_error("lower_bound requires c(q, S) cached");
  double lb = *anchor - detail::bound_gap_sum(query_id, config, subset, u,
                                              cache, missing_bound_events);
  if (auto oc = cache.omega_cost(query_id)) lb = std::max(lb, *oc);
  return std::max(0.0, lb);
}

/// The best lower bound over every cached strict subset of C, without the
/// zero / omega-cost guards. This is the quantity the greedy-trajectory
/// equality is stated about.
inline double max_anchored_lower_bound(int query_id, const Configuration& config,
                                       const MciBounds& u,
                                       const WhatIfCache& cache,
                                       std::int64_t* missing_bound_events = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [subset, cost] : cache.per_query(query_id)) {
    if (!(subset != config && subset.is_subset_of(config))) continue;
    best = std::max(best, cost - detail::bound_gap_sum(query_id, config, subset,
                                                       u, cache,
                                                       missing_bound_events));
  }
  if (!std::isfinite(best))
    throw std::logic_error(
        "generalized lower bound needs the empty configuration cached");
  return best;
}

/// Generalized lower bound over all cached strict subsets, guarded below by
/// zero and by the cached cost of omega_q.
inline double generalized_lower_bound(int query_id, const Configuration& config,
                                      const MciBounds& u, const WhatIfCache& cache,
                                      std::int64_t* missing_bound_events = nullptr) {
  double lb =
      max_anchored_lower_bound(query_id, config, u, cache, missing_bound_events);
  if (auto oc = cache.omega_cost(query_id)) lb = std::max(lb, *oc);
  return std::max(0.0, lb);
}

/// Confidence that the derived cost is close to the true cost: L / U,
/// defined as 1 when U is zero.
inline double confidence(double lower, double upper) {
  if (lower < 0.0 || upper < 0.0)
    throw std::invalid_argument("confidence expects nonnegative bounds");
  if (upper == 0.0) return 1.0;
  return lower / upper;
}

/// After c(q, C) became known: for each x in C - S, tighten u(q, x) to
/// c(q, S) - c(q, C), floored at zero. Drops coverage estimates for indexes
/// whose singleton cost is now cached.
inline void update_mci_bounds(int query_id, const Configuration& config,
                              const Configuration& subset,
                              const WhatIfCache& cache, MciBounds& u) {
  if (!subset.is_subset_of(config))
    throw std::invalid_argument("S must be a subset of C");
  const std::optional<double> cost_subset = cache.get(query_id, subset);
  const std::optional<double> cost_config = cache.get(query_id, config);
  if (!cost_subset || !cost_config)
    throw std::logic_error("update_mci_bounds requires c(q,S) and c(q,C) cached");
  const double diff = *cost_subset - *cost_config;
  for (int x : config) {
    if (subset.contains(x)) continue;
    u.tighten(query_id, x, diff);
    if (cache.contains(query_id, Configuration{x})) u.drop_estimate(query_id, x);
  }
}

}  // namespace wit
