#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wit/costing.hpp"
#include "wit/coverage.hpp"
#include "wit/model.hpp"
#include "wit/oracle.hpp"

namespace wit {

/// Cost pair for configurations S and C with S a subset of C; monotonicity
/// expects cost_large <= cost_small.
struct MonoPoint {
  int query_id;
  Configuration small;
  Configuration large;
  double cost_small;
  double cost_large;
};

/// Costs of (empty, {z}, {x}, {x,z}); the violation magnitude is
/// delta = (c_x - c_xz) - (c_empty - c_z).
struct SubmodPoint {
  int query_id;
  int z;
  int x;
  double c_empty;
  double c_z;
  double c_x;
  double c_xz;

  double delta() const { return (c_x - c_xz) - (c_empty - c_z); }
};

struct ValidationStats {
  std::int64_t total = 0;
  std::int64_t holds = 0;
  std::int64_t violations = 0;
  double pct_holds = 100.0;
  // positive violation magnitudes, for submodularity only
  std::vector<double> deltas;
  double delta_mean = 0.0;
  double delta_median = 0.0;
  double delta_p95 = 0.0;
};

namespace detail {

inline double relative_slack(double reference) {
  return 1e-12 * std::max(std::abs(reference), 1.0);
}

inline void summarize_deltas(ValidationStats& stats) {
  if (stats.deltas.empty()) return;
  std::vector<double> sorted = stats.deltas;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double d : sorted) sum += d;
  stats.delta_mean = sum / static_cast<double>(sorted.size());
  stats.delta_median = sorted[sorted.size() / 2];
  stats.delta_p95 =
      sorted[static_cast<std::size_t>(0.95 * static_cast<double>(sorted.size() - 1))];
}

}  // namespace detail

/// Runs vanilla greedy per query (K = 2, unlimited budget, no skipping) with
/// exempt calls, then harvests monotonicity pairs and submodularity quadruples
/// from every explored parent configuration {x, z}.
inline std::pair<std::vector<MonoPoint>, std::vector<SubmodPoint>>
collect_validation_points(const Workload& w, const CostModel& model) {
  std::vector<MonoPoint> mono;
  std::vector<SubmodPoint> submod;

  for (const Query& q : w.queries) {
    CostOracle oracle(w, model);

    // All costs collected here are outside any tuning budget.
    WhatIfCache cache;
    cache.put(q.id, Configuration::empty(),
              oracle.what_if(q, Configuration::empty(), false));
    const std::vector<Index> cands =
        candidate_indexes_for_query(q, w.candidate_indexes);

    auto cost_of = [&](const Configuration& c) {
      if (auto hit = cache.get(q.id, c)) return *hit;
      const double cost = oracle.what_if(q, c, false);
      cache.put(q.id, c, cost);
      return cost;
    };

    // Vanilla greedy with K=2: evaluate every singleton, pick the best, then
    // every pair extending it.
    const double base = cache.empty_cost(q.id);
    int winner = -1;
    double winner_cost = base;
    for (const Index& z : cands) {
      const double c = cost_of(Configuration{z.id});
      if (c < winner_cost) {
        winner_cost = c;
        winner = z.id;
      }
    }
    if (winner >= 0)
      for (const Index& z : cands)
        if (z.id != winner) cost_of(Configuration{winner, z.id});

    for (const Index& z : cands) {
      const auto singleton_cost = cache.get(q.id, Configuration{z.id});
      if (!singleton_cost) continue;
      for (const Index& x : cands) {
        if (x.id == z.id) continue;
        const auto parent_cost = cache.get(q.id, Configuration{x.id, z.id});
        const auto x_cost = cache.get(q.id, Configuration{x.id});
        if (!parent_cost || !x_cost) continue;
        const Configuration parent{x.id, z.id};
        mono.push_back({q.id, Configuration::empty(), Configuration{z.id}, base,
                        *singleton_cost});
        mono.push_back({q.id, Configuration::empty(), parent, base, *parent_cost});
        mono.push_back(
            {q.id, Configuration{z.id}, parent, *singleton_cost, *parent_cost});
        submod.push_back(
            {q.id, z.id, x.id, base, *singleton_cost, *x_cost, *parent_cost});
      }
    }
  }
  return {std::move(mono), std::move(submod)};
}

inline ValidationStats check_monotonicity(const std::vector<MonoPoint>& points) {
  ValidationStats stats;
  stats.total = static_cast<std::int64_t>(points.size());
  for (const MonoPoint& p : points) {
    if (p.cost_large <= p.cost_small + detail::relative_slack(p.cost_small))
      ++stats.holds;
    else
      ++stats.violations;
  }
  stats.pct_holds = stats.total == 0
                        ? 100.0
                        : 100.0 * static_cast<double>(stats.holds) /
                              static_cast<double>(stats.total);
  return stats;
}

inline ValidationStats check_submodularity(const std::vector<SubmodPoint>& points) {
  ValidationStats stats;
  stats.total = static_cast<std::int64_t>(points.size());
  for (const SubmodPoint& p : points) {
    const double delta = p.delta();
    if (delta <= detail::relative_slack(p.c_empty)) {
      ++stats.holds;
    } else {
      ++stats.violations;
      stats.deltas.push_back(delta);
    }
  }
  stats.pct_holds = stats.total == 0
                        ? 100.0
                        : 100.0 * static_cast<double>(stats.holds) /
                              static_cast<double>(stats.total);
  detail::summarize_deltas(stats);
  return stats;
}

struct CoverageErrorPoint {
  int query_id;
  int index_id;
  double rho_true;
  double rho_hat;
  double abs_error;
};

struct CoverageErrorSummary {
  std::vector<CoverageErrorPoint> points;
  std::int64_t undefined_points = 0;  // queries with zero maximal improvement
  double mean = 0.0;
  double median = 0.0;
  // cumulative fraction of points with error below 0.1, 0.2, ..., 1.0
  std::vector<double> cdf = std::vector<double>(10, 0.0);
};

/// Absolute error between estimated and ground-truth coverage for every
/// (query, candidate index) pair; ground truth uses exempt oracle calls.
inline CoverageErrorSummary coverage_error_distribution(const Workload& w,
                                                        const CostModel& model) {
  CoverageErrorSummary summary;
  CostOracle oracle(w, model);
  const FeatureDomain domain = FeatureDomain::of_workload(w);

  for (const Query& q : w.queries) {
    const double base = oracle.what_if(q, Configuration::empty(), false);
    const Configuration omega_q = oracle.optimal_plan_indexes(q);
    const double omega_cost = oracle.what_if(q, omega_q, false);
    const double delta_max = base - omega_cost;
    for (const Index& z : candidate_indexes_for_query(q, w.candidate_indexes)) {
      if (delta_max <= 0.0) {
        ++summary.undefined_points;
        continue;
      }
      const double singleton = oracle.what_if(q, Configuration{z.id}, false);
      const double rho = (base - singleton) / delta_max;
      const double rho_hat =
          coverage_similarity(z, omega_q, q, domain, w).rho_hat;
      summary.points.push_back(
          {q.id, z.id, rho, rho_hat, std::abs(rho_hat - rho)});
    }
  }

  if (!summary.points.empty()) {
    std::vector<double> errors;
    double sum = 0.0;
    for (const auto& p : summary.points) {
      errors.push_back(p.abs_error);
      sum += p.abs_error;
    }
    std::sort(errors.begin(), errors.end());
    summary.mean = sum / static_cast<double>(errors.size());
    summary.median = errors[errors.size() / 2];
    for (std::size_t b = 0; b < summary.cdf.size(); ++b) {
      const double threshold = 0.1 * static_cast<double>(b + 1);
      const auto below = std::upper_bound(errors.begin(), errors.end(), threshold);
      summary.cdf[b] = static_cast<double>(below - errors.begin()) /
                       static_cast<double>(errors.size());
    }
  }
  return summary;
}

/// Residual of the confidence-error identity
///   U * (alpha_hat - alpha) = Delta(q, omega_q) * sum_z (rho - rho_hat)
/// with every u built purely from coverage (true on one side, estimated on
/// the other) and nothing clamped. Exempt calls only.
inline double confidence_error_identity(const Query& q, const Configuration& config,
                                        const Workload& w, const CostModel& model) {
  CostOracle oracle(w, model);
  const FeatureDomain domain = FeatureDomain::of_workload(w);

  const double base = oracle.what_if(q, Configuration::empty(), false);
  const Configuration omega_q = oracle.optimal_plan_indexes(q);
  const double omega_cost = oracle.what_if(q, omega_q, false);
  const double delta_max = base - omega_cost;
  if (delta_max <= 0.0)
    throw std::logic_error("confidence-error identity needs improvable queries");

  const double upper = base;  // derived cost with only the empty entry cached
  double sum_rho = 0.0, sum_rho_hat = 0.0;
  for (int z : config) {
    const double singleton = oracle.what_if(q, Configuration{z}, false);
    sum_rho += (base - singleton) / delta_max;
    sum_rho_hat += coverage_similarity_raw(w.index(z), omega_q, q, domain, w);
  }
  const double lower_true = base - delta_max * sum_rho;
  const double lower_est = base - delta_max * sum_rho_hat;
  const double alpha_true = lower_true / upper;
  const double alpha_est = lower_est / upper;
  return std::abs(upper * (alpha_est - alpha_true) -
                  delta_max * (sum_rho - sum_rho_hat));
}

}  // namespace wit
