#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wit/costing.hpp"
#include "wit/model.hpp"

namespace wit {

/// Stable ordering of the workload's indexable columns; feature vectors are
/// expressed over this domain.
class FeatureDomain {
 public:
  explicit FeatureDomain(std::vector<int> column_ids) : ids_(std::move(column_ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    for (std::size_t i = 0; i < ids_.size(); ++i) position_[ids_[i]] = i;
  }

  /// The union of indexable columns over all queries.
  static FeatureDomain of_workload(const Workload& w) {
    std::vector<int> ids;
    for (const Query& q : w.queries)
      ids.insert(ids.end(), q.indexable_columns.begin(),
                 q.indexable_columns.end());
    return FeatureDomain(std::move(ids));
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<int>& column_ids() const { return ids_; }

  std::size_t position(int column_id) const {
    auto it = position_.find(column_id);
    if (it == position_.end())
      throw std::invalid_argument("column outside the feature domain");
    return it->second;
  }

  /// Position lookup for columns that may legitimately sit outside the
  /// domain, e.g. index columns no query finds indexable.
  std::optional<std::size_t> try_position(int column_id) const {
    auto it = position_.find(column_id);
    if (it == position_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<int> ids_;
  std::map<int, std::size_t> position_;
};

using FeatureVector = std::vector<double>;

struct CoverageEstimate {
  double rho_hat = 0.0;  // clamped to [0, 1]
  enum class Provenance { estimated, exact } provenance = Provenance::estimated;
};

/// Index feature vector: the j-th key column weighs 1/2^(j-1), every included
/// column weighs 1/2^J with J the number of key columns. Columns outside the
/// domain contribute nothing, so an index no query can use maps to the zero
/// vector.
inline FeatureVector index_vector(const Index& z, const FeatureDomain& domain) {
  FeatureVector v(domain.size(), 0.0);
  double weight = 1.0;
  for (int c : z.key_columns) {
    if (auto l = domain.try_position(c)) v[*l] = weight;
    weight /= 2.0;
  }
  const double included_weight =
      std::exp2(-static_cast<double>(z.key_columns.size()));
  for (int c : z.included_columns)
    if (auto l = domain.try_position(c)) v[*l] = included_weight;
  return v;
}

/// Element-wise maximum of index vectors; the empty configuration maps to the
/// zero vector.
inline FeatureVector config_vector(const std::vector<FeatureVector>& vectors,
                                   std::size_t dimension) {
  FeatureVector v(dimension, 0.0);
  for (const FeatureVector& zv : vectors) {
    if (zv.size() != dimension)
      throw std::invalid_argument("feature vectors disagree on dimension");
    for (std::size_t l = 0; l < dimension; ++l) v[l] = std::max(v[l], zv[l]);
  }
  return v;
}

/// Query feature vector. Each indexable column weighs
/// log2(1 + rows of its table) * (1 + number of the query's candidate indexes
/// containing it); the vector is normalized to unit length.
inline FeatureVector query_vector(const Query& q, const FeatureDomain& domain,
                                  const Workload& w) {
  FeatureVector v(domain.size(), 0.0);
  const std::vector<Index> cands =
      candidate_indexes_for_query(q, w.candidate_indexes);
  for (int c : q.indexable_columns) {
    int n_cand = 0;
    for (const Index& z : cands) {
      const bool in_key = std::find(z.key_columns.begin(), z.key_columns.end(),
                                    c) != z.key_columns.end();
      const bool in_included =
          std::find(z.included_columns.begin(), z.included_columns.end(), c) !=
          z.included_columns.end();
      if (in_key || in_included) ++n_cand;
    }
    const double rows =
        static_cast<double>(w.table(w.column(c).table_id).row_count);
    v[domain.position(c)] = std::log2(1.0 + rows) * (1.0 + n_cand);
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

namespace detail {

inline FeatureVector hadamard(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("feature vectors disagree on dimension");
  FeatureVector out(a.size());
  for (std::size_t l = 0; l < a.size(); ++l) out[l] = a[l] * b[l];
  return out;
}

inline double dot(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += a[l] * b[l];
  return s;
}

}  // namespace detail

/// Similarity of {z} to omega_q in the context of q, used as the coverage
/// estimate: project both onto the query vector, then <z~, W~> / |W~|^2.
/// Clamped to [0, 1]; zero when the projected omega vector vanishes.
inline CoverageEstimate coverage_similarity(const Index& z,
                                            const Configuration& omega_q,
                                            const Query& q,
                                            const FeatureDomain& domain,
                                            const Workload& w) {
  const FeatureVector qv = query_vector(q, domain, w);
  std::vector<FeatureVector> members;
  for (int id : omega_q) members.push_back(index_vector(w.index(id), domain));
  const FeatureVector omega_v = config_vector(members, domain.size());

  const FeatureVector z_img = detail::hadamard(index_vector(z, domain), qv);
  const FeatureVector omega_img = detail::hadamard(omega_v, qv);
  const double denom = detail::dot(omega_img, omega_img);
  if (denom == 0.0) return {0.0, CoverageEstimate::Provenance::estimated};
  const double raw = detail::dot(z_img, omega_img) / denom;
  return {std::clamp(raw, 0.0, 1.0), CoverageEstimate::Provenance::estimated};
}

/// Unclamped similarity ratio; the confidence-error identity is stated for
/// this raw value.
inline double coverage_similarity_raw(const Index& z, const Configuration& omega_q,
                                      const Query& q, const FeatureDomain& domain,
                                      const Workload& w) {
  const FeatureVector qv = query_vector(q, domain, w);
  std::vector<FeatureVector> members;
  for (int id : omega_q) members.push_back(index_vector(w.index(id), domain));
  const FeatureVector omega_img =
      detail::hadamard(config_vector(members, domain.size()), qv);
  const FeatureVector z_img = detail::hadamard(index_vector(z, domain), qv);
  const double denom = detail::dot(omega_img, omega_img);
  if (denom == 0.0) return 0.0;
  return detail::dot(z_img, omega_img) / denom;
}

/// Singleton cost recovered from coverage:
/// (1 - rho) * c(q, empty) + rho * c(q, omega_q). Returns the cached true
/// cost unchanged when it is already known.
inline std::pair<double, CoverageEstimate::Provenance> estimated_singleton_cost(
    int query_id, int index_id, const WhatIfCache& cache, double rho_hat) {
  if (auto truth = cache.get(query_id, Configuration{index_id}))
    return {*truth, CoverageEstimate::Provenance::exact};
  const double base = cache.empty_cost(query_id);
  const std::optional<double> omega_cost = cache.omega_cost(query_id);
  if (!omega_cost)
    throw std::logic_error(
        "estimated_singleton_cost requires the omega_q cost cached");
  return {(1.0 - rho_hat) * base + rho_hat * *omega_cost,
          CoverageEstimate::Provenance::estimated};
}

}  // namespace wit
