#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wit {

struct Column {
  int id = 0;
  int table_id = 0;
  std::string name;
};

struct Table {
  int id = 0;
  std::string name;
  std::int64_t row_count = 1;  // >= 1
  double size_mb = 1.0;        // > 0
};

/// A candidate index: ordered key columns plus an unordered set of included
/// (covering) columns, all on a single table.
struct Index {
  int id = 0;
  int table_id = 0;
  std::vector<int> key_columns;       // nonempty, no duplicates
  std::vector<int> included_columns;  // sorted, disjoint from key_columns
  double size_mb = 1.0;
};

struct Query {
  int id = 0;
  std::vector<int> indexable_columns;  // sorted, nonempty
  std::vector<int> referenced_tables;  // sorted
};

/// Canonical index set: sorted ascending, duplicate-free, so that equal sets
/// compare and hash equal regardless of construction order.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::initializer_list<int> ids) : ids_(ids) { canonicalize(); }
  explicit Configuration(std::vector<int> ids) : ids_(std::move(ids)) {
    canonicalize();
  }

  static Configuration empty() { return Configuration{}; }

  bool contains(int id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }

  bool is_subset_of(const Configuration& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(),
                         ids_.end());
  }

  Configuration with_index(int id) const {
    Configuration c = *this;
    auto it = std::lower_bound(c.ids_.begin(), c.ids_.end(), id);
    if (it == c.ids_.end() || *it != id) c.ids_.insert(it, id);
    return c;
  }

  Configuration without_index(int id) const {
    Configuration c = *this;
    auto it = std::lower_bound(c.ids_.begin(), c.ids_.end(), id);
    if (it != c.ids_.end() && *it == id) c.ids_.erase(it);
    return c;
  }

  std::size_t size() const { return ids_.size(); }
  bool is_empty() const { return ids_.empty(); }
  const std::vector<int>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  auto operator<=>(const Configuration&) const = default;

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(ids_[i]);
    }
    out += '}';
    return out;
  }

 private:
  void canonicalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::vector<int> ids_;
};

/// Tuning constraints: maximum configuration size and an optional cap on the
/// total size of the chosen indexes.
struct Constraints {
  int cardinality_k = 0;
  double storage_limit_mb = 0.0;  // <= 0 means no storage constraint
  bool has_storage_limit() const { return storage_limit_mb > 0.0; }
};

struct Workload {
  std::vector<Query> queries;
  std::vector<Table> tables;
  std::vector<Column> column_domain;
  std::vector<Index> candidate_indexes;

  const Table& table(int id) const {
    for (const Table& t : tables)
      if (t.id == id) return t;
    throw std::invalid_argument("unknown table id " + std::to_string(id));
  }
  const Column& column(int id) const {
    for (const Column& c : column_domain)
      if (c.id == id) return c;
    throw std::invalid_argument("unknown column id " + std::to_string(id));
  }
  const Index& index(int id) const {
    for (const Index& z : candidate_indexes)
      if (z.id == id) return z;
    throw std::invalid_argument("unknown index id " + std::to_string(id));
  }
  const Query& query(int id) const {
    for (const Query& q : queries)
      if (q.id == id) return q;
    throw std::invalid_argument("unknown query id " + std::to_string(id));
  }

  double total_table_size_mb() const {
    double total = 0.0;
    for (const Table& t : tables) total += t.size_mb;
    return total;
  }
};

/// Structural invariants: dense ids per kind, nonempty key columns disjoint
/// from included ones, every column on its index's table, every query column
/// on a referenced table. Throws std::invalid_argument on the first breach.
inline void validate_workload(const Workload& w) {
  for (std::size_t i = 0; i < w.tables.size(); ++i) {
    const Table& t = w.tables[i];
    if (t.id != static_cast<int>(i))
      throw std::invalid_argument("table ids must be dense and ordered");
    if (t.row_count < 1 || t.size_mb <= 0.0)
      throw std::invalid_argument("table " + t.name + " has invalid size");
  }
  for (std::size_t i = 0; i < w.column_domain.size(); ++i) {
    const Column& c = w.column_domain[i];
    if (c.id != static_cast<int>(i))
      throw std::invalid_argument("column ids must be dense and ordered");
    w.table(c.table_id);
  }
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const Query& q = w.queries[i];
    if (q.id != static_cast<int>(i))
      throw std::invalid_argument("query ids must be dense and ordered");
    if (q.indexable_columns.empty())
      throw std::invalid_argument("query without indexable columns");
    for (int t : q.referenced_tables) w.table(t);
    for (int c : q.indexable_columns) {
      const int t = w.column(c).table_id;
      if (std::find(q.referenced_tables.begin(), q.referenced_tables.end(), t) ==
          q.referenced_tables.end())
        throw std::invalid_argument(
            "query references a column of an unreferenced table");
    }
  }
  for (std::size_t i = 0; i < w.candidate_indexes.size(); ++i) {
    const Index& z = w.candidate_indexes[i];
    if (z.id != static_cast<int>(i))
      throw std::invalid_argument("index ids must be dense and ordered");
    if (z.key_columns.empty())
      throw std::invalid_argument("index without key columns");
    if (z.size_mb <= 0.0) throw std::invalid_argument("index has invalid size");
    std::set<int> seen;
    for (int c : z.key_columns) {
      if (!seen.insert(c).second)
        throw std::invalid_argument("duplicate key column");
      if (w.column(c).table_id != z.table_id)
        throw std::invalid_argument("index key column on the wrong table");
    }
    for (int c : z.included_columns) {
      if (!seen.insert(c).second)
        throw std::invalid_argument("included column repeats a key column");
      if (w.column(c).table_id != z.table_id)
        throw std::invalid_argument("included column on the wrong table");
    }
  }
}

/// Indexes usable by a query: every key and included column of the index must
/// appear among the query's indexable columns. Result is ordered by index id.
inline std::vector<Index> candidate_indexes_for_query(
    const Query& q, const std::vector<Index>& all) {
  const std::set<int> cols(q.indexable_columns.begin(),
                           q.indexable_columns.end());
  auto covered = [&](const std::vector<int>& ids) {
    return std::all_of(ids.begin(), ids.end(),
                       [&](int c) { return cols.count(c) > 0; });
  };
  std::vector<Index> result;
  for (const Index& z : all)
    if (covered(z.key_columns) && covered(z.included_columns))
      result.push_back(z);
  std::sort(result.begin(), result.end(),
            [](const Index& a, const Index& b) { return a.id < b.id; });
  return result;
}

inline double storage_of(const Configuration& config, const Workload& w) {
  double total = 0.0;
  for (int id : config) total += w.index(id).size_mb;
  return total;
}

}  // namespace wit
