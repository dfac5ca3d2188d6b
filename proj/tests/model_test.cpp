#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "wit/model.hpp"
#include "wit/oracle.hpp"
#include "wit/rng.hpp"

using namespace wit;

namespace {

// One table with columns a=0, b=1, c=2.
Workload tiny_workload() {
  Workload w;
  w.tables.push_back({0, "t", 1000, 50.0});
  w.column_domain.push_back({0, 0, "a"});
  w.column_domain.push_back({1, 0, "b"});
  w.column_domain.push_back({2, 0, "c"});
  w.queries.push_back({0, {0, 1}, {0}});
  return w;
}

}  // namespace

TEST_CASE("candidate selection requires full column containment") {
  Workload w = tiny_workload();
  const Index z1{0, 0, {0}, {}, 10.0};
  const Index z2{1, 0, {2}, {}, 5.0};

  auto got = candidate_indexes_for_query(w.queries[0], {z1, z2});
  REQUIRE(got.size() == 1);
  CHECK(got[0].id == 0);

  CHECK(candidate_indexes_for_query(w.queries[0], {}).empty());

  // An included column outside the query disqualifies the index.
  const Index z3{2, 0, {0}, {2}, 8.0};
  CHECK(candidate_indexes_for_query(w.queries[0], {z3}).empty());
}

TEST_CASE("candidate selection is ordered by id and idempotent on re-check") {
  RngStream rng(7, "model-prop");
  for (int trial = 0; trial < 20; ++trial) {
    GeneratorParams params;
    params.seed = rng.next_u64();
    params.n_queries = 5;
    params.n_tables = 3;
    params.n_indexes = 12;
    auto [w, model] = generate(params);
    for (const Query& q : w.queries) {
      const auto cands = candidate_indexes_for_query(q, w.candidate_indexes);
      const std::set<int> cols(q.indexable_columns.begin(),
                               q.indexable_columns.end());
      for (std::size_t i = 0; i < cands.size(); ++i) {
        if (i > 0) CHECK(cands[i - 1].id < cands[i].id);
        for (int c : cands[i].key_columns) CHECK(cols.count(c) == 1);
        for (int c : cands[i].included_columns) CHECK(cols.count(c) == 1);
      }
    }
  }
}

TEST_CASE("storage of a configuration sums index sizes") {
  Workload w = tiny_workload();
  w.candidate_indexes.push_back({0, 0, {0}, {}, 10.0});
  w.candidate_indexes.push_back({1, 0, {1}, {}, 2.5});

  CHECK(storage_of(Configuration{}, w) == 0.0);
  CHECK(storage_of(Configuration{0}, w) == 10.0);
  CHECK(storage_of(Configuration{0, 1}, w) == 12.5);
  CHECK_THROWS_AS(storage_of(Configuration{42}, w), std::invalid_argument);
}

TEST_CASE("configurations are canonical under permutation and duplication") {
  RngStream rng(3, "config-prop");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> ids;
    const int n = static_cast<int>(rng.uniform_int(0, 6));
    for (int i = 0; i < n; ++i)
      ids.push_back(static_cast<int>(rng.uniform_int(0, 9)));
    std::vector<int> shuffled = ids;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1],
                shuffled[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);

    const Configuration a(ids);
    const Configuration b(shuffled);
    CHECK(a == b);
    CHECK(a.to_string() == b.to_string());
    CHECK(std::is_sorted(a.ids().begin(), a.ids().end()));
    CHECK(std::adjacent_find(a.ids().begin(), a.ids().end()) == a.ids().end());
  }
}

TEST_CASE("configuration subset and extension behave like sets") {
  const Configuration c{3, 1, 2};
  CHECK(c.size() == 3);
  CHECK(c.contains(2));
  CHECK(Configuration{1, 2}.is_subset_of(c));
  CHECK_FALSE(Configuration{1, 4}.is_subset_of(c));
  CHECK(c.with_index(2) == c);
  CHECK(c.with_index(5).size() == 4);
  CHECK(c.without_index(3) == Configuration{1, 2});
  CHECK(Configuration{}.is_subset_of(c));
}
