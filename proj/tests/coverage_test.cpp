#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wit/coverage.hpp"
#include "wit/oracle.hpp"
#include "wit/rng.hpp"

using namespace wit;

namespace {

// columns a=0, b=1, c=2 on one table; one query referencing all three.
Workload abc_workload(std::int64_t rows = 1000) {
  Workload w;
  w.tables.push_back({0, "t", rows, 50.0});
  w.column_domain.push_back({0, 0, "a"});
  w.column_domain.push_back({1, 0, "b"});
  w.column_domain.push_back({2, 0, "c"});
  w.queries.push_back({0, {0, 1, 2}, {0}});
  return w;
}

}  // namespace

TEST_CASE("index vectors weigh key order and included columns") {
  Workload w = abc_workload();
  const FeatureDomain domain = FeatureDomain::of_workload(w);
  REQUIRE(domain.size() == 3);

  SECTION("key columns halve with position") {
    const Index z{0, 0, {1, 0}, {}, 1.0};  // key = [b, a]
    const FeatureVector v = index_vector(z, domain);
    CHECK(v == FeatureVector{0.5, 1.0, 0.0});
  }
  SECTION("included columns get the post-key weight") {
    const Index z{0, 0, {1, 0}, {2}, 1.0};  // key = [b, a], included {c}
    const FeatureVector v = index_vector(z, domain);
    CHECK(v == FeatureVector{0.5, 1.0, 0.25});
  }
  SECTION("an index outside the indexable domain is the zero vector") {
    Workload narrow = abc_workload();
    narrow.queries[0].indexable_columns = {0};  // only column a is indexable
    const FeatureDomain d2 = FeatureDomain::of_workload(narrow);
    const Index z{0, 0, {1}, {2}, 1.0};
    const FeatureVector v = index_vector(z, d2);
    CHECK(v == FeatureVector{0.0});
  }
  SECTION("weights strictly halve along the key, any length") {
    RngStream rng(2, "key-weights");
    for (int trial = 0; trial < 20; ++trial) {
      const int n = static_cast<int>(rng.uniform_int(1, 3));
      std::vector<int> key;
      std::vector<int> pool{0, 1, 2};
      for (int i = 0; i < n; ++i) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
        key.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      const FeatureVector v = index_vector(Index{0, 0, key, {}, 1.0}, domain);
      for (std::size_t j = 1; j < key.size(); ++j)
        CHECK(v[domain.position(key[j])] ==
              v[domain.position(key[j - 1])] / 2.0);
    }
  }
}

TEST_CASE("configuration vectors are element-wise maxima") {
  CHECK(config_vector({{1.0, 0.5, 0.0}, {0.25, 1.0, 0.0}}, 3) ==
        FeatureVector{1.0, 1.0, 0.0});
  CHECK(config_vector({{0.5, 0.25, 0.0}}, 3) == FeatureVector{0.5, 0.25, 0.0});
  CHECK(config_vector({{0.5, 0.25, 0.0}, {0.0, 0.0, 0.0}}, 3) ==
        FeatureVector{0.5, 0.25, 0.0});
  CHECK(config_vector({}, 3) == FeatureVector{0.0, 0.0, 0.0});

  SECTION("max-semilattice laws") {
    RngStream rng(9, "semilattice");
    for (int trial = 0; trial < 50; ++trial) {
      auto draw = [&] {
        FeatureVector v(4);
        for (double& x : v) x = rng.uniform();
        return v;
      };
      const FeatureVector a = draw(), b = draw(), c = draw();
      CHECK(config_vector({a, a}, 4) == a);
      CHECK(config_vector({a, b}, 4) == config_vector({b, a}, 4));
      CHECK(config_vector({config_vector({a, b}, 4), c}, 4) ==
            config_vector({a, config_vector({b, c}, 4)}, 4));
    }
  }
}

TEST_CASE("query vectors follow the size-and-candidacy weighting") {
  SECTION("one indexable column normalizes to a unit spike") {
    Workload w = abc_workload();
    w.queries[0].indexable_columns = {0};
    const FeatureDomain domain = FeatureDomain::of_workload(w);
    const FeatureVector v = query_vector(w.queries[0], domain, w);
    CHECK(v == FeatureVector{1.0});
  }
  SECTION("symmetric columns split evenly") {
    Workload w = abc_workload();
    w.queries[0].indexable_columns = {0, 1};
    const FeatureDomain domain = FeatureDomain::of_workload(w);
    const FeatureVector v = query_vector(w.queries[0], domain, w);
    CHECK(v[0] == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(v[1] == Catch::Approx(1.0 / std::sqrt(2.0)));
  }
  SECTION("bigger tables and more candidates raise the weight") {
    Workload w;
    w.tables.push_back({0, "big", 1024, 100.0});
    w.tables.push_back({1, "small", 2, 1.0});
    w.column_domain.push_back({0, 0, "a"});
    w.column_domain.push_back({1, 1, "b"});
    w.queries.push_back({0, {0, 1}, {0, 1}});
    // three candidates containing column 0, none containing column 1
    w.candidate_indexes.push_back({0, 0, {0}, {}, 1.0});
    w.candidate_indexes.push_back({1, 0, {0}, {}, 1.0});
    w.candidate_indexes.push_back({2, 0, {0}, {}, 1.0});

    const FeatureDomain domain = FeatureDomain::of_workload(w);
    const FeatureVector v = query_vector(w.queries[0], domain, w);
    const double raw0 = std::log2(1.0 + 1024.0) * 4.0;  // about 40
    const double raw1 = std::log2(1.0 + 2.0) * 1.0;     // about 1.585
    const double norm = std::sqrt(raw0 * raw0 + raw1 * raw1);
    CHECK(v[0] == Catch::Approx(raw0 / norm));
    CHECK(v[1] == Catch::Approx(raw1 / norm));
  }
}

TEST_CASE("coverage similarity matches the projected-ratio arithmetic") {
  Workload w = abc_workload(3);  // log2(1+3) = 2 for every column
  w.queries[0].indexable_columns = {0, 1};
  w.candidate_indexes.push_back({0, 0, {0}, {}, 1.0});  // key [a]
  w.candidate_indexes.push_back({1, 0, {1}, {}, 1.0});  // key [b]
  const FeatureDomain domain = FeatureDomain::of_workload(w);
  const Query& q = w.queries[0];

  SECTION("half-overlap gives one half") {
    const CoverageEstimate rho = coverage_similarity(
        w.candidate_indexes[0], Configuration{0, 1}, q, domain, w);
    CHECK(rho.rho_hat == Catch::Approx(0.5));
  }
  SECTION("self-similarity is one") {
    const CoverageEstimate rho = coverage_similarity(
        w.candidate_indexes[0], Configuration{0}, q, domain, w);
    CHECK(rho.rho_hat == Catch::Approx(1.0));
  }
  SECTION("overshooting ratios clamp to one") {
    Workload lopsided;
    lopsided.tables.push_back({0, "big", 1 << 20, 100.0});
    lopsided.tables.push_back({1, "tiny", 1, 1.0});
    lopsided.column_domain.push_back({0, 0, "a"});
    lopsided.column_domain.push_back({1, 1, "b"});
    lopsided.queries.push_back({0, {0, 1}, {0, 1}});
    lopsided.candidate_indexes.push_back({0, 0, {0}, {}, 1.0});   // key [a]
    lopsided.candidate_indexes.push_back({1, 1, {1}, {0}, 1.0});  // key [b], incl {a}
    const FeatureDomain d2 = FeatureDomain::of_workload(lopsided);
    const Query& q2 = lopsided.queries[0];

    const double raw = coverage_similarity_raw(lopsided.candidate_indexes[0],
                                               Configuration{1}, q2, d2,
                                               lopsided);
    REQUIRE(raw > 1.0);
    const CoverageEstimate rho = coverage_similarity(
        lopsided.candidate_indexes[0], Configuration{1}, q2, d2, lopsided);
    CHECK(rho.rho_hat == 1.0);
  }
  SECTION("an empty projected omega yields zero") {
    const CoverageEstimate rho = coverage_similarity(
        w.candidate_indexes[0], Configuration{}, q, domain, w);
    CHECK(rho.rho_hat == 0.0);
  }
  SECTION("similarity always lands in the unit interval") {
    RngStream rng(23, "sim-prop");
    GeneratorParams params;
    params.n_queries = 6;
    params.n_indexes = 12;
    for (int trial = 0; trial < 10; ++trial) {
      params.seed = rng.next_u64();
      auto [gw, model] = generate(params);
      CostOracle oracle(gw, model);
      const FeatureDomain gd = FeatureDomain::of_workload(gw);
      for (const Query& gq : gw.queries) {
        const Configuration omega_q = oracle.optimal_plan_indexes(gq);
        for (const Index& z :
             candidate_indexes_for_query(gq, gw.candidate_indexes)) {
          const double rho =
              coverage_similarity(z, omega_q, gq, gd, gw).rho_hat;
          CHECK(rho >= 0.0);
          CHECK(rho <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("estimated singleton costs interpolate the known bracket") {
  WhatIfCache cache;
  cache.put(0, Configuration{}, 100.0);
  cache.set_omega(0, Configuration{7, 8}, 60.0);

  SECTION("the interpolation endpoints and midpoint") {
    CHECK(estimated_singleton_cost(0, 7, cache, 0.5).first == 80.0);
    CHECK(estimated_singleton_cost(0, 7, cache, 0.0).first == 100.0);
    CHECK(estimated_singleton_cost(0, 7, cache, 1.0).first == 60.0);
  }
  SECTION("a cached true cost wins over the estimate") {
    cache.put(0, Configuration{7}, 72.0);
    const auto [cost, provenance] = estimated_singleton_cost(0, 7, cache, 0.5);
    CHECK(cost == 72.0);
    CHECK(provenance == CoverageEstimate::Provenance::exact);
  }
  SECTION("a missing omega cost is a state error") {
    WhatIfCache bare;
    bare.put(0, Configuration{}, 100.0);
    CHECK_THROWS_AS(estimated_singleton_cost(0, 7, bare, 0.5),
                    std::logic_error);
  }
  SECTION("estimates stay inside the bracket for any clamped coverage") {
    RngStream rng(29, "bracket");
    for (int trial = 0; trial < 100; ++trial) {
      const double rho = rng.uniform();
      const double estimate = estimated_singleton_cost(0, 7, cache, rho).first;
      CHECK(estimate >= 60.0);
      CHECK(estimate <= 100.0);
    }
  }
}
