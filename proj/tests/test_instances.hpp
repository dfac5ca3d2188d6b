#pragma once

// Shared instance definitions for the regression and acceptance suites. The
// frozen constants in frozen.hpp are tied to these exact parameters.

#include <sstream>
#include <string>
#include <vector>

#include "wit/experiment.hpp"
#include "wit/oracle.hpp"

namespace wit_test {

// 4 queries, 6 indexes: small enough for exhaustive cross-checks
inline wit::GeneratorParams tiny_params(std::uint64_t seed,
                                        double violation_probability) {
  wit::GeneratorParams params;
  params.seed = seed;
  params.n_queries = 4;
  params.n_tables = 2;
  params.n_indexes = 6;
  params.slots_per_query = 2;
  params.violation_probability = violation_probability;
  params.violation_magnitude = 0.3;
  return params;
}

// the desk-scale tuning instance: 24 queries over 48 candidate indexes
inline wit::GeneratorParams reference_params(std::uint64_t seed) {
  wit::GeneratorParams params;
  params.seed = seed;
  params.n_queries = 24;
  params.n_tables = 6;
  params.n_indexes = 48;
  params.slots_per_query = 3;
  params.violation_probability = 0.0;
  params.violation_magnitude = 0.0;
  return params;
}

// dense instance for violation-frequency statistics; sized so the validation
// sweep yields several thousand submodularity points
inline wit::GeneratorParams violation_params(std::uint64_t seed) {
  wit::GeneratorParams params;
  params.seed = seed;
  params.n_queries = 50;
  params.n_tables = 3;
  params.n_indexes = 900;
  params.slots_per_query = 3;
  params.violation_probability = 0.15;
  params.violation_magnitude = 0.5;
  return params;
}

// content digest of sweep rows with the timing columns blanked out
inline std::uint64_t sweep_digest(const std::vector<wit::RunRecord>& rows) {
  std::vector<std::size_t> timing_columns;
  {
    std::stringstream header(wit::run_csv_header());
    std::string field;
    for (std::size_t i = 0; std::getline(header, field, ','); ++i)
      if (field.find("_ms") != std::string::npos) timing_columns.push_back(i);
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  for (const wit::RunRecord& row : rows) {
    std::stringstream ss(wit::to_csv_row(row));
    std::string field;
    for (std::size_t i = 0; std::getline(ss, field, ','); ++i)
      if (std::find(timing_columns.begin(), timing_columns.end(), i) ==
          timing_columns.end())
        mix(field);
  }
  return h;
}

}  // namespace wit_test
