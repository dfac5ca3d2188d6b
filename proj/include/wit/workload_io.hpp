#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "wit/model.hpp"
#include "wit/oracle.hpp"

namespace wit {

/// JSON document with top-level arrays `tables`, `columns`, `queries`,
/// `indexes` and an optional `cost_model` section. Doubles round-trip
/// bit-exactly through nlohmann's shortest-representation printer.
inline nlohmann::json to_json(const Workload& w) {
  nlohmann::json doc;
  doc["tables"] = nlohmann::json::array();
  for (const Table& t : w.tables)
    doc["tables"].push_back({{"id", t.id},
                             {"name", t.name},
                             {"row_count", t.row_count},
                             {"size_mb", t.size_mb}});
  doc["columns"] = nlohmann::json::array();
  for (const Column& c : w.column_domain)
    doc["columns"].push_back(
        {{"id", c.id}, {"table_id", c.table_id}, {"name", c.name}});
  doc["queries"] = nlohmann::json::array();
  for (const Query& q : w.queries)
    doc["queries"].push_back({{"id", q.id},
                              {"indexable_columns", q.indexable_columns},
                              {"referenced_tables", q.referenced_tables}});
  doc["indexes"] = nlohmann::json::array();
  for (const Index& z : w.candidate_indexes)
    doc["indexes"].push_back({{"id", z.id},
                              {"table_id", z.table_id},
                              {"key_columns", z.key_columns},
                              {"included_columns", z.included_columns},
                              {"size_mb", z.size_mb}});
  return doc;
}

inline nlohmann::json to_json(const CostModel& model) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t qid = 0; qid < model.per_query.size(); ++qid) {
    const QueryCostModel& qm = model.per_query[qid];
    nlohmann::json entry;
    entry["query_id"] = qid;
    entry["base_cost"] = qm.base_cost;
    entry["slots"] = nlohmann::json::array();
    for (const auto& slot : qm.slots) {
      nlohmann::json benefits = nlohmann::json::array();
      for (const auto& [z, b] : slot)
        benefits.push_back({{"index_id", z}, {"benefit", b}});
      entry["slots"].push_back({{"benefits", benefits}});
    }
    entry["violation_pairs"] = nlohmann::json::array();
    for (const auto& [pair, bonus] : qm.violation_pairs)
      entry["violation_pairs"].push_back(
          {{"a", pair.first}, {"b", pair.second}, {"bonus", bonus}});
    out.push_back(entry);
  }
  return out;
}

inline nlohmann::json to_json(const Workload& w, const CostModel& model) {
  nlohmann::json doc = to_json(w);
  doc["cost_model"] = to_json(model);
  return doc;
}

inline Workload workload_from_json(const nlohmann::json& doc) {
  Workload w;
  for (const auto& jt : doc.at("tables")) {
    Table t;
    t.id = jt.at("id").get<int>();
    t.name = jt.at("name").get<std::string>();
    t.row_count = jt.at("row_count").get<std::int64_t>();
    t.size_mb = jt.at("size_mb").get<double>();
    w.tables.push_back(t);
  }
  for (const auto& jc : doc.at("columns")) {
    Column c;
    c.id = jc.at("id").get<int>();
    c.table_id = jc.at("table_id").get<int>();
    c.name = jc.at("name").get<std::string>();
    w.column_domain.push_back(c);
  }
  for (const auto& jq : doc.at("queries")) {
    Query q;
    q.id = jq.at("id").get<int>();
    q.indexable_columns = jq.at("indexable_columns").get<std::vector<int>>();
    q.referenced_tables = jq.at("referenced_tables").get<std::vector<int>>();
    w.queries.push_back(q);
  }
  for (const auto& jz : doc.at("indexes")) {
    Index z;
    z.id = jz.at("id").get<int>();
    z.table_id = jz.at("table_id").get<int>();
    z.key_columns = jz.at("key_columns").get<std::vector<int>>();
    z.included_columns = jz.at("included_columns").get<std::vector<int>>();
    z.size_mb = jz.at("size_mb").get<double>();
    w.candidate_indexes.push_back(z);
  }
  validate_workload(w);
  return w;
}

inline CostModel cost_model_from_json(const nlohmann::json& section,
                                      std::size_t n_queries) {
  CostModel model;
  model.per_query.resize(n_queries);
  for (const auto& jq : section) {
    const auto qid = jq.at("query_id").get<std::size_t>();
    if (qid >= n_queries)
      throw std::invalid_argument("cost model references unknown query");
    QueryCostModel& qm = model.per_query[qid];
    qm.base_cost = jq.at("base_cost").get<double>();
    for (const auto& js : jq.at("slots")) {
      std::map<int, double> slot;
      for (const auto& jb : js.at("benefits"))
        slot[jb.at("index_id").get<int>()] = jb.at("benefit").get<double>();
      qm.slots.push_back(std::move(slot));
    }
    for (const auto& jp : jq.at("violation_pairs")) {
      const int a = jp.at("a").get<int>();
      const int b = jp.at("b").get<int>();
      qm.violation_pairs[{std::min(a, b), std::max(a, b)}] =
          jp.at("bonus").get<double>();
    }
  }
  return model;
}

inline std::pair<Workload, CostModel> instance_from_json(const nlohmann::json& doc) {
  Workload w = workload_from_json(doc);
  if (!doc.contains("cost_model"))
    throw std::invalid_argument("document has no cost_model section");
  CostModel model = cost_model_from_json(doc.at("cost_model"), w.queries.size());
  return {std::move(w), std::move(model)};
}

inline void save_instance(const std::string& path, const Workload& w,
                          const CostModel& model) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << to_json(w, model).dump(2) << '\n';
}

inline std::pair<Workload, CostModel> load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  nlohmann::json doc;
  in >> doc;
  return instance_from_json(doc);
}

inline GeneratorParams params_from_json(const nlohmann::json& doc) {
  GeneratorParams p;
  p.seed = doc.value("seed", p.seed);
  p.n_queries = doc.value("n_queries", p.n_queries);
  p.n_tables = doc.value("n_tables", p.n_tables);
  p.n_indexes = doc.value("n_indexes", p.n_indexes);
  p.slots_per_query = doc.value("slots_per_query", p.slots_per_query);
  p.violation_probability =
      doc.value("violation_probability", p.violation_probability);
  p.violation_magnitude = doc.value("violation_magnitude", p.violation_magnitude);
  return p;
}

/// Order-stable content digest of a generated instance (FNV-1a over the
/// canonical JSON dump); used by determinism checks and frozen regressions.
inline std::uint64_t instance_digest(const Workload& w, const CostModel& model) {
  const std::string dump = to_json(w, model).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : dump) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace wit
