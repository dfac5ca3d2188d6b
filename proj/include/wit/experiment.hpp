#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wit/costing.hpp"
#include "wit/model.hpp"
#include "wit/oracle.hpp"
#include "wit/search.hpp"
#include "wit/validate.hpp"
#include "wit/workload_io.hpp"

namespace wit {

/// Interception variant of a run: plain search, confidence-gated skipping
/// with or without coverage, randomized skipping, or mean-of-bounds returns.
struct Variant {
  enum class Kind { off, wii, wii_coverage, random_skip, mean_return };
  Kind kind = Kind::off;
  double skip_probability = 0.9;  // random_skip only

  std::string name() const {
    switch (kind) {
      case Kind::off: return "off";
      case Kind::wii: return "wii";
      case Kind::wii_coverage: return "wii_coverage";
      case Kind::random_skip: return "random_skip";
      case Kind::mean_return: return "mean_return";
    }
    return "?";
  }

  static Variant parse(const std::string& text) {
    Variant v;
    if (text == "off") v.kind = Kind::off;
    else if (text == "wii") v.kind = Kind::wii;
    else if (text == "wii_coverage") v.kind = Kind::wii_coverage;
    else if (text == "mean_return") v.kind = Kind::mean_return;
    else if (text.rfind("random_skip", 0) == 0) {
      v.kind = Kind::random_skip;
      const auto open = text.find('(');
      const auto close = text.find(')');
      if (open != std::string::npos && close != std::string::npos && close > open)
        v.skip_probability = std::stod(text.substr(open + 1, close - open - 1));
    } else {
      throw std::invalid_argument("unknown variant: " + text);
    }
    return v;
  }

  void apply(SearchOptions& opts) const {
    switch (kind) {
      case Kind::off:
        opts.wii_enabled = false;
        opts.coverage_enabled = false;
        opts.skip_policy = SkipPolicy::never;
        break;
      case Kind::wii:
        opts.wii_enabled = true;
        opts.skip_policy = SkipPolicy::confidence;
        break;
      case Kind::wii_coverage:
        opts.wii_enabled = true;
        opts.coverage_enabled = true;
        opts.skip_policy = SkipPolicy::confidence;
        break;
      case Kind::random_skip:
        opts.wii_enabled = true;
        opts.skip_policy = SkipPolicy::random;
        opts.random_skip_probability = skip_probability;
        break;
      case Kind::mean_return:
        opts.wii_enabled = true;
        opts.skip_policy = SkipPolicy::confidence;
        opts.return_on_skip = ReturnOnSkip::mean;
        break;
    }
  }
};

struct ExperimentConfig {
  // exactly one source: generator parameters or a workload file
  std::optional<GeneratorParams> generate_params;
  std::string workload_file;

  std::vector<Algorithm> algorithms{Algorithm::two_phase_greedy};
  std::vector<Variant> variants{Variant{}};
  std::vector<std::int64_t> budgets{500};  // -1 means unlimited
  std::vector<int> ks{2};
  std::vector<double> alphas{0.9};
  std::vector<double> storage_multipliers{0.0};  // 0 means unconstrained
  std::vector<std::uint64_t> seeds{1};
  double oracle_delay_ms = 0.0;
  std::string out_dir = ".";

  void validate() const {
    if (!generate_params && workload_file.empty())
      throw std::invalid_argument("experiment needs a workload source");
    if (algorithms.empty() || variants.empty() || budgets.empty() || ks.empty() ||
        alphas.empty() || storage_multipliers.empty() || seeds.empty())
      throw std::invalid_argument("experiment matrix has an empty dimension");
  }
};

struct RunRecord {
  std::string algorithm;
  std::string variant;
  std::int64_t budget = 0;  // -1 for unlimited
  int k = 0;
  double alpha = 0.0;
  double storage_multiplier = 0.0;
  std::uint64_t seed = 0;
  TuningReport report;
  double skipped_over_budget = 0.0;
  double total_ms = 0.0;
  std::string error;
};

inline SearchOptions options_for_cell(const Workload& w, Algorithm algorithm,
                                      const Variant& variant, std::int64_t budget,
                                      int k, double alpha, double storage_mult,
                                      std::uint64_t seed) {
  SearchOptions opts;
  opts.algorithm = algorithm;
  opts.budget = budget < 0 ? Budget::unlimited() : Budget::finite(budget);
  opts.alpha_threshold = alpha;
  opts.seed = seed;
  opts.constraints.cardinality_k = k;
  if (storage_mult > 0.0)
    opts.constraints.storage_limit_mb = storage_mult * w.total_table_size_mb();
  variant.apply(opts);
  return opts;
}

inline RunRecord run_single(const Workload& w, const CostModel& model,
                            Algorithm algorithm, const Variant& variant,
                            std::int64_t budget, int k, double alpha,
                            double storage_mult, std::uint64_t seed,
                            double oracle_delay_ms = 0.0) {
  RunRecord rec;
  rec.algorithm = to_string(algorithm);
  rec.variant = variant.name();
  rec.budget = budget;
  rec.k = k;
  rec.alpha = alpha;
  rec.storage_multiplier = storage_mult;
  rec.seed = seed;
  try {
    const SearchOptions opts = options_for_cell(w, algorithm, variant, budget, k,
                                                alpha, storage_mult, seed);
    CostOracle oracle(w, model);
    if (oracle_delay_ms > 0.0)
      oracle.set_artificial_delay(std::chrono::microseconds(
          static_cast<std::int64_t>(oracle_delay_ms * 1000.0)));
    const auto t0 = std::chrono::steady_clock::now();
    SearchResult result = tune(w, w.candidate_indexes, oracle, opts);
    rec.total_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    rec.report = std::move(result.report);
    if (budget > 0)
      rec.skipped_over_budget = static_cast<double>(rec.report.skipped_calls) /
                                static_cast<double>(budget);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string config_field(const Configuration& c) {
  std::string out;
  for (std::size_t i = 0; i < c.ids().size(); ++i) {
    if (i) out += '|';
    out += std::to_string(c.ids()[i]);
  }
  return out;
}

}  // namespace detail

inline const char* run_csv_header() {
  return "algorithm,variant,budget,k,alpha,storage_mult,seed,final_config,"
         "final_cost,improvement_pct,charged_calls,exempt_setup_calls,"
         "skipped_calls,cached_hits,exhausted_evals,issued_evals,"
         "missing_bound_events,phase1_charged_calls,phase1_skipped_calls,"
         "phase1_cached_hits,phase1_exhausted_evals,skipped_over_budget,"
         "bound_computations,mean_bound_time_ms,mean_what_if_time_ms,"
         "bound_time_ms,phase1_ms,phase2_ms,total_ms,notes,error";
}

inline std::string to_csv_row(const RunRecord& r) {
  using detail::format_double;
  std::ostringstream os;
  os << r.algorithm << ',' << r.variant << ',' << r.budget << ',' << r.k << ','
     << format_double(r.alpha) << ',' << format_double(r.storage_multiplier)
     << ',' << r.seed << ',' << detail::config_field(r.report.final_configuration)
     << ',' << format_double(r.report.final_cost) << ','
     << format_double(r.report.improvement_pct) << ',' << r.report.charged_calls
     << ',' << r.report.exempt_setup_calls << ',' << r.report.skipped_calls << ','
     << r.report.cached_hits << ',' << r.report.exhausted_evals << ','
     << r.report.issued_evals << ',' << r.report.missing_bound_events << ','
     << r.report.phase1_charged_calls << ',' << r.report.phase1_skipped_calls
     << ',' << r.report.phase1_cached_hits << ','
     << r.report.phase1_exhausted_evals << ','
     << format_double(r.skipped_over_budget) << ','
     << r.report.bound_computations << ','
     << format_double(r.report.mean_bound_time_ms()) << ','
     << format_double(r.report.mean_what_if_time_ms) << ','
     << format_double(r.report.bound_time_ms) << ','
     << format_double(r.report.phase1_ms) << ','
     << format_double(r.report.phase2_ms) << ',' << format_double(r.total_ms)
     << ',' << detail::csv_escape(r.report.notes) << ','
     << detail::csv_escape(r.error);
  return os.str();
}

/// Executes the full cross product of the experiment matrix, in a fixed
/// deterministic order. Per-cell failures land in the error column and the
/// sweep continues.
inline std::vector<RunRecord> run_sweep(const Workload& w, const CostModel& model,
                                        const ExperimentConfig& config) {
  config.validate();
  std::vector<RunRecord> rows;
  for (Algorithm algorithm : config.algorithms)
    for (const Variant& variant : config.variants)
      for (std::int64_t budget : config.budgets)
        for (int k : config.ks)
          for (double alpha : config.alphas)
            for (double storage : config.storage_multipliers)
              for (std::uint64_t seed : config.seeds)
                rows.push_back(run_single(w, model, algorithm, variant, budget,
                                          k, alpha, storage, seed,
                                          config.oracle_delay_ms));
  return rows;
}

inline void write_run_csv(const std::string& path,
                          const std::vector<RunRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << run_csv_header() << '\n';
  for (const RunRecord& r : rows) out << to_csv_row(r) << '\n';
}

inline void write_eval_log_csv(const std::string& path,
                               const std::vector<EvalRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "step,query_id,config,kind,cost,L,U,alpha,budget_left\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string();
  };
  for (const EvalRow& r : rows)
    out << r.step << ',' << r.query_id << ',' << detail::config_field(r.config)
        << ',' << to_string(r.kind) << ',' << detail::format_double(r.cost)
        << ',' << opt(r.lower) << ',' << opt(r.upper) << ',' << opt(r.alpha)
        << ',' << r.budget_left << '\n';
}

inline void write_validation_csvs(const std::string& dir, const Workload& w,
                                  const CostModel& model) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto [mono, submod] = collect_validation_points(w, model);

  {
    std::ofstream out(fs::path(dir) / "mono.csv");
    out << "query_id,config_small,config_large,cost_small,cost_large,holds\n";
    for (const MonoPoint& p : mono)
      out << p.query_id << ',' << detail::config_field(p.small) << ','
          << detail::config_field(p.large) << ','
          << detail::format_double(p.cost_small) << ','
          << detail::format_double(p.cost_large) << ','
          << (p.cost_large <=
                      p.cost_small + detail::relative_slack(p.cost_small)
                  ? 1
                  : 0)
          << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "submod.csv");
    out << "query_id,z,x,c_empty,c_z,c_x,c_xz,delta,holds\n";
    for (const SubmodPoint& p : submod)
      out << p.query_id << ',' << p.z << ',' << p.x << ','
          << detail::format_double(p.c_empty) << ','
          << detail::format_double(p.c_z) << ',' << detail::format_double(p.c_x)
          << ',' << detail::format_double(p.c_xz) << ','
          << detail::format_double(p.delta()) << ','
          << (p.delta() <= detail::relative_slack(p.c_empty) ? 1 : 0) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "coverage_err.csv");
    out << "query_id,index_id,rho_true,rho_hat,abs_err\n";
    const CoverageErrorSummary summary = coverage_error_distribution(w, model);
    for (const CoverageErrorPoint& p : summary.points)
      out << p.query_id << ',' << p.index_id << ','
          << detail::format_double(p.rho_true) << ','
          << detail::format_double(p.rho_hat) << ','
          << detail::format_double(p.abs_error) << '\n';
  }
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  ExperimentConfig config;
  if (doc.contains("generate"))
    config.generate_params = params_from_json(doc.at("generate"));
  if (doc.contains("workload_file"))
    config.workload_file = doc.at("workload_file").get<std::string>();

  if (doc.contains("algorithms")) {
    config.algorithms.clear();
    for (const auto& a : doc.at("algorithms")) {
      const std::string name = a.get<std::string>();
      if (name == "vanilla_greedy") config.algorithms.push_back(Algorithm::vanilla_greedy);
      else if (name == "two_phase_greedy") config.algorithms.push_back(Algorithm::two_phase_greedy);
      else if (name == "mcts") config.algorithms.push_back(Algorithm::mcts);
      else throw std::invalid_argument("unknown algorithm: " + name);
    }
  }
  if (doc.contains("variants")) {
    config.variants.clear();
    for (const auto& v : doc.at("variants"))
      config.variants.push_back(Variant::parse(v.get<std::string>()));
  }
  if (doc.contains("budgets")) {
    config.budgets.clear();
    for (const auto& b : doc.at("budgets")) {
      if (b.is_string() && (b == "inf" || b == "unlimited"))
        config.budgets.push_back(-1);
      else
        config.budgets.push_back(b.get<std::int64_t>());
    }
  }
  if (doc.contains("ks")) config.ks = doc.at("ks").get<std::vector<int>>();
  if (doc.contains("alphas"))
    config.alphas = doc.at("alphas").get<std::vector<double>>();
  if (doc.contains("storage_multipliers"))
    config.storage_multipliers =
        doc.at("storage_multipliers").get<std::vector<double>>();
  if (doc.contains("seeds"))
    config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  config.oracle_delay_ms = doc.value("oracle_delay_ms", 0.0);
  return config;
}

}  // namespace wit
