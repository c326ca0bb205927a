#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fairpo/counterfactual.hpp"
#include "fairpo/dgp.hpp"
#include "fairpo/mitigation.hpp"

namespace fairpo {

struct SweepConfig {
  std::vector<double> alphas{-0.5, 0.0, 0.5};
  std::vector<double> betas{0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
  std::vector<double> gammas{0.2};
  std::size_t n = 100000;
  std::size_t repeats = 20;
  std::uint64_t master_seed = 42;
  std::vector<std::string> evaluators{"statistical", "causal_pre", "causal_post"};
  std::size_t M = 10;
  std::size_t workers = 1;

  void validate() const {
    if (alphas.empty() || betas.empty() || gammas.empty())
      throw std::invalid_argument("sweep grid must be nonempty");
    if (n == 0 || repeats == 0 || M == 0 || workers == 0)
      throw std::invalid_argument("n, repeats, M and workers must be positive");
    if (repeats < 2) throw std::invalid_argument("repeats >= 2 required for CIs");
    for (const auto& e : evaluators)
      if (e != "statistical" && e != "causal_pre" && e != "causal_post")
        throw std::invalid_argument("unknown evaluator: " + e);
    if (evaluators.empty()) throw std::invalid_argument("no evaluators selected");
  }
};

struct SweepRow {
  double alpha = 0, beta = 0, gamma = 0;
  std::string evaluator;
  std::string metric;
  double mean = 0, ci_lo = 0, ci_hi = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> failures;  // per-cell error messages

  const SweepRow& at(double alpha, double beta, double gamma,
                     const std::string& evaluator) const {
    for (const auto& r : rows)
      if (r.alpha == alpha && r.beta == beta && r.gamma == gamma &&
          r.evaluator == evaluator)
        return r;
    throw std::invalid_argument("no sweep row for the requested cell");
  }
};

namespace detail {

struct MeanCi {
  double mean = 0, ci_lo = 0, ci_hi = 0;
};

inline MeanCi mean_ci(const std::vector<double>& values) {
  MeanCi out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = values.size() > 1
                        ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                        : 0.0;
  const double half = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  out.ci_lo = out.mean - half;
  out.ci_hi = out.mean + half;
  return out;
}

// parity estimate for one cohort under one evaluator
inline double evaluate_parity(const SyntheticCohort& cohort, const std::string& evaluator,
                              std::size_t M, std::uint64_t seed) {
  if (evaluator == "statistical") {
    double mean[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      mean[cohort.a[i]] += cohort.y_obs[i];
      cnt[cohort.a[i]]++;
    }
    if (cnt[0] == 0 || cnt[1] == 0)
      throw std::runtime_error("statistical evaluator: a group is empty");
    return mean[1] / static_cast<double>(cnt[1]) - mean[0] / static_cast<double>(cnt[0]);
  }
  DataTable table = cohort_to_observed_table(cohort);
  std::vector<StageSpec> stages;
  if (evaluator == "causal_pre") {
    stages.resize(2);
    stages[0].name = "S";
    stages[0].outcome_col = "s";
    stages[0].predictor_cols = {"x"};
    stages[1].name = "Y";
    stages[1].outcome_col = "y";
    stages[1].predictor_cols = {"x", "s"};
  } else {  // causal_post: the interview outcome is held fixed as observed
    stages.resize(1);
    stages[0].name = "Y";
    stages[0].outcome_col = "y";
    stages[0].predictor_cols = {"x", "s"};
  }
  ImputedCohort imputed = impute_sequential(table, stages, M, seed);
  return total_effect(imputed, "Y").estimate;
}

}  // namespace detail

// Grid x repeats evaluation of group-attribute effect estimates. Each
// (cell, repeat) derives its own seed, so parallel and serial execution
// agree bit-for-bit.
inline SweepResult run_evaluation_sweep(const SweepConfig& config) {
  config.validate();

  struct Cell {
    double alpha, beta, gamma;
    std::size_t index;
  };
  std::vector<Cell> cells;
  for (double a : config.alphas)
    for (double b : config.betas)
      for (double g : config.gammas)
        cells.push_back({a, b, g, cells.size()});

  struct Task {
    std::size_t cell, rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t r = 0; r < config.repeats; ++r) tasks.push_back({c, r});

  // estimates[cell][evaluator_idx][rep]; NaN marks a failed task
  std::vector<std::vector<std::vector<double>>> estimates(
      cells.size(),
      std::vector<std::vector<double>>(config.evaluators.size(),
                                       std::vector<double>(config.repeats,
                                                           std::numeric_limits<double>::quiet_NaN())));
  std::vector<std::string> failures(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto& task = tasks[t];
      const auto& cell = cells[task.cell];
      try {
        HiringParams params;
        params.alpha = cell.alpha;
        params.beta = cell.beta;
        params.gamma = cell.gamma;
        params.n = config.n;
        params.seed = mix_seed(config.master_seed, 0xCE11, cell.index, task.rep);
        SyntheticCohort cohort = generate(params);
        for (std::size_t e = 0; e < config.evaluators.size(); ++e)
          estimates[task.cell][e][task.rep] = detail::evaluate_parity(
              cohort, config.evaluators[e], config.M,
              mix_seed(config.master_seed, 0x14B5, cell.index, task.rep, e));
      } catch (const std::exception& ex) {
        failures[t] = "cell alpha=" + detail::format_number(cell.alpha) +
                      " beta=" + detail::format_number(cell.beta) +
                      " gamma=" + detail::format_number(cell.gamma) +
                      " rep=" + std::to_string(task.rep) + ": " + ex.what();
      }
    }
  };
  if (config.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < config.workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  for (const auto& f : failures)
    if (!f.empty()) result.failures.push_back(f);
  for (const auto& cell : cells)
    for (std::size_t e = 0; e < config.evaluators.size(); ++e) {
      std::vector<double> vals;
      for (double v : estimates[cell.index][e])
        if (!std::isnan(v)) vals.push_back(v);
      if (vals.empty()) continue;  // cell failed entirely; recorded above
      const auto mc = detail::mean_ci(vals);
      SweepRow row;
      row.alpha = cell.alpha;
      row.beta = cell.beta;
      row.gamma = cell.gamma;
      row.evaluator = config.evaluators[e];
      row.metric = "parity";
      row.mean = mc.mean;
      row.ci_lo = mc.ci_lo;
      row.ci_hi = mc.ci_hi;
      result.rows.push_back(std::move(row));
    }
  std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.alpha, a.beta, a.gamma, a.evaluator, a.metric) <
           std::tie(b.alpha, b.beta, b.gamma, b.evaluator, b.metric);
  });
  return result;
}

inline void emit_plot_data(const SweepResult& result, const std::string& path,
                           const std::string& format = "csv") {
  if (format == "csv") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    csv::write_row(out, {"alpha", "beta", "gamma", "evaluator", "metric", "mean",
                         "ci_lo", "ci_hi"});
    for (const auto& r : result.rows)
      csv::write_row(out, {detail::format_number(r.alpha), detail::format_number(r.beta),
                           detail::format_number(r.gamma), r.evaluator, r.metric,
                           detail::format_number(r.mean), detail::format_number(r.ci_lo),
                           detail::format_number(r.ci_hi)});
  } else if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : result.rows)
      rows.push_back({{"alpha", r.alpha},
                      {"beta", r.beta},
                      {"gamma", r.gamma},
                      {"evaluator", r.evaluator},
                      {"metric", r.metric},
                      {"mean", r.mean},
                      {"ci_lo", r.ci_lo},
                      {"ci_hi", r.ci_hi}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
  } else {
    throw std::invalid_argument("unknown plot format: " + format);
  }
}

// ---------------------------------------------------------------------------
// Mitigation benchmark (Table-1-shaped).

struct BenchmarkConfig {
  double alpha = 0.0;
  double beta = 1.0;  // reproduces the published disparity level (see README)
  double gamma = 0.2;
  std::size_t n = 100000;
  std::size_t M = 10;
  std::size_t repeats = 5;
  std::uint64_t master_seed = 42;
  double prem_eta = 2.1;
  int baseline_arm = 0;
  std::vector<std::string> methods{"none", "rew",        "prem",
                                   "roc",  "causal_pre", "causal_post"};

  void validate() const {
    if (n == 0 || M == 0 || repeats == 0)
      throw std::invalid_argument("n, M and repeats must be positive");
    if (methods.empty()) throw std::invalid_argument("no methods selected");
  }
};

inline MitigationMethod method_by_name(const std::string& name, const BenchmarkConfig& cfg) {
  if (name == "none") return MitigationMethod::plain();
  if (name == "rew") return MitigationMethod::reweighting();
  if (name == "prem") return MitigationMethod::prejudice(cfg.prem_eta);
  if (name == "roc") return MitigationMethod::reject();
  if (name == "causal_pre")
    return MitigationMethod::causal(CausalTiming::pre, cfg.baseline_arm);
  if (name == "causal_post")
    return MitigationMethod::causal(CausalTiming::post, cfg.baseline_arm);
  throw std::invalid_argument(
      "unknown method '" + name +
      "'; valid: none, rew, prem, roc, causal_pre, causal_post");
}

struct MethodSummary {
  std::string method;
  std::map<std::string, MetricValue> stat;    // includes accuracy
  std::map<std::string, MetricValue> causal;  // the four causal violations
  double accuracy = 0.0;

  const MetricValue& stat_at(const std::string& name) const {
    auto it = stat.find(name);
    if (it == stat.end()) throw std::invalid_argument("no stat metric: " + name);
    return it->second;
  }
  const MetricValue& causal_at(const std::string& name) const {
    auto it = causal.find(name);
    if (it == causal.end()) throw std::invalid_argument("no causal metric: " + name);
    return it->second;
  }
};

struct BenchmarkResult {
  BenchmarkConfig config;
  std::vector<MethodSummary> methods;
  MetricValue data_causal_parity;     // oracle, ground-truth arms
  MetricValue imputed_causal_parity;  // sequential-imputation estimate

  const MethodSummary& at(const std::string& method) const {
    for (const auto& m : methods)
      if (m.method == method) return m;
    throw std::invalid_argument("no benchmark summary for method: " + method);
  }
};

namespace detail {

inline MetricValue aggregate_metric(const std::vector<double>& reps) {
  MetricValue mv;
  if (reps.empty()) {
    mv.undefined_reason = "undefined in every repeat";
    return mv;
  }
  const auto mc = mean_ci(reps);
  mv.value = mc.mean;
  mv.ci95 = {mc.ci_lo, mc.ci_hi};
  mv.n_effective = reps.size();
  return mv;
}

}  // namespace detail

inline BenchmarkResult run_mitigation_benchmark(const BenchmarkConfig& config,
                                                const TrainConfig& model_config = {}) {
  config.validate();
  BenchmarkResult result;
  result.config = config;

  // per method: metric name -> defined values across repeats
  std::vector<std::map<std::string, std::vector<double>>> stat_acc(config.methods.size());
  std::vector<std::map<std::string, std::vector<double>>> causal_acc(config.methods.size());
  std::vector<double> data_cp, imputed_cp;

  for (std::size_t rep = 0; rep < config.repeats; ++rep) {
    HiringParams params;
    params.alpha = config.alpha;
    params.beta = config.beta;
    params.gamma = config.gamma;
    params.n = config.n;
    params.seed = mix_seed(config.master_seed, 0xBE4C, rep);
    SyntheticCohort cohort = generate(params);
    data_cp.push_back(oracle_effects(cohort).causal_parity_pre);

    BenchmarkContext ctx =
        make_benchmark_context(std::move(cohort), config.M, mix_seed(config.master_seed, 0xC02E, rep));
    imputed_cp.push_back(total_effect(ctx.imputed, "Y").estimate);

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      MitigationRun run =
          train_mitigated(ctx, method_by_name(config.methods[mi], config), model_config);
      for (const auto& [name, mv] : run.stat.metrics)
        if (mv.defined()) stat_acc[mi][name].push_back(mv.value);
      for (const auto& [name, mv] : run.causal.metrics)
        if (mv.defined()) causal_acc[mi][name].push_back(mv.value);
    }
  }

  result.data_causal_parity = detail::aggregate_metric(data_cp);
  result.imputed_causal_parity = detail::aggregate_metric(imputed_cp);
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    MethodSummary summary;
    summary.method = config.methods[mi];
    for (const auto& [name, vals] : stat_acc[mi])
      summary.stat[name] = detail::aggregate_metric(vals);
    for (const auto& [name, vals] : causal_acc[mi])
      summary.causal[name] = detail::aggregate_metric(vals);
    summary.accuracy = summary.stat_at("accuracy").value;
    result.methods.push_back(std::move(summary));
  }
  return result;
}

inline void write_benchmark_csv(const BenchmarkResult& result, std::ostream& out,
                                const std::string& domain = "hiring") {
  write_benchmark_header(out);
  auto emit = [&](const std::string& method, const std::string& family,
                  const std::string& metric, const MetricValue& mv, double accuracy) {
    csv::write_row(out, {method, domain, family, metric,
                         mv.defined() ? detail::format_number(mv.value) : "",
                         mv.ci95 ? detail::format_number(mv.ci95->first) : "",
                         mv.ci95 ? detail::format_number(mv.ci95->second) : "",
                         detail::format_number(accuracy)});
  };
  emit("data", "causal", "causal_parity", result.data_causal_parity, 0.0);
  emit("imputed", "causal", "causal_parity", result.imputed_causal_parity, 0.0);
  for (const auto& m : result.methods) {
    for (const auto& [name, mv] : m.stat)
      if (name != "accuracy") emit(m.method, "statistical", name, mv, m.accuracy);
    for (const auto& [name, mv] : m.causal) emit(m.method, "causal", name, mv, m.accuracy);
  }
}

inline void write_benchmark_csv(const BenchmarkResult& result, const std::string& path,
                                const std::string& domain = "hiring") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_benchmark_csv(result, out, domain);
}

}  // namespace fairpo
