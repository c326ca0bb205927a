#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fairpo/models.hpp"
#include "fairpo/rng.hpp"
#include "fairpo/tabular.hpp"

namespace fairpo {

// "If the counterfactual gate_col != gate_value, force this stage's
// counterfactual to forced_outcome."
struct GateRule {
  std::string gate_col;
  double gate_value = 1.0;
  double forced_outcome = 0.0;
};

struct StageSpec {
  std::string name;
  std::string outcome_col;
  std::vector<std::string> predictor_cols;
  std::vector<int> hidden;  // empty = logistic, otherwise MLP hidden sizes
  std::optional<GateRule> gate;
};

struct ImputedCohort {
  DataTable table;
  std::vector<StageSpec> stages;
  std::size_t M = 10;
  std::uint64_t seed = 0;
  // draws[stage][arm]: n x M binary draws
  std::vector<std::array<Eigen::MatrixXd, 2>> draws;
  std::vector<nlohmann::json> model_summaries;  // one per stage

  int stage_index(const std::string& name) const {
    for (std::size_t k = 0; k < stages.size(); ++k)
      if (stages[k].name == name) return static_cast<int>(k);
    return -1;
  }
  const std::array<Eigen::MatrixXd, 2>& stage_draws(const std::string& name) const {
    int k = stage_index(name);
    if (k < 0) throw std::invalid_argument("unknown stage: " + name);
    return draws[static_cast<std::size_t>(k)];
  }
};

namespace detail {

inline Eigen::VectorXd column_values(const Column& c, std::size_t n) {
  if (c.is_categorical())
    throw std::invalid_argument("predictor column '" + c.spec.name +
                                "' must be encoded before imputation");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (c.missing(r))
      throw std::invalid_argument("missing value in predictor column '" +
                                  c.spec.name + "'");
    v[static_cast<Eigen::Index>(r)] = c.num[r];
  }
  return v;
}

}  // namespace detail

// Sequential multiple imputation of both potential-outcome arms. Each stage
// model is fit once on observed data with the group attribute as a feature;
// per arm the model is evaluated at A=a with earlier-stage counterfactual
// draws substituted, chaining draw m of stage k into draw m of stage k+1.
// A single uniform per (row, stage, m) is shared between the two arms, so
// the factual arm reproduces the observed pathway exactly and a null cohort
// yields zero individual-level effects.
inline ImputedCohort impute_sequential(const DataTable& table,
                                       const std::vector<StageSpec>& stages,
                                       std::size_t M, std::uint64_t seed,
                                       const TrainConfig& model_config = {}) {
  if (stages.empty()) throw std::invalid_argument("impute_sequential: no stages");
  if (M == 0) throw std::invalid_argument("impute_sequential: M must be positive");
  const Column* gcol = table.group_column();
  if (!gcol) throw std::invalid_argument("impute_sequential: no group column");
  const std::size_t n = table.n;
  Eigen::VectorXd group_vals = detail::column_values(*gcol, n);

  // stage reference checks: predictors may name table columns or earlier stages
  for (std::size_t k = 0; k < stages.size(); ++k) {
    for (const auto& pc : stages[k].predictor_cols) {
      bool earlier = false;
      for (std::size_t j = 0; j < k; ++j)
        if (stages[j].outcome_col == pc) earlier = true;
      for (std::size_t j = k; j < stages.size(); ++j)
        if (stages[j].outcome_col == pc)
          throw std::invalid_argument("stage '" + stages[k].name +
                                      "' predictor '" + pc +
                                      "' references a later or current stage");
      if (!earlier && table.col_index(pc) < 0)
        throw std::invalid_argument("stage '" + stages[k].name +
                                    "' references unknown column '" + pc + "'");
    }
  }

  ImputedCohort out;
  out.table = table;
  out.stages = stages;
  out.M = M;
  out.seed = seed;
  out.draws.resize(stages.size());

  for (std::size_t k = 0; k < stages.size(); ++k) {
    const StageSpec& stage = stages[k];
    const Column& ocol = table.col(stage.outcome_col);
    Eigen::VectorXd observed = detail::column_values(ocol, n);
    detail::check_binary_labels(observed);

    const std::size_t p = stage.predictor_cols.size();
    Eigen::MatrixXd fit_design(n, p + 1);
    for (std::size_t j = 0; j < p; ++j)
      fit_design.col(static_cast<Eigen::Index>(j)) =
          detail::column_values(table.col(stage.predictor_cols[j]), n);
    fit_design.col(static_cast<Eigen::Index>(p)) = group_vals;

    std::vector<std::string> fnames = stage.predictor_cols;
    fnames.push_back(gcol->spec.name);

    GlmModel glm;
    MlpModel mlp;
    const bool use_mlp = !stage.hidden.empty();
    if (use_mlp) {
      TrainConfig cfg = model_config;
      cfg.seed = mix_seed(seed, 0xf17ull, k);
      mlp = fit_mlp(fit_design, observed, stage.hidden, cfg, fnames);
      out.model_summaries.push_back(to_json(mlp, cfg));
    } else {
      glm = fit_logistic(fit_design, observed, nullptr, model_config, fnames);
      if (!glm.converged)
        throw std::runtime_error("stage '" + stage.name +
                                 "' model failed to converge");
      out.model_summaries.push_back(to_json(glm, model_config));
    }

    // which predictors are earlier-stage outcomes (substituted per arm/draw)
    std::vector<int> stage_of_predictor(p, -1);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t s = 0; s < k; ++s)
        if (stages[s].outcome_col == stage.predictor_cols[j])
          stage_of_predictor[j] = static_cast<int>(s);

    int gate_stage = -1;
    const Column* gate_col = nullptr;
    if (stage.gate) {
      for (std::size_t s = 0; s < k; ++s)
        if (stages[s].outcome_col == stage.gate->gate_col) gate_stage = static_cast<int>(s);
      if (gate_stage < 0) gate_col = &table.col(stage.gate->gate_col);
      if (stage.gate->forced_outcome != 0.0 && stage.gate->forced_outcome != 1.0)
        throw std::invalid_argument("gate forced_outcome must be binary");
    }

    for (int arm = 0; arm < 2; ++arm)
      out.draws[k][static_cast<std::size_t>(arm)] = Eigen::MatrixXd(n, M);

    Eigen::MatrixXd eval = fit_design;
    for (std::size_t m = 0; m < M; ++m) {
      // shared uniforms couple the two arms for this (stage, draw) pair
      Rng rng(mix_seed(seed, k, m));
      Eigen::VectorXd u(static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r)
        u[static_cast<Eigen::Index>(r)] = rng.uniform();

      for (int arm = 0; arm < 2; ++arm) {
        for (std::size_t j = 0; j < p; ++j)
          eval.col(static_cast<Eigen::Index>(j)) =
              stage_of_predictor[j] >= 0
                  ? out.draws[static_cast<std::size_t>(stage_of_predictor[j])]
                        [static_cast<std::size_t>(arm)]
                            .col(static_cast<Eigen::Index>(m))
                  : fit_design.col(static_cast<Eigen::Index>(j));
        eval.col(static_cast<Eigen::Index>(p)).setConstant(static_cast<double>(arm));
        Eigen::VectorXd prob =
            use_mlp ? predict_proba(mlp, eval) : predict_proba(glm, eval);

        auto& dm = out.draws[k][static_cast<std::size_t>(arm)];
        for (std::size_t r = 0; r < n; ++r) {
          const auto ri = static_cast<Eigen::Index>(r);
          double v = u[ri] < prob[ri] ? 1.0 : 0.0;
          if (stage.gate) {
            const double gv =
                gate_stage >= 0
                    ? out.draws[static_cast<std::size_t>(gate_stage)]
                          [static_cast<std::size_t>(arm)](ri, static_cast<Eigen::Index>(m))
                    : gate_col->num[r];
            if (gv != stage.gate->gate_value) v = stage.gate->forced_outcome;
          }
          // consistency: the factual arm keeps the observed value
          if (group_vals[ri] == static_cast<double>(arm)) v = observed[ri];
          dm(ri, static_cast<Eigen::Index>(m)) = v;
        }
      }
    }
  }
  return out;
}

struct TotalEffect {
  double estimate = 0.0;
  double between_imputation_sd = 0.0;
  std::vector<double> per_imputation;  // one mean difference per m
};

inline TotalEffect total_effect(const ImputedCohort& imputed, const std::string& final_stage) {
  const auto& arms = imputed.stage_draws(final_stage);
  const std::size_t n = imputed.table.n;
  if (n == 0) throw std::invalid_argument("total_effect: empty cohort");
  TotalEffect te;
  for (std::size_t m = 0; m < imputed.M; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    te.per_imputation.push_back((arms[1].col(mi) - arms[0].col(mi)).mean());
    te.estimate += te.per_imputation.back();
  }
  te.estimate /= static_cast<double>(imputed.M);
  if (imputed.M > 1) {
    double ss = 0.0;
    for (double v : te.per_imputation) ss += (v - te.estimate) * (v - te.estimate);
    te.between_imputation_sd = std::sqrt(ss / static_cast<double>(imputed.M - 1));
  }
  return te;
}

struct EffectBin {
  double lo = 0.0, hi = 0.0;  // x range covered by the bin
  std::size_t count = 0;
  double effect = 0.0;
  bool unstable = false;  // fewer than 30 rows
};

struct ConditionalEffect {
  std::vector<EffectBin> bins;

  double weighted_average() const {
    double num = 0.0, den = 0.0;
    for (const auto& b : bins) {
      num += b.effect * static_cast<double>(b.count);
      den += static_cast<double>(b.count);
    }
    return num / den;
  }
};

// Quantile bins over x_col: rows are sorted by x and split into n_bins
// contiguous near-equal chunks, so the bins partition the cohort and the
// count-weighted bin average reproduces total_effect exactly.
inline ConditionalEffect conditional_effect(const ImputedCohort& imputed,
                                            const std::string& final_stage,
                                            const std::string& x_col,
                                            std::size_t n_bins = 10) {
  const auto& arms = imputed.stage_draws(final_stage);
  const std::size_t n = imputed.table.n;
  if (n == 0) throw std::invalid_argument("conditional_effect: empty cohort");
  if (n_bins == 0 || n_bins > n)
    throw std::invalid_argument("conditional_effect: bad n_bins");
  Eigen::VectorXd x = detail::column_values(imputed.table.col(x_col), n);
  Eigen::VectorXd row_effect =
      (arms[1] - arms[0]).rowwise().mean();

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ai = static_cast<Eigen::Index>(a), bi = static_cast<Eigen::Index>(b);
    return x[ai] != x[bi] ? x[ai] < x[bi] : a < b;
  });

  ConditionalEffect ce;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t begin = b * n / n_bins;
    const std::size_t end = (b + 1) * n / n_bins;
    if (begin == end) continue;
    EffectBin bin;
    bin.count = end - begin;
    bin.lo = x[static_cast<Eigen::Index>(order[begin])];
    bin.hi = x[static_cast<Eigen::Index>(order[end - 1])];
    for (std::size_t i = begin; i < end; ++i)
      bin.effect += row_effect[static_cast<Eigen::Index>(order[i])];
    bin.effect /= static_cast<double>(bin.count);
    bin.unstable = bin.count < 30;
    ce.bins.push_back(bin);
  }
  return ce;
}

// ---------------------------------------------------------------------------
// Persistence: one CSV per arm (id,stage,arm,m,value) plus a JSON manifest.

inline nlohmann::json imputed_manifest(const ImputedCohort& imputed) {
  nlohmann::json j;
  j["M"] = imputed.M;
  j["seed"] = imputed.seed;
  nlohmann::json stages = nlohmann::json::array();
  for (std::size_t k = 0; k < imputed.stages.size(); ++k) {
    const auto& s = imputed.stages[k];
    nlohmann::json sj;
    sj["name"] = s.name;
    sj["outcome_col"] = s.outcome_col;
    sj["predictor_cols"] = s.predictor_cols;
    sj["model_family"] = s.hidden.empty() ? "logistic" : "mlp";
    if (!s.hidden.empty()) sj["hidden"] = s.hidden;
    if (s.gate)
      sj["gate"] = {{"gate_col", s.gate->gate_col},
                    {"gate_value", s.gate->gate_value},
                    {"forced_outcome", s.gate->forced_outcome}};
    sj["model"] = imputed.model_summaries[k];
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);
  return j;
}

// Writes <prefix>_arm0.csv, <prefix>_arm1.csv and <prefix>_manifest.json.
inline void write_imputed(const ImputedCohort& imputed, const std::string& prefix) {
  const int id_idx = [&] {
    for (std::size_t i = 0; i < imputed.table.columns.size(); ++i)
      if (imputed.table.columns[i].spec.role == ColumnRole::id)
        return static_cast<int>(i);
    return -1;
  }();
  for (int arm = 0; arm < 2; ++arm) {
    const std::string path = prefix + "_arm" + std::to_string(arm) + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    csv::write_row(out, {"id", "stage", "arm", "m", "value"});
    std::vector<std::string> row(5);
    row[2] = std::to_string(arm);
    for (std::size_t k = 0; k < imputed.stages.size(); ++k) {
      row[1] = imputed.stages[k].name;
      const auto& dm = imputed.draws[k][static_cast<std::size_t>(arm)];
      for (std::size_t r = 0; r < imputed.table.n; ++r) {
        row[0] = id_idx >= 0
                     ? detail::format_number(
                           imputed.table.columns[static_cast<std::size_t>(id_idx)].num[r])
                     : std::to_string(r);
        for (std::size_t m = 0; m < imputed.M; ++m) {
          row[3] = std::to_string(m);
          row[4] = detail::format_number(
              dm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)));
          csv::write_row(out, row);
        }
      }
    }
  }
  std::ofstream mout(prefix + "_manifest.json", std::ios::binary);
  if (!mout) throw std::runtime_error("cannot open for writing: " + prefix + "_manifest.json");
  mout << imputed_manifest(imputed).dump(2) << '\n';
}

}  // namespace fairpo
