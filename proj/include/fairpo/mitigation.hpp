#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fairpo/counterfactual.hpp"
#include "fairpo/dgp.hpp"
#include "fairpo/fairness.hpp"
#include "fairpo/models.hpp"
#include "fairpo/rng.hpp"
#include "fairpo/tabular.hpp"

namespace fairpo {

enum class MitigationKind { none, rew, prem, roc, causal };
enum class CausalTiming { pre, post };
enum class Pooling { baseline, other_arm, max };

struct MitigationMethod {
  MitigationKind kind = MitigationKind::none;
  double eta = 2.1;                // prem
  double band = 0.1;               // roc; replaced by grid search when tune_band
  bool tune_band = true;           // roc
  double favorable_label = 1.0;    // roc
  int unprivileged_group = 0;      // roc
  CausalTiming timing = CausalTiming::pre;  // causal
  int baseline_arm = 0;                     // causal
  Pooling pooling = Pooling::baseline;      // causal

  void validate() const {
    if (eta < 0) throw std::invalid_argument("eta must be nonnegative");
    if (kind == MitigationKind::roc && (band <= 0 || band >= 0.5))
      throw std::invalid_argument("band must lie in (0, 0.5)");
    if (baseline_arm != 0 && baseline_arm != 1)
      throw std::invalid_argument("baseline_arm must be 0 or 1");
    if (favorable_label != 0 && favorable_label != 1)
      throw std::invalid_argument("favorable_label must be 0 or 1");
    if (unprivileged_group != 0 && unprivileged_group != 1)
      throw std::invalid_argument("unprivileged_group must be 0 or 1");
  }

  std::string name() const {
    switch (kind) {
      case MitigationKind::none: return "none";
      case MitigationKind::rew: return "rew";
      case MitigationKind::prem: return "prem";
      case MitigationKind::roc: return "roc";
      case MitigationKind::causal:
        return timing == CausalTiming::pre ? "causal_pre" : "causal_post";
    }
    return "?";
  }

  static MitigationMethod plain() { return {}; }
  static MitigationMethod reweighting() {
    MitigationMethod m;
    m.kind = MitigationKind::rew;
    return m;
  }
  static MitigationMethod prejudice(double eta = 2.1) {
    MitigationMethod m;
    m.kind = MitigationKind::prem;
    m.eta = eta;
    return m;
  }
  static MitigationMethod reject(double band = 0.1, bool tune = true) {
    MitigationMethod m;
    m.kind = MitigationKind::roc;
    m.band = band;
    m.tune_band = tune;
    return m;
  }
  static MitigationMethod causal(CausalTiming timing, int baseline_arm = 0,
                                 Pooling pooling = Pooling::baseline) {
    MitigationMethod m;
    m.kind = MitigationKind::causal;
    m.timing = timing;
    m.baseline_arm = baseline_arm;
    m.pooling = pooling;
    return m;
  }
};

// Per-row weights P(A=a)P(Y=y)/P(A=a,Y=y): group and label are independent
// under the weighted empirical distribution, exactly.
inline std::vector<double> reweigh(const DataTable& table, const std::string& group_col,
                                   const std::string& label_col) {
  const Column& g = table.col(group_col);
  const Column& y = table.col(label_col);
  const std::size_t n = table.n;
  if (n == 0) throw std::invalid_argument("reweigh: empty table");
  std::array<std::array<std::size_t, 2>, 2> cell{{{0, 0}, {0, 0}}};
  for (std::size_t r = 0; r < n; ++r) {
    if (g.missing(r) || y.missing(r))
      throw std::invalid_argument("reweigh: missing group or label value");
    const double gv = g.num[r], yv = y.num[r];
    if ((gv != 0 && gv != 1) || (yv != 0 && yv != 1))
      throw std::invalid_argument("reweigh: group and label must be binary");
    cell[static_cast<std::size_t>(gv)][static_cast<std::size_t>(yv)]++;
  }
  double w[2][2];
  for (int a = 0; a < 2; ++a)
    for (int yv = 0; yv < 2; ++yv) {
      if (cell[a][yv] == 0)
        throw std::invalid_argument("reweigh: empty cell (A=" + std::to_string(a) +
                                    ", Y=" + std::to_string(yv) + ")");
      const double pa =
          static_cast<double>(cell[a][0] + cell[a][1]) / static_cast<double>(n);
      const double py =
          static_cast<double>(cell[0][yv] + cell[1][yv]) / static_cast<double>(n);
      const double pay = static_cast<double>(cell[a][yv]) / static_cast<double>(n);
      w[a][yv] = pa * py / pay;
    }
  std::vector<double> weights(n);
  for (std::size_t r = 0; r < n; ++r)
    weights[r] = w[static_cast<int>(g.num[r])][static_cast<int>(y.num[r])];
  return weights;
}

inline GlmModel prejudice_remover(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                                  const std::vector<int>& group, double eta,
                                  TrainConfig config = {},
                                  std::vector<std::string> feature_names = {}) {
  config.pr_eta = eta;
  if (eta == 0.0)
    return fit_logistic(design, labels, nullptr, config, std::move(feature_names));
  return fit_logistic(design, labels, &group, config, std::move(feature_names));
}

// Rows strictly inside the confidence band are overridden: unprivileged get
// the favorable label, privileged the unfavorable one. Everything else is
// thresholded at 0.5.
inline std::vector<double> reject_option(const std::vector<double>& scores,
                                         const std::vector<int>& group, double band,
                                         double favorable_label = 1.0,
                                         int unprivileged_group = 0) {
  if (band <= 0 || band >= 0.5) throw std::invalid_argument("band must lie in (0, 0.5)");
  if (scores.size() != group.size())
    throw std::invalid_argument("reject_option: length mismatch");
  std::vector<double> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] <= 0 || scores[i] >= 1)
      throw std::invalid_argument("reject_option: scores must lie in (0,1)");
    if (std::abs(scores[i] - 0.5) < band)
      pred[i] = group[i] == unprivileged_group ? favorable_label : 1.0 - favorable_label;
    else
      pred[i] = scores[i] >= 0.5 ? 1.0 : 0.0;
  }
  return pred;
}

struct FairTrainingSet {
  Eigen::MatrixXd design;
  std::vector<std::string> feature_names;
  Eigen::VectorXd labels;  // one row per (row, imputation path m)
  std::vector<double> weights;
};

// Counterfactual-pooling training set. timing=pre: pre-treatment features
// plus baseline-arm draws of the intermediate stages, labels = pooled
// final-stage draws, all chained per path m. timing=post: pre-treatment
// features plus observed post-treatment columns (replicated per m), labels
// = pooled final-stage draws computed holding the observed values fixed
// (the caller supplies an ImputedCohort whose stage models condition on
// them). The group column is never a feature.
inline FairTrainingSet causal_preprocess(const ImputedCohort& imputed,
                                         const MitigationMethod& method,
                                         const std::vector<std::size_t>* rows = nullptr) {
  if (method.kind != MitigationKind::causal)
    throw std::invalid_argument("causal_preprocess: method must be causal");
  method.validate();
  const DataTable& table = imputed.table;
  std::vector<std::size_t> all;
  if (!rows) {
    all.resize(table.n);
    for (std::size_t i = 0; i < table.n; ++i) all[i] = i;
    rows = &all;
  }
  const std::size_t n = rows->size();
  const std::size_t M = imputed.M;
  const std::size_t last = imputed.stages.size() - 1;
  const int base = method.baseline_arm;
  const int label_arm = method.pooling == Pooling::other_arm ? 1 - base : base;

  FairTrainingSet set;
  std::vector<const Column*> pre_cols;
  for (const auto& c : table.columns)
    if (c.spec.role == ColumnRole::pre_treatment) {
      pre_cols.push_back(&c);
      set.feature_names.push_back(c.spec.name);
    }
  std::vector<const Column*> post_obs_cols;
  if (method.timing == CausalTiming::post) {
    for (const auto& c : table.columns)
      if (c.spec.role == ColumnRole::post_treatment) {
        post_obs_cols.push_back(&c);
        set.feature_names.push_back(c.spec.name);
      }
  } else {
    for (std::size_t k = 0; k < last; ++k)
      set.feature_names.push_back(imputed.stages[k].outcome_col + "(" +
                                  std::to_string(base) + ")");
  }

  const std::size_t p = set.feature_names.size();
  set.design.resize(static_cast<Eigen::Index>(n * M), static_cast<Eigen::Index>(p));
  set.labels.resize(static_cast<Eigen::Index>(n * M));
  for (std::size_t m = 0; m < M; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = (*rows)[i];
      const auto ri = static_cast<Eigen::Index>(r);
      const auto out = static_cast<Eigen::Index>(m * n + i);
      Eigen::Index at = 0;
      for (const auto* c : pre_cols) {
        if (c->missing(r))
          throw std::invalid_argument("causal_preprocess: missing value in '" +
                                      c->spec.name + "'");
        set.design(out, at++) = c->num[r];
      }
      if (method.timing == CausalTiming::post) {
        for (const auto* c : post_obs_cols) {
          if (c->missing(r))
            throw std::invalid_argument("causal_preprocess: missing value in '" +
                                        c->spec.name + "'");
          set.design(out, at++) = c->num[r];
        }
      } else {
        for (std::size_t k = 0; k < last; ++k)
          set.design(out, at++) =
              imputed.draws[k][static_cast<std::size_t>(base)](ri, mi);
      }
      const double yb =
          imputed.draws[last][static_cast<std::size_t>(label_arm)](ri, mi);
      set.labels[out] =
          method.pooling == Pooling::max
              ? std::max(imputed.draws[last][0](ri, mi), imputed.draws[last][1](ri, mi))
              : yb;
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Hiring-benchmark orchestration.

struct BenchmarkContext {
  SyntheticCohort cohort;
  DataTable table;            // observed columns id,a,x,s,y
  ImputedCohort imputed;      // stages [S, Y] fit on the full observed table
  std::vector<std::size_t> train_rows, eval_rows;  // 70/30
  std::uint64_t seed = 0;
};

inline BenchmarkContext make_benchmark_context(SyntheticCohort cohort, std::size_t M,
                                               std::uint64_t seed) {
  BenchmarkContext ctx;
  ctx.seed = seed;
  ctx.table = cohort_to_observed_table(cohort);
  ctx.cohort = std::move(cohort);
  std::vector<StageSpec> stages(2);
  stages[0].name = "S";
  stages[0].outcome_col = "s";
  stages[0].predictor_cols = {"x"};
  stages[1].name = "Y";
  stages[1].outcome_col = "y";
  stages[1].predictor_cols = {"x", "s"};
  ctx.imputed = impute_sequential(ctx.table, stages, M, mix_seed(seed, 1));

  const std::size_t n = ctx.table.n;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix_seed(seed, 2));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const std::size_t n_train = n * 7 / 10;
  ctx.train_rows.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  ctx.eval_rows.assign(order.begin() + static_cast<long>(n_train), order.end());
  return ctx;
}

struct MitigationRun {
  MitigationMethod method;
  nlohmann::json model;
  FairnessReport stat;    // held-out rows vs observed labels
  FairnessReport causal;  // ground-truth arms, outcomes pooled to the baseline arm
  CausalAccuracy causal_acc;
  double accuracy = 0.0;
  double roc_band = 0.0;
};

namespace detail {

inline std::vector<double> threshold(const Eigen::VectorXd& scores) {
  std::vector<double> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) out[static_cast<std::size_t>(i)] = scores[i] >= 0.5 ? 1.0 : 0.0;
  return out;
}

// average defined metric values across per-imputation reports
inline FairnessReport average_reports(const std::vector<FairnessReport>& reports) {
  FairnessReport avg = reports.front();
  for (auto& [name, mv] : avg.metrics) {
    if (!mv.defined()) continue;
    double sum = 0.0;
    bool ok = true;
    for (const auto& rep : reports) {
      const auto& other = rep.at(name);
      if (!other.defined()) { ok = false; break; }
      sum += other.value;
    }
    if (ok)
      mv.value = sum / static_cast<double>(reports.size());
    else
      mv.undefined_reason = "undefined in at least one imputation";
  }
  return avg;
}

}  // namespace detail

// Fits the method on the 70% split and evaluates on the held-out 30%.
// Statistical metrics compare thresholded predictions with observed labels;
// causal metrics deploy the fitted model in the two counterfactual worlds
// built from the cohort's ground-truth arms, with both outcome arms pooled
// to the baseline arm's potential outcome.
inline MitigationRun train_mitigated(const BenchmarkContext& ctx,
                                     const MitigationMethod& method,
                                     const TrainConfig& config = {}) {
  method.validate();
  const auto& d = ctx.cohort;
  const std::size_t n_tr = ctx.train_rows.size();
  const std::size_t n_ev = ctx.eval_rows.size();
  if (n_tr == 0 || n_ev == 0) throw std::invalid_argument("empty train or eval split");
  const int base = method.baseline_arm;

  auto fill = [&](const std::vector<std::size_t>& rows, auto getter) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = getter(rows[i]);
    return v;
  };
  Eigen::VectorXd x_tr = fill(ctx.train_rows, [&](std::size_t r) { return d.x[r]; });
  Eigen::VectorXd s_tr = fill(ctx.train_rows, [&](std::size_t r) { return double(d.s_obs[r]); });
  Eigen::VectorXd a_tr = fill(ctx.train_rows, [&](std::size_t r) { return double(d.a[r]); });
  Eigen::VectorXd y_tr = fill(ctx.train_rows, [&](std::size_t r) { return double(d.y_obs[r]); });
  Eigen::VectorXd x_ev = fill(ctx.eval_rows, [&](std::size_t r) { return d.x[r]; });
  Eigen::VectorXd s_ev = fill(ctx.eval_rows, [&](std::size_t r) { return double(d.s_obs[r]); });
  Eigen::VectorXd a_ev = fill(ctx.eval_rows, [&](std::size_t r) { return double(d.a[r]); });
  // ground-truth stage arms and pooled outcome on the eval split
  Eigen::VectorXd s_arm_ev[2] = {
      fill(ctx.eval_rows, [&](std::size_t r) { return double(d.s0[r]); }),
      fill(ctx.eval_rows, [&](std::size_t r) { return double(d.s1[r]); })};
  const std::vector<int>& y_base_src = base == 0 ? d.y0_pre : d.y1_pre;
  std::vector<double> y_pool_ev(n_ev);
  std::vector<double> y_obs_ev(n_ev);
  std::vector<int> group_ev(n_ev);
  for (std::size_t i = 0; i < n_ev; ++i) {
    y_pool_ev[i] = static_cast<double>(y_base_src[ctx.eval_rows[i]]);
    y_obs_ev[i] = static_cast<double>(d.y_obs[ctx.eval_rows[i]]);
    group_ev[i] = d.a[ctx.eval_rows[i]];
  }

  auto design3 = [](const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                    const Eigen::VectorXd& a) {
    Eigen::MatrixXd m(x.size(), 3);
    m.col(0) = x;
    m.col(1) = s;
    m.col(2) = a;
    return m;
  };
  auto design2 = [](const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
    Eigen::MatrixXd m(x.size(), 2);
    m.col(0) = x;
    m.col(1) = s;
    return m;
  };
  const std::vector<std::string> full_names = {"x", "s", "a"};

  MitigationRun run;
  run.method = method;

  auto make_stat = [&](const std::vector<double>& y_pred,
                       const Eigen::VectorXd& scores) {
    PredictionSet ps;
    ps.y_true = y_obs_ev;
    ps.y_pred = y_pred;
    ps.y_score.assign(scores.data(), scores.data() + scores.size());
    ps.group = group_ev;
    return stat_metrics(ps);
  };
  // arm_scores(arm) -> model scores in the world where everyone is arm a
  auto make_causal = [&](auto arm_scores, bool roc_rule) {
    CounterfactualPredictionSet cps;
    for (int arm = 0; arm < 2; ++arm) {
      Eigen::VectorXd sc = arm_scores(arm);
      cps.score[arm].assign(sc.data(), sc.data() + sc.size());
      cps.yhat[arm] = roc_rule
                          ? reject_option(cps.score[arm], group_ev, run.roc_band,
                                          method.favorable_label,
                                          method.unprivileged_group)
                          : detail::threshold(sc);
      cps.y[arm] = y_pool_ev;
    }
    run.causal = causal_metrics(cps);
    run.causal_acc = causal_accuracy(cps, base);
  };

  switch (method.kind) {
    case MitigationKind::none:
    case MitigationKind::rew: {
      TrainConfig cfg = config;
      if (method.kind == MitigationKind::rew) {
        DataTable train_table = ctx.table.select_rows(ctx.train_rows);
        cfg.sample_weights = reweigh(train_table, "a", "y");
      }
      GlmModel model =
          fit_logistic(design3(x_tr, s_tr, a_tr), y_tr, nullptr, cfg, full_names);
      Eigen::VectorXd sc = predict_proba(model, design3(x_ev, s_ev, a_ev));
      run.stat = make_stat(detail::threshold(sc), sc);
      make_causal(
          [&](int arm) {
            return predict_proba(model,
                                 design3(x_ev, s_arm_ev[arm],
                                         Eigen::VectorXd::Constant(
                                             static_cast<Eigen::Index>(n_ev), arm)));
          },
          false);
      run.model = to_json(model, cfg);
      break;
    }
    case MitigationKind::prem: {
      std::vector<int> group_tr(n_tr);
      for (std::size_t i = 0; i < n_tr; ++i) group_tr[i] = d.a[ctx.train_rows[i]];
      GlmModel model = prejudice_remover(design3(x_tr, s_tr, a_tr), y_tr, group_tr,
                                         method.eta, config, full_names);
      Eigen::VectorXd sc = predict_proba(model, design3(x_ev, s_ev, a_ev));
      run.stat = make_stat(detail::threshold(sc), sc);
      make_causal(
          [&](int arm) {
            return predict_proba(model,
                                 design3(x_ev, s_arm_ev[arm],
                                         Eigen::VectorXd::Constant(
                                             static_cast<Eigen::Index>(n_ev), arm)));
          },
          false);
      TrainConfig echoed = config;
      echoed.pr_eta = method.eta;
      run.model = to_json(model, echoed);
      break;
    }
    case MitigationKind::roc: {
      // sub-split the training rows: last 1/7 is the band-tuning validation set
      const std::size_t n_fit = n_tr * 6 / 7;
      std::vector<std::size_t> fit_idx(n_fit), val_idx;
      for (std::size_t i = 0; i < n_fit; ++i) fit_idx[i] = i;
      for (std::size_t i = n_fit; i < n_tr; ++i) val_idx.push_back(i);
      auto sub = [&](const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
          out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
        return out;
      };
      GlmModel model = fit_logistic(
          design3(sub(x_tr, fit_idx), sub(s_tr, fit_idx), sub(a_tr, fit_idx)),
          sub(y_tr, fit_idx), nullptr, config, full_names);
      run.roc_band = method.band;
      if (method.tune_band) {
        Eigen::VectorXd sc_val = predict_proba(
            model,
            design3(sub(x_tr, val_idx), sub(s_tr, val_idx), sub(a_tr, val_idx)));
        std::vector<double> scores_val(sc_val.data(), sc_val.data() + sc_val.size());
        std::vector<int> group_val(val_idx.size());
        for (std::size_t i = 0; i < val_idx.size(); ++i)
          group_val[i] = d.a[ctx.train_rows[val_idx[i]]];
        double best_gap = std::numeric_limits<double>::infinity();
        for (int b = 1; b <= 30; ++b) {
          const double band = 0.01 * b;
          auto pred = reject_option(scores_val, group_val, band,
                                    method.favorable_label, method.unprivileged_group);
          double mean[2] = {0, 0};
          std::size_t cnt[2] = {0, 0};
          for (std::size_t i = 0; i < pred.size(); ++i) {
            mean[group_val[i]] += pred[i];
            cnt[group_val[i]]++;
          }
          const double gap = std::abs(mean[1] / static_cast<double>(cnt[1]) -
                                      mean[0] / static_cast<double>(cnt[0]));
          if (gap < best_gap) {
            best_gap = gap;
            run.roc_band = band;
          }
        }
      }
      Eigen::VectorXd sc = predict_proba(model, design3(x_ev, s_ev, a_ev));
      std::vector<double> scores_ev(sc.data(), sc.data() + sc.size());
      run.stat = make_stat(reject_option(scores_ev, group_ev, run.roc_band,
                                         method.favorable_label,
                                         method.unprivileged_group),
                           sc);
      // the deployed post-processor reacts to the perceived (observed) group
      // in both counterfactual worlds
      make_causal(
          [&](int arm) {
            return predict_proba(model,
                                 design3(x_ev, s_arm_ev[arm],
                                         Eigen::VectorXd::Constant(
                                             static_cast<Eigen::Index>(n_ev), arm)));
          },
          true);
      run.model = to_json(model, config);
      break;
    }
    case MitigationKind::causal: {
      const std::size_t M = ctx.imputed.M;
      GlmModel model;
      if (method.timing == CausalTiming::pre) {
        FairTrainingSet set = causal_preprocess(ctx.imputed, method, &ctx.train_rows);
        model = fit_logistic(set.design, set.labels, nullptr, config, set.feature_names);
        // statistical evaluation deploys the model on imputed baseline-arm
        // draws; metrics averaged across the M paths
        std::vector<FairnessReport> reports;
        const auto& sdraws = ctx.imputed.draws[0][static_cast<std::size_t>(base)];
        for (std::size_t m = 0; m < M; ++m) {
          Eigen::VectorXd s_draw_ev =
              fill(ctx.eval_rows, [&](std::size_t r) {
                return sdraws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m));
              });
          Eigen::VectorXd sc = predict_proba(model, design2(x_ev, s_draw_ev));
          reports.push_back(make_stat(detail::threshold(sc), sc));
        }
        run.stat = detail::average_reports(reports);
        // both deployment worlds feed the model the same baseline-arm stage
        // values, so the two prediction arms coincide row-wise
        make_causal(
            [&](int) { return predict_proba(model, design2(x_ev, s_arm_ev[base])); },
            false);
      } else {
        // stage model conditions on the observed interview outcome; the
        // baseline-arm label draws hold it fixed
        std::vector<StageSpec> post_stage(1);
        post_stage[0].name = "Y";
        post_stage[0].outcome_col = "y";
        post_stage[0].predictor_cols = {"x", "s"};
        ImputedCohort post_imp = impute_sequential(
            ctx.table, post_stage, M, mix_seed(ctx.seed, 3), config);
        FairTrainingSet set = causal_preprocess(post_imp, method, &ctx.train_rows);
        model = fit_logistic(set.design, set.labels, nullptr, config, set.feature_names);
        Eigen::VectorXd sc = predict_proba(model, design2(x_ev, s_ev));
        run.stat = make_stat(detail::threshold(sc), sc);
        make_causal(
            [&](int arm) { return predict_proba(model, design2(x_ev, s_arm_ev[arm])); },
            false);
      }
      run.model = to_json(model, config);
      break;
    }
  }
  run.accuracy = run.stat.value("accuracy");
  return run;
}

// One CSV row per metric, Table-1 / appendix-table shaped.
inline void append_benchmark_rows(std::ostream& out, const MitigationRun& run,
                                  const std::string& domain = "hiring") {
  auto emit = [&](const std::string& family, const std::string& metric,
                  const MetricValue& mv) {
    std::vector<std::string> row{run.method.name(),
                                 domain,
                                 family,
                                 metric,
                                 mv.defined() ? detail::format_number(mv.value) : "",
                                 mv.ci95 ? detail::format_number(mv.ci95->first) : "",
                                 mv.ci95 ? detail::format_number(mv.ci95->second) : "",
                                 detail::format_number(run.accuracy)};
    csv::write_row(out, row);
  };
  for (const auto& [name, mv] : run.stat.metrics)
    if (name != "accuracy") emit("statistical", name, mv);
  for (const auto& [name, mv] : run.causal.metrics) emit("causal", name, mv);
}

inline void write_benchmark_header(std::ostream& out) {
  csv::write_row(out, {"method", "domain", "metric_family", "metric", "value",
                       "ci_lo", "ci_hi", "accuracy"});
}

}  // namespace fairpo
