#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairpo {

struct PredictionSet {
  std::vector<double> y_true;   // binary
  std::vector<double> y_pred;   // binary
  std::vector<double> y_score;  // probabilities
  std::vector<int> group;       // binary

  std::size_t size() const { return y_true.size(); }
  void validate() const {
    if (y_pred.size() != size() || group.size() != size() ||
        (!y_score.empty() && y_score.size() != size()))
      throw std::invalid_argument("PredictionSet: length mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
      if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1))
        throw std::invalid_argument("PredictionSet: non-binary label");
      if (group[i] != 0 && group[i] != 1)
        throw std::invalid_argument("PredictionSet: non-binary group");
      if (!y_score.empty() && (y_score[i] < 0 || y_score[i] > 1))
        throw std::invalid_argument("PredictionSet: score outside [0,1]");
    }
  }
};

struct CounterfactualPredictionSet {
  // index 0 = arm a=0, index 1 = arm a=1
  std::vector<double> yhat[2];
  std::vector<double> y[2];
  std::vector<double> score[2];  // optional

  std::size_t size() const { return yhat[0].size(); }
  void validate() const {
    for (int a = 0; a < 2; ++a) {
      if (yhat[a].size() != size() || y[a].size() != size() ||
          (!score[a].empty() && score[a].size() != size()))
        throw std::invalid_argument("CounterfactualPredictionSet: length mismatch");
      for (std::size_t i = 0; i < size(); ++i)
        if ((yhat[a][i] != 0 && yhat[a][i] != 1) || (y[a][i] != 0 && y[a][i] != 1))
          throw std::invalid_argument("CounterfactualPredictionSet: non-binary value");
    }
  }
};

struct MetricValue {
  double value = 0.0;
  std::optional<std::pair<double, double>> ci95;
  std::size_t n_effective = 0;
  std::optional<std::string> undefined_reason;

  bool defined() const { return !undefined_reason.has_value(); }
};

struct FairnessReport {
  std::map<std::string, MetricValue> metrics;
  std::size_t n = 0;
  bool arms_present = false;

  const MetricValue& at(const std::string& name) const {
    auto it = metrics.find(name);
    if (it == metrics.end()) throw std::invalid_argument("no metric: " + name);
    return it->second;
  }
  double value(const std::string& name) const {
    const auto& m = at(name);
    if (!m.defined())
      throw std::invalid_argument("metric '" + name + "' undefined: " + *m.undefined_reason);
    return m.value;
  }
};

namespace detail {

// P(flag | cond) with cell bookkeeping; nullopt when the cell is empty.
struct CondMean {
  double sum = 0.0;
  std::size_t count = 0;
  void add(bool cond, double v) {
    if (!cond) return;
    sum += v;
    ++count;
  }
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

inline MetricValue difference_metric(const CondMean& g1, const CondMean& g0,
                                     const std::string& cell1, const std::string& cell0) {
  MetricValue mv;
  auto m1 = g1.mean(), m0 = g0.mean();
  if (!m1 || !m0) {
    mv.undefined_reason = "empty cell: " + (!m1 ? cell1 : cell0);
    return mv;
  }
  mv.value = *m1 - *m0;
  mv.n_effective = g1.count + g0.count;
  return mv;
}

}  // namespace detail

inline FairnessReport stat_metrics(const PredictionSet& ps) {
  ps.validate();
  bool has[2] = {false, false};
  for (int g : ps.group) has[g] = true;
  if (!has[0] || !has[1])
    throw std::invalid_argument("stat_metrics: both groups must be nonempty");

  detail::CondMean pos[2], ppv[2], tpr[2], fpr[2];
  double correct = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const int a = ps.group[i];
    pos[a].add(true, ps.y_pred[i]);
    ppv[a].add(ps.y_pred[i] == 1.0, ps.y_true[i]);
    tpr[a].add(ps.y_true[i] == 1.0, ps.y_pred[i]);
    fpr[a].add(ps.y_true[i] == 0.0, ps.y_pred[i]);
    correct += ps.y_pred[i] == ps.y_true[i] ? 1.0 : 0.0;
  }
  FairnessReport report;
  report.n = ps.size();
  report.metrics["parity"] = detail::difference_metric(pos[1], pos[0], "A=1", "A=0");
  report.metrics["ppv_parity"] =
      detail::difference_metric(ppv[1], ppv[0], "Yhat=1,A=1", "Yhat=1,A=0");
  report.metrics["eodds_tp"] =
      detail::difference_metric(tpr[1], tpr[0], "Y=1,A=1", "Y=1,A=0");
  report.metrics["eodds_fp"] =
      detail::difference_metric(fpr[1], fpr[0], "Y=0,A=1", "Y=0,A=0");
  MetricValue acc;
  acc.value = correct / static_cast<double>(ps.size());
  acc.n_effective = ps.size();
  report.metrics["accuracy"] = acc;
  return report;
}

inline FairnessReport causal_metrics(const CounterfactualPredictionSet& cps) {
  cps.validate();
  if (cps.size() == 0) throw std::invalid_argument("causal_metrics: empty input");

  detail::CondMean pos[2], ppv[2], tpr[2], fpr[2];
  for (int a = 0; a < 2; ++a)
    for (std::size_t i = 0; i < cps.size(); ++i) {
      pos[a].add(true, cps.yhat[a][i]);
      ppv[a].add(cps.yhat[a][i] == 1.0, cps.y[a][i]);
      tpr[a].add(cps.y[a][i] == 1.0, cps.yhat[a][i]);
      fpr[a].add(cps.y[a][i] == 0.0, cps.yhat[a][i]);
    }
  FairnessReport report;
  report.n = cps.size();
  report.arms_present = true;
  report.metrics["causal_parity"] =
      detail::difference_metric(pos[1], pos[0], "arm 1", "arm 0");
  report.metrics["causal_ppv_parity"] =
      detail::difference_metric(ppv[1], ppv[0], "Yhat(1)=1", "Yhat(0)=1");
  report.metrics["causal_eodds_tp"] =
      detail::difference_metric(tpr[1], tpr[0], "Y(1)=1", "Y(0)=1");
  report.metrics["causal_eodds_fp"] =
      detail::difference_metric(fpr[1], fpr[0], "Y(1)=0", "Y(0)=0");
  return report;
}

struct CalibrationBin {
  double lo = 0.0, hi = 0.0;
  std::size_t count[2] = {0, 0};  // rows with score in bin, per arm
  std::optional<double> gap;      // P(Y(1)=1|S(1) in bin) - P(Y(0)=1|S(0) in bin)
  std::optional<std::string> undefined_reason;
};

// Equal-width bins on [0,1]; the last bin is closed above.
inline std::vector<CalibrationBin> causal_calibration(
    const CounterfactualPredictionSet& cps, std::size_t n_bins = 10) {
  cps.validate();
  if (cps.score[0].empty() || cps.score[1].empty())
    throw std::invalid_argument("causal_calibration: scores required for both arms");
  if (n_bins == 0) throw std::invalid_argument("causal_calibration: n_bins must be positive");

  std::vector<CalibrationBin> bins(n_bins);
  std::vector<detail::CondMean> cm[2];
  cm[0].resize(n_bins);
  cm[1].resize(n_bins);
  const double width = 1.0 / static_cast<double>(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lo = static_cast<double>(b) * width;
    bins[b].hi = static_cast<double>(b + 1) * width;
  }
  for (int a = 0; a < 2; ++a)
    for (std::size_t i = 0; i < cps.size(); ++i) {
      double s = cps.score[a][i];
      if (s < 0 || s > 1)
        throw std::invalid_argument("causal_calibration: score outside [0,1]");
      std::size_t b = std::min(n_bins - 1, static_cast<std::size_t>(s / width));
      cm[a][b].add(true, cps.y[a][i]);
    }
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].count[0] = cm[0][b].count;
    bins[b].count[1] = cm[1][b].count;
    auto m0 = cm[0][b].mean(), m1 = cm[1][b].mean();
    if (!m0 || !m1)
      bins[b].undefined_reason =
          std::string("empty bin in arm ") + (!m0 ? "0" : "1");
    else
      bins[b].gap = *m1 - *m0;
  }
  return bins;
}

struct CausalAccuracy {
  double agreement = 0.0;   // P(Yhat = Y(baseline))
  double signed_gap = 0.0;  // E[Yhat - Y(baseline)]
};

inline CausalAccuracy causal_accuracy(const std::vector<double>& y_pred,
                                      const std::vector<double>& y_baseline) {
  if (y_pred.size() != y_baseline.size() || y_pred.empty())
    throw std::invalid_argument("causal_accuracy: bad input lengths");
  CausalAccuracy ca;
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    ca.agreement += y_pred[i] == y_baseline[i] ? 1.0 : 0.0;
    ca.signed_gap += y_pred[i] - y_baseline[i];
  }
  ca.agreement /= static_cast<double>(y_pred.size());
  ca.signed_gap /= static_cast<double>(y_pred.size());
  return ca;
}

inline CausalAccuracy causal_accuracy(const CounterfactualPredictionSet& cps,
                                      int baseline_arm = 0) {
  cps.validate();
  if (baseline_arm != 0 && baseline_arm != 1)
    throw std::invalid_argument("causal_accuracy: baseline arm must be 0 or 1");
  // prediction is the baseline-arm prediction, evaluated against Y(baseline)
  return causal_accuracy(cps.yhat[baseline_arm], cps.y[baseline_arm]);
}

// Counts over the (Y, Yhat) cells for one arm.
struct ConfusionCounts {
  double tp = 0, fp = 0, fn = 0, tn = 0;
  double total() const { return tp + fp + fn + tn; }
};

struct Theorem1Result {
  std::optional<double> residual;  // FPR - [(1-PPV)/PPV]*[P(Y=1)/P(Y=0)]*TPR
  double ppv = 0.0, tpr = 0.0, base_rate_odds = 0.0;  // the three factors
  std::optional<std::string> undefined_reason;
};

inline Theorem1Result theorem1_residual(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0)
    throw std::invalid_argument("theorem1_residual: negative cell count");
  Theorem1Result r;
  const double pred_pos = c.tp + c.fp;
  const double y_pos = c.tp + c.fn;
  const double y_neg = c.fp + c.tn;
  if (pred_pos == 0) { r.undefined_reason = "no predicted positives (PPV undefined)"; return r; }
  if (y_pos == 0) { r.undefined_reason = "no positives (TPR undefined)"; return r; }
  if (y_neg == 0) { r.undefined_reason = "no negatives (FPR undefined)"; return r; }
  r.ppv = c.tp / pred_pos;
  r.tpr = c.tp / y_pos;
  r.base_rate_odds = y_pos / y_neg;
  if (r.ppv == 0) { r.undefined_reason = "PPV is zero"; return r; }
  const double fpr_direct = c.fp / y_neg;
  r.residual = fpr_direct - ((1.0 - r.ppv) / r.ppv) * r.base_rate_odds * r.tpr;
  return r;
}

inline nlohmann::json report_json(const FairnessReport& report) {
  nlohmann::json j;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, mv] : report.metrics) {
    nlohmann::json m;
    m["value"] = mv.defined() ? nlohmann::json(mv.value) : nlohmann::json();
    if (mv.ci95)
      m["ci95"] = {mv.ci95->first, mv.ci95->second};
    else
      m["ci95"] = nullptr;
    if (mv.undefined_reason) m["undefined_reason"] = *mv.undefined_reason;
    metrics[name] = std::move(m);
  }
  j["metrics"] = std::move(metrics);
  j["n"] = report.n;
  j["arms_present"] = report.arms_present;
  return j;
}

}  // namespace fairpo
