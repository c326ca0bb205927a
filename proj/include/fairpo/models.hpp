#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fairpo/rng.hpp"

namespace fairpo {

struct TrainConfig {
  double l2 = 1e-4;
  double pr_eta = 0.0;        // prejudice-remover strength, 0 = off
  std::size_t max_iter = 500; // Newton/GD iterations, or MLP epochs
  double tol = 1e-6;          // gradient max-norm
  double learning_rate = 0.05;  // MLP only
  std::size_t batch_size = 64;  // MLP only
  std::uint64_t seed = 0;
  std::vector<double> sample_weights;  // empty = all ones

  void validate(std::size_t n) const {
    if (l2 < 0 || pr_eta < 0 || learning_rate < 0)
      throw std::invalid_argument("negative training hyperparameter");
    if (!sample_weights.empty()) {
      if (sample_weights.size() != n)
        throw std::invalid_argument("sample_weights length mismatch");
      for (double w : sample_weights)
        if (w < 0) throw std::invalid_argument("negative sample weight");
    }
  }
};

struct GlmModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  std::vector<std::string> feature_names;
  bool converged = false;
  std::size_t n_iter = 0;
  std::vector<double> loss_trace;  // accepted objective values
};

namespace detail {

inline void check_binary_labels(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0)
      throw std::invalid_argument("labels must be in {0,1}");
}

inline Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

inline void check_binary_group(const std::vector<int>& group) {
  bool seen[2] = {false, false};
  for (int a : group) {
    if (a != 0 && a != 1) throw std::invalid_argument("group values must be in {0,1}");
    seen[a] = true;
  }
  if (!seen[0] || !seen[1])
    throw std::invalid_argument("prejudice penalty requires both groups present");
}

}  // namespace detail

inline Eigen::VectorXd predict_proba(const GlmModel& model, const Eigen::MatrixXd& design) {
  if (design.cols() != model.coefficients.size())
    throw std::invalid_argument("predict_proba: feature count mismatch");
  Eigen::VectorXd p = detail::sigmoid_vec(
      (design * model.coefficients).array() + model.intercept);
  // strictly inside (0,1)
  return p.cwiseMax(1e-15).cwiseMin(1.0 - 1e-15);
}

namespace detail {

// Objective pieces for the (weighted, L2-regularized, prejudice-penalized)
// logistic model. params = [coefficients; intercept]; intercept unregularized.
struct LogisticObjective {
  const Eigen::MatrixXd& design;
  const Eigen::VectorXd& labels;
  const Eigen::VectorXd& weights;
  const std::vector<int>* group;  // required when pr_eta > 0
  double l2;
  double pr_eta;

  double value_and_gradient(const Eigen::VectorXd& params, Eigen::VectorXd& grad) const {
    const Eigen::Index p = design.cols();
    const Eigen::Index n = design.rows();
    Eigen::VectorXd z = (design * params.head(p)).array() + params[p];
    Eigen::VectorXd prob = sigmoid_vec(z).cwiseMax(1e-15).cwiseMin(1.0 - 1e-15);

    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      loss -= weights[i] * (labels[i] * std::log(prob[i]) +
                            (1.0 - labels[i]) * std::log(1.0 - prob[i]));
    Eigen::VectorXd resid = weights.cwiseProduct(prob - labels);
    grad.resize(p + 1);
    grad.head(p) = design.transpose() * resid;
    grad[p] = resid.sum();

    loss += 0.5 * l2 * params.head(p).squaredNorm();
    grad.head(p) += l2 * params.head(p);

    if (pr_eta > 0.0) {
      // Empirical prejudice index: sum_i w_i p_i ln(P(pos|a_i)/P(pos)) with
      // the conditional/marginal positives as weighted means of predicted
      // probabilities. dPI/dp_i collapses to w_i ln(P(pos|a_i)/P(pos)).
      double wsum[2] = {0, 0}, psum[2] = {0, 0};
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = (*group)[static_cast<std::size_t>(i)];
        wsum[a] += weights[i];
        psum[a] += weights[i] * prob[i];
      }
      const double wall = wsum[0] + wsum[1];
      const double pall = (psum[0] + psum[1]) / wall;
      const double pa[2] = {psum[0] / wsum[0], psum[1] / wsum[1]};
      double pi = 0.0;
      Eigen::VectorXd dpi(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = (*group)[static_cast<std::size_t>(i)];
        const double lr = std::log(pa[a] / pall);
        pi += weights[i] * prob[i] * lr;
        dpi[i] = weights[i] * lr * prob[i] * (1.0 - prob[i]);
      }
      loss += pr_eta * pi;
      grad.head(p) += pr_eta * (design.transpose() * dpi);
      grad[p] += pr_eta * dpi.sum();
    }
    return loss;
  }
};

}  // namespace detail

// Exposed for gradient acceptance checks: exact training objective and its
// analytic gradient at the given parameters ([coefficients; intercept]).
inline std::pair<double, Eigen::VectorXd> loss_and_gradient(
    const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
    const Eigen::VectorXd& params, const TrainConfig& config,
    const std::vector<int>* group = nullptr) {
  detail::check_binary_labels(labels);
  if (params.size() != design.cols() + 1)
    throw std::invalid_argument("params must be [coefficients; intercept]");
  if (config.pr_eta > 0.0) {
    if (group == nullptr) throw std::invalid_argument("pr_eta > 0 requires a group vector");
    detail::check_binary_group(*group);
  }
  Eigen::VectorXd w = Eigen::VectorXd::Ones(design.rows());
  if (!config.sample_weights.empty())
    w = Eigen::Map<const Eigen::VectorXd>(
        config.sample_weights.data(),
        static_cast<Eigen::Index>(config.sample_weights.size()));
  detail::LogisticObjective obj{design, labels, w, group, config.l2, config.pr_eta};
  Eigen::VectorXd grad;
  double loss = obj.value_and_gradient(params, grad);
  return {loss, std::move(grad)};
}

// Weighted L2-regularized logistic regression. Plain objective: full-batch
// Newton with LM damping, gradient-descent fallback when the damped system
// fails. With the prejudice penalty active the Hessian is no longer
// guaranteed PSD, so the fit switches to adaptive gradient descent on the
// exact objective.
inline GlmModel fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                             const std::vector<int>* group, const TrainConfig& config,
                             std::vector<std::string> feature_names = {}) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (labels.size() != n) throw std::invalid_argument("labels/design size mismatch");
  detail::check_binary_labels(labels);
  config.validate(static_cast<std::size_t>(n));
  if (config.pr_eta > 0.0) {
    if (group == nullptr) throw std::invalid_argument("pr_eta > 0 requires a group vector");
    detail::check_binary_group(*group);
  }
  if (group && group->size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("group/design size mismatch");
  if (!design.allFinite()) throw std::invalid_argument("design contains non-finite values");

  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (!config.sample_weights.empty())
    w = Eigen::Map<const Eigen::VectorXd>(
        config.sample_weights.data(),
        static_cast<Eigen::Index>(config.sample_weights.size()));
  detail::LogisticObjective obj{design, labels, w, group, config.l2, config.pr_eta};

  GlmModel model;
  model.feature_names = feature_names.empty()
                            ? std::vector<std::string>(static_cast<std::size_t>(p))
                            : std::move(feature_names);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd grad;
  double loss = obj.value_and_gradient(params, grad);
  model.loss_trace.push_back(loss);

  if (config.pr_eta == 0.0) {
    for (std::size_t it = 0; it < config.max_iter; ++it) {
      if (grad.lpNorm<Eigen::Infinity>() <= config.tol) {
        model.converged = true;
        break;
      }
      Eigen::VectorXd z = (design * params.head(p)).array() + params[p];
      Eigen::VectorXd prob = detail::sigmoid_vec(z);
      Eigen::VectorXd hw = w.array() * prob.array() * (1.0 - prob.array());
      Eigen::MatrixXd hess(p + 1, p + 1);
      hess.topLeftCorner(p, p) =
          design.transpose() * hw.asDiagonal() * design +
          config.l2 * Eigen::MatrixXd::Identity(p, p);
      Eigen::VectorXd xh = design.transpose() * hw;
      hess.topRightCorner(p, 1) = xh;
      hess.bottomLeftCorner(1, p) = xh.transpose();
      hess(p, p) = hw.sum();

      // LM damping: grow lambda until the step decreases the objective.
      double lambda = 0.0;
      bool accepted = false;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::MatrixXd damped = hess;
        if (lambda > 0.0) damped.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
        if (ldlt.info() == Eigen::Success) {
          Eigen::VectorXd candidate = params - ldlt.solve(grad);
          Eigen::VectorXd cgrad;
          double closs = obj.value_and_gradient(candidate, cgrad);
          if (std::isfinite(closs) && closs < loss) {
            params = std::move(candidate);
            loss = closs;
            grad = std::move(cgrad);
            accepted = true;
            break;
          }
        }
        lambda = lambda == 0.0 ? 1e-4 * (1.0 + hess.diagonal().maxCoeff()) : lambda * 10.0;
      }
      if (!accepted) {
        // gradient-descent fallback with backtracking
        double step = 1.0 / static_cast<double>(n);
        for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
          Eigen::VectorXd candidate = params - step * grad;
          Eigen::VectorXd cgrad;
          double closs = obj.value_and_gradient(candidate, cgrad);
          if (std::isfinite(closs) && closs < loss) {
            params = std::move(candidate);
            loss = closs;
            grad = std::move(cgrad);
            accepted = true;
            break;
          }
        }
        if (!accepted) break;  // at the numerical floor; convergence judged below
      }
      model.loss_trace.push_back(loss);
      ++model.n_iter;
    }
    // a stall at the loss floor with a tiny gradient is convergence too;
    // the gradient is a sum over samples, so the floor scales with n
    if (grad.lpNorm<Eigen::Infinity>() <=
        std::max(config.tol, 1e-7 * static_cast<double>(n)))
      model.converged = true;
  } else {
    // adaptive gradient descent on the penalized objective
    double step = 1.0 / static_cast<double>(n);
    for (std::size_t it = 0; it < config.max_iter * 10; ++it) {
      if (grad.lpNorm<Eigen::Infinity>() <= std::max(config.tol, 1e-6)) {
        model.converged = true;
        break;
      }
      Eigen::VectorXd candidate = params - step * grad;
      Eigen::VectorXd cgrad;
      double closs = obj.value_and_gradient(candidate, cgrad);
      if (std::isfinite(closs) && closs < loss) {
        params = std::move(candidate);
        loss = closs;
        grad = std::move(cgrad);
        model.loss_trace.push_back(loss);
        step *= 1.2;
        ++model.n_iter;
      } else {
        step *= 0.5;
        if (step < 1e-18) break;
      }
    }
    if (grad.lpNorm<Eigen::Infinity>() <=
        std::max(config.tol, 1e-7 * static_cast<double>(n)))
      model.converged = true;
  }

  model.coefficients = params.head(p);
  model.intercept = params[p];
  if (!model.coefficients.allFinite() || !std::isfinite(model.intercept))
    throw std::runtime_error("fit_logistic produced non-finite parameters");
  return model;
}

// ---------------------------------------------------------------------------
// Small feed-forward network: tanh hidden layers, sigmoid output.

struct MlpModel {
  std::vector<int> layer_sizes;          // input, hidden..., 1
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: out x in
  std::vector<Eigen::VectorXd> biases;
  std::vector<std::string> feature_names;
  bool converged = false;
  std::size_t n_iter = 0;
  std::vector<double> loss_trace;  // per-epoch full-batch log-loss

  std::size_t parameter_count() const {
    std::size_t c = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
      c += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return c;
  }
};

inline Eigen::VectorXd predict_proba(const MlpModel& model, const Eigen::MatrixXd& design) {
  if (design.cols() != model.layer_sizes.front())
    throw std::invalid_argument("predict_proba: feature count mismatch");
  Eigen::MatrixXd h = design.transpose();  // in x n
  for (std::size_t l = 0; l + 1 < model.weights.size(); ++l)
    h = ((model.weights[l] * h).colwise() + model.biases[l]).array().tanh();
  Eigen::VectorXd z =
      ((model.weights.back() * h).colwise() + model.biases.back()).row(0);
  return detail::sigmoid_vec(z).cwiseMax(1e-15).cwiseMin(1.0 - 1e-15);
}

namespace detail {

inline void mlp_flatten(const MlpModel& m, Eigen::VectorXd& out) {
  out.resize(static_cast<Eigen::Index>(m.parameter_count()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::Map<const Eigen::VectorXd> wv(m.weights[l].data(), m.weights[l].size());
    out.segment(at, wv.size()) = wv;
    at += wv.size();
    out.segment(at, m.biases[l].size()) = m.biases[l];
    at += m.biases[l].size();
  }
}

inline void mlp_unflatten(const Eigen::VectorXd& v, MlpModel& m) {
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::Map<Eigen::VectorXd> wv(m.weights[l].data(), m.weights[l].size());
    wv = v.segment(at, wv.size());
    at += wv.size();
    m.biases[l] = v.segment(at, m.biases[l].size());
    at += m.biases[l].size();
  }
}

// Full-batch log-loss and backprop gradient over the given rows.
inline double mlp_loss_grad(const MlpModel& m, const Eigen::MatrixXd& design,
                            const Eigen::VectorXd& labels, double l2,
                            std::vector<Eigen::MatrixXd>& gw,
                            std::vector<Eigen::VectorXd>& gb) {
  const Eigen::Index n = design.rows();
  const std::size_t L = m.weights.size();
  std::vector<Eigen::MatrixXd> acts(L);  // post-activation of each hidden layer
  Eigen::MatrixXd h = design.transpose();
  for (std::size_t l = 0; l + 1 < L; ++l) {
    h = ((m.weights[l] * h).colwise() + m.biases[l]).array().tanh();
    acts[l] = h;
  }
  Eigen::VectorXd z = ((m.weights[L - 1] * h).colwise() + m.biases[L - 1]).row(0);
  Eigen::VectorXd prob = sigmoid_vec(z).cwiseMax(1e-15).cwiseMin(1.0 - 1e-15);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    loss -= labels[i] * std::log(prob[i]) + (1.0 - labels[i]) * std::log(1.0 - prob[i]);

  gw.assign(L, Eigen::MatrixXd());
  gb.assign(L, Eigen::VectorXd());
  Eigen::MatrixXd delta = (prob - labels).transpose();  // 1 x n
  for (std::size_t l = L; l-- > 0;) {
    const Eigen::MatrixXd& input = l == 0 ? design.transpose() : acts[l - 1];
    gw[l] = delta * input.transpose();
    gb[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = m.weights[l].transpose() * delta;
      delta = back.array() * (1.0 - acts[l - 1].array().square());
    }
  }
  if (l2 > 0.0) {
    for (std::size_t l = 0; l < L; ++l) {
      loss += 0.5 * l2 * m.weights[l].squaredNorm();
      gw[l] += l2 * m.weights[l];
    }
  }
  return loss;
}

}  // namespace detail

// Analytic full-batch loss/gradient at flattened parameters (for the
// finite-difference acceptance check).
inline std::pair<double, Eigen::VectorXd> loss_and_gradient(
    const MlpModel& shape, const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
    const Eigen::VectorXd& params, const TrainConfig& config) {
  detail::check_binary_labels(labels);
  MlpModel m = shape;
  detail::mlp_unflatten(params, m);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  double loss = detail::mlp_loss_grad(m, design, labels, config.l2, gw, gb);
  MlpModel g = m;
  g.weights = std::move(gw);
  g.biases = std::move(gb);
  Eigen::VectorXd flat;
  detail::mlp_flatten(g, flat);
  return {loss, std::move(flat)};
}

inline MlpModel fit_mlp(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                        const std::vector<int>& hidden, const TrainConfig& config,
                        std::vector<std::string> feature_names = {}) {
  if (hidden.empty())
    throw std::invalid_argument("fit_mlp: empty hidden list; use fit_logistic");
  detail::check_binary_labels(labels);
  config.validate(static_cast<std::size_t>(design.rows()));
  const Eigen::Index n = design.rows();

  MlpModel m;
  m.feature_names = std::move(feature_names);
  m.layer_sizes.push_back(static_cast<int>(design.cols()));
  for (int hs : hidden) m.layer_sizes.push_back(hs);
  m.layer_sizes.push_back(1);
  Rng rng(config.seed);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const int in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
    const double r = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w.data()[i] = (2.0 * rng.uniform() - 1.0) * r;
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(out));
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t bs = std::max<std::size_t>(1, config.batch_size);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;

  for (std::size_t epoch = 0; epoch < config.max_iter; ++epoch) {
    // Fisher-Yates with the run's own generator: deterministic given seed.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t count = std::min(bs, order.size() - start);
      Eigen::MatrixXd bx(count, design.cols());
      Eigen::VectorXd by(count);
      for (std::size_t i = 0; i < count; ++i) {
        bx.row(static_cast<Eigen::Index>(i)) =
            design.row(static_cast<Eigen::Index>(order[start + i]));
        by[static_cast<Eigen::Index>(i)] =
            labels[static_cast<Eigen::Index>(order[start + i])];
      }
      detail::mlp_loss_grad(m, bx, by, config.l2, gw, gb);
      const double lr = config.learning_rate / static_cast<double>(count);
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        m.weights[l] -= lr * gw[l];
        m.biases[l] -= lr * gb[l];
      }
    }
    double full = detail::mlp_loss_grad(m, design, labels, config.l2, gw, gb) /
                  static_cast<double>(n);
    m.loss_trace.push_back(full);
    ++m.n_iter;
  }
  m.converged = true;  // fixed-epoch training
  return m;
}

// ---------------------------------------------------------------------------
// Serialization: JSON {kind, feature_names, parameters, config, converged, n_iter}

inline nlohmann::json to_json(const GlmModel& m, const TrainConfig& config) {
  nlohmann::json j;
  j["kind"] = "logistic";
  j["feature_names"] = m.feature_names;
  j["parameters"]["coefficients"] =
      std::vector<double>(m.coefficients.data(), m.coefficients.data() + m.coefficients.size());
  j["parameters"]["intercept"] = m.intercept;
  j["config"] = {{"l2", config.l2}, {"pr_eta", config.pr_eta},
                 {"max_iter", config.max_iter}, {"tol", config.tol}};
  j["converged"] = m.converged;
  j["n_iter"] = m.n_iter;
  return j;
}

inline nlohmann::json to_json(const MlpModel& m, const TrainConfig& config) {
  nlohmann::json j;
  j["kind"] = "mlp";
  j["feature_names"] = m.feature_names;
  j["parameters"]["layer_sizes"] = m.layer_sizes;
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    nlohmann::json layer;
    layer["weights"] = std::vector<double>(m.weights[l].data(),
                                           m.weights[l].data() + m.weights[l].size());
    layer["biases"] = std::vector<double>(m.biases[l].data(),
                                          m.biases[l].data() + m.biases[l].size());
    layers.push_back(std::move(layer));
  }
  j["parameters"]["layers"] = std::move(layers);
  j["config"] = {{"l2", config.l2}, {"max_iter", config.max_iter},
                 {"learning_rate", config.learning_rate},
                 {"batch_size", config.batch_size}, {"seed", config.seed}};
  j["converged"] = m.converged;
  j["n_iter"] = m.n_iter;
  return j;
}

}  // namespace fairpo
