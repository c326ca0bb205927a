#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairpo/fairness.hpp"
#include "fairpo/mitigation.hpp"
#include "fairpo/models.hpp"
#include "fairpo/rng.hpp"
#include "fairpo/tabular.hpp"

namespace fairpo {

struct CheckSuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // failing case, serialized
};

namespace detail {

inline ConfusionCounts random_counts_with_denominators(Rng& rng) {
  for (;;) {
    ConfusionCounts c;
    c.tp = static_cast<double>(rng.below(40));
    c.fp = static_cast<double>(rng.below(40));
    c.fn = static_cast<double>(rng.below(40));
    c.tn = static_cast<double>(rng.below(40));
    if (c.tp + c.fp > 0 && c.tp + c.fn > 0 && c.fp + c.tn > 0 && c.tp > 0) return c;
  }
}

inline std::string counts_string(const ConfusionCounts& c) {
  return "tp=" + format_number(c.tp) + " fp=" + format_number(c.fp) +
         " fn=" + format_number(c.fn) + " tn=" + format_number(c.tn);
}

}  // namespace detail

inline CheckSuiteResult check_theorem1_identity(std::uint64_t seed = 1234,
                                                std::size_t n_tables = 1000) {
  CheckSuiteResult suite{"theorem1-identity", true, ""};
  Rng rng(seed);
  auto verify = [&](const ConfusionCounts& c) {
    const auto r = theorem1_residual(c);
    if (!r.residual || std::abs(*r.residual) >= 1e-12) {
      suite.passed = false;
      suite.detail = detail::counts_string(c) + " residual=" +
                     (r.residual ? detail::format_number(*r.residual)
                                 : *r.undefined_reason);
    }
  };
  verify(ConfusionCounts{30, 0, 0, 70});  // perfect classifier
  verify(ConfusionCounts{30, 70, 0, 0});  // constant-positive classifier
  for (std::size_t i = 0; i < n_tables && suite.passed; ++i)
    verify(detail::random_counts_with_denominators(rng));
  return suite;
}

inline CheckSuiteResult check_gradients(std::uint64_t seed = 5678,
                                        std::size_t n_instances = 8,
                                        bool inject_fault = false) {
  CheckSuiteResult suite{"gradient-finite-difference", true, ""};
  Rng rng(seed);
  const double h = 1e-6;

  auto compare = [&](auto eval, Eigen::VectorXd params, const std::string& label) {
    auto [loss, grad] = eval(params);
    (void)loss;
    if (inject_fault) grad[0] += 1.0;
    Eigen::VectorXd fd(params.size());
    for (Eigen::Index j = 0; j < params.size(); ++j) {
      Eigen::VectorXd up = params, dn = params;
      up[j] += h;
      dn[j] -= h;
      fd[j] = (eval(up).first - eval(dn).first) / (2 * h);
    }
    const double rel = (grad - fd).norm() / std::max(fd.norm(), 1e-8);
    if (!(rel < 1e-5)) {
      suite.passed = false;
      suite.detail = label + " relative error " + detail::format_number(rel);
    }
  };

  for (std::size_t inst = 0; inst < n_instances && suite.passed; ++inst) {
    const Eigen::Index n = 40, p = 3;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    std::vector<int> group(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
      y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      group[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? 1 : 0;
    }
    group[0] = 0;
    group[1] = 1;  // both groups present
    Eigen::VectorXd params(p + 1);
    for (Eigen::Index j = 0; j <= p; ++j) params[j] = 0.3 * rng.normal();

    for (double eta : {0.0, 1.0}) {
      TrainConfig cfg;
      cfg.pr_eta = eta;
      compare(
          [&](const Eigen::VectorXd& v) {
            return loss_and_gradient(X, y, v, cfg, eta > 0 ? &group : nullptr);
          },
          params, "logistic pr_eta=" + detail::format_number(eta));
      if (!suite.passed) return suite;
    }

    const Eigen::Index nn = 30, pp = 4;
    Eigen::MatrixXd Xm(nn, pp);
    Eigen::VectorXd ym(nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
      for (Eigen::Index j = 0; j < pp; ++j) Xm(i, j) = rng.normal();
      ym[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    TrainConfig mcfg;
    mcfg.max_iter = 1;
    mcfg.seed = mix_seed(seed, inst);
    MlpModel shape = fit_mlp(Xm, ym, {8, 8}, mcfg);
    Eigen::VectorXd flat;
    detail::mlp_flatten(shape, flat);
    for (Eigen::Index j = 0; j < flat.size(); ++j) flat[j] += 0.1 * rng.normal();
    compare(
        [&](const Eigen::VectorXd& v) {
          return loss_and_gradient(shape, Xm, ym, v, mcfg);
        },
        flat, "mlp hidden=[8,8]");
  }
  return suite;
}

inline CheckSuiteResult check_reweigh_exactness(std::uint64_t seed = 9012,
                                                std::size_t n_tables = 100) {
  CheckSuiteResult suite{"reweigh-exactness", true, ""};
  Rng rng(seed);
  for (std::size_t t = 0; t < n_tables && suite.passed; ++t) {
    const std::size_t n = 20 + rng.below(180);
    DataTable table;
    table.n = n;
    Column a, y;
    a.spec = {"a", ColumnKind::binary, ColumnRole::group};
    y.spec = {"y", ColumnKind::binary, ColumnRole::outcome};
    bool cells[2][2] = {{false, false}, {false, false}};
    for (;;) {
      a.num.clear();
      y.num.clear();
      cells[0][0] = cells[0][1] = cells[1][0] = cells[1][1] = false;
      for (std::size_t i = 0; i < n; ++i) {
        const int av = rng.bernoulli(0.3 + 0.4 * rng.uniform()) ? 1 : 0;
        const int yv = rng.bernoulli(0.3 + 0.4 * rng.uniform()) ? 1 : 0;
        a.num.push_back(av);
        y.num.push_back(yv);
        cells[av][yv] = true;
      }
      if (cells[0][0] && cells[0][1] && cells[1][0] && cells[1][1]) break;
    }
    table.columns = {a, y};
    const auto w = reweigh(table, "a", "y");
    double wy[2] = {0, 0}, wsum[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const int av = static_cast<int>(a.num[i]);
      wy[av] += w[i] * y.num[i];
      wsum[av] += w[i];
    }
    const double gap = wy[1] / wsum[1] - wy[0] / wsum[0];
    if (std::abs(gap) >= 1e-12) {
      suite.passed = false;
      suite.detail = "table " + std::to_string(t) + " weighted-rate gap " +
                     detail::format_number(gap);
    }
  }
  return suite;
}

inline std::vector<CheckSuiteResult> run_selfchecks(std::uint64_t seed = 1234) {
  return {check_theorem1_identity(mix_seed(seed, 1)),
          check_gradients(mix_seed(seed, 2)),
          check_reweigh_exactness(mix_seed(seed, 3))};
}

}  // namespace fairpo
