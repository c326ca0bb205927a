#include <catch2/catch_amalgamated.hpp>

#include "fairpo/fairness.hpp"
#include "fairpo/rng.hpp"

using namespace fairpo;

TEST_CASE("stat_metrics matches hand counts on a small table") {
  // group 0: preds 1,0,1,0  truths 1,0,0,0 -> pos rate 1/2, tpr 1/1, fpr 1/3, ppv 1/2
  // group 1: preds 1,1,0,1  truths 1,0,1,1 -> pos rate 3/4, tpr 2/3, fpr 1/1, ppv 2/3
  PredictionSet ps;
  ps.group = {0, 0, 0, 0, 1, 1, 1, 1};
  ps.y_pred = {1, 0, 1, 0, 1, 1, 0, 1};
  ps.y_true = {1, 0, 0, 0, 1, 0, 1, 1};
  auto r = stat_metrics(ps);
  REQUIRE(r.n == 8);
  REQUIRE(r.value("parity") == Catch::Approx(3.0 / 4 - 1.0 / 2));
  REQUIRE(r.value("eodds_tp") == Catch::Approx(2.0 / 3 - 1.0));
  REQUIRE(r.value("eodds_fp") == Catch::Approx(1.0 - 1.0 / 3));
  REQUIRE(r.value("ppv_parity") == Catch::Approx(2.0 / 3 - 1.0 / 2));
  REQUIRE(r.value("accuracy") == Catch::Approx(5.0 / 8));
}

TEST_CASE("undefined cells carry a reason instead of a value") {
  PredictionSet ps;
  ps.group = {0, 0, 1, 1};
  ps.y_pred = {0, 0, 1, 0};
  ps.y_true = {1, 0, 1, 0};  // no predicted positives in group 0
  auto r = stat_metrics(ps);
  REQUIRE_FALSE(r.at("ppv_parity").defined());
  REQUIRE(r.at("ppv_parity").undefined_reason->find("Yhat=1,A=0") != std::string::npos);
  REQUIRE_THROWS(r.value("ppv_parity"));
  REQUIRE(r.at("parity").defined());

  auto j = report_json(r);
  REQUIRE(j["metrics"]["ppv_parity"]["value"].is_null());
  REQUIRE(j["metrics"]["parity"]["value"].is_number());
}

TEST_CASE("stat_metrics validates its input") {
  PredictionSet ps;
  ps.group = {0, 0};
  ps.y_pred = {1, 0};
  ps.y_true = {1, 0};
  REQUIRE_THROWS(stat_metrics(ps));  // only one group present
  ps.group = {0, 2};
  REQUIRE_THROWS(stat_metrics(ps));
  ps.group = {0, 1};
  ps.y_pred = {1, 0.5};
  REQUIRE_THROWS(stat_metrics(ps));
}

TEST_CASE("identical arms imply zero causal violations") {
  Rng rng(7);
  CounterfactualPredictionSet cps;
  for (int i = 0; i < 500; ++i) {
    double yh = rng.bernoulli(0.4) ? 1.0 : 0.0;
    double yv = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (int a = 0; a < 2; ++a) {
      cps.yhat[a].push_back(yh);
      cps.y[a].push_back(yv);
    }
  }
  auto r = causal_metrics(cps);
  REQUIRE(r.arms_present);
  for (const auto& name :
       {"causal_parity", "causal_ppv_parity", "causal_eodds_tp", "causal_eodds_fp"})
    REQUIRE(r.value(name) == 0.0);
}

TEST_CASE("causal metrics are antisymmetric under arm swap") {
  Rng rng(13);
  CounterfactualPredictionSet cps, swapped;
  for (int i = 0; i < 400; ++i)
    for (int a = 0; a < 2; ++a) {
      cps.yhat[a].push_back(rng.bernoulli(0.3 + 0.3 * a) ? 1.0 : 0.0);
      cps.y[a].push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    }
  for (int a = 0; a < 2; ++a) {
    swapped.yhat[a] = cps.yhat[1 - a];
    swapped.y[a] = cps.y[1 - a];
  }
  auto r = causal_metrics(cps);
  auto rs = causal_metrics(swapped);
  for (const auto& name :
       {"causal_parity", "causal_ppv_parity", "causal_eodds_tp", "causal_eodds_fp"})
    REQUIRE(r.value(name) == Catch::Approx(-rs.value(name)));
}

TEST_CASE("causal calibration on a hand-built two-bin input") {
  CounterfactualPredictionSet cps;
  // arm 0: scores .2,.2,.8,.8 with y 1,0,1,1 ; arm 1: scores .2,.8,.8,.8 with y 0,1,1,0
  cps.score[0] = {0.2, 0.2, 0.8, 0.8};
  cps.y[0] = {1, 0, 1, 1};
  cps.score[1] = {0.2, 0.8, 0.8, 0.8};
  cps.y[1] = {0, 1, 1, 0};
  cps.yhat[0] = {0, 0, 1, 1};
  cps.yhat[1] = {0, 1, 1, 1};
  auto bins = causal_calibration(cps, 2);
  REQUIRE(bins.size() == 2);
  REQUIRE(bins[0].count[0] == 2);
  REQUIRE(bins[0].count[1] == 1);
  REQUIRE(*bins[0].gap == Catch::Approx(0.0 - 0.5));
  REQUIRE(*bins[1].gap == Catch::Approx(2.0 / 3 - 1.0));

  // a score of exactly 1.0 lands in the closed last bin
  cps.score[1][0] = 1.0;
  cps.score[0][0] = 1.0;
  auto bins2 = causal_calibration(cps, 2);
  REQUIRE(bins2[1].count[0] == 3);
  REQUIRE(bins2[0].undefined_reason.has_value());
}

TEST_CASE("causal accuracy compares against the baseline arm") {
  CounterfactualPredictionSet cps;
  cps.yhat[0] = {1, 0, 1, 0};
  cps.y[0] = {1, 1, 1, 0};
  cps.yhat[1] = {1, 1, 1, 1};
  cps.y[1] = {0, 0, 0, 0};
  auto ca = causal_accuracy(cps, 0);
  REQUIRE(ca.agreement == Catch::Approx(0.75));
  REQUIRE(ca.signed_gap == Catch::Approx(-0.25));
  auto ca1 = causal_accuracy(cps, 1);
  REQUIRE(ca1.agreement == 0.0);
  REQUIRE_THROWS(causal_accuracy(cps, 2));
}

TEST_CASE("theorem 1 identity holds on random confusion tables") {
  Rng rng(2718);
  for (int t = 0; t < 1000; ++t) {
    ConfusionCounts c;
    c.tp = 1 + rng.below(200);
    c.fp = rng.below(200);
    c.fn = rng.below(200);
    c.tn = 1 + rng.below(200);
    auto r = theorem1_residual(c);
    REQUIRE(r.residual.has_value());
    REQUIRE(std::abs(*r.residual) < 1e-12);
  }
}

TEST_CASE("theorem 1 boundary fixtures") {
  // perfect classifier
  auto perfect = theorem1_residual({30, 0, 0, 70});
  REQUIRE(perfect.residual.has_value());
  REQUIRE(std::abs(*perfect.residual) < 1e-12);
  REQUIRE(perfect.ppv == 1.0);

  // constant-positive classifier: FPR = TPR = 1 and the identity still closes
  auto constant = theorem1_residual({30, 70, 0, 0});
  REQUIRE(constant.residual.has_value());
  REQUIRE(std::abs(*constant.residual) < 1e-12);
  REQUIRE(constant.tpr == 1.0);

  REQUIRE_FALSE(theorem1_residual({0, 0, 10, 10}).residual.has_value());
  REQUIRE_FALSE(theorem1_residual({10, 0, 0, 0}).residual.has_value());  // no negatives
  REQUIRE(theorem1_residual({0, 5, 10, 10}).undefined_reason == "PPV is zero");
  REQUIRE_THROWS(theorem1_residual({-1, 0, 0, 1}));
}
