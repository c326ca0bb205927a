#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairpo/rng.hpp"
#include "fairpo/tabular.hpp"

namespace fairpo {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Stylized hiring cohort: group A ~ Bern(p_group1), qualification
// X ~ N(2*alpha*(A-0.5), 1), interview score S with
// P(S=1) = sigmoid(2X + 2*beta*(A-0.5)), offer Y with
// P(Y=1) = sigmoid(2X + S + 2*gamma*(A-0.5)).
struct HiringParams {
  double alpha = 0.0;
  double beta = 0.0;   // interview-stage discrimination, >= 0
  double gamma = 0.0;  // hiring-stage discrimination, >= 0
  double p_group1 = 0.75;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  // Shared-noise coupling: one uniform per individual for S across arms and
  // one for Y. Makes consistency exact and yields zero individual-level
  // effects at alpha=beta=gamma=0. Expectation-level quantities are
  // unaffected; flip for independent per-arm noise.
  bool shared_noise = true;

  void validate() const {
    if (!(p_group1 > 0.0 && p_group1 < 1.0))
      throw std::invalid_argument("p_group1 must be in (0,1)");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  }
};

// Both potential-outcome arms for every stage plus the observed values.
// Pre arms Y(a, S(a)) encode intervention before the interview; post arms
// Y(a, s_obs) encode intervention after it.
struct SyntheticCohort {
  std::vector<int> a;
  std::vector<double> x;
  std::vector<int> s0, s1;            // S(0), S(1)
  std::vector<int> y0_pre, y1_pre;    // Y(a, S(a))
  std::vector<int> y0_post, y1_post;  // Y(a, s_obs)
  std::vector<int> s_obs, y_obs;

  std::size_t size() const { return a.size(); }
};

inline SyntheticCohort generate(const HiringParams& params) {
  params.validate();
  SyntheticCohort c;
  const std::size_t n = params.n;
  c.a.resize(n);
  c.x.resize(n);
  c.s0.resize(n);
  c.s1.resize(n);
  c.y0_pre.resize(n);
  c.y1_pre.resize(n);
  c.y0_post.resize(n);
  c.y1_post.resize(n);
  c.s_obs.resize(n);
  c.y_obs.resize(n);

  Rng rng(params.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = rng.bernoulli(params.p_group1) ? 1 : 0;
    const double x = 2.0 * params.alpha * (a - 0.5) + rng.normal();
    const double us = rng.uniform();
    const double us1 = params.shared_noise ? us : rng.uniform();
    const int s0 = us < sigmoid(2.0 * x - params.beta) ? 1 : 0;
    const int s1 = us1 < sigmoid(2.0 * x + params.beta) ? 1 : 0;
    const int s = a == 1 ? s1 : s0;
    const double uy = rng.uniform();
    const double uy1 = params.shared_noise ? uy : rng.uniform();
    auto draw_y = [&](int arm, int sval) {
      const double u = arm == 1 ? uy1 : uy;
      return u < sigmoid(2.0 * x + sval + 2.0 * params.gamma * (arm - 0.5)) ? 1 : 0;
    };
    c.a[i] = a;
    c.x[i] = x;
    c.s0[i] = s0;
    c.s1[i] = s1;
    c.s_obs[i] = s;
    c.y0_pre[i] = draw_y(0, s0);
    c.y1_pre[i] = draw_y(1, s1);
    c.y0_post[i] = draw_y(0, s);
    c.y1_post[i] = draw_y(1, s);
    c.y_obs[i] = a == 1 ? c.y1_pre[i] : c.y0_pre[i];
  }
  return c;
}

// Ground-truth causal quantities from the stored arms; validates imputation.
struct OracleEffects {
  double causal_parity_pre = 0.0;     // E[Y(1,S(1)) - Y(0,S(0))]
  double causal_parity_post = 0.0;    // E[Y(1,s_obs) - Y(0,s_obs)]
  double statistical_parity_data = 0.0;
};

inline OracleEffects oracle_effects(const SyntheticCohort& c) {
  const std::size_t n = c.size();
  if (n == 0) throw std::invalid_argument("empty cohort");
  double pre = 0, post = 0;
  double sum1 = 0, sum0 = 0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    pre += c.y1_pre[i] - c.y0_pre[i];
    post += c.y1_post[i] - c.y0_post[i];
    if (c.a[i] == 1) {
      sum1 += c.y_obs[i];
      ++n1;
    } else {
      sum0 += c.y_obs[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0)
    throw std::runtime_error("statistical parity undefined: a group is empty");
  OracleEffects e;
  e.causal_parity_pre = pre / static_cast<double>(n);
  e.causal_parity_post = post / static_cast<double>(n);
  e.statistical_parity_data =
      sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0);
  return e;
}

inline const std::vector<std::string>& cohort_csv_columns() {
  static const std::vector<std::string> cols = {
      "id", "a", "x", "s0", "s1", "y0_pre", "y1_pre", "y0_post", "y1_post", "s", "y"};
  return cols;
}

inline void write_cohort_csv(const SyntheticCohort& c, std::ostream& out) {
  csv::write_row(out, cohort_csv_columns());
  std::vector<std::string> row(11);
  for (std::size_t i = 0; i < c.size(); ++i) {
    row[0] = std::to_string(i);
    row[1] = std::to_string(c.a[i]);
    row[2] = detail::format_number(c.x[i]);
    row[3] = std::to_string(c.s0[i]);
    row[4] = std::to_string(c.s1[i]);
    row[5] = std::to_string(c.y0_pre[i]);
    row[6] = std::to_string(c.y1_pre[i]);
    row[7] = std::to_string(c.y0_post[i]);
    row[8] = std::to_string(c.y1_post[i]);
    row[9] = std::to_string(c.s_obs[i]);
    row[10] = std::to_string(c.y_obs[i]);
    csv::write_row(out, row);
  }
}

inline void write_cohort_csv(const SyntheticCohort& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_cohort_csv(c, out);
}

inline SyntheticCohort read_cohort_csv(const std::string& path) {
  auto rows = csv::parse_file(path);
  if (rows.empty()) throw std::runtime_error(path + ": empty file");
  const auto& header = rows.front();
  const auto& want = cohort_csv_columns();
  if (header != want)
    throw std::runtime_error(path + ": cohort schema mismatch (expected columns " +
                             "id,a,x,s0,s1,y0_pre,y1_pre,y0_post,y1_post,s,y)");
  if (rows.size() < 2) throw std::runtime_error(path + ": cohort has no rows");
  SyntheticCohort c;
  const std::size_t n = rows.size() - 1;
  auto bit = [&](const std::string& s, std::size_t r, std::size_t col) {
    auto v = detail::parse_number(s);
    if (!v || (*v != 0.0 && *v != 1.0))
      throw std::runtime_error(path + ": non-binary cell at row " + std::to_string(r) +
                               " column " + want[col]);
    return static_cast<int>(*v);
  };
  c.a.resize(n);
  c.x.resize(n);
  c.s0.resize(n);
  c.s1.resize(n);
  c.y0_pre.resize(n);
  c.y1_pre.resize(n);
  c.y0_post.resize(n);
  c.y1_post.resize(n);
  c.s_obs.resize(n);
  c.y_obs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != want.size())
      throw std::runtime_error(path + ": ragged row " + std::to_string(i));
    auto x = detail::parse_number(row[2]);
    if (!x) throw std::runtime_error(path + ": bad x at row " + std::to_string(i));
    c.a[i] = bit(row[1], i, 1);
    c.x[i] = *x;
    c.s0[i] = bit(row[3], i, 3);
    c.s1[i] = bit(row[4], i, 4);
    c.y0_pre[i] = bit(row[5], i, 5);
    c.y1_pre[i] = bit(row[6], i, 6);
    c.y0_post[i] = bit(row[7], i, 7);
    c.y1_post[i] = bit(row[8], i, 8);
    c.s_obs[i] = bit(row[9], i, 9);
    c.y_obs[i] = bit(row[10], i, 10);
  }
  return c;
}

// A cohort as an observational table: the arms are dropped, only the
// observed values remain (what a real dataset would contain).
inline DataTable cohort_to_observed_table(const SyntheticCohort& c) {
  DataTable t;
  t.n = c.size();
  auto num_col = [&](const std::string& name, ColumnKind kind, ColumnRole role) {
    Column col;
    col.spec = {name, kind, role};
    col.num.resize(t.n);
    return col;
  };
  Column id = num_col("id", ColumnKind::numeric, ColumnRole::id);
  Column a = num_col("a", ColumnKind::binary, ColumnRole::group);
  Column x = num_col("x", ColumnKind::numeric, ColumnRole::pre_treatment);
  Column s = num_col("s", ColumnKind::binary, ColumnRole::post_treatment);
  Column y = num_col("y", ColumnKind::binary, ColumnRole::outcome);
  for (std::size_t i = 0; i < t.n; ++i) {
    id.num[i] = static_cast<double>(i);
    a.num[i] = c.a[i];
    x.num[i] = c.x[i];
    s.num[i] = c.s_obs[i];
    y.num[i] = c.y_obs[i];
  }
  t.columns = {std::move(id), std::move(a), std::move(x), std::move(s), std::move(y)};
  return t;
}

}  // namespace fairpo
