#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairpo/dgp.hpp"

using namespace fairpo;

namespace {

HiringParams params(double alpha, double beta, double gamma, std::size_t n,
                    std::uint64_t seed) {
  HiringParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.n = n;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("generate is deterministic in the seed") {
  auto p = params(0.3, 0.5, 0.2, 2000, 77);
  auto c1 = generate(p);
  auto c2 = generate(p);
  REQUIRE(c1.x == c2.x);
  REQUIRE(c1.a == c2.a);
  REQUIRE(c1.y_obs == c2.y_obs);
  p.seed = 78;
  auto c3 = generate(p);
  REQUIRE(c1.x != c3.x);
}

TEST_CASE("observed values are consistent with the factual arm") {
  auto c = generate(params(0.4, 0.7, 0.3, 5000, 5));
  for (std::size_t i = 0; i < c.size(); ++i) {
    REQUIRE(c.s_obs[i] == (c.a[i] == 1 ? c.s1[i] : c.s0[i]));
    REQUIRE(c.y_obs[i] == (c.a[i] == 1 ? c.y1_pre[i] : c.y0_pre[i]));
    // post arms agree with the factual pre arm on the factual side
    REQUIRE((c.a[i] == 1 ? c.y1_post[i] : c.y0_post[i]) == c.y_obs[i]);
  }
}

TEST_CASE("shared noise nulls individual effects at alpha=beta=gamma=0") {
  auto c = generate(params(0.0, 0.0, 0.0, 5000, 9));
  for (std::size_t i = 0; i < c.size(); ++i) {
    REQUIRE(c.s0[i] == c.s1[i]);
    REQUIRE(c.y0_pre[i] == c.y1_pre[i]);
    REQUIRE(c.y0_post[i] == c.y1_post[i]);
  }
  auto e = oracle_effects(c);
  REQUIRE(e.causal_parity_pre == 0.0);
  REQUIRE(e.causal_parity_post == 0.0);
}

TEST_CASE("independent noise keeps expectations but not couplings") {
  auto p = params(0.0, 0.0, 0.0, 40000, 13);
  p.shared_noise = false;
  auto c = generate(p);
  std::size_t disagree = 0;
  for (std::size_t i = 0; i < c.size(); ++i) disagree += c.s0[i] != c.s1[i];
  REQUIRE(disagree > 0);
  auto e = oracle_effects(c);
  REQUIRE(std::abs(e.causal_parity_pre) < 0.02);
}

TEST_CASE("oracle_effects computes the arm means") {
  SyntheticCohort c;
  c.a = {0, 1, 1, 0};
  c.x = {0, 0, 0, 0};
  c.s0 = {0, 0, 1, 1};
  c.s1 = {0, 1, 1, 1};
  c.y0_pre = {0, 0, 1, 0};
  c.y1_pre = {1, 1, 1, 0};
  c.y0_post = {0, 1, 1, 0};
  c.y1_post = {0, 1, 1, 1};
  c.s_obs = {0, 1, 1, 1};
  c.y_obs = {0, 1, 1, 0};
  auto e = oracle_effects(c);
  REQUIRE(e.causal_parity_pre == 0.5);    // (1+1+0+0)/4
  REQUIRE(e.causal_parity_post == 0.25);  // (0+0+0+1)/4
  REQUIRE(e.statistical_parity_data == 1.0);
}

TEST_CASE("alpha and beta move the interview disparity") {
  auto null_e = oracle_effects(generate(params(0, 0, 0, 50000, 21)));
  auto beta_e = oracle_effects(generate(params(0, 1.0, 0, 50000, 21)));
  REQUIRE(std::abs(null_e.causal_parity_pre) < 0.01);
  REQUIRE(beta_e.causal_parity_pre > 0.03);
}

TEST_CASE("cohort CSV round-trips with the documented column order") {
  auto c = generate(params(0.2, 0.4, 0.1, 200, 31));
  std::ostringstream os;
  write_cohort_csv(c, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "id,a,x,s0,s1,y0_pre,y1_pre,y0_post,y1_post,s,y");

  std::string path = "dgp_roundtrip.csv";
  write_cohort_csv(c, path);
  auto c2 = read_cohort_csv(path);
  REQUIRE(c2.size() == c.size());
  REQUIRE(c2.a == c.a);
  REQUIRE(c2.s0 == c.s0);
  REQUIRE(c2.y1_pre == c.y1_pre);
  REQUIRE(c2.y_obs == c.y_obs);
  for (std::size_t i = 0; i < c.size(); ++i)
    REQUIRE(c2.x[i] == c.x[i]);  // exact via shortest round-trip formatting
  std::remove(path.c_str());
}

TEST_CASE("read_cohort_csv rejects schema and cell violations") {
  {
    std::ofstream out("dgp_bad_header.csv", std::ios::binary);
    out << "id,a,x\n0,1,0.5\n";
  }
  REQUIRE_THROWS_WITH(read_cohort_csv("dgp_bad_header.csv"),
                      Catch::Matchers::ContainsSubstring("schema mismatch"));
  {
    std::ofstream out("dgp_bad_cell.csv", std::ios::binary);
    out << "id,a,x,s0,s1,y0_pre,y1_pre,y0_post,y1_post,s,y\n"
        << "0,2,0.5,0,0,0,0,0,0,0,0\n";
  }
  REQUIRE_THROWS_WITH(read_cohort_csv("dgp_bad_cell.csv"),
                      Catch::Matchers::ContainsSubstring("non-binary"));
  std::remove("dgp_bad_header.csv");
  std::remove("dgp_bad_cell.csv");
}

TEST_CASE("cohort_to_observed_table drops the arms") {
  auto c = generate(params(0.1, 0.2, 0.1, 100, 3));
  DataTable t = cohort_to_observed_table(c);
  REQUIRE(t.n == 100);
  REQUIRE(t.columns.size() == 5);
  REQUIRE(t.col_index("s0") < 0);
  REQUIRE(t.group_column()->spec.name == "a");
  REQUIRE(t.col("s").spec.role == ColumnRole::post_treatment);
  for (std::size_t i = 0; i < t.n; ++i) {
    REQUIRE(t.col("a").num[i] == c.a[i]);
    REQUIRE(t.col("y").num[i] == c.y_obs[i]);
  }
}

TEST_CASE("params are validated") {
  HiringParams p;
  REQUIRE_THROWS(generate(p));  // n = 0
  p.n = 10;
  p.beta = -0.1;
  REQUIRE_THROWS(generate(p));
  p.beta = 0;
  p.p_group1 = 1.0;
  REQUIRE_THROWS(generate(p));
}
