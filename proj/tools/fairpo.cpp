#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairpo/fairpo.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using Clock = std::chrono::steady_clock;

void write_manifest(const std::string& command, const nlohmann::json& config,
                    std::uint64_t seed, double wall_s,
                    const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  m["tool_version"] = kVersion;
  m["wall_time_s"] = wall_s;
  m["outputs"] = outputs;
  const std::string path = outputs.empty() ? command + ".manifest.json"
                                           : outputs.front() + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << m.dump(2) << '\n';
}

int cmd_generate(const fairpo::HiringParams& params, const std::string& out_path) {
  const auto t0 = Clock::now();
  fairpo::SyntheticCohort cohort = fairpo::generate(params);
  fairpo::write_cohort_csv(cohort, out_path);
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
  nlohmann::json cfg{{"alpha", params.alpha}, {"beta", params.beta},
                     {"gamma", params.gamma}, {"n", params.n},
                     {"p_group1", params.p_group1},
                     {"shared_noise", params.shared_noise}, {"out", out_path}};
  write_manifest("generate", cfg, params.seed, wall, {out_path});
  std::cout << "wrote " << cohort.size() << " rows to " << out_path << "\n";
  return 0;
}

fairpo::SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  fairpo::SweepConfig cfg;
  if (j.contains("alphas")) cfg.alphas = j["alphas"].get<std::vector<double>>();
  if (j.contains("betas")) cfg.betas = j["betas"].get<std::vector<double>>();
  if (j.contains("gammas")) cfg.gammas = j["gammas"].get<std::vector<double>>();
  if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
  if (j.contains("repeats")) cfg.repeats = j["repeats"].get<std::size_t>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("evaluators"))
    cfg.evaluators = j["evaluators"].get<std::vector<std::string>>();
  if (j.contains("M")) cfg.M = j["M"].get<std::size_t>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<std::size_t>();
  return cfg;
}

nlohmann::json sweep_config_to_json(const fairpo::SweepConfig& cfg) {
  return {{"alphas", cfg.alphas},   {"betas", cfg.betas},
          {"gammas", cfg.gammas},   {"n", cfg.n},
          {"repeats", cfg.repeats}, {"master_seed", cfg.master_seed},
          {"evaluators", cfg.evaluators}, {"M", cfg.M},
          {"workers", cfg.workers}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness evaluation and mitigation under potential outcomes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Generate a synthetic hiring cohort");
  fairpo::HiringParams gp;
  gp.n = 100000;
  gp.seed = 42;
  std::string gen_out = "cohort.csv";
  bool independent_noise = false;
  gen->add_option("--alpha", gp.alpha, "qualification gap control");
  gen->add_option("--beta", gp.beta, "interview-stage discrimination (>= 0)")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--gamma", gp.gamma, "hiring-stage discrimination (>= 0)")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--n", gp.n, "cohort size")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gp.seed, "random seed");
  gen->add_option("--p-group1", gp.p_group1, "P(A=1)")->check(CLI::Range(0.0, 1.0));
  gen->add_flag("--independent-noise", independent_noise,
                "draw the two potential-outcome arms with independent noise");
  gen->add_option("--out", gen_out, "output cohort CSV path");

  // sweep ------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run the evaluation sweep over (alpha, beta, gamma)");
  std::string sweep_config_path, sweep_out = "sweep.csv", sweep_format = "csv";
  std::vector<double> opt_alphas, opt_betas, opt_gammas;
  std::vector<std::string> opt_evaluators;
  std::size_t opt_n = 0, opt_repeats = 0, opt_workers = 0, opt_m = 0;
  std::uint64_t opt_seed = 0;
  bool seed_set = false;
  sweep->add_option("--config", sweep_config_path, "JSON config file (flags override)");
  sweep->add_option("--alphas", opt_alphas, "alpha grid");
  sweep->add_option("--betas", opt_betas, "beta grid");
  sweep->add_option("--gammas", opt_gammas, "gamma grid");
  sweep->add_option("--n", opt_n, "cohort size per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--repeats", opt_repeats, "repeats per cell (>= 2)");
  sweep->add_option("--workers", opt_workers, "worker threads");
  sweep->add_option("--M", opt_m, "imputation count");
  sweep
      ->add_option_function<std::uint64_t>(
          "--seed",
          [&](std::uint64_t v) {
            opt_seed = v;
            seed_set = true;
          },
          "master seed");
  sweep->add_option("--evaluators", opt_evaluators,
                    "subset of statistical, causal_pre, causal_post");
  sweep->add_option("--out", sweep_out, "output plot-data path");
  sweep->add_option("--format", sweep_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // mitigate ---------------------------------------------------------------
  auto* mit = app.add_subcommand("mitigate", "Run the mitigation benchmark");
  fairpo::BenchmarkConfig bc;
  std::string mit_method = "all", mit_out = "benchmark.csv";
  mit->add_option("--method", mit_method,
                  "all or one of rew, prem, roc, causal-pre, causal-post, none");
  mit->add_option("--alpha", bc.alpha);
  mit->add_option("--beta", bc.beta)->check(CLI::NonNegativeNumber);
  mit->add_option("--gamma", bc.gamma)->check(CLI::NonNegativeNumber);
  mit->add_option("--n", bc.n)->check(CLI::PositiveNumber);
  mit->add_option("--M", bc.M)->check(CLI::PositiveNumber);
  mit->add_option("--repeats", bc.repeats)->check(CLI::PositiveNumber);
  mit->add_option("--seed", bc.master_seed);
  mit->add_option("--prem-eta", bc.prem_eta)->check(CLI::NonNegativeNumber);
  mit->add_option("--baseline-arm", bc.baseline_arm)->check(CLI::Range(0, 1));
  mit->add_option("--out", mit_out, "output benchmark CSV path");

  // ingest -----------------------------------------------------------------
  auto* ing = app.add_subcommand("ingest", "Positivity-filter a CSV table");
  std::string ing_in, ing_group, ing_out = "filtered.csv", ing_audit = "audit.json";
  std::vector<std::string> ing_cats;
  ing->add_option("--in", ing_in, "input CSV")->required();
  ing->add_option("--group-col", ing_group, "binary group column")->required();
  ing->add_option("--cat-cols", ing_cats, "categorical columns defining cells")->required();
  ing->add_option("--out", ing_out, "filtered table output path");
  ing->add_option("--audit", ing_audit, "positivity audit JSON path");

  // selfcheck ----------------------------------------------------------------
  auto* self = app.add_subcommand(
      "selfcheck", "Run the built-in identity and gradient check suites");
  std::uint64_t self_seed = 1234;
  self->add_option("--seed", self_seed, "seed for the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      gp.shared_noise = !independent_noise;
      gp.validate();
      return cmd_generate(gp, gen_out);
    }

    if (sweep->parsed()) {
      const auto t0 = Clock::now();
      fairpo::SweepConfig cfg;
      if (!sweep_config_path.empty()) {
        std::ifstream in(sweep_config_path, std::ios::binary);
        if (!in) {
          std::cerr << "cannot open config: " << sweep_config_path << "\n";
          return 2;
        }
        nlohmann::json j;
        try {
          in >> j;
          cfg = sweep_config_from_json(j);
        } catch (const std::exception& ex) {
          std::cerr << "malformed config " << sweep_config_path << ": " << ex.what()
                    << "\n";
          return 2;
        }
      }
      if (!opt_alphas.empty()) cfg.alphas = opt_alphas;
      if (!opt_betas.empty()) cfg.betas = opt_betas;
      if (!opt_gammas.empty()) cfg.gammas = opt_gammas;
      if (!opt_evaluators.empty()) cfg.evaluators = opt_evaluators;
      if (opt_n) cfg.n = opt_n;
      if (opt_repeats) cfg.repeats = opt_repeats;
      if (opt_workers) cfg.workers = opt_workers;
      if (opt_m) cfg.M = opt_m;
      if (seed_set) cfg.master_seed = opt_seed;
      try {
        cfg.validate();
      } catch (const std::exception& ex) {
        std::cerr << "invalid sweep config: " << ex.what() << "\n";
        return 2;
      }
      fairpo::SweepResult result = fairpo::run_evaluation_sweep(cfg);
      fairpo::emit_plot_data(result, sweep_out, sweep_format);
      const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
      nlohmann::json cj = sweep_config_to_json(cfg);
      cj["out"] = sweep_out;
      cj["format"] = sweep_format;
      write_manifest("sweep", cj, cfg.master_seed, wall, {sweep_out});
      for (const auto& f : result.failures) std::cerr << "cell failed: " << f << "\n";
      std::cout << "wrote " << result.rows.size() << " rows to " << sweep_out << "\n";
      return result.failures.empty() ? 0 : 1;
    }

    if (mit->parsed()) {
      const auto t0 = Clock::now();
      if (mit_method != "all") {
        std::string canon = mit_method;
        for (auto& ch : canon)
          if (ch == '-') ch = '_';
        try {
          (void)fairpo::method_by_name(canon, bc);
        } catch (const std::exception&) {
          std::cerr << "unknown method '" << mit_method
                    << "'; valid: all, none, rew, prem, roc, causal-pre, causal-post\n";
          return 2;
        }
        bc.methods = {canon};
      }
      fairpo::BenchmarkResult result = fairpo::run_mitigation_benchmark(bc);
      fairpo::write_benchmark_csv(result, mit_out);
      const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
      nlohmann::json cj{{"method", mit_method}, {"alpha", bc.alpha},
                        {"beta", bc.beta},      {"gamma", bc.gamma},
                        {"n", bc.n},            {"M", bc.M},
                        {"repeats", bc.repeats}, {"prem_eta", bc.prem_eta},
                        {"baseline_arm", bc.baseline_arm}, {"out", mit_out}};
      write_manifest("mitigate", cj, bc.master_seed, wall, {mit_out});
      std::cout << "wrote benchmark to " << mit_out << "\n";
      return 0;
    }

    if (ing->parsed()) {
      const auto t0 = Clock::now();
      auto raw = fairpo::csv::parse_file(ing_in);
      if (raw.empty()) {
        std::cerr << ing_in << ": empty file\n";
        return 1;
      }
      std::vector<fairpo::ColumnSpec> schema;
      for (const auto& name : raw.front()) {
        fairpo::ColumnSpec spec;
        spec.name = name;
        if (name == ing_group) {
          spec.kind = fairpo::ColumnKind::binary;
          spec.role = fairpo::ColumnRole::group;
        } else if (std::find(ing_cats.begin(), ing_cats.end(), name) != ing_cats.end()) {
          spec.kind = fairpo::ColumnKind::categorical;
        } else {
          spec.kind = fairpo::ColumnKind::numeric;
        }
        schema.push_back(std::move(spec));
      }
      if (std::none_of(schema.begin(), schema.end(), [&](const auto& s) {
            return s.name == ing_group;
          })) {
        std::cerr << "group column '" << ing_group << "' not in header\n";
        return 2;
      }
      fairpo::DataTable table = fairpo::load_csv(ing_in, schema);
      fairpo::PositivityResult filtered =
          fairpo::positivity_filter(table, ing_group, ing_cats);
      fairpo::write_csv(filtered.table, ing_out);
      {
        std::ofstream out(ing_audit, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + ing_audit);
        nlohmann::json aj;
        aj["removed_count"] = filtered.removed_count;
        aj["cells"] = fairpo::positivity_audit_json(filtered);
        out << aj.dump(2) << '\n';
      }
      const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
      nlohmann::json cj{{"in", ing_in},   {"group_col", ing_group},
                        {"cat_cols", ing_cats}, {"out", ing_out},
                        {"audit", ing_audit}};
      write_manifest("ingest", cj, 0, wall, {ing_out, ing_audit});
      std::cout << "kept " << filtered.table.n << " rows, removed "
                << filtered.removed_count << "\n";
      return 0;
    }

    if (self->parsed()) {
      auto suites = fairpo::run_selfchecks(self_seed);
      bool all_ok = true;
      for (const auto& s : suites) {
        std::cout << (s.passed ? "PASS" : "FAIL") << "  " << s.name;
        if (!s.passed) std::cout << "  (" << s.detail << ")";
        std::cout << "\n";
        all_ok = all_ok && s.passed;
      }
      return all_ok ? 0 : 1;
    }
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
