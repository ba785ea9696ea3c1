#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zovr/harness.hpp"
#include "zovr/selftest.hpp"
#include "zovr/theory.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputEnv = "ZOVR_OUTPUT_DIR";

fs::path default_output_dir() {
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return "results";
}

void print_terms(const char* label, const zovr::StepBoundTerms& t, double L) {
  std::printf("%s,%.17g,%.17g,%.17g,%.17g\n", label, t.first / L, t.second / L, t.third / L,
              t.min() / L);
}

int cmd_verify(double sigma, std::size_t d, double p, double L) {
  (void)zovr::theorem1_alpha_max({sigma, d, p, L});  // domain check
  std::printf("bound,first,second,third,alpha_max\n");
  print_terms("theorem1", zovr::theorem1_terms(sigma, d, p), L);
  print_terms("corollary1", zovr::corollary1_terms(sigma, d), L);

  std::printf("\nalphaL,weighted_norm,spectral_radius,bound,satisfied\n");
  const double a4 = zovr::lemma4_alpha_bound(sigma, d);
  for (double scale : {0.0, 0.5, 1.0}) {
    const auto c = zovr::certify_contraction(sigma, d, scale * a4);
    std::printf("%.17g,%.17g,%.17g,%.17g,%d\n", scale * a4, c.weighted_norm, c.spectral_radius,
                c.bound, c.satisfied ? 1 : 0);
  }
  return 0;
}

int cmd_selftest() {
  int failed = 0;
  for (const auto& c : zovr::run_selftest()) {
    std::printf("%s  %s  (%s)\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.detail.c_str());
    if (!c.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed zeroth-order optimization simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  std::string config_path;
  std::string run_out;
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "CSV path, overrides [output] path");

  auto* compare = app.add_subcommand("compare", "Run a comparison suite");
  std::string suite_name;
  std::uint64_t seed = 0;
  std::uint64_t budget = 50000;
  std::string compare_out;
  unsigned jobs = 1;
  compare->add_option("--suite", suite_name, "fig1, fig2 or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  compare->add_option("--seed", seed, "Master seed");
  compare->add_option("--budget", budget, "Zeroth-order queries per agent")->check(CLI::PositiveNumber);
  compare->add_option("--out", compare_out, std::string("Output directory (default $") + kOutputEnv +
                                                " or ./results)");
  compare->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Print step-size bounds and contraction certificates");
  double sigma = 0.5;
  std::size_t d = 64;
  double p = 0.1;
  double L = 1.0;
  verify->add_option("--sigma", sigma, "Spectral gap parameter")->required();
  verify->add_option("--d", d, "Dimension")->required();
  verify->add_option("--p", p, "Snapshot probability")->required();
  verify->add_option("--L", L, "Smoothness constant");

  auto* selftest = app.add_subcommand("selftest", "Quick invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = zovr::load_config(config_path);
      if (!run_out.empty()) config.output = run_out;
      const auto result = zovr::run_experiment(config);
      std::cout << result.csv.string() << '\n';
      return 0;
    }
    if (*compare) {
      const fs::path out = compare_out.empty() ? default_output_dir() : fs::path(compare_out);
      for (const auto& path :
           zovr::run_comparison(zovr::parse_suite(suite_name), seed, budget, out, jobs))
        std::cout << path.string() << '\n';
      return 0;
    }
    if (*verify) return cmd_verify(sigma, d, p, L);
    if (*selftest) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "zovr: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
