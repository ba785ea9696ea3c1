#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zovr/algorithms.hpp"
#include "zovr/metrics.hpp"
#include "zovr/network.hpp"
#include "zovr/oracle.hpp"

namespace zovr {

// Where the objective comes from: generated from (kind, dim, seed), or loaded
// from a parameter dump when `file` is set.
struct ObjectiveSource {
  ObjectiveKind kind = ObjectiveKind::benchmark;
  std::size_t dim = 64;
  std::uint64_t seed = 0;
  std::filesystem::path file;
};

struct ExperimentConfig {
  TopologySpec topology{TopologyKind::erdos_renyi, 50, 0.3, 0};
  ObjectiveSource objective;
  RunOptions run;
  std::filesystem::path output = "run.csv";
  // Free-form [meta] entries, echoed into sidecars and ignored by the runner.
  std::vector<std::pair<std::string, std::string>> notes;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// INI-style format; see README for the grammar. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& config);
std::string to_string(const ExperimentConfig& config);

// Checks every module precondition without running anything.
void validate(const ExperimentConfig& config);

// Builds the objective described by the config.
std::shared_ptr<const ObjectiveSpec> build_objective(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::filesystem::path csv;
  std::filesystem::path sidecar;
};

// Sidecar path for a CSV: same stem, ".cfg" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

// Runs the experiment, writes the CSV to config.output and the config echo to
// its sidecar.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class Suite { fig1, fig2, fig3 };

std::string_view to_string(Suite suite);
Suite parse_suite(std::string_view name);

// Shared setup of the comparison suites.
inline constexpr std::size_t kSuiteAgents = 50;
inline constexpr std::size_t kSuiteDim = 64;
inline constexpr double kSuiteStep = 0.02;
inline constexpr double kSuiteU0 = 3.0;
inline constexpr double kSuiteQ = 0.75;
inline constexpr double kSuiteEdgeProb = 0.3;

// Snapshot probability used for dimension d in the fig3 suite.
double fig3_probability(std::size_t d);

// Configs of a suite. `budget` is in queries per agent, so every run in a
// suite stops at the same total query count.
std::vector<ExperimentConfig> suite_configs(Suite suite, std::uint64_t seed, std::uint64_t budget,
                                            const std::filesystem::path& out_dir);

// Runs all configs of the suite on up to `jobs` threads; returns the CSV paths.
std::vector<std::filesystem::path> run_comparison(Suite suite, std::uint64_t seed,
                                                  std::uint64_t budget,
                                                  const std::filesystem::path& out_dir,
                                                  unsigned jobs = 1);

struct DecayFit {
  double slope = 0.0;
  std::size_t clamped = 0;  // non-positive gaps replaced by 1e-300
};

inline constexpr std::size_t kMinDecayRows = 50;

// Least-squares slope of log(running mean of stat_gap) against log(k) over the
// last half of the series.
DecayFit fit_decay_rate(std::span<const MetricsRow> rows);

}  // namespace zovr
