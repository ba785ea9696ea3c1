#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "zovr/harness.hpp"
#include "zovr/log.hpp"

using namespace zovr;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("zovr_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.topology = {TopologyKind::ring, 5, 0.0, 1};
  c.objective = {ObjectiveKind::benchmark, 4, 2, {}};
  c.run.algorithm = AlgorithmKind::vrgt;
  c.run.p = 0.3;
  c.run.stop = StopCondition::rounds(10);
  c.run.seed = 3;
  c.output = out;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Metrics, AgreementAtStationaryPoint) {
  auto spec = fixtures::scaled_norm(3, 2);
  RunState s;
  s.algorithm = AlgorithmKind::dgd2p;
  s.x = Stacked::Zero(3, 2);
  auto row = compute_metrics(s, *spec, 7);
  EXPECT_EQ(row.stat_gap, 0.0);
  EXPECT_EQ(row.consensus_err, 0.0);
  EXPECT_FALSE(row.tracking_err.has_value());
  EXPECT_EQ(row.m, 7u);
}

TEST(Metrics, ConsensusErrorOfOpposedAgents) {
  auto spec = fixtures::scaled_norm(2, 2);
  RunState s;
  s.algorithm = AlgorithmKind::dgd2p;
  s.x = Stacked(2, 2);
  s.x << 1, 0, -1, 0;
  EXPECT_EQ(compute_metrics(s, *spec, 0).consensus_err, 1.0);
}

TEST(Metrics, TrackingErrorZeroWhenTrackersEqualGradient) {
  auto spec = fixtures::scaled_norm(3, 2);
  RunState s;
  s.algorithm = AlgorithmKind::gt2d;
  s.x = Stacked(3, 2);
  s.x << 1, 2, 3, 4, 5, 6;
  s.s = Stacked(3, 2);
  s.s.rowwise() = row_mean(s.x).transpose();
  auto row = compute_metrics(s, *spec, 0);
  ASSERT_TRUE(row.tracking_err.has_value());
  EXPECT_EQ(*row.tracking_err, 0.0);
  EXPECT_DOUBLE_EQ(row.stat_gap, row_mean(s.x).squaredNorm());
  EXPECT_DOUBLE_EQ(row.consensus_err, (4.0 + 4.0 + 0.0 + 0.0 + 4.0 + 4.0) / 3);
}

TEST(Csv, Format) {
  MetricsRow a{1, 20, 0.1, 1.0 / 3, std::nullopt};
  MetricsRow b{2, 40, 1e-300, 0.0, 2.0 / 3};
  EXPECT_EQ(format_csv_row(a), "1,20,0.10000000000000001,0.33333333333333331,");
  EXPECT_EQ(format_csv_row(b), "2,40,1e-300,0,0.66666666666666663");
  std::ostringstream out;
  std::vector<MetricsRow> rows{a, b};
  write_csv(out, rows);
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n" + format_csv_row(a) + "\n" + format_csv_row(b) + "\n");
}

TEST(Csv, ParsesBackExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-30, 5);
  for (int t = 0; t < 200; ++t) {
    MetricsRow r{static_cast<std::size_t>(t), 10u * t, std::pow(10.0, u(rng)), std::pow(10.0, u(rng)),
                 std::pow(10.0, u(rng))};
    auto fields = format_csv_row(r);
    std::istringstream in(fields);
    std::string f;
    std::vector<std::string> parts;
    while (std::getline(in, f, ',')) parts.push_back(f);
    ASSERT_EQ(parts.size(), 5u);
    EXPECT_EQ(std::stod(parts[2]), r.stat_gap);
    EXPECT_EQ(std::stod(parts[3]), r.consensus_err);
    EXPECT_EQ(std::stod(parts[4]), *r.tracking_err);
  }
}

TEST(Config, RoundTripDefaults) {
  ExperimentConfig c;
  std::istringstream in(to_string(c));
  EXPECT_EQ(parse_config(in), c);
}

TEST(Config, RoundTripRandomized) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    ExperimentConfig c;
    c.topology = {static_cast<TopologyKind>(t % 5), 2 + static_cast<std::size_t>(t % 40), 0.05 + 0.95 * u(rng),
                  rng()};
    c.objective = {static_cast<ObjectiveKind>(t % 3), 1 + static_cast<std::size_t>(t % 100), rng(), {}};
    c.run.algorithm = static_cast<AlgorithmKind>(t % 3);
    c.run.p = u(rng);
    c.run.counting = t % 2 ? CountingMode::cached : CountingMode::paper_faithful;
    c.run.tracker_init = t % 2 ? TrackerInit::zero : TrackerInit::estimate;
    c.run.schedule = Schedule(StepSize{static_cast<StepRule>(t % 2), u(rng) / 7, u(rng)},
                              1e-3 + 10 * u(rng), 0.51 + 0.49 * u(rng));
    c.run.stop = {static_cast<StopCondition::Kind>(t % 3), 1 + rng() % 1000000};
    c.run.seed = rng();
    c.run.init = t % 2 ? InitMode::heterogeneous : InitMode::shared;
    c.run.init_scale = 3 * u(rng);
    c.output = "out/run_" + std::to_string(t) + ".csv";
    if (t % 4 == 0) c.notes = {{"who", "tester"}, {"note", "trial " + std::to_string(t)}};
    std::istringstream in(to_string(c));
    ExperimentConfig back = parse_config(in);
    EXPECT_EQ(back, c) << to_string(c);
    EXPECT_EQ(to_string(back), to_string(c));
  }
}

TEST(Config, PartialFileUsesDefaults) {
  std::istringstream in("[algorithm]\nname = gt2d\n\n[stop]\nkind = rounds\nvalue = 7\n");
  auto c = parse_config(in);
  EXPECT_EQ(c.run.algorithm, AlgorithmKind::gt2d);
  EXPECT_EQ(c.run.stop.value, 7u);
  EXPECT_EQ(c.topology.n_agents, 50u);
  EXPECT_EQ(c.run.schedule.u0(), 3.0);
}

TEST(Config, Errors) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW(bad("[topology]\ncolour = red\n"), ConfigError);
  EXPECT_THROW(bad("[plot]\nx = 1\n"), ConfigError);
  EXPECT_THROW(bad("[algorithm]\np = often\n"), ConfigError);
  EXPECT_THROW(bad("[algorithm]\np = 1.5\n"), ConfigError);
  EXPECT_THROW(bad("[algorithm]\nname = sgd\n"), ConfigError);
  EXPECT_THROW(bad("[topology]\nn_agents = -3\n"), ConfigError);
  EXPECT_THROW(bad("[topology]\nn_agents = 1\n"), ConfigError);
  EXPECT_THROW(bad("[schedule]\nq = 0\n"), ConfigError);
  EXPECT_THROW(bad("[schedule]\nu0 = nan\n"), ConfigError);
  EXPECT_THROW(bad("[stop]\nvalue = 0\n"), ConfigError);
  EXPECT_THROW(bad("[stop]\nkind = forever\n"), ConfigError);
  EXPECT_THROW(bad("[run]\nseed =\n"), ConfigError);
  EXPECT_THROW(bad("[run\nseed = 1\n"), ConfigError);
  EXPECT_THROW(bad("[run]\nseed = 1\nseed = 2\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/dir/cfg.ini"), ConfigError);
}

TEST(Config, ObjectiveFromDump) {
  TempDir tmp;
  auto spec = make_quadratic(5, 3, 8);
  {
    std::ofstream out(tmp.path() / "obj.txt");
    write_objective(out, spec);
  }
  auto c = small_config(tmp.path() / "run.csv");
  c.objective.file = tmp.path() / "obj.txt";
  EXPECT_TRUE(*build_objective(c) == spec);
  c.topology.n_agents = 6;
  EXPECT_THROW(build_objective(c), ConfigError);
  c.objective.file = tmp.path() / "missing.txt";
  EXPECT_THROW(build_objective(c), ConfigError);
}

TEST(RunExperiment, RowCountAndSidecar) {
  TempDir tmp;
  auto c = small_config(tmp.path() / "nested" / "run.csv");
  auto r = run_experiment(c);
  EXPECT_EQ(r.rows.size(), 10u);
  auto text = lines(slurp(r.csv));
  ASSERT_EQ(text.size(), 11u);
  EXPECT_EQ(text[0], kCsvHeader);
  EXPECT_EQ(r.sidecar, tmp.path() / "nested" / "run.cfg");
  EXPECT_EQ(load_config(r.sidecar), c);
  EXPECT_EQ(slurp(r.csv).find('\r'), std::string::npos);
}

TEST(RunExperiment, ReplayIsByteIdentical) {
  TempDir tmp;
  for (auto kind : {AlgorithmKind::dgd2p, AlgorithmKind::gt2d, AlgorithmKind::vrgt}) {
    auto c = small_config(tmp.path() / "a.csv");
    c.run.algorithm = kind;
    run_experiment(c);
    const auto first = slurp(c.output);
    // replay from the sidecar, as a fresh user would
    auto replay = load_config(sidecar_path(c.output));
    replay.output = tmp.path() / "b.csv";
    run_experiment(replay);
    EXPECT_EQ(first, slurp(replay.output)) << to_string(kind);
  }
}

TEST(RunExperiment, Errors) {
  TempDir tmp;
  auto blocker = tmp.path() / "file";
  std::ofstream(blocker) << "x";
  auto c = small_config(blocker / "run.csv");
  EXPECT_THROW(run_experiment(c), Error);
  c.output = tmp.path() / "run.cfg";
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = small_config(tmp.path() / "run.csv");
  c.run.p = -1;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(RunExperiment, QueryAxisMatchesCostModel) {
  TempDir tmp;
  auto c = small_config(tmp.path() / "q.csv");
  c.run.stop = StopCondition::rounds(40);
  const std::uint64_t n = 5;
  const std::uint64_t d = 4;
  c.run.algorithm = AlgorithmKind::dgd2p;
  auto rows = run_experiment(c).rows;
  for (std::size_t j = 0; j < rows.size(); ++j) EXPECT_EQ(rows[j].m, 2 * n * (j + 1));
  c.run.algorithm = AlgorithmKind::gt2d;
  rows = run_experiment(c).rows;
  for (std::size_t j = 0; j < rows.size(); ++j) EXPECT_EQ(rows[j].m, 2 * d * n * (j + 2));
  c.run.algorithm = AlgorithmKind::vrgt;
  rows = run_experiment(c).rows;
  std::uint64_t prev = 2 * d * n;
  for (const auto& r : rows) {
    const auto delta = r.m - prev;
    EXPECT_GE(delta, 4 * n);
    EXPECT_EQ((delta - 4 * n) % (2 * d), 0u);
    prev = r.m;
  }
}

TEST(Suites, Fig1) {
  auto cs = suite_configs(Suite::fig1, 5, 1000, "out");
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(cs[0].run.algorithm, AlgorithmKind::vrgt);
  EXPECT_EQ(cs[0].run.p, 0.1);
  EXPECT_EQ(cs[1].run.algorithm, AlgorithmKind::dgd2p);
  EXPECT_EQ(cs[2].run.algorithm, AlgorithmKind::gt2d);
  for (const auto& c : cs) {
    EXPECT_EQ(c.topology.n_agents, 50u);
    EXPECT_EQ(c.objective.dim, 64u);
    EXPECT_EQ(c.objective.seed, 5u);
    EXPECT_EQ(c.run.seed, 5u);
    EXPECT_EQ(c.run.stop.kind, StopCondition::Kind::agent_query_budget);
    EXPECT_EQ(c.run.stop.value, 1000u);
    EXPECT_EQ(c.run.schedule.step(10), 0.02);
    EXPECT_EQ(c.run.schedule.u0(), 3.0);
    EXPECT_EQ(c.run.schedule.q(), 0.75);
    EXPECT_EQ(c.run.init, InitMode::shared);
  }
  EXPECT_EQ(cs[0].output, fs::path("out") / "fig1_vrgt.csv");
}

TEST(Suites, Fig2AndFig3) {
  auto f2 = suite_configs(Suite::fig2, 1, 100, "o");
  ASSERT_EQ(f2.size(), 4u);
  const std::vector<std::string> recorded{"p = 0.2\n", "p = 0.5\n", "p = 0.8\n", "p = 1\n"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(f2[i].run.algorithm, AlgorithmKind::vrgt);
    EXPECT_NE(to_string(f2[i]).find(recorded[i]), std::string::npos);
  }

  auto f3 = suite_configs(Suite::fig3, 1, 100, "o");
  ASSERT_EQ(f3.size(), 4u);
  std::vector<std::size_t> dims;
  double prev_p = 1.0;
  for (const auto& c : f3) {
    dims.push_back(c.objective.dim);
    EXPECT_EQ(c.run.p, std::min(0.1, 8.0 / static_cast<double>(c.objective.dim)));
    EXPECT_LE(c.run.p, prev_p);
    prev_p = c.run.p;
    EXPECT_NE(to_string(c).find("p_mapping"), std::string::npos);
  }
  EXPECT_EQ(dims, (std::vector<std::size_t>{30, 100, 200, 300}));
  EXPECT_EQ(fig3_probability(30), 0.1);
  EXPECT_EQ(fig3_probability(200), 0.04);
  EXPECT_THROW(suite_configs(Suite::fig1, 1, 0, "o"), ConfigError);
  EXPECT_EQ(parse_suite("fig2"), Suite::fig2);
  EXPECT_THROW(parse_suite("fig4"), ConfigError);
}

TEST(Suites, ComparisonWritesAlignedFiles) {
  TempDir tmp;
  auto paths = run_comparison(Suite::fig1, 3, 800, tmp.path(), 2);
  ASSERT_EQ(paths.size(), 3u);
  for (const auto& p : paths) {
    EXPECT_TRUE(fs::exists(p));
    EXPECT_TRUE(fs::exists(sidecar_path(p)));
    auto text = lines(slurp(p));
    ASSERT_GE(text.size(), 2u);
    // every run stops at the first round reaching the shared per-agent budget
    std::istringstream last(text.back());
    std::string k, m;
    std::getline(last, k, ',');
    std::getline(last, m, ',');
    EXPECT_GE(std::stoull(m), 800u * 50u);
  }
  // same seed and budget on one thread gives the same bytes
  TempDir again;
  auto serial = run_comparison(Suite::fig1, 3, 800, again.path(), 1);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(slurp(paths[i]), slurp(serial[i]));
}

TEST(DecayFit, RunningMeanExactlyOneOverK) {
  // a single unit of mass at k = 1: the running mean is exactly 1/k
  std::vector<MetricsRow> rows;
  for (std::size_t k = 1; k <= 400; ++k) rows.push_back({k, k, k == 1 ? 1.0 : 0.0, 0.0, std::nullopt});
  int warnings = 0;
  set_warning_sink([&](std::string_view) { ++warnings; });
  auto fit = fit_decay_rate(rows);
  set_warning_sink({});
  EXPECT_NEAR(fit.slope, -1.0, 0.01);
  EXPECT_EQ(fit.clamped, 399u);
  EXPECT_EQ(warnings, 1);
}

TEST(DecayFit, InverseSquareSeries) {
  std::vector<MetricsRow> rows;
  for (std::size_t k = 1; k <= 2000; ++k)
    rows.push_back({k, k, 1.0 / static_cast<double>(k * k), 0.0, std::nullopt});
  EXPECT_NEAR(fit_decay_rate(rows).slope, -1.0, 0.01);
}

TEST(DecayFit, ConstantSeries) {
  std::vector<MetricsRow> rows;
  for (std::size_t k = 1; k <= 100; ++k) rows.push_back({k, k, 0.5, 0.0, std::nullopt});
  EXPECT_NEAR(fit_decay_rate(rows).slope, 0.0, 1e-12);
}

TEST(DecayFit, InverseKSeriesMatchesDirectFit) {
  // stat_gap = 1/k: the running mean is H_k / k; fit that curve independently
  const std::size_t n = 1000;
  std::vector<MetricsRow> rows;
  std::vector<long double> lx, ly;
  long double h = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    rows.push_back({k, k, 1.0 / static_cast<double>(k), 0.0, std::nullopt});
    h += 1.0L / k;
    if (k > n / 2) {
      lx.push_back(std::log(static_cast<long double>(k)));
      ly.push_back(std::log(h / k));
    }
  }
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(fit_decay_rate(rows).slope, static_cast<double>(sxy / sxx), 1e-9);
}

TEST(DecayFit, TooFewRows) {
  std::vector<MetricsRow> rows(kMinDecayRows - 1);
  EXPECT_THROW(fit_decay_rate(rows), std::invalid_argument);
}
