// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reference.hpp"
#include "zovr/algorithms.hpp"
#include "zovr/estimators.hpp"
#include "zovr/harness.hpp"
#include "zovr/metrics.hpp"
#include "zovr/network.hpp"
#include "zovr/oracle.hpp"
#include "zovr/theory.hpp"

using namespace zovr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch_dir() {
  std::random_device rd;
  auto p = fs::temp_directory_path() / ("zovr_acceptance_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome vrge_unbiased() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(1, 8, 1000 + t));
    ZerothOrderOracle o(spec);
    Vector x = ref::random_vector(rng, 8);
    Vector xt = ref::random_vector(rng, 8);
    const double ut = std::uniform_real_distribution<double>(1e-3, 2.0)(rng);
    const double u = ut * std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
    auto snap = SnapshotState::take(o, 0, xt, ut);
    Vector avg = Vector::Zero(8);
    for (std::size_t l = 0; l < 8; ++l) avg += vr_ge(o, 0, x, u, snap, l);
    avg /= 8.0;
    worst = std::max(worst, ref::relative_error(avg, two_d_point(o, 0, x, u).estimate));
  }
  return {worst < 1e-10, "max relative error " + fmt("%.3g", worst)};
}

Outcome coordinate_identity() {
  std::mt19937_64 rng(102);
  auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(1, 8, 7));
  ZerothOrderOracle o(spec);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Vector x = ref::random_vector(rng, 8);
    const double u = std::pow(10.0, std::uniform_real_distribution<double>(-4, 0)(rng));
    Vector avg = Vector::Zero(8);
    for (std::size_t l = 0; l < 8; ++l) avg += coordinate(o, 0, x, u, l);
    avg /= 8.0;
    worst = std::max(worst, (avg - two_d_point(o, 0, x, u).estimate).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max abs difference " + fmt("%.3g", worst)};
}

Outcome two_d_point_error() {
  std::mt19937_64 rng(103);
  double worst_ratio = 0.0;
  for (std::size_t d : {8u, 64u}) {
    auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(1, d, 2000 + d));
    const double L = estimate_smoothness(*spec);
    ZerothOrderOracle o(spec);
    for (double u : {1e-2, 1e-4})
      for (int t = 0; t < 50; ++t) {
        Vector x = ref::random_vector(rng, d);
        const double err = (two_d_point(o, 0, x, u).estimate - analytic_grad(*spec, 0, x)).norm();
        worst_ratio = std::max(worst_ratio, err / (0.5 * u * L * std::sqrt(static_cast<double>(d))));
      }
  }
  return {worst_ratio <= 1.0, "max error / bound " + fmt("%.3g", worst_ratio)};
}

Outcome variance_bound() {
  std::mt19937_64 rng(104);
  double worst_ratio = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 8;
    auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(1, d, 3000 + t));
    const double L = estimate_smoothness(*spec);
    ZerothOrderOracle o(spec);
    Vector x = ref::random_vector(rng, d);
    Vector xt = x + ref::random_vector(rng, d, 0.3);
    const double ut = std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
    const double u = ut * std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
    auto snap = SnapshotState::take(o, 0, xt, ut);
    const Vector grad = analytic_grad(*spec, 0, x);
    double var = 0.0;
    for (std::size_t l = 0; l < d; ++l) var += (vr_ge(o, 0, x, u, snap, l) - grad).squaredNorm();
    var /= static_cast<double>(d);
    for (const Vector& y : {Vector(xt), Vector((x + xt) / 2)})
      worst_ratio =
          std::max(worst_ratio, var / variance_bound_rhs(d, L, (x - y).norm(), (xt - y).norm(), ut));
  }
  return {worst_ratio <= 1.0, "max variance / bound " + fmt("%.3g", worst_ratio)};
}

Outcome tracking_identity() {
  auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(10, 16, 5));
  auto w = metropolis_weights(build_topology({TopologyKind::ring, 10, 0.0, 0}));
  Schedule sched(StepSize{StepRule::constant, 0.02, 0.5}, 3.0, 0.75);
  const Stacked x0 = initial_iterates(10, 16, 5, InitMode::heterogeneous);
  double worst = 0.0;
  for (auto kind : {AlgorithmKind::vrgt, AlgorithmKind::gt2d}) {
    ZerothOrderOracle o(spec);
    auto s = kind == AlgorithmKind::vrgt ? init_vrgt(x0, o, sched, 5) : init_gt2d(x0, o, sched, 5);
    for (int k = 0; k < 200; ++k) {
      if (kind == AlgorithmKind::vrgt)
        vrgt_step(s, w, o, sched, 0.1);
      else
        gt2d_step(s, w, o, sched);
      worst = std::max(worst, (row_mean(s.s) - row_mean(s.g_prev)).norm());
    }
  }
  return {worst < 1e-9, "max |mean(s) - mean(g)| " + fmt("%.3g", worst)};
}

Outcome query_accounting() {
  const std::size_t n = 4;
  const std::size_t d = 64;
  const std::size_t rounds = 10000;
  auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(n, d, 6));
  auto w = metropolis_weights(build_topology({TopologyKind::ring, n, 0.0, 0}));
  Schedule sched(StepSize{StepRule::constant, 0.02, 0.5}, 3.0, 0.75);
  ZerothOrderOracle o(spec);
  auto s = init_vrgt(initial_iterates(n, d, 6, InitMode::shared), o, sched, 6);
  const auto start = o.total_queries();
  for (std::size_t k = 0; k < rounds; ++k) vrgt_step(s, w, o, sched, 0.1, CountingMode::paper_faithful);
  const double per = static_cast<double>(o.total_queries() - start) / static_cast<double>(n * rounds);
  return {std::abs(per - 16.8) <= 0.05 * 16.8, "mean fresh queries per agent-round " + fmt("%.4f", per)};
}

Outcome contraction_grid() {
  int failed = 0;
  double worst_slack = -1.0;
  for (double sigma : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (std::size_t d : {3u, 16u, 64u, 256u}) {
      const double aL = std::pow(1 - sigma * sigma, 3) / (12 * std::sqrt(29.0) * std::pow(d, 2.5));
      auto c = certify_contraction(sigma, d, aL);
      const double target = 1 - (1 - sigma * sigma) / (2.0 * d);
      if (!(c.weighted_norm <= target)) ++failed;
      worst_slack = std::max(worst_slack, c.weighted_norm - target);
    }
  return {failed == 0, std::to_string(failed) + " of 20 cells fail; max(norm - bound) " +
                           fmt("%.3g", worst_slack)};
}

Outcome fig1_ordering(const fs::path& dir) {
  double gap[3] = {0, 0, 0};
  std::uint64_t m[3] = {0, 0, 0};
  auto configs = suite_configs(Suite::fig1, 0, 50000, dir / "fig1");
  for (std::size_t i = 0; i < 3; ++i) {
    auto r = run_experiment(configs[i]);
    gap[i] = r.rows.back().stat_gap;
    m[i] = r.rows.back().m;
  }
  const bool ok = gap[0] < gap[1] && gap[0] < gap[2] && gap[2] < gap[1];
  return {ok, "final gap at 5e4 queries/agent: vrgt " + fmt("%.3g", gap[0]) + ", gt2d " +
                  fmt("%.3g", gap[2]) + ", dgd2p " + fmt("%.3g", gap[1]) + " (m = " +
                  std::to_string(m[0]) + "/" + std::to_string(m[2]) + "/" + std::to_string(m[1]) + ")"};
}

Outcome high_dimension(const fs::path& dir) {
  auto configs = suite_configs(Suite::fig3, 0, 100000, dir / "fig3");
  const auto& c = configs.back();
  if (c.objective.dim != 300) return {false, "suite has no d = 300 run"};
  auto r = run_experiment(c);
  const double gap = r.rows.back().stat_gap;
  return {gap < 1e-6, "d=300, p=" + fmt("%.4g", c.run.p) + ", final gap " + fmt("%.3g", gap) + " after " +
                          std::to_string(r.rows.size()) + " rounds"};
}

Outcome decay_rate(const fs::path& dir) {
  auto c = suite_configs(Suite::fig1, 0, 1, dir / "decay").front();
  c.run.stop = StopCondition::rounds(2000);
  auto r = run_experiment(c);
  auto fit = fit_decay_rate(r.rows);
  return {fit.slope <= -0.8, "slope " + fmt("%.4f", fit.slope) + " over " + std::to_string(r.rows.size()) +
                                 " rounds"};
}

Outcome determinism(const fs::path& dir) {
  int mismatched = 0;
  for (auto c : suite_configs(Suite::fig1, 9, 3000, dir / "det_a")) {
    run_experiment(c);
    const auto first = slurp(c.output);
    c.output = dir / "det_b" / c.output.filename();
    run_experiment(c);
    if (first != slurp(c.output) || first.empty()) ++mismatched;
  }
  return {mismatched == 0, std::to_string(mismatched) + " of 3 replays differ"};
}

}  // namespace

int main() {
  const fs::path dir = scratch_dir();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"vr-ge average over coordinates equals 2d-point", vrge_unbiased},
      {"coordinate average equals 2d-point", coordinate_identity},
      {"2d-point error within u L sqrt(d) / 2", two_d_point_error},
      {"vr-ge variance below its bound", variance_bound},
      {"tracking identity mean(s) = mean(g)", tracking_identity},
      {"vr-gt query cost 4 + 2dp", query_accounting},
      {"weighted-norm contraction over (sigma, d) grid", contraction_grid},
      {"fig1 ordering vrgt < gt2d < dgd2p", [&] { return fig1_ordering(dir); }},
      {"d = 300 gap below 1e-6 within budget", [&] { return high_dimension(dir); }},
      {"running-average decay slope <= -0.8", [&] { return decay_rate(dir); }},
      {"byte-identical replay", [&] { return determinism(dir); }},
  };

  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.pass) ++failures;
    std::printf("%s %2d %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", index, name.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  std::printf("%d of %zu criteria passed\n", index - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
