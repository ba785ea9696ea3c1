#include "zovr/algorithms.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "zovr/log.hpp"
#include "zovr/metrics.hpp"
#include "zovr/rng.hpp"

namespace zovr {

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::dgd2p: return "dgd2p";
    case AlgorithmKind::gt2d: return "gt2d";
    case AlgorithmKind::vrgt: return "vrgt";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm(std::string_view name) {
  for (auto k : {AlgorithmKind::dgd2p, AlgorithmKind::gt2d, AlgorithmKind::vrgt}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(StepRule rule) {
  return rule == StepRule::constant ? "constant" : "decaying";
}

StepRule parse_step_rule(std::string_view name) {
  if (name == "constant") return StepRule::constant;
  if (name == "decaying") return StepRule::decaying;
  throw ConfigError("unknown step rule '" + std::string(name) + "'");
}

std::string_view to_string(TrackerInit init) {
  return init == TrackerInit::estimate ? "estimate" : "zero";
}

TrackerInit parse_tracker_init(std::string_view name) {
  if (name == "estimate") return TrackerInit::estimate;
  if (name == "zero") return TrackerInit::zero;
  throw ConfigError("unknown tracker init '" + std::string(name) + "'");
}

std::string_view to_string(StopCondition::Kind kind) {
  switch (kind) {
    case StopCondition::Kind::rounds: return "rounds";
    case StopCondition::Kind::query_budget: return "query_budget";
    case StopCondition::Kind::agent_query_budget: return "agent_query_budget";
  }
  return "unknown";
}

StopCondition::Kind parse_stop_kind(std::string_view name) {
  for (auto k : {StopCondition::Kind::rounds, StopCondition::Kind::query_budget,
                 StopCondition::Kind::agent_query_budget}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown stop condition '" + std::string(name) + "'");
}

std::string_view to_string(InitMode mode) {
  return mode == InitMode::shared ? "shared" : "heterogeneous";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "shared") return InitMode::shared;
  if (name == "heterogeneous") return InitMode::heterogeneous;
  throw ConfigError("unknown init mode '" + std::string(name) + "'");
}

Schedule::Schedule(StepSize step, double u0, double q) : step_(step), u0_(u0), q_(q) {
  if (!(step_.alpha0 >= 0.0) || !std::isfinite(step_.alpha0))
    throw ConfigError("step size must be finite and nonnegative");
  if (step_.rule == StepRule::decaying && !(step_.exponent >= 0.0))
    throw ConfigError("step decay exponent must be nonnegative");
  if (!(u0_ > 0.0) || !std::isfinite(u0_)) throw ConfigError("u0 must be positive");
  if (!(q_ > 0.0 && q_ <= 1.0)) throw ConfigError("smoothing decay exponent q must lie in (0, 1]");
  if (q_ <= 0.5)
    warn("smoothing exponent q = " + std::to_string(q_) +
         " <= 1/2: sum of (d u_k)^2 diverges, convergence guarantee does not apply");
}

double Schedule::step(std::size_t k) const {
  if (step_.rule == StepRule::constant) return step_.alpha0;
  return step_.alpha0 / std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), step_.exponent);
}

double Schedule::radius(std::size_t k) const {
  return u0_ / std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), q_);
}

bool tracks_gradient(AlgorithmKind kind) { return kind != AlgorithmKind::dgd2p; }

namespace {

void check_state(const RunState& state, const MixingMatrix& w, const ZerothOrderOracle& oracle) {
  if (static_cast<std::size_t>(state.x.rows()) != w.n_agents() ||
      w.n_agents() != oracle.n_agents() ||
      static_cast<std::size_t>(state.x.cols()) != oracle.dim())
    throw std::invalid_argument("run state, mixing matrix and oracle sizes disagree");
}

}  // namespace

RunState init_dgd2p(const Stacked& x0, std::uint64_t seed) {
  RunState state;
  state.algorithm = AlgorithmKind::dgd2p;
  state.x = x0;
  state.s = Stacked::Zero(x0.rows(), x0.cols());
  state.g_prev = Stacked::Zero(x0.rows(), x0.cols());
  state.seed = seed;
  return state;
}

RunState init_gt2d(const Stacked& x0, ZerothOrderOracle& oracle, const Schedule& schedule,
                   std::uint64_t seed, TrackerInit init) {
  RunState state;
  state.algorithm = AlgorithmKind::gt2d;
  state.x = x0;
  state.seed = seed;
  state.g_prev = Stacked::Zero(x0.rows(), x0.cols());
  if (init == TrackerInit::estimate) {
    const double u = schedule.radius(0);
    for (Eigen::Index i = 0; i < x0.rows(); ++i)
      state.g_prev.row(i) =
          two_d_point(oracle, static_cast<std::size_t>(i), x0.row(i).transpose(), u).estimate.transpose();
  }
  state.s = state.g_prev;
  return state;
}

RunState init_vrgt(const Stacked& x0, ZerothOrderOracle& oracle, const Schedule& schedule,
                   std::uint64_t seed) {
  RunState state;
  state.algorithm = AlgorithmKind::vrgt;
  state.x = x0;
  state.s = Stacked::Zero(x0.rows(), x0.cols());
  state.g_prev = Stacked::Zero(x0.rows(), x0.cols());
  state.seed = seed;
  const double u = schedule.radius(0);
  state.snapshots.reserve(static_cast<std::size_t>(x0.rows()));
  for (Eigen::Index i = 0; i < x0.rows(); ++i)
    state.snapshots.push_back(
        SnapshotState::take(oracle, static_cast<std::size_t>(i), x0.row(i).transpose(), u));
  return state;
}

void dgd2p_step(RunState& state, const MixingMatrix& w, ZerothOrderOracle& oracle,
                const Schedule& schedule) {
  check_state(state, w, oracle);
  const std::size_t k = state.k;
  const double u = schedule.radius(k);
  const double eta = schedule.step(k);
  const auto d = static_cast<std::size_t>(state.x.cols());
  Stacked g(state.x.rows(), state.x.cols());
  for (Eigen::Index i = 0; i < state.x.rows(); ++i) {
    const auto agent = static_cast<std::size_t>(i);
    auto rng = make_stream(state.seed, StreamTag::direction, agent, k);
    const Vector z = sample_sphere(rng, d);
    g.row(i) = two_point(oracle, agent, state.x.row(i).transpose(), u, z).transpose();
  }
  state.x = mix(w, state.x - eta * g);
  state.g_prev = std::move(g);
  ++state.k;
}

void gt2d_step(RunState& state, const MixingMatrix& w, ZerothOrderOracle& oracle,
               const Schedule& schedule) {
  check_state(state, w, oracle);
  const std::size_t k = state.k;
  Stacked x_next = mix(w, state.x - schedule.step(k) * state.s);
  const double u_next = schedule.radius(k + 1);
  Stacked g(state.x.rows(), state.x.cols());
  for (Eigen::Index i = 0; i < x_next.rows(); ++i)
    g.row(i) = two_d_point(oracle, static_cast<std::size_t>(i), x_next.row(i).transpose(), u_next)
                   .estimate.transpose();
  state.s = mix(w, state.s + g - state.g_prev);
  state.g_prev = std::move(g);
  state.x = std::move(x_next);
  ++state.k;
}

void vrgt_step(RunState& state, const MixingMatrix& w, ZerothOrderOracle& oracle,
               const Schedule& schedule, double p, CountingMode mode) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("snapshot probability must lie in [0, 1]");
  check_state(state, w, oracle);
  if (state.snapshots.size() != static_cast<std::size_t>(state.x.rows()))
    throw std::logic_error("VR-GT state has no snapshots; use init_vrgt");
  const std::size_t k = state.k;
  const auto d = static_cast<std::size_t>(state.x.cols());

  // Step 1: mix and descend along the trackers.
  Stacked x_next = mix(w, state.x - schedule.step(k) * state.s);
  const double u_next = schedule.radius(k + 1);

  std::uniform_int_distribution<std::size_t> pick(0, d - 1);
  std::bernoulli_distribution coin(p);
  Stacked g(state.x.rows(), state.x.cols());
  for (Eigen::Index i = 0; i < x_next.rows(); ++i) {
    const auto agent = static_cast<std::size_t>(i);
    auto rng = make_stream(state.seed, StreamTag::coordinate, agent, k + 1);
    const std::size_t l = pick(rng);  // step 2
    const bool refresh = coin(rng);   // step 3
    const Vector xi = x_next.row(i).transpose();
    // Step 4.
    state.snapshots[agent] =
        maybe_refresh_snapshot(std::move(state.snapshots[agent]), refresh, xi, u_next, oracle, agent);
    if (refresh) ++state.refreshes;
    // Step 5.
    g.row(i) = vr_ge(oracle, agent, xi, u_next, state.snapshots[agent], l, mode).transpose();
  }
  // Step 6.
  state.s = mix(w, state.s + g - state.g_prev);
  state.g_prev = std::move(g);
  state.x = std::move(x_next);
  ++state.k;
}

Stacked initial_iterates(std::size_t n, std::size_t d, std::uint64_t seed, InitMode mode,
                         double scale) {
  if (n == 0 || d == 0) throw std::invalid_argument("initial_iterates needs n, d >= 1");
  std::normal_distribution<double> gauss(0.0, scale / std::sqrt(static_cast<double>(d)));
  Stacked x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  auto shared = make_stream(seed, StreamTag::initial_point);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (mode == InitMode::shared) {
      if (i == 0) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(0, j) = gauss(shared);
      } else {
        x.row(i) = x.row(0);
      }
    } else {
      auto rng = make_stream(seed, StreamTag::initial_point, static_cast<std::uint64_t>(i));
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = gauss(rng);
    }
  }
  return x;
}

std::vector<MetricsRow> run(const RunOptions& options, const MixingMatrix& w,
                            std::shared_ptr<const ObjectiveSpec> spec, const RoundObserver& observer) {
  if (!spec) throw ConfigError("run needs an objective");
  if (w.n_agents() != spec->n_agents())
    throw ConfigError("topology has " + std::to_string(w.n_agents()) + " agents, objective has " +
                      std::to_string(spec->n_agents()));
  if (options.stop.value == 0) throw ConfigError("stop condition must be positive");
  if (options.algorithm == AlgorithmKind::vrgt && !(options.p >= 0.0 && options.p <= 1.0))
    throw ConfigError("snapshot probability must lie in [0, 1]");

  ZerothOrderOracle oracle(spec);
  const Stacked x0 = initial_iterates(spec->n_agents(), spec->dim(), options.seed, options.init,
                                      options.init_scale);
  RunState state;
  switch (options.algorithm) {
    case AlgorithmKind::dgd2p: state = init_dgd2p(x0, options.seed); break;
    case AlgorithmKind::gt2d:
      state = init_gt2d(x0, oracle, options.schedule, options.seed, options.tracker_init);
      break;
    case AlgorithmKind::vrgt: state = init_vrgt(x0, oracle, options.schedule, options.seed); break;
  }

  const auto n = static_cast<std::uint64_t>(spec->n_agents());
  auto done = [&](std::size_t rounds, std::uint64_t m) {
    switch (options.stop.kind) {
      case StopCondition::Kind::rounds: return rounds >= options.stop.value;
      case StopCondition::Kind::query_budget: return m >= options.stop.value;
      case StopCondition::Kind::agent_query_budget: return m >= options.stop.value * n;
    }
    return true;
  };

  std::vector<MetricsRow> rows;
  while (!done(rows.size(), oracle.total_queries())) {
    switch (options.algorithm) {
      case AlgorithmKind::dgd2p: dgd2p_step(state, w, oracle, options.schedule); break;
      case AlgorithmKind::gt2d: gt2d_step(state, w, oracle, options.schedule); break;
      case AlgorithmKind::vrgt:
        vrgt_step(state, w, oracle, options.schedule, options.p, options.counting);
        break;
    }
    const auto m = oracle.total_queries();
    rows.push_back(compute_metrics(state, *spec, m));
    if (observer) observer(state, m);
  }
  if (rows.empty()) warn("initialization alone exhausted the query budget; no rounds recorded");
  return rows;
}

}  // namespace zovr
