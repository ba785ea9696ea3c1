#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "zovr/common.hpp"
#include "zovr/estimators.hpp"
#include "zovr/network.hpp"
#include "zovr/oracle.hpp"

namespace zovr {

struct MetricsRow;

enum class AlgorithmKind { dgd2p, gt2d, vrgt };

std::string_view to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm(std::string_view name);

enum class StepRule { constant, decaying };

std::string_view to_string(StepRule rule);
StepRule parse_step_rule(std::string_view name);

struct StepSize {
  StepRule rule = StepRule::constant;
  double alpha0 = 0.02;
  double exponent = 0.5;  // decaying only: alpha0 / max(k, 1)^exponent
};

// Step size and smoothing radius as functions of the round index k.
// The radius is u0 / max(k, 1)^q, so u(0) = u(1) = u0.
class Schedule {
 public:
  Schedule(StepSize step, double u0, double q);

  double step(std::size_t k) const;
  double radius(std::size_t k) const;

  const StepSize& step_size() const { return step_; }
  double u0() const { return u0_; }
  double q() const { return q_; }

 private:
  StepSize step_;
  double u0_;
  double q_;
};

// How GT-2d's tracker starts. `estimate` sets s0 = g0 = G2d(x0, u0) (2dN
// queries); `zero` uses s0 = g0 = 0 like VR-GT.
enum class TrackerInit { estimate, zero };

std::string_view to_string(TrackerInit init);
TrackerInit parse_tracker_init(std::string_view name);

struct RunState {
  AlgorithmKind algorithm = AlgorithmKind::vrgt;
  std::size_t k = 0;
  Stacked x;
  Stacked s;       // trackers; unused by DGD-2p
  Stacked g_prev;  // last local estimates
  std::vector<SnapshotState> snapshots;  // VR-GT only
  std::uint64_t seed = 0;
  std::uint64_t refreshes = 0;  // cumulative VR-GT snapshot refreshes
};

bool tracks_gradient(AlgorithmKind kind);

RunState init_dgd2p(const Stacked& x0, std::uint64_t seed);
RunState init_gt2d(const Stacked& x0, ZerothOrderOracle& oracle, const Schedule& schedule,
                   std::uint64_t seed, TrackerInit init = TrackerInit::estimate);
// x~0 = x0 with its 2d-point estimate (2dN queries), s0 = g0 = 0.
RunState init_vrgt(const Stacked& x0, ZerothOrderOracle& oracle, const Schedule& schedule,
                   std::uint64_t seed);

// x_i <- sum_j W_ij (x_j - eta_k G2(x_j, u_k, z_j)). 2N queries.
void dgd2p_step(RunState& state, const MixingMatrix& w, ZerothOrderOracle& oracle,
                const Schedule& schedule);

// Gradient tracking with 2d-point estimates. 2dN queries.
void gt2d_step(RunState& state, const MixingMatrix& w, ZerothOrderOracle& oracle,
               const Schedule& schedule);

// One VR-GT round for every agent. 4N (or 2N cached) queries plus 2d
// per snapshot refresh.
void vrgt_step(RunState& state, const MixingMatrix& w, ZerothOrderOracle& oracle,
               const Schedule& schedule, double p,
               CountingMode mode = CountingMode::paper_faithful);

struct StopCondition {
  enum class Kind {
    rounds,               // exactly `value` rounds
    query_budget,         // until total queries >= value
    agent_query_budget,   // until total queries / N >= value
  };
  Kind kind = Kind::rounds;
  std::uint64_t value = 0;

  static StopCondition rounds(std::uint64_t k) { return {Kind::rounds, k}; }
  static StopCondition query_budget(std::uint64_t m) { return {Kind::query_budget, m}; }
  static StopCondition agent_query_budget(std::uint64_t m) { return {Kind::agent_query_budget, m}; }
};

std::string_view to_string(StopCondition::Kind kind);
StopCondition::Kind parse_stop_kind(std::string_view name);

enum class InitMode { shared, heterogeneous };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

// Initial iterates: entries ~ N(0, scale^2 / d), so |x0| is about `scale`.
// `shared` gives every agent the same point.
Stacked initial_iterates(std::size_t n, std::size_t d, std::uint64_t seed, InitMode mode,
                         double scale = 1.0);

struct RunOptions {
  AlgorithmKind algorithm = AlgorithmKind::vrgt;
  Schedule schedule{StepSize{}, 3.0, 0.75};
  double p = 0.1;
  CountingMode counting = CountingMode::paper_faithful;
  TrackerInit tracker_init = TrackerInit::estimate;
  StopCondition stop = StopCondition::rounds(100);
  std::uint64_t seed = 0;
  InitMode init = InitMode::shared;
  double init_scale = 1.0;
};

// Called after every round with the state and the cumulative query count.
using RoundObserver = std::function<void(const RunState&, std::uint64_t)>;

// Runs one algorithm to the stop condition and returns one metrics row per
// round. Deterministic given the options.
std::vector<MetricsRow> run(const RunOptions& options, const MixingMatrix& w,
                            std::shared_ptr<const ObjectiveSpec> spec,
                            const RoundObserver& observer = {});

}  // namespace zovr
