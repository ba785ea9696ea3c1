#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "zovr/common.hpp"
#include "zovr/oracle.hpp"
#include "zovr/rng.hpp"

namespace zovr {

// How the snapshot coordinate term of VR-GE is paid for.
//   paper_faithful: it queries the oracle again (4 fresh queries per estimate).
//   cached:         it reads the evaluations stored at refresh time (2 fresh).
// Both return bit-identical estimates.
enum class CountingMode { paper_faithful, cached };

std::string_view to_string(CountingMode mode);
CountingMode parse_counting_mode(std::string_view name);

struct EstimatorBudget {
  std::uint64_t fresh_queries = 0;
  CountingMode counting_mode = CountingMode::paper_faithful;
};

// Fresh queries spent by one VR-GE construction, excluding snapshot refreshes.
EstimatorBudget vr_ge_budget(CountingMode mode);

// Expected fresh queries per agent and round for VR-GE: 4 + 2dp (paper_faithful)
// or 2 + 2dp (cached).
double expected_vr_ge_queries(std::size_t d, double p, CountingMode mode);

// d * (h(x + u z) - h(x - u z)) / (2u) * z. Two queries. z must be a unit vector.
Vector two_point(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u,
                 VectorView z);

// Uniform draw from the unit sphere in R^d (normalized Gaussian).
Vector sample_sphere(Rng& rng, std::size_t d);

struct TwoDPointResult {
  Vector estimate;
  Vector plus;   // h(x + u e_l)
  Vector minus;  // h(x - u e_l)
};

// Central differences along every coordinate. 2d queries.
TwoDPointResult two_d_point(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u);

// d * (h(x + u e_l) - h(x - u e_l)) / (2u) * e_l. Two queries.
Vector coordinate(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u,
                  std::size_t l);

// Per-agent snapshot point with its smoothing radius and the cached 2d-point
// estimate taken there. Default-constructed snapshots are uninitialized.
class SnapshotState {
 public:
  SnapshotState() = default;

  // Evaluates the 2d-point estimator at (x, u): 2d queries.
  static SnapshotState take(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u);

  bool initialized() const { return initialized_; }
  const Vector& x_tilde() const { return x_tilde_; }
  double u_tilde() const { return u_tilde_; }
  const Vector& cached_plus() const { return plus_; }
  const Vector& cached_minus() const { return minus_; }
  const Vector& cached_full() const { return full_; }

  // Scaled coordinate estimator at the snapshot, from the cached evaluations.
  Vector cached_coordinate(std::size_t l) const;

 private:
  bool initialized_ = false;
  Vector x_tilde_;
  double u_tilde_ = 0.0;
  Vector plus_;
  Vector minus_;
  Vector full_;
};

// VR-GE: coordinate(x, u, l) - coordinate(x~, u~, l) + G2d(x~, u~).
Vector vr_ge(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u,
             const SnapshotState& snapshot, std::size_t l,
             CountingMode mode = CountingMode::paper_faithful);

// Replaces the snapshot with one taken at (x, u) when `refresh` is set
// (2d queries); otherwise returns it unchanged.
SnapshotState maybe_refresh_snapshot(SnapshotState snapshot, bool refresh, VectorView x, double u,
                                     ZerothOrderOracle& oracle, std::size_t agent);

}  // namespace zovr
