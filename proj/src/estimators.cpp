#include "zovr/estimators.hpp"

#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace zovr {

std::string_view to_string(CountingMode mode) {
  return mode == CountingMode::paper_faithful ? "paper_faithful" : "cached";
}

CountingMode parse_counting_mode(std::string_view name) {
  if (name == "paper_faithful") return CountingMode::paper_faithful;
  if (name == "cached") return CountingMode::cached;
  throw ConfigError("unknown counting mode '" + std::string(name) + "'");
}

EstimatorBudget vr_ge_budget(CountingMode mode) {
  return {mode == CountingMode::paper_faithful ? 4u : 2u, mode};
}

double expected_vr_ge_queries(std::size_t d, double p, CountingMode mode) {
  return static_cast<double>(vr_ge_budget(mode).fresh_queries) + 2.0 * static_cast<double>(d) * p;
}

namespace {

void require_radius(double u) {
  if (!(u > 0.0) || !std::isfinite(u))
    throw std::invalid_argument("smoothing radius must be positive, got " + std::to_string(u));
}

// (h(x + u e_l) - h(x - u e_l)), evaluated on a scratch copy of x.
std::pair<double, double> probe(ZerothOrderOracle& oracle, std::size_t agent, Vector& scratch,
                                std::size_t l, double u) {
  const auto li = static_cast<Eigen::Index>(l);
  const double original = scratch(li);
  scratch(li) = original + u;
  const double plus = oracle.eval(agent, scratch);
  scratch(li) = original - u;
  const double minus = oracle.eval(agent, scratch);
  scratch(li) = original;
  return {plus, minus};
}

double central_difference(double plus, double minus, double u) { return (plus - minus) / (2.0 * u); }

}  // namespace

Vector two_point(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u,
                 VectorView z) {
  require_radius(u);
  if (z.size() != x.size()) throw std::invalid_argument("direction and point dimensions differ");
  if (std::abs(z.norm() - 1.0) > 1e-12) throw std::invalid_argument("direction is not a unit vector");
  const double plus = oracle.eval(agent, x + u * z);
  const double minus = oracle.eval(agent, x - u * z);
  const auto d = static_cast<double>(x.size());
  return (d * central_difference(plus, minus, u)) * z;
}

Vector sample_sphere(Rng& rng, std::size_t d) {
  if (d == 0) throw std::invalid_argument("sample_sphere needs d >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(static_cast<Eigen::Index>(d));
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = gauss(rng);
    norm = z.norm();
  }
  return z / norm;
}

TwoDPointResult two_d_point(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u) {
  require_radius(u);
  const auto d = x.size();
  TwoDPointResult out{Vector(d), Vector(d), Vector(d)};
  Vector scratch = x;
  for (Eigen::Index l = 0; l < d; ++l) {
    auto [plus, minus] = probe(oracle, agent, scratch, static_cast<std::size_t>(l), u);
    out.plus(l) = plus;
    out.minus(l) = minus;
    out.estimate(l) = central_difference(plus, minus, u);
  }
  return out;
}

Vector coordinate(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u,
                  std::size_t l) {
  require_radius(u);
  if (l >= static_cast<std::size_t>(x.size()))
    throw std::out_of_range("coordinate index " + std::to_string(l) + " out of range");
  Vector scratch = x;
  auto [plus, minus] = probe(oracle, agent, scratch, l, u);
  Vector g = Vector::Zero(x.size());
  g(static_cast<Eigen::Index>(l)) = static_cast<double>(x.size()) * central_difference(plus, minus, u);
  return g;
}

SnapshotState SnapshotState::take(ZerothOrderOracle& oracle, std::size_t agent, VectorView x,
                                  double u) {
  auto full = two_d_point(oracle, agent, x, u);
  SnapshotState s;
  s.initialized_ = true;
  s.x_tilde_ = x;
  s.u_tilde_ = u;
  s.plus_ = std::move(full.plus);
  s.minus_ = std::move(full.minus);
  s.full_ = std::move(full.estimate);
  return s;
}

Vector SnapshotState::cached_coordinate(std::size_t l) const {
  if (!initialized_) throw std::logic_error("snapshot is not initialized");
  const auto li = static_cast<Eigen::Index>(l);
  if (li >= x_tilde_.size()) throw std::out_of_range("coordinate index out of range");
  Vector g = Vector::Zero(x_tilde_.size());
  g(li) = static_cast<double>(x_tilde_.size()) * central_difference(plus_(li), minus_(li), u_tilde_);
  return g;
}

Vector vr_ge(ZerothOrderOracle& oracle, std::size_t agent, VectorView x, double u,
             const SnapshotState& snapshot, std::size_t l, CountingMode mode) {
  if (!snapshot.initialized()) throw std::logic_error("vr_ge called with an uninitialized snapshot");
  // The variance bound assumes the current radius never exceeds the snapshot's.
  assert(u <= snapshot.u_tilde());
  Vector at_x = coordinate(oracle, agent, x, u, l);
  Vector at_snapshot = mode == CountingMode::paper_faithful
                           ? coordinate(oracle, agent, snapshot.x_tilde(), snapshot.u_tilde(), l)
                           : snapshot.cached_coordinate(l);
  return (at_x - at_snapshot) + snapshot.cached_full();
}

SnapshotState maybe_refresh_snapshot(SnapshotState snapshot, bool refresh, VectorView x, double u,
                                     ZerothOrderOracle& oracle, std::size_t agent) {
  if (!refresh) return snapshot;
  return SnapshotState::take(oracle, agent, x, u);
}

}  // namespace zovr
