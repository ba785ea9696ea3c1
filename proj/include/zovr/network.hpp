#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "zovr/common.hpp"

namespace zovr {

enum class TopologyKind { ring, path, complete, erdos_renyi, grid };

std::string_view to_string(TopologyKind kind);
TopologyKind parse_topology_kind(std::string_view name);

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;
  std::size_t n_agents = 2;
  double prob = 0.0;  // erdos_renyi only
  std::uint64_t seed = 0;
};

// Unordered agent pair, stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;

// Undirected, connected communication graph.
class Topology {
 public:
  // Normalizes edge orientation and removes duplicates. Throws on self-loops,
  // out-of-range endpoints or a disconnected graph.
  Topology(std::size_t n_agents, std::vector<Edge> edges);

  std::size_t n_agents() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t degree(std::size_t agent) const { return degree_.at(agent); }
  bool has_edge(std::size_t a, std::size_t b) const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degree_;
};

bool is_connected(std::size_t n_agents, const std::vector<Edge>& edges);

// Erdos-Renyi graphs are regenerated with derived seeds until connected, at most
// kErdosRenyiAttempts times.
inline constexpr int kErdosRenyiAttempts = 100;

Topology build_topology(const TopologySpec& spec);

// Largest singular value of W - (1/N) 11^T.
double spectral_gap(const Matrix& w);

// Symmetric doubly stochastic weights with nonnegative entries and the cached
// spectral gap parameter sigma.
class MixingMatrix {
 public:
  static constexpr double kStochasticTolerance = 1e-12;

  explicit MixingMatrix(Matrix w);

  const Matrix& weights() const { return w_; }
  double sigma() const { return sigma_; }
  std::size_t n_agents() const { return static_cast<std::size_t>(w_.rows()); }

  // True if every positive off-diagonal weight sits on an edge of `t`.
  bool respects(const Topology& t) const;

 private:
  Matrix w_;
  double sigma_;
};

// Metropolis-Hastings rule: w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, the
// diagonal absorbs the remainder of each row.
MixingMatrix metropolis_weights(const Topology& t);

// Row mixing (W kron I_d) x for a stacked N x d iterate.
Stacked mix(const MixingMatrix& w, const Stacked& stacked);

// || x - 1 kron mean(x) ||, the consensus residual of a stacked iterate.
double consensus_residual(const Stacked& stacked);

}  // namespace zovr
