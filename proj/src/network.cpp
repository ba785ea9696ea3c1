#include "zovr/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

#include "zovr/rng.hpp"

namespace zovr {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::path: return "path";
    case TopologyKind::complete: return "complete";
    case TopologyKind::erdos_renyi: return "erdos_renyi";
    case TopologyKind::grid: return "grid";
  }
  return "unknown";
}

TopologyKind parse_topology_kind(std::string_view name) {
  for (auto k : {TopologyKind::ring, TopologyKind::path, TopologyKind::complete,
                 TopologyKind::erdos_renyi, TopologyKind::grid}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown topology kind '" + std::string(name) + "'");
}

bool is_connected(std::size_t n_agents, const std::vector<Edge>& edges) {
  if (n_agents == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n_agents);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(n_agents, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    auto v = frontier.front();
    frontier.pop();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n_agents;
}

Topology::Topology(std::size_t n_agents, std::vector<Edge> edges)
    : n_(n_agents), degree_(n_agents, 0) {
  if (n_agents < 1) throw std::invalid_argument("topology needs at least one agent");
  for (auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop on agent " + std::to_string(a));
    if (a >= n_agents || b >= n_agents) throw std::invalid_argument("edge endpoint out of range");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (!is_connected(n_agents, edges)) throw Error("topology is not connected");
  edges_ = std::move(edges);
  for (auto [a, b] : edges_) {
    ++degree_[a];
    ++degree_[b];
  }
}

bool Topology::has_edge(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b});
}

namespace {

std::vector<Edge> erdos_renyi_edges(std::size_t n, double prob, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(prob);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

std::vector<Edge> grid_edges(std::size_t n) {
  // Row-major layout with ceil(sqrt(n)) columns; the last row may be partial.
  auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    if ((v + 1) % cols != 0 && v + 1 < n) edges.emplace_back(v, v + 1);
    if (v + cols < n) edges.emplace_back(v, v + cols);
  }
  return edges;
}

}  // namespace

Topology build_topology(const TopologySpec& spec) {
  const std::size_t n = spec.n_agents;
  if (n < 2) throw std::invalid_argument("build_topology requires n >= 2");
  std::vector<Edge> edges;
  switch (spec.kind) {
    case TopologyKind::path:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::ring:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      if (n > 2) edges.emplace_back(0, n - 1);
      break;
    case TopologyKind::complete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::grid:
      edges = grid_edges(n);
      break;
    case TopologyKind::erdos_renyi: {
      if (!(spec.prob > 0.0 && spec.prob <= 1.0))
        throw std::invalid_argument("erdos_renyi probability must lie in (0, 1]");
      for (int attempt = 0; attempt < kErdosRenyiAttempts; ++attempt) {
        auto candidate = erdos_renyi_edges(
            n, spec.prob,
            derive_seed(spec.seed, StreamTag::topology, static_cast<std::uint64_t>(attempt)));
        if (is_connected(n, candidate)) return Topology(n, std::move(candidate));
      }
      throw Error("erdos_renyi(" + std::to_string(spec.prob) + ") graph on " +
                  std::to_string(n) + " agents still disconnected after " +
                  std::to_string(kErdosRenyiAttempts) + " attempts");
    }
  }
  return Topology(n, std::move(edges));
}

double spectral_gap(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() == 0)
    throw std::invalid_argument("spectral_gap expects a non-empty square matrix");
  const auto n = static_cast<double>(w.rows());
  Matrix centered = w.array() - 1.0 / n;
  Eigen::JacobiSVD<Matrix> svd(centered);
  return svd.singularValues()(0);
}

MixingMatrix::MixingMatrix(Matrix w) : w_(std::move(w)), sigma_(0.0) {
  if (w_.rows() != w_.cols() || w_.rows() == 0)
    throw std::invalid_argument("mixing matrix must be non-empty and square");
  if ((w_.array() < 0.0).any()) throw std::invalid_argument("mixing matrix has negative weights");
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > kStochasticTolerance)
    throw std::invalid_argument("mixing matrix is not symmetric");
  const double row_err = (w_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_err = (w_.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_err > kStochasticTolerance || col_err > kStochasticTolerance)
    throw std::invalid_argument("mixing matrix is not doubly stochastic");
  sigma_ = spectral_gap(w_);
}

bool MixingMatrix::respects(const Topology& t) const {
  if (t.n_agents() != n_agents()) return false;
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    for (Eigen::Index j = 0; j < w_.cols(); ++j) {
      if (i != j && w_(i, j) > 0.0 &&
          !t.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
        return false;
    }
  }
  return true;
}

MixingMatrix metropolis_weights(const Topology& t) {
  const auto n = static_cast<Eigen::Index>(t.n_agents());
  Matrix w = Matrix::Zero(n, n);
  for (auto [a, b] : t.edges()) {
    const double weight = 1.0 / (1.0 + static_cast<double>(std::max(t.degree(a), t.degree(b))));
    w(a, b) = weight;
    w(b, a) = weight;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) off += w(i, j);
    }
    w(i, i) = 1.0 - off;
  }
  return MixingMatrix(std::move(w));
}

Stacked mix(const MixingMatrix& w, const Stacked& stacked) {
  if (static_cast<std::size_t>(stacked.rows()) != w.n_agents())
    throw std::invalid_argument("mix: stacked iterate has " + std::to_string(stacked.rows()) +
                                " rows, mixing matrix expects " + std::to_string(w.n_agents()));
  return w.weights() * stacked;
}

double consensus_residual(const Stacked& stacked) {
  const Eigen::RowVectorXd mean = stacked.colwise().mean();
  return (stacked.rowwise() - mean).norm();
}

}  // namespace zovr
