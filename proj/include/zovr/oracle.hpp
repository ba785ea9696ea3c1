#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "zovr/common.hpp"

namespace zovr {

enum class ObjectiveKind { benchmark, quadratic, linear };

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(std::string_view name);

// f_i(x) = alpha_i * sigmoid(zeta_i^T x + v_i) + beta_i * ln(1 + |x|^2)
struct BenchmarkParams {
  Vector alpha;
  Vector beta;
  Vector v;
  Stacked zeta;  // row i is zeta_i
};

// f_i(x) = 1/2 (x - b_i)^T Q_i (x - b_i), Q_i symmetric PSD
struct QuadraticParams {
  std::vector<Matrix> q;
  Stacked b;
};

// f_i(x) = c_i^T x
struct LinearParams {
  Stacked c;
};

// Immutable description of the N local objectives. Validated on construction.
class ObjectiveSpec {
 public:
  static constexpr double kBetaMeanTolerance = 1e-12;

  explicit ObjectiveSpec(BenchmarkParams params);
  explicit ObjectiveSpec(QuadraticParams params);
  explicit ObjectiveSpec(LinearParams params);

  ObjectiveKind kind() const;
  std::size_t n_agents() const { return n_; }
  std::size_t dim() const { return d_; }

  const BenchmarkParams& benchmark() const;
  const QuadraticParams& quadratic() const;
  const LinearParams& linear() const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::variant<BenchmarkParams, QuadraticParams, LinearParams> params_;
};

bool operator==(const ObjectiveSpec& a, const ObjectiveSpec& b);

// Benchmark draws: alpha_i, v_i ~ U[-1, 1]; beta_i ~ U[0.5, 1.5] rescaled to
// mean one; zeta_i ~ N(0, I/d).
ObjectiveSpec make_benchmark(std::size_t n, std::size_t d, std::uint64_t seed);
// Q_i = M M^T / d + I/2 with M standard normal, b_i ~ N(0, I).
ObjectiveSpec make_quadratic(std::size_t n, std::size_t d, std::uint64_t seed);
// c_i ~ N(0, I).
ObjectiveSpec make_linear(std::size_t n, std::size_t d, std::uint64_t seed);
ObjectiveSpec make_objective(ObjectiveKind kind, std::size_t n, std::size_t d, std::uint64_t seed);

// Full-precision text dump, for replaying experiments on hand-edited objectives.
void write_objective(std::ostream& out, const ObjectiveSpec& spec);
ObjectiveSpec read_objective(std::istream& in);

// Uncounted evaluation of f_i. Only metrics and validation code may call this;
// algorithms see the objective solely through ZerothOrderOracle.
double objective_value(const ObjectiveSpec& spec, std::size_t agent, VectorView x);
// f(x) = (1/N) sum_i f_i(x)
double global_value(const ObjectiveSpec& spec, VectorView x);

Vector analytic_grad(const ObjectiveSpec& spec, std::size_t agent, VectorView x);
Vector global_grad(const ObjectiveSpec& spec, VectorView x);

inline constexpr std::uint64_t kSmoothnessSeed = 0x5eedULL;
inline constexpr double kSmoothnessSafety = 1.5;

// 1.5 x the largest observed ratio |grad f_i(x) - grad f_i(y)| / |x - y| over
// `pairs` sampled point pairs per agent.
double estimate_smoothness(const ObjectiveSpec& spec, std::uint64_t seed = kSmoothnessSeed,
                           std::size_t pairs = 200);

// Counted zeroth-order access to the local objectives. Each eval() charges one
// query to the calling agent. A run owns its oracle.
class ZerothOrderOracle {
 public:
  explicit ZerothOrderOracle(std::shared_ptr<const ObjectiveSpec> spec);

  double eval(std::size_t agent, VectorView x);

  std::size_t n_agents() const { return spec_->n_agents(); }
  std::size_t dim() const { return spec_->dim(); }

  std::uint64_t queries(std::size_t agent) const { return counts_.at(agent); }
  std::uint64_t total_queries() const { return total_; }

 private:
  std::shared_ptr<const ObjectiveSpec> spec_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace zovr
