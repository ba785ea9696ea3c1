#pragma once

#include <memory>

#include "zovr/oracle.hpp"

namespace fixtures {

using zovr::Matrix;
using zovr::ObjectiveSpec;
using zovr::Stacked;
using zovr::Vector;

// f_i = 1/2 (x - b_i)^T (scale I) (x - b_i), b_i = 0
inline std::shared_ptr<const ObjectiveSpec> scaled_norm(std::size_t n, std::size_t d,
                                                        double scale = 1.0) {
  zovr::QuadraticParams p;
  p.q.assign(n, scale * Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  p.b = Stacked::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  return std::make_shared<const ObjectiveSpec>(std::move(p));
}

inline std::shared_ptr<const ObjectiveSpec> linear(const Stacked& c) {
  return std::make_shared<const ObjectiveSpec>(zovr::LinearParams{c});
}

inline std::shared_ptr<const ObjectiveSpec> linear1(const Vector& c) {
  return linear(Stacked(c.transpose()));
}

// One agent with alpha = 0, beta = 1: f(x) = ln(1 + |x|^2).
inline std::shared_ptr<const ObjectiveSpec> log_norm(std::size_t d) {
  zovr::BenchmarkParams p;
  p.alpha = Vector::Zero(1);
  p.beta = Vector::Ones(1);
  p.v = Vector::Zero(1);
  p.zeta = Stacked::Zero(1, static_cast<Eigen::Index>(d));
  return std::make_shared<const ObjectiveSpec>(std::move(p));
}

inline std::shared_ptr<const ObjectiveSpec> shared(ObjectiveSpec spec) {
  return std::make_shared<const ObjectiveSpec>(std::move(spec));
}

}  // namespace fixtures
