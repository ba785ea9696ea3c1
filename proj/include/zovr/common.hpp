#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zovr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One row per agent, one column per coordinate.
using Stacked = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorView = Eigen::Ref<const Vector>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or a parse failure in a config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Row-wise mean of a stacked matrix, i.e. the network average.
inline Vector row_mean(const Stacked& x) { return x.colwise().mean().transpose(); }

}  // namespace zovr
