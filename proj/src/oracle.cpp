#include "zovr/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "zovr/rng.hpp"

namespace zovr {

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::benchmark: return "benchmark";
    case ObjectiveKind::quadratic: return "quadratic";
    case ObjectiveKind::linear: return "linear";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  for (auto k : {ObjectiveKind::benchmark, ObjectiveKind::quadratic, ObjectiveKind::linear}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown objective kind '" + std::string(name) + "'");
}

namespace {

void require_finite(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("objective parameters not finite: ") + what);
}

// Numerically stable logistic function.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_agent(const ObjectiveSpec& spec, std::size_t agent, VectorView x) {
  if (agent >= spec.n_agents())
    throw std::out_of_range("agent " + std::to_string(agent) + " out of range");
  if (static_cast<std::size_t>(x.size()) != spec.dim())
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", objective expects " + std::to_string(spec.dim()));
}

}  // namespace

ObjectiveSpec::ObjectiveSpec(BenchmarkParams p) {
  n_ = static_cast<std::size_t>(p.alpha.size());
  d_ = static_cast<std::size_t>(p.zeta.cols());
  if (n_ == 0 || d_ == 0) throw std::invalid_argument("benchmark needs n >= 1 and d >= 1");
  if (static_cast<std::size_t>(p.beta.size()) != n_ || static_cast<std::size_t>(p.v.size()) != n_ ||
      static_cast<std::size_t>(p.zeta.rows()) != n_)
    throw std::invalid_argument("benchmark parameter sizes disagree");
  require_finite(p.alpha.allFinite() && p.beta.allFinite() && p.v.allFinite() && p.zeta.allFinite(),
                 "benchmark");
  if (std::abs(p.beta.mean() - 1.0) > kBetaMeanTolerance)
    throw std::invalid_argument("benchmark beta must have mean one");
  params_ = std::move(p);
}

ObjectiveSpec::ObjectiveSpec(QuadraticParams p) {
  n_ = p.q.size();
  d_ = static_cast<std::size_t>(p.b.cols());
  if (n_ == 0 || d_ == 0) throw std::invalid_argument("quadratic needs n >= 1 and d >= 1");
  if (static_cast<std::size_t>(p.b.rows()) != n_)
    throw std::invalid_argument("quadratic shift count disagrees with matrix count");
  require_finite(p.b.allFinite(), "quadratic shift");
  for (const auto& q : p.q) {
    if (static_cast<std::size_t>(q.rows()) != d_ || static_cast<std::size_t>(q.cols()) != d_)
      throw std::invalid_argument("quadratic matrix has wrong shape");
    require_finite(q.allFinite(), "quadratic matrix");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + q.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("quadratic matrix is not symmetric");
  }
  params_ = std::move(p);
}

ObjectiveSpec::ObjectiveSpec(LinearParams p) {
  n_ = static_cast<std::size_t>(p.c.rows());
  d_ = static_cast<std::size_t>(p.c.cols());
  if (n_ == 0 || d_ == 0) throw std::invalid_argument("linear needs n >= 1 and d >= 1");
  require_finite(p.c.allFinite(), "linear");
  params_ = std::move(p);
}

ObjectiveKind ObjectiveSpec::kind() const {
  return static_cast<ObjectiveKind>(params_.index());
}

const BenchmarkParams& ObjectiveSpec::benchmark() const {
  if (auto* p = std::get_if<BenchmarkParams>(&params_)) return *p;
  throw std::logic_error("objective is not a benchmark");
}

const QuadraticParams& ObjectiveSpec::quadratic() const {
  if (auto* p = std::get_if<QuadraticParams>(&params_)) return *p;
  throw std::logic_error("objective is not quadratic");
}

const LinearParams& ObjectiveSpec::linear() const {
  if (auto* p = std::get_if<LinearParams>(&params_)) return *p;
  throw std::logic_error("objective is not linear");
}

bool operator==(const ObjectiveSpec& a, const ObjectiveSpec& b) {
  if (a.kind() != b.kind() || a.n_agents() != b.n_agents() || a.dim() != b.dim()) return false;
  switch (a.kind()) {
    case ObjectiveKind::benchmark: {
      const auto& x = a.benchmark();
      const auto& y = b.benchmark();
      return x.alpha == y.alpha && x.beta == y.beta && x.v == y.v && x.zeta == y.zeta;
    }
    case ObjectiveKind::quadratic: {
      const auto& x = a.quadratic();
      const auto& y = b.quadratic();
      if (x.b != y.b) return false;
      for (std::size_t i = 0; i < x.q.size(); ++i)
        if (x.q[i] != y.q[i]) return false;
      return true;
    }
    case ObjectiveKind::linear:
      return a.linear().c == b.linear().c;
  }
  return false;
}

ObjectiveSpec make_benchmark(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_benchmark requires n >= 1 and d >= 1");
  auto rng = make_stream(seed, StreamTag::objective);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));

  BenchmarkParams p;
  const auto ni = static_cast<Eigen::Index>(n);
  const auto di = static_cast<Eigen::Index>(d);
  p.alpha.resize(ni);
  p.beta.resize(ni);
  p.v.resize(ni);
  p.zeta.resize(ni, di);
  for (Eigen::Index i = 0; i < ni; ++i) {
    p.alpha(i) = sym(rng);
    p.v(i) = sym(rng);
    p.beta(i) = pos(rng);
    for (Eigen::Index j = 0; j < di; ++j) p.zeta(i, j) = gauss(rng);
  }
  p.beta /= p.beta.mean();
  return ObjectiveSpec(std::move(p));
}

ObjectiveSpec make_quadratic(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_quadratic requires n >= 1 and d >= 1");
  auto rng = make_stream(seed, StreamTag::objective);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto di = static_cast<Eigen::Index>(d);
  QuadraticParams p;
  p.b.resize(static_cast<Eigen::Index>(n), di);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix m(di, di);
    for (Eigen::Index r = 0; r < di; ++r)
      for (Eigen::Index c = 0; c < di; ++c) m(r, c) = gauss(rng);
    Matrix q = m * m.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(di, di);
    p.q.push_back(0.5 * (q + q.transpose()));
    for (Eigen::Index c = 0; c < di; ++c) p.b(static_cast<Eigen::Index>(i), c) = gauss(rng);
  }
  return ObjectiveSpec(std::move(p));
}

ObjectiveSpec make_linear(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_linear requires n >= 1 and d >= 1");
  auto rng = make_stream(seed, StreamTag::objective);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LinearParams p;
  p.c.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < p.c.rows(); ++i)
    for (Eigen::Index j = 0; j < p.c.cols(); ++j) p.c(i, j) = gauss(rng);
  return ObjectiveSpec(std::move(p));
}

ObjectiveSpec make_objective(ObjectiveKind kind, std::size_t n, std::size_t d, std::uint64_t seed) {
  switch (kind) {
    case ObjectiveKind::benchmark: return make_benchmark(n, d, seed);
    case ObjectiveKind::quadratic: return make_quadratic(n, d, seed);
    case ObjectiveKind::linear: return make_linear(n, d, seed);
  }
  throw std::invalid_argument("unknown objective kind");
}

// --- text dump -------------------------------------------------------------

namespace {

constexpr std::string_view kDumpMagic = "zovr-objective";
constexpr int kDumpVersion = 1;

void put(std::ostream& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out << buf;
}

template <typename Row>
void put_row(std::ostream& out, const Row& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j) out << ' ';
    put(out, row(j));
  }
  out << '\n';
}

void expect_token(std::istream& in, std::string_view token) {
  std::string got;
  if (!(in >> got) || got != token)
    throw ConfigError("objective dump: expected '" + std::string(token) + "', got '" + got + "'");
}

double get(std::istream& in) {
  // operator>> on double rejects "inf"/"nan", which the constructors reject anyway.
  double v;
  if (!(in >> v)) throw ConfigError("objective dump: truncated or malformed number");
  return v;
}

}  // namespace

void write_objective(std::ostream& out, const ObjectiveSpec& spec) {
  out << kDumpMagic << ' ' << kDumpVersion << '\n';
  out << "kind " << to_string(spec.kind()) << '\n';
  out << "n_agents " << spec.n_agents() << '\n';
  out << "dim " << spec.dim() << '\n';
  switch (spec.kind()) {
    case ObjectiveKind::benchmark: {
      const auto& p = spec.benchmark();
      out << "alpha\n";
      put_row(out, p.alpha);
      out << "beta\n";
      put_row(out, p.beta);
      out << "v\n";
      put_row(out, p.v);
      out << "zeta\n";
      for (Eigen::Index i = 0; i < p.zeta.rows(); ++i) put_row(out, p.zeta.row(i));
      break;
    }
    case ObjectiveKind::quadratic: {
      const auto& p = spec.quadratic();
      for (std::size_t i = 0; i < p.q.size(); ++i) {
        out << "q " << i << '\n';
        for (Eigen::Index r = 0; r < p.q[i].rows(); ++r) put_row(out, p.q[i].row(r));
      }
      out << "b\n";
      for (Eigen::Index i = 0; i < p.b.rows(); ++i) put_row(out, p.b.row(i));
      break;
    }
    case ObjectiveKind::linear: {
      const auto& p = spec.linear();
      out << "c\n";
      for (Eigen::Index i = 0; i < p.c.rows(); ++i) put_row(out, p.c.row(i));
      break;
    }
  }
}

ObjectiveSpec read_objective(std::istream& in) {
  expect_token(in, kDumpMagic);
  int version = 0;
  if (!(in >> version) || version != kDumpVersion)
    throw ConfigError("objective dump: unsupported version");
  expect_token(in, "kind");
  std::string kind_name;
  in >> kind_name;
  const auto kind = parse_objective_kind(kind_name);
  std::size_t n = 0;
  std::size_t d = 0;
  expect_token(in, "n_agents");
  in >> n;
  expect_token(in, "dim");
  in >> d;
  if (!in || n == 0 || d == 0) throw ConfigError("objective dump: bad sizes");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto di = static_cast<Eigen::Index>(d);

  auto read_vector = [&](std::string_view name) {
    expect_token(in, name);
    Vector v(ni);
    for (Eigen::Index i = 0; i < ni; ++i) v(i) = get(in);
    return v;
  };
  auto read_rows = [&](Eigen::Index rows) {
    Stacked m(rows, di);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < di; ++j) m(i, j) = get(in);
    return m;
  };

  switch (kind) {
    case ObjectiveKind::benchmark: {
      BenchmarkParams p;
      p.alpha = read_vector("alpha");
      p.beta = read_vector("beta");
      p.v = read_vector("v");
      expect_token(in, "zeta");
      p.zeta = read_rows(ni);
      return ObjectiveSpec(std::move(p));
    }
    case ObjectiveKind::quadratic: {
      QuadraticParams p;
      for (std::size_t i = 0; i < n; ++i) {
        expect_token(in, "q");
        expect_token(in, std::to_string(i));
        Matrix q(di, di);
        for (Eigen::Index r = 0; r < di; ++r)
          for (Eigen::Index c = 0; c < di; ++c) q(r, c) = get(in);
        p.q.push_back(std::move(q));
      }
      expect_token(in, "b");
      p.b = read_rows(ni);
      return ObjectiveSpec(std::move(p));
    }
    case ObjectiveKind::linear: {
      LinearParams p;
      expect_token(in, "c");
      p.c = read_rows(ni);
      return ObjectiveSpec(std::move(p));
    }
  }
  throw ConfigError("objective dump: unknown kind");
}

// --- evaluation --------------------------------------------------------------

double objective_value(const ObjectiveSpec& spec, std::size_t agent, VectorView x) {
  check_agent(spec, agent, x);
  const auto i = static_cast<Eigen::Index>(agent);
  switch (spec.kind()) {
    case ObjectiveKind::benchmark: {
      const auto& p = spec.benchmark();
      const double t = p.zeta.row(i).dot(x.transpose()) + p.v(i);
      return p.alpha(i) * sigmoid(t) + p.beta(i) * std::log1p(x.squaredNorm());
    }
    case ObjectiveKind::quadratic: {
      const auto& p = spec.quadratic();
      const Vector r = x - p.b.row(i).transpose();
      return 0.5 * r.dot(p.q[agent] * r);
    }
    case ObjectiveKind::linear:
      return spec.linear().c.row(i).dot(x.transpose());
  }
  return 0.0;
}

double global_value(const ObjectiveSpec& spec, VectorView x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.n_agents(); ++i) sum += objective_value(spec, i, x);
  return sum / static_cast<double>(spec.n_agents());
}

Vector analytic_grad(const ObjectiveSpec& spec, std::size_t agent, VectorView x) {
  check_agent(spec, agent, x);
  const auto i = static_cast<Eigen::Index>(agent);
  switch (spec.kind()) {
    case ObjectiveKind::benchmark: {
      const auto& p = spec.benchmark();
      const double t = p.zeta.row(i).dot(x.transpose()) + p.v(i);
      const double s = sigmoid(t);
      return p.alpha(i) * s * (1.0 - s) * p.zeta.row(i).transpose() +
             (2.0 * p.beta(i) / (1.0 + x.squaredNorm())) * x;
    }
    case ObjectiveKind::quadratic: {
      const auto& p = spec.quadratic();
      return p.q[agent] * (x - p.b.row(i).transpose());
    }
    case ObjectiveKind::linear:
      return spec.linear().c.row(i).transpose();
  }
  return Vector::Zero(x.size());
}

Vector global_grad(const ObjectiveSpec& spec, VectorView x) {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(spec.dim()));
  for (std::size_t i = 0; i < spec.n_agents(); ++i) sum += analytic_grad(spec, i, x);
  return sum / static_cast<double>(spec.n_agents());
}

double estimate_smoothness(const ObjectiveSpec& spec, std::uint64_t seed, std::size_t pairs) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, 2.0);
  std::uniform_real_distribution<double> log_sep(std::log(1e-3), 0.0);
  auto unit = [&](Rng& rng) {
    Vector z(d);
    do {
      for (Eigen::Index j = 0; j < d; ++j) z(j) = gauss(rng);
    } while (z.squaredNorm() == 0.0);
    return Vector(z / z.norm());
  };

  double best = 0.0;
  for (std::size_t agent = 0; agent < spec.n_agents(); ++agent) {
    auto rng = make_stream(seed, StreamTag::smoothness, agent);
    for (std::size_t k = 0; k < pairs; ++k) {
      const Vector x = radius(rng) * unit(rng);
      const Vector y = x + std::exp(log_sep(rng)) * unit(rng);
      const double sep = (x - y).norm();
      if (sep == 0.0) continue;
      const double ratio = (analytic_grad(spec, agent, x) - analytic_grad(spec, agent, y)).norm() / sep;
      best = std::max(best, ratio);
    }
  }
  return kSmoothnessSafety * best;
}

// --- counted oracle --------------------------------------------------------

ZerothOrderOracle::ZerothOrderOracle(std::shared_ptr<const ObjectiveSpec> spec)
    : spec_(std::move(spec)) {
  if (!spec_) throw std::invalid_argument("oracle needs an objective");
  counts_.assign(spec_->n_agents(), 0);
}

double ZerothOrderOracle::eval(std::size_t agent, VectorView x) {
  if (!x.allFinite()) throw std::invalid_argument("oracle query at a non-finite point");
  const double value = objective_value(*spec_, agent, x);
  ++counts_[agent];
  ++total_;
  return value;
}

}  // namespace zovr
