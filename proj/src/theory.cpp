#include "zovr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "zovr/log.hpp"
#include "zovr/rng.hpp"

namespace zovr {
namespace {

const double kSqrt29 = std::sqrt(29.0);

void require_sigma_d(double sigma, std::size_t d) {
  if (!(sigma >= 0.0 && sigma < 1.0)) throw std::domain_error("sigma must lie in [0, 1)");
  if (d < 3) throw std::domain_error("the step-size analysis assumes d >= 3");
}

}  // namespace

double StepBoundTerms::min() const { return std::min({first, second, third}); }

StepBoundTerms theorem1_terms(double sigma, std::size_t d, double p) {
  require_sigma_d(sigma, d);
  const double dd = static_cast<double>(d);
  const double gap = 1.0 - sigma * sigma;
  StepBoundTerms t;
  t.first = 1.0 / (6.0 * std::sqrt(dd));
  t.second = p >= 1.0 ? std::numeric_limits<double>::infinity()
                      : (std::sqrt((2.0 + sigma * sigma) / (1.0 - p)) - std::sqrt(3.0)) /
                            (12.0 * std::sqrt(dd));
  t.third = gap * gap * gap / (216.0 * kSqrt29 * std::pow(dd, 2.5));
  return t;
}

double theorem1_alpha_max(const TheoryInputs& in) {
  require_sigma_d(in.sigma, in.d);
  if (!(in.L > 0.0)) throw std::domain_error("L must be positive");
  const double p_min = (1.0 - in.sigma * in.sigma) / static_cast<double>(in.d);
  if (!(in.p > p_min && in.p <= 1.0))
    throw std::domain_error("p = " + std::to_string(in.p) + " outside ((1 - sigma^2)/d, 1] = (" +
                            std::to_string(p_min) + ", 1]");
  return theorem1_terms(in.sigma, in.d, in.p).min() / in.L;
}

StepBoundTerms corollary1_terms(double sigma, std::size_t d) {
  require_sigma_d(sigma, d);
  const double dd = static_cast<double>(d);
  const double gap = 1.0 - sigma * sigma;
  StepBoundTerms t;
  t.first = 1.0 / (6.0 * std::sqrt(dd));
  t.second = std::sqrt(3.0) / (12.0 * std::sqrt(dd)) *
             (std::sqrt(1.0 + sigma * sigma / (dd - 1.0)) - 1.0);
  t.third = gap * gap * gap / (264.0 * kSqrt29 * std::pow(dd, 1.5));
  return t;
}

double corollary1_alpha_max(double sigma, std::size_t d, double L) {
  if (!(L > 0.0)) throw std::domain_error("L must be positive");
  const auto t = corollary1_terms(sigma, d);
  if (sigma == 0.0) warn("sigma = 0: the p = 1/d step-size bound degenerates to zero");
  return t.min() / L;
}

double lemma4_alpha_bound(double sigma, std::size_t d) {
  require_sigma_d(sigma, d);
  const double gap = 1.0 - sigma * sigma;
  return gap * gap * gap / (12.0 * kSqrt29 * std::pow(static_cast<double>(d), 2.5));
}

Eigen::Matrix3d lemma3_matrix(double sigma, std::size_t d, double alphaL) {
  require_sigma_d(sigma, d);
  if (!(alphaL >= 0.0)) throw std::domain_error("alpha*L must be nonnegative");
  const double dd = static_cast<double>(d);
  const double s2 = sigma * sigma;
  const double gap = 1.0 - s2;
  const double c1 = 9.0 * kSqrt29 * std::sqrt(dd) / gap * alphaL;
  const double c3 = 3.0 * kSqrt29 * std::sqrt(dd) / gap * alphaL;
  Eigen::Matrix3d a;
  a << (1.0 + 2.0 * s2) / 3.0, 0.0, c1,
       17.0 * std::sqrt(dd) * alphaL + (1.0 + 2.0 * s2) / 3.0, 1.0 - gap / dd, c1,
       c1, c3, (2.0 + s2) / 3.0;
  return a;
}

ContractionCertificate certify_contraction(double sigma, std::size_t d, double alphaL) {
  ContractionCertificate c;
  c.A = lemma3_matrix(sigma, d, alphaL);
  const double gap = 1.0 - sigma * sigma;
  c.pi << gap / static_cast<double>(d), 3.0, 1.0;
  c.weighted_norm = ((c.A * c.pi).array() / c.pi.array()).maxCoeff();
  c.spectral_radius = Eigen::EigenSolver<Eigen::Matrix3d>(c.A, false).eigenvalues().cwiseAbs().maxCoeff();
  c.bound = 1.0 - gap / (2.0 * static_cast<double>(d));
  c.satisfied = c.weighted_norm <= c.bound + 1e-12;
  return c;
}

double variance_bound_rhs(std::size_t d, double L, double dist_x_y, double dist_xt_y,
                          double u_tilde) {
  if (L < 0.0 || dist_x_y < 0.0 || dist_xt_y < 0.0 || u_tilde < 0.0)
    throw std::domain_error("variance_bound_rhs arguments must be nonnegative");
  const double dd = static_cast<double>(d);
  const double l2 = L * L;
  return 12.0 * dd * l2 * dist_x_y * dist_x_y + 12.0 * dd * l2 * dist_xt_y * dist_xt_y +
         3.5 * u_tilde * u_tilde * l2 * dd * dd;
}

double theorem1_r0(double sigma, std::size_t d, double consensus_err0) {
  require_sigma_d(sigma, d);
  return static_cast<double>(d) / (1.0 - sigma * sigma) * consensus_err0;
}

double theorem1_ru(double p, std::size_t d, double u0, double q) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p must lie in (0, 1]");
  if (!(q > 0.5)) throw std::domain_error("R_u is finite only for q > 1/2");
  const double du0 = static_cast<double>(d) * u0;
  // sum_{k >= 1} k^{-2q} = zeta(2q)
  return du0 * du0 * (1.0 / p + std::riemann_zeta(2.0 * q));
}

double theorem1_stationarity_bound(std::size_t k, double alpha, double L, double delta0, double r0,
                                   double ru, std::size_t n_agents, std::size_t d) {
  if (k == 0) throw std::domain_error("k must be positive");
  const double n = static_cast<double>(n_agents);
  const double dd = static_cast<double>(d);
  const double total = 6.0 / alpha * delta0 + 6.0 * L * r0 / (std::sqrt(29.0 * dd) * n * alpha) +
                       36.0 * L * L * ru;
  return total / static_cast<double>(k);
}

std::optional<double> estimate_min_value(const ObjectiveSpec& spec, std::uint64_t seed,
                                         std::size_t starts) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  switch (spec.kind()) {
    case ObjectiveKind::linear:
      return std::nullopt;
    case ObjectiveKind::quadratic: {
      const auto& p = spec.quadratic();
      Matrix h = Matrix::Zero(d, d);
      Vector rhs = Vector::Zero(d);
      for (std::size_t i = 0; i < p.q.size(); ++i) {
        h += p.q[i];
        rhs += p.q[i] * p.b.row(static_cast<Eigen::Index>(i)).transpose();
      }
      const Vector x_star = h.completeOrthogonalDecomposition().solve(rhs);
      return global_value(spec, x_star);
    }
    case ObjectiveKind::benchmark: {
      const double L = estimate_smoothness(spec);
      const double step = 1.0 / L;
      auto rng = make_stream(seed, StreamTag::smoothness, 0, 1);
      std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < starts; ++s) {
        Vector x = Vector::Zero(d);
        if (s > 0)
          for (Eigen::Index j = 0; j < d; ++j) x(j) = gauss(rng);
        for (int it = 0; it < 5000; ++it) {
          const Vector g = global_grad(spec, x);
          if (g.squaredNorm() < 1e-26) break;
          x -= step * g;
        }
        best = std::min(best, global_value(spec, x));
      }
      return best;
    }
  }
  return std::nullopt;
}

SmoothnessGapResult smoothness_gap_check(const ObjectiveSpec& spec, VectorView x, double L,
                                         std::optional<double> f_star) {
  SmoothnessGapResult r;
  if (!f_star) return r;
  r.applicable = true;
  r.lhs = global_grad(spec, x).squaredNorm();
  r.rhs = 2.0 * L * (global_value(spec, x) - *f_star);
  r.holds = r.lhs <= r.rhs;
  return r;
}

SmoothnessGapResult smoothness_gap_check(const ObjectiveSpec& spec, VectorView x) {
  if (spec.kind() == ObjectiveKind::linear) return {};
  return smoothness_gap_check(spec, x, estimate_smoothness(spec), estimate_min_value(spec));
}

}  // namespace zovr
