#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "zovr/common.hpp"
#include "zovr/oracle.hpp"

namespace zovr {

// Parameters of the step-size conditions. The analysis assumes d >= 3 and
// p in ((1 - sigma^2)/d, 1].
struct TheoryInputs {
  double sigma = 0.0;
  std::size_t d = 3;
  double p = 1.0;
  double L = 1.0;
};

// The three upper bounds on alpha*L from the main convergence theorem:
//   1 / (6 sqrt d)
//   (sqrt((2 + sigma^2)/(1 - p)) - sqrt 3) / (12 sqrt d)    (+inf at p = 1)
//   (1 - sigma^2)^3 / (216 sqrt(29) d^{5/2})
// The middle term is nonpositive whenever p <= (1 - sigma^2)/3.
struct StepBoundTerms {
  double first = 0.0;
  double second = 0.0;
  double third = 0.0;

  double min() const;
};

StepBoundTerms theorem1_terms(double sigma, std::size_t d, double p);

// min(theorem1_terms) / L. Throws std::domain_error outside the theorem's regime.
double theorem1_alpha_max(const TheoryInputs& inputs);

// Bounds for p = 1/d:
//   1 / (6 sqrt d)
//   sqrt(3) / (12 sqrt d) * (sqrt(1 + sigma^2/(d - 1)) - 1)
//   (1 - sigma^2)^3 / (264 sqrt(29) d^{3/2})
StepBoundTerms corollary1_terms(double sigma, std::size_t d);

// min(corollary1_terms) / L. sigma = 0 makes the middle term vanish; the result
// is then 0 and a warning is emitted.
double corollary1_alpha_max(double sigma, std::size_t d, double L);

// Sufficient alpha*L for the weighted-norm contraction:
// (1 - sigma^2)^3 / (12 sqrt(29) d^{5/2}).
double lemma4_alpha_bound(double sigma, std::size_t d);

// Coupling matrix of the consensus/snapshot/tracking error recursion
// v_{k+1} <= A v_k + B_k.
Eigen::Matrix3d lemma3_matrix(double sigma, std::size_t d, double alphaL);

struct ContractionCertificate {
  Eigen::Matrix3d A;
  Eigen::Vector3d pi;
  double weighted_norm = 0.0;    // max_i (A pi)_i / pi_i
  double spectral_radius = 0.0;
  double bound = 0.0;            // 1 - (1 - sigma^2) / (2d)
  bool satisfied = false;        // weighted_norm <= bound + 1e-12
};

ContractionCertificate certify_contraction(double sigma, std::size_t d, double alphaL);

// 12 d L^2 |x - y|^2 + 12 d L^2 |x~ - y|^2 + (7/2) u~^2 L^2 d^2, with the two
// distances given as norms.
double variance_bound_rhs(std::size_t d, double L, double dist_x_y, double dist_xt_y,
                          double u_tilde);

// R_0 = d / (1 - sigma^2) * E_x^0.
double theorem1_r0(double sigma, std::size_t d, double consensus_err0);

// R_u = (d u_0)^2 / p + sum_{k >= 1} (d u_k)^2 for u_k = u0 / k^q, q > 1/2.
double theorem1_ru(double p, std::size_t d, double u0, double q);

// Right-hand side of the averaged stationarity bound after k rounds:
// (6 delta0 / alpha + 6 L R0 / (sqrt(29 d) N alpha) + 36 L^2 R_u) / k.
double theorem1_stationarity_bound(std::size_t k, double alpha, double L, double delta0, double r0,
                                   double ru, std::size_t n_agents, std::size_t d);

// Lowest value of the global objective found by exact minimization (quadratic)
// or multi-start gradient descent (benchmark). Empty for linear objectives,
// which are unbounded below.
std::optional<double> estimate_min_value(const ObjectiveSpec& spec, std::uint64_t seed = 0x5eedULL,
                                         std::size_t starts = 8);

struct SmoothnessGapResult {
  bool applicable = false;
  bool holds = false;
  double lhs = 0.0;  // |grad f(x)|^2
  double rhs = 0.0;  // 2 L (f(x) - f*)

  double margin() const { return rhs - lhs; }
};

// Checks |grad f(x)|^2 <= 2 L (f(x) - f*) for the global objective.
SmoothnessGapResult smoothness_gap_check(const ObjectiveSpec& spec, VectorView x, double L,
                                         std::optional<double> f_star);
// Estimates L and f* first.
SmoothnessGapResult smoothness_gap_check(const ObjectiveSpec& spec, VectorView x);

}  // namespace zovr
