#include "zovr/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>

#include "zovr/algorithms.hpp"
#include "zovr/estimators.hpp"
#include "zovr/metrics.hpp"
#include "zovr/network.hpp"
#include "zovr/oracle.hpp"
#include "zovr/theory.hpp"

namespace zovr {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

SelftestCheck guarded(std::string name, const std::function<SelftestCheck()>& body) {
  try {
    auto c = body();
    c.name = std::move(name);
    return c;
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> out;

  out.push_back(guarded("metropolis weights are doubly stochastic", [] {
    auto w = metropolis_weights(build_topology({TopologyKind::erdos_renyi, 12, 0.4, 7}));
    const double sigma = w.sigma();
    return SelftestCheck{{}, sigma >= 0.0 && sigma < 1.0, "sigma=" + fmt(sigma)};
  }));

  out.push_back(guarded("2d-point matches gradient on a quadratic", [] {
    auto spec = std::make_shared<const ObjectiveSpec>(make_quadratic(2, 5, 3));
    ZerothOrderOracle oracle(spec);
    Vector x = Vector::LinSpaced(5, -1.0, 1.0);
    Vector g = analytic_grad(*spec, 0, x);
    Vector e = two_d_point(oracle, 0, x, 1e-3).estimate;
    // central differences are exact on quadratics up to rounding
    const double err = (e - g).norm();
    return SelftestCheck{{}, err < 1e-6 && oracle.total_queries() == 10, "err=" + fmt(err)};
  }));

  out.push_back(guarded("VR-GE counting modes agree", [] {
    auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(2, 6, 1));
    ZerothOrderOracle a(spec);
    ZerothOrderOracle b(spec);
    Vector x = Vector::Constant(6, 0.3);
    Vector xt = Vector::Constant(6, -0.2);
    auto snap = SnapshotState::take(a, 1, xt, 0.5);
    Vector ea = vr_ge(a, 1, x, 0.25, snap, 3, CountingMode::paper_faithful);
    Vector eb = vr_ge(b, 1, x, 0.25, snap, 3, CountingMode::cached);
    const bool ok = ea == eb && a.total_queries() == 12 + 4 && b.total_queries() == 2;
    return SelftestCheck{{}, ok, "queries=" + std::to_string(a.total_queries()) + "/" +
                                     std::to_string(b.total_queries())};
  }));

  out.push_back(guarded("weighted-norm contraction at the admissible step", [] {
    const double sigma = 0.6;
    const std::size_t d = 10;
    auto cert = certify_contraction(sigma, d, lemma4_alpha_bound(sigma, d));
    return SelftestCheck{{}, cert.satisfied,
                         "norm=" + fmt(cert.weighted_norm) + " bound=" + fmt(cert.bound)};
  }));

  out.push_back(guarded("VR-GT run is deterministic", [] {
    auto w = metropolis_weights(build_topology({TopologyKind::ring, 6, 0.0, 0}));
    auto spec = std::make_shared<const ObjectiveSpec>(make_benchmark(6, 8, 2));
    RunOptions opt;
    opt.stop = StopCondition::rounds(20);
    opt.seed = 11;
    auto r1 = run(opt, w, spec);
    auto r2 = run(opt, w, spec);
    return SelftestCheck{{}, r1 == r2 && r1.size() == 20, "rows=" + std::to_string(r1.size())};
  }));

  return out;
}

}  // namespace zovr
