#include <doctest.h>

#include <cmath>

#include "tonelli/kam.hpp"

using namespace tonelli;

namespace {
IVec ivec1(int a) { return IVec::Constant(1, a); }

// independent p + p^3 = 1 root for the convex-flat twist oracle
double quartic_rest_momentum() {
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + mid * mid * mid < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("Diophantine verification") {
  const Vec g1 = golden_frequency(1);
  CHECK(g1[0] == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-15));
  const DiophantineVector d = verify_diophantine(g1, 1.2, 2000);
  CHECK(d.gamma > 0.05);
  CHECK(d.verified_up_to == 2000);

  const Vec g2 = golden_frequency(2);
  CHECK(verify_diophantine(g2, 2.5, 200).gamma > 0.0);

  CHECK_THROWS_AS(verify_diophantine(Vec::Constant(1, 0.5), 1.2, 10), HypothesisViolated);
  CHECK_THROWS_AS(golden_frequency(4), ConfigError);
}

TEST_CASE("integrable standard map: trivial seed is already invariant") {
  const SymplecticMap map = standard_family(0.0);
  const DiophantineVector omega = verify_diophantine(golden_frequency(1), 1.2, 500);
  const TorusEmbedding seed = TorusEmbedding::trivial(Grid({64}), omega.omega);
  const InvarianceResult res = solve_invariance(map, omega, seed);
  CHECK(res.converged);
  REQUIRE(!res.residual_history.empty());
  CHECK(res.residual_history.front() < 1e-13);
}

TEST_CASE("standard family kappa = 0.1: quadratic Newton convergence") {
  const SymplecticMap map = standard_family(0.1);
  const DiophantineVector omega = verify_diophantine(golden_frequency(1), 1.2, 500);
  const TorusEmbedding seed = TorusEmbedding::trivial(Grid({128}), omega.omega);
  const InvarianceResult res = solve_invariance(map, omega, seed);
  CHECK(res.converged);
  CHECK(res.residual_history.size() <= 8);
  // at least one genuinely quadratic contraction step
  bool quadratic = false;
  for (size_t k = 0; k + 1 < res.residual_history.size(); ++k) {
    const double r0 = res.residual_history[k], r1 = res.residual_history[k + 1];
    if (r0 < 1e-2 && r1 < 10 * r0 * r0) quadratic = true;
  }
  CHECK(quadratic);
  CHECK(res.rho.graph_defect() < 1e-8);
  CHECK(res.rho.tail_energy() < 1e-10);
  // zero-mean angle correction
  Vec mean = Vec::Zero(1);
  for (const Vec& u : res.rho.u) mean += u;
  CHECK(std::abs(mean[0]) / res.rho.u.size() < 1e-12);
}

TEST_CASE("standard family beyond breakup does not converge") {
  const SymplecticMap map = standard_family(2.0);
  const DiophantineVector omega = verify_diophantine(golden_frequency(1), 1.2, 500);
  const TorusEmbedding seed = TorusEmbedding::trivial(Grid({128}), omega.omega);
  InvarianceOptions opt;
  opt.max_iters = 12;
  const InvarianceResult res = solve_invariance(map, omega, seed, opt);
  CHECK(!res.converged);
}

TEST_CASE("twist extraction: flat torus gives Abar = T Id") {
  const auto h = make_hamiltonian("flat", 2);
  IVec r(2);
  r << 1, 0;
  const PeriodicTorusData torus = build_torus(*h, 1.0, r, Grid({8, 8}));
  const NormalFormData nf = extract_twist(*h, torus);
  CHECK((nf.abar - Mat::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(nf.symmetry_defect < 1e-8);
  CHECK(nf.min_eigenvalue > 0.9);
  CHECK(nf.theta_dependence < 1e-8);
  CHECK(nf.q_defect < 1e-8);
  CHECK(nf.cross_defect < 1e-8);
  CHECK(nf.b_defect < 1e-5);
}

TEST_CASE("twist extraction: convex-flat torsion matches the closed form") {
  const auto h = make_hamiltonian("convex-flat", 1);
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec1(1), Grid({16}));
  const NormalFormData nf = extract_twist(*h, torus);
  const double p = quartic_rest_momentum();
  CHECK(nf.abar(0, 0) == doctest::Approx(1.0 + 3.0 * p * p).epsilon(1e-6));
  CHECK(nf.min_eigenvalue > 1.0);
  CHECK(nf.q_defect < 1e-8);
}

TEST_CASE("rescaled return map of the flat torus is an exact shear jet") {
  const auto h = make_hamiltonian("flat", 1);
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec1(1), Grid({8}));
  const double eps = 0.25;
  const SymplecticMap phi = rescaled_map(*h, torus, eps);
  const MapJet jet = phi(Vec::Constant(1, 0.3), Vec::Constant(1, 0.4));
  CHECK(jet.x[0] == doctest::Approx(0.3 + eps * 0.4).epsilon(1e-9));
  CHECK(jet.i[0] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(jet.jac(0, 1) == doctest::Approx(eps).epsilon(1e-7));
  CHECK(jet.jac(1, 0) == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("Euler composition error") {
  // constant field: Euler composition is the exact flow, error identically zero
  auto const_field = [](const Vec& z) {
    Vec f(2);
    f << 0.7, -0.2;
    return f;
  };
  auto const_ref = [&](const Vec& z, double t) { return Vec(z + t * const_field(z)); };
  std::vector<Vec> samples{Vec::Zero(2), Vec::Constant(2, 0.3)};
  const EulerSlopeReport zero =
      euler_composition_error(const_field, const_ref, samples, {0.1, 0.05, 0.025}, 1.0);
  CHECK(zero.all_zero);
  CHECK(zero.max_error < 1e-13);

  // pendulum vector field: first-order convergence
  const auto pend = make_hamiltonian("pendulum", 1);
  std::vector<Vec> pts;
  for (double x : {0.1, 0.35, 0.7}) {
    Vec z(2);
    z << x, 0.4;
    pts.push_back(z);
  }
  const EulerSlopeReport rep =
      euler_composition_error(*pend, pts, {4e-3, 2e-3, 1e-3, 5e-4}, 0.5);
  CHECK(!rep.all_zero);
  CHECK(rep.slope > 0.9);
  CHECK(rep.slope < 1.1);
}

TEST_CASE("family member smoke test on the convex-flat torus") {
  const auto h = make_hamiltonian("convex-flat", 1);
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec1(1), Grid({16}));
  const NormalFormData nf = extract_twist(*h, torus);
  const DiophantineVector omega = verify_diophantine(golden_frequency(1), 1.2, 500);
  const auto members = torus_family(*h, torus, nf, omega, 8, 8);
  REQUIRE(members.size() == 1);
  const FamilyMember& m = members[0];
  CHECK(m.converged);
  CHECK(m.residual < 1e-10);
  CHECK(m.rotation_error < 1e-8);
  CHECK(m.c0_distance > 0);
  CHECK(m.flow_invariance_T < 1e-8);

  const auto [ang, mom] = embed_member(torus, m, Vec::Constant(1, 0.2));
  CHECK(ang.size() == 1);
  CHECK(mom[0] == doctest::Approx(0.6823278038280193).epsilon(0.2));
}
