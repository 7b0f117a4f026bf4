#include <doctest.h>

#include <cmath>

#include "tonelli/periodic_torus.hpp"

using namespace tonelli;

namespace {
IVec ivec1(int a) { return IVec::Constant(1, a); }
IVec ivec2(int a, int b) {
  IVec r(2);
  r << a, b;
  return r;
}
constexpr double two_pi = 6.283185307179586;
}  // namespace

TEST_CASE("flat torus is the constant momentum graph") {
  const auto h = make_hamiltonian("flat", 2);
  const Grid grid({8, 8});
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec2(1, -2), grid);
  for (const Vec& p : torus.P) CHECK((p - Vec(Eigen::Vector2d(1, -2))).norm() < 1e-10);
  CHECK(torus.diagnostics.closure_residual < 1e-10);
  CHECK(torus.diagnostics.action_spread < 1e-12);
  CHECK(torus.diagnostics.lagrangian_defect < 1e-10);
  CHECK(torus.diagnostics.fixedness < 1e-10);
  CHECK(torus.diagnostics.homotopy_ok);
  CHECK(torus.action_per_orbit == doctest::Approx(2.5).epsilon(1e-10));  // |r|^2/2T
  CHECK((cohomology_class_of(torus) - Vec(Eigen::Vector2d(1, -2))).norm() < 1e-10);
}

TEST_CASE("convex-flat torus sits at the quartic root") {
  const auto h = make_hamiltonian("convex-flat", 1);
  const Grid grid({16});
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec1(1), grid);
  // p solves dH/dp = p + p^3 = 1
  for (const Vec& p : torus.P) CHECK(p[0] == doctest::Approx(0.6823278038280193).epsilon(1e-10));
  CHECK(torus.diagnostics.closure_residual < 1e-9);
  CHECK(torus.diagnostics.action_spread < 1e-10);
}

TEST_CASE("shear torus momentum section equals c + g'(theta)") {
  const auto h = make_hamiltonian("shear", 1);  // a = 0.3, c = 0
  const Grid grid({24});
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec1(1), grid);
  CHECK(torus.diagnostics.closure_residual < 1e-8);
  CHECK(torus.diagnostics.action_spread < 1e-7);
  CHECK(torus.diagnostics.lagrangian_defect < 1e-6);
  CHECK(torus.diagnostics.invariance_defect < 1e-6);
  CHECK(torus.diagnostics.fixedness < 1e-7);
  // exact section: P(theta) = r + a cos(2 pi theta_1)
  for (int j = 0; j < grid.size(); ++j) {
    const double exact = 1.0 + 0.3 * std::cos(two_pi * grid.node(j)[0]);
    CHECK(torus.P[j][0] == doctest::Approx(exact).epsilon(1e-7));
    CHECK(torus.X[j][0] == doctest::Approx(1.0).epsilon(1e-7));  // conjugate to flat
  }
  CHECK(cohomology_class_of(torus)[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("shear torus in two degrees of freedom") {
  const auto h = make_hamiltonian("shear", 2);
  const Grid grid({12, 12});
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec2(1, 0), grid);
  CHECK(torus.diagnostics.closure_residual < 1e-8);
  CHECK(torus.diagnostics.action_spread < 1e-7);
  CHECK(torus.diagnostics.homotopy_ok);
  for (int j = 0; j < grid.size(); ++j) {
    const double exact = 1.0 + 0.3 * std::cos(two_pi * grid.node(j)[0]);
    CHECK(torus.P[j][0] == doctest::Approx(exact).epsilon(1e-7));
    CHECK(std::abs(torus.P[j][1]) < 1e-7);
  }
}

TEST_CASE("zero class degenerates to the critical graph") {
  const auto flat = make_hamiltonian("flat", 1);
  const ZeroClassReport zr = zero_class_check(*flat, 1.0, Grid({8}));
  CHECK(zr.sup_velocity < 1e-9);
  CHECK(zr.critical_point_defect < 1e-9);

  const auto shear = make_hamiltonian("shear", 1);
  const ZeroClassReport sr = zero_class_check(*shear, 1.0, Grid({16}));
  CHECK(sr.sup_velocity < 1e-7);
  // momentum section equals the form g'(theta) itself
  for (int j = 0; j < 16; ++j) {
    const double exact = 0.3 * std::cos(two_pi * sr.torus.grid.node(j)[0]);
    CHECK(sr.torus.P[j][0] == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("period action profile is flat on a foliated class") {
  const auto h = make_hamiltonian("shear", 1);
  const Grid grid({12});
  const ActionProfile prof = period_action_profile(*h, 1.0, ivec1(1), grid);
  CHECK(prof.failed_nodes.empty());
  CHECK(prof.spread < 1e-7);

  // pendulum r=0, T=1: action is NOT constant across the grid (no foliation)
  const auto pend = make_hamiltonian("pendulum", 1);
  const ActionProfile pp = period_action_profile(*pend, 1.0, ivec1(0), Grid({8}));
  CHECK(pp.failed_nodes.empty());
  CHECK(pp.spread > 1e-2);
}

TEST_CASE("momentum field interpolates the section off grid") {
  const auto h = make_hamiltonian("shear", 1);
  const PeriodicTorusData torus = build_torus(*h, 1.0, ivec1(1), Grid({24}));
  const TrigField field = torus.momentum_field(0);
  for (double t : {0.17, 0.62}) {
    CHECK(field(Vec::Constant(1, t)) ==
          doctest::Approx(1.0 + 0.3 * std::cos(two_pi * t)).epsilon(1e-6));
  }
}

TEST_CASE("mech2d small-coupling torus regression") {
  const auto h = make_hamiltonian("mech2d", 2);  // eps = 0.2
  const Grid grid({10, 10});
  const PeriodicTorusData torus = build_torus(*h, 0.25, ivec2(1, 1), grid);
  CHECK(torus.diagnostics.closure_residual < 1e-8);
  CHECK(torus.diagnostics.homotopy_ok);
  // fast class: momentum close to r/T with small oscillation
  const Vec c = cohomology_class_of(torus);
  CHECK(c[0] == doctest::Approx(4.0).epsilon(2e-2));
  CHECK(c[1] == doctest::Approx(4.0).epsilon(2e-2));
}
