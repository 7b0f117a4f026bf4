#include <doctest.h>

#include <cmath>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/integrator.hpp"

using namespace tonelli;

namespace {
Vec vec1(double a) { return Vec::Constant(1, a); }
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
constexpr double two_pi = 6.283185307179586;

// independent scalar solve of p + p^3 = v by bisection
double cubic_root(double v) {
  double lo = 0, hi = std::max(1.0, v);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + mid * mid * mid < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("catalogue models pass the Tonelli self-checks") {
  for (const auto& [name, dim] : std::vector<std::pair<std::string, int>>{
           {"flat", 2}, {"convex-flat", 1}, {"shear", 1}, {"pendulum", 1}, {"mech2d", 2}}) {
    const auto h = make_hamiltonian(name, dim);
    const ModelDiagnostics d = validate_model(*h);
    CAPTURE(name);
    CHECK(d.periodicity_defect < 1e-12);
    CHECK(d.convex);
    CHECK(d.superlinear);
    CHECK(d.grad_fd_error < 1e-6);
    CHECK(d.hess_fd_error < 1e-5);
  }
}

TEST_CASE("hamiltonian vector field values") {
  const auto flat = make_hamiltonian("flat", 2);
  Vec dx(2), dp(2);
  hamiltonian_field(*flat, vec2(0.25, 0.5), vec2(1, 2), dx, dp);
  CHECK(dx.isApprox(vec2(1, 2)));
  CHECK(dp.norm() == doctest::Approx(0.0));

  const auto pend = make_hamiltonian("pendulum", 1);
  hamiltonian_field(*pend, vec1(0.0), vec1(0.0), dx, dp);
  CHECK(std::abs(dp[0]) < 1e-14);  // critical point
  hamiltonian_field(*pend, vec1(0.25), vec1(1.0), dx, dp);
  CHECK(dx[0] == doctest::Approx(1.0));
  CHECK(dp[0] == doctest::Approx(two_pi));  // 2 pi sin(pi/2)
}

TEST_CASE("flat flow is straight lines with winding bookkeeping") {
  const auto h = make_hamiltonian("flat", 2);
  const LiftedState z0(vec2(0.25, 0.5), vec2(1, 2));
  const LiftedState z1 = flow(*h, z0, 0.5);
  CHECK(z1.x.isApprox(vec2(0.75, 1.5), 1e-12));
  CHECK(z1.p.isApprox(vec2(1, 2), 1e-12));
  CHECK(z1.winding[0] == 0);
  CHECK(z1.winding[1] == 1);
  const LiftedState same = flow(*h, z0, 0.0);
  CHECK(same.x.isApprox(z0.x));
}

TEST_CASE("pendulum flow self-convergence and reversal") {
  const auto h = make_hamiltonian("pendulum", 1);
  const LiftedState z0(vec1(0.0), vec1(0.01));
  const LiftedState coarse = flow(*h, z0, 1.0, {"verlet", 1e-4});
  const LiftedState fine = flow(*h, z0, 1.0, {"midpoint", 1e-5});
  CHECK((coarse.x - fine.x).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK((coarse.p - fine.p).lpNorm<Eigen::Infinity>() < 1e-6);

  const LiftedState back = flow(*h, coarse, -1.0, {"verlet", 1e-4});
  CHECK(std::abs(back.x[0] - z0.x[0]) < 1e-11);
  CHECK(std::abs(back.p[0] - z0.p[0]) < 1e-11);
}

TEST_CASE("flow group law and energy drift") {
  const auto h = make_hamiltonian("shear", 1);
  const LiftedState z0(vec1(0.2), vec1(0.7));
  const IntegratorSpec spec{"midpoint", 1e-3};
  const LiftedState ab = flow(*h, flow(*h, z0, 0.3, spec), 0.7, spec);
  const LiftedState direct = flow(*h, z0, 1.0, spec);
  CHECK((ab.x - direct.x).lpNorm<Eigen::Infinity>() < 1e-10);

  const double e0 = h->eval(z0.x, z0.p);
  const LiftedState z100 = flow(*h, z0, 100.0, spec);
  CHECK(std::abs(h->eval(wrap_unit(z100.x), z100.p) - e0) < 1e-5);
}

TEST_CASE("deck transformation commutes with the lifted flow") {
  const auto h = make_hamiltonian("pendulum", 1);
  const IntegratorSpec spec{"verlet", 1e-3};
  const LiftedState a = flow(*h, LiftedState(vec1(0.3), vec1(0.8)), 2.0, spec);
  const LiftedState b = flow(*h, LiftedState(vec1(1.3), vec1(0.8)), 2.0, spec);
  CHECK(std::abs(b.x[0] - a.x[0] - 1.0) < 1e-12);
  CHECK(std::abs(b.p[0] - a.p[0]) < 1e-12);
}

TEST_CASE("tangent flow: flat vertical frame and symplecticity") {
  const auto h = make_hamiltonian("flat", 2);
  const CotangentState z(vec2(0.1, 0.9), vec2(0.5, -0.2));
  Mat vert = Mat::Zero(4, 2);
  vert.bottomRows(2) = Mat::Identity(2, 2);
  const double t = 3.7;
  const FlowWithFrame fw = flow_with_frame(*h, LiftedState::from(z), vert, t);
  CHECK((fw.frame.topRows(2) - t * Mat::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((fw.frame.bottomRows(2) - Mat::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-12);

  const auto shear = make_hamiltonian("shear", 2);
  const Mat m = tangent_flow(*shear, LiftedState(vec2(0.3, 0.8), vec2(0.4, 0.1)), 5.0,
                             {"midpoint", 1e-3});
  const Mat j = symplectic_j(2);
  CHECK((m.transpose() * j * m - j).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("tangent flow at the pendulum hyperbolic point") {
  const auto h = make_hamiltonian("pendulum", 1);
  // linearization [[0,1],[4pi^2,0]] has eigenvector (1, 2pi) with rate 2pi
  Mat frame(2, 1);
  frame << 1.0, two_pi;
  const FlowWithFrame fw =
      flow_with_frame(*h, LiftedState(vec1(0.0), vec1(0.0)), frame, 1.0, {"verlet", 1e-5});
  const double growth = fw.frame.col(0).norm() / frame.col(0).norm();
  CHECK(growth == doctest::Approx(std::exp(two_pi)).epsilon(1e-3));
}

TEST_CASE("legendre transform round trip and convex-flat root") {
  const auto h = make_hamiltonian("convex-flat", 1);
  const Vec p = legendre(*h, vec1(0.0), vec1(1.0));
  CHECK(p[0] == doctest::Approx(cubic_root(1.0)).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.6823278038280193).epsilon(1e-10));
  const Vec v = inverse_legendre(*h, vec1(0.0), p);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));

  // H(x,p) + L(x,v) = p.v for the closed-form Lagrangian
  const double lhs = h->eval(vec1(0.0), p) + h->lagrangian(vec1(0.0), v);
  CHECK(lhs == doctest::Approx(p.dot(v)).epsilon(1e-12));

  const auto pend = make_hamiltonian("pendulum", 1);
  CHECK(legendre(*pend, vec1(0.3), vec1(0.7))[0] == doctest::Approx(0.7));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(make_hamiltonian("nope", 1), ConfigError);
  CHECK_THROWS_AS(make_hamiltonian("pendulum", 2), ConfigError);
  const auto h = make_hamiltonian("flat", 1);
  CHECK_THROWS_AS(flow(*h, LiftedState(vec1(0), vec1(0)), 1.0, {"verlet", -1.0}), ConfigError);
  CHECK_THROWS_AS(flow(*h, LiftedState(vec1(0), vec1(0)), 1.0, {"rk4", 1e-3}), ConfigError);
}
