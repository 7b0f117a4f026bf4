#include <doctest.h>

#include <cmath>
#include <random>

#include "tonelli/action.hpp"

using namespace tonelli;

namespace {
Vec vec1(double a) { return Vec::Constant(1, a); }
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
constexpr double two_pi = 6.283185307179586;

// Independent pendulum oracle: RK4 on the Euler-Lagrange equation, bisection
// shooting over all brackets, Simpson quadrature of the Lagrangian.
struct OracleOrbit {
  std::vector<double> x, v;
};
OracleOrbit rk4_orbit(double x0, double v0, double t, int steps) {
  OracleOrbit orb;
  const double h = t / steps;
  double x = x0, v = v0;
  orb.x.push_back(x);
  orb.v.push_back(v);
  auto acc = [](double q) { return two_pi * std::sin(two_pi * q); };  // -V'(q)
  for (int k = 0; k < steps; ++k) {
    const double k1x = v, k1v = acc(x);
    const double k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x);
    const double k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x);
    const double k4x = v + h * k3v, k4v = acc(x + h * k3x);
    x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    orb.x.push_back(x);
    orb.v.push_back(v);
  }
  return orb;
}
double oracle_pendulum_action(double x0, double y, double t) {
  const int steps = 4096;
  auto endpoint = [&](double v0) { return rk4_orbit(x0, v0, t, steps).x.back() - y; };
  std::vector<double> roots;
  double prev = endpoint(-3.0);
  for (int i = 1; i <= 600; ++i) {
    const double v = -3.0 + 6.0 * i / 600;
    const double cur = endpoint(v);
    if (prev * cur <= 0 && std::abs(prev) > 0) {
      double lo = v - 6.0 / 600, hi = v, flo = prev;
      for (int b = 0; b < 80; ++b) {
        const double mid = 0.5 * (lo + hi);
        const double fm = endpoint(mid);
        if (flo * fm <= 0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  REQUIRE(!roots.empty());
  double best = std::numeric_limits<double>::infinity();
  for (const double v0 : roots) {
    const OracleOrbit orb = rk4_orbit(x0, v0, t, steps);
    auto lag = [&](int k) {
      return 0.5 * orb.v[k] * orb.v[k] - std::cos(two_pi * orb.x[k]);
    };
    double s = lag(0) + lag(steps);
    for (int k = 1; k < steps; ++k) s += (k % 2 ? 4.0 : 2.0) * lag(k);
    s *= t / steps / 3.0;
    best = std::min(best, s);
  }
  return best;
}
}  // namespace

TEST_CASE("action of explicit paths") {
  const auto flat = make_hamiltonian("flat", 2);
  DiscretePath straight;
  for (int k = 0; k <= 100; ++k) {
    straight.times.push_back(k / 100.0);
    straight.points.push_back(vec2(k / 100.0, 0.0));
  }
  straight.derive_velocities();
  CHECK(action_of_path(*flat, straight) == doctest::Approx(0.5).epsilon(1e-12));

  const auto pend = make_hamiltonian("pendulum", 1);
  DiscretePath constant;
  for (int k = 0; k <= 10; ++k) {
    constant.times.push_back(0.3 * k);
    constant.points.push_back(vec1(0.2));
  }
  constant.derive_velocities();
  // action of a rest path is -V * duration
  CHECK(action_of_path(*pend, constant) ==
        doctest::Approx(-std::cos(two_pi * 0.2) * 3.0).epsilon(1e-12));
}

TEST_CASE("path action refines at second order") {
  const auto pend = make_hamiltonian("pendulum", 1);
  auto sampled = [&](int nodes) {
    const FlowPath fp = flow_path(*pend, LiftedState(vec1(0.0), vec1(0.5)), 1.0,
                                  {"verlet", 1.0 / nodes});
    DiscretePath path;
    for (size_t k = 0; k < fp.t.size(); ++k) {
      path.times.push_back(fp.t[k]);
      path.points.push_back(fp.z[k].x);
    }
    path.derive_velocities();
    return action_of_path(*pend, path);
  };
  const double coarse = sampled(1000);
  const double fine = sampled(2000);
  CHECK(std::abs(coarse - fine) < 1e-5);
}

TEST_CASE("flat minimizers are closed-form") {
  const auto flat = make_hamiltonian("flat", 2);
  const ActionResult r = min_action(*flat, vec2(0, 0), vec2(0.5, 0), 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(r.initial_velocity.isApprox(vec2(0.5, 0.0), 1e-8));

  const ActionResult zero = min_action(*flat, vec2(0.3, 0.4), vec2(0.3, 0.4), 2.0);
  CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lifted action is periodic under integer translations") {
  const auto pend = make_hamiltonian("pendulum", 1);
  const double a = min_action(*pend, vec1(0.1), vec1(0.6), 1.0).value;
  const double b = min_action(*pend, vec1(2.1), vec1(2.6), 1.0).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("pendulum minimizer matches the RK4/bisection/Simpson oracle") {
  const auto pend = make_hamiltonian("pendulum", 1);
  MinActionOptions fine;
  fine.integrator.h = 1e-4;
  const ActionResult r = min_action(*pend, vec1(0.0), vec1(0.5), 1.0, fine);
  CHECK(r.converged);
  CHECK(std::abs(r.value - oracle_pendulum_action(0.0, 0.5, 1.0)) < 1e-6);
}

TEST_CASE("value consistency under step refinement") {
  const auto pend = make_hamiltonian("pendulum", 1);
  MinActionOptions coarse, fine;
  coarse.integrator.h = 2e-3;
  fine.integrator.h = 1e-3;
  const double vc = min_action(*pend, vec1(0.0), vec1(0.5), 1.0, coarse).value;
  const double vf = min_action(*pend, vec1(0.0), vec1(0.5), 1.0, fine).value;
  CHECK(std::abs(vc - vf) < 1e-5);  // O(h^2)
}

TEST_CASE("triangle inequality, closed form and witness") {
  const auto flat = make_hamiltonian("flat", 1);
  const TriangleReport off = check_triangle(*flat, vec1(0), vec1(0.3), vec1(0.5), 1.0, 1.0);
  CHECK(off.lhs == doctest::Approx(0.0625).epsilon(1e-9));
  CHECK(off.rhs == doctest::Approx(0.065).epsilon(1e-9));
  CHECK(off.gap >= -1e-8);
  CHECK(!off.equality);

  const TriangleReport mid = check_triangle(*flat, vec1(0), vec1(0.25), vec1(0.5), 1.0, 1.0);
  CHECK(mid.gap == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mid.equality);
  CHECK(mid.witness_distance < 1e-9);
}

TEST_CASE("triangle inequality on random pendulum triples") {
  const auto pend = make_hamiltonian("pendulum", 1);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), dur(0.3, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const TriangleReport rep = check_triangle(*pend, vec1(pos(rng)), vec1(pos(rng)),
                                              vec1(pos(rng)), dur(rng), dur(rng));
    CAPTURE(trial);
    CHECK(rep.gap >= -1e-8);
  }
}

TEST_CASE("exponential-map injectivity probes") {
  const auto flat = make_hamiltonian("flat", 2);
  const InjectivityReport fr = exp_injectivity_probe(*flat, vec2(0, 0), 2.0, 1.0, 5);
  CHECK(fr.min_abs_det == doctest::Approx(4.0).epsilon(1e-9));  // t^n
  CHECK(!fr.det_sign_change);
  CHECK(fr.min_pair_ratio == doctest::Approx(2.0).epsilon(1e-9));

  const auto shear = make_hamiltonian("shear", 1);
  const InjectivityReport sr = exp_injectivity_probe(*shear, vec1(0.2), 1.0, 3.0, 21);
  CHECK(sr.min_abs_det > 0.1);
  CHECK(!sr.det_sign_change);

  // beyond the pendulum half-period near the elliptic point a conjugate point
  // flips the determinant (Jacobi field ~ sin(2 pi t) vanishes at t = 0.5)
  const auto pend = make_hamiltonian("pendulum", 1);
  const InjectivityReport pr = exp_injectivity_probe(*pend, vec1(0.5), 0.6, 3.0, 15);
  CHECK(pr.det_sign_change);
}

TEST_CASE("transit-time guard") {
  const auto flat = make_hamiltonian("flat", 1);
  CHECK_THROWS_AS(min_action(*flat, vec1(0), vec1(0.5), 0.01), ConfigError);
}
