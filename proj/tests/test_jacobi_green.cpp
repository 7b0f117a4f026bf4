#include <doctest.h>

#include <cmath>

#include "tonelli/green.hpp"

using namespace tonelli;

namespace {
Vec vec1(double a) { return Vec::Constant(1, a); }
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
constexpr double two_pi = 6.283185307179586;
}  // namespace

TEST_CASE("flat Green bundles are +/- I / t*") {
  const auto h = make_hamiltonian("flat", 2);
  const CotangentState z(vec2(0.2, 0.7), vec2(1.0, -0.5));
  for (double ts : {1.0, 4.0}) {
    const GreenResult gp = green_plus(*h, z, ts);
    const GreenResult gm = green_minus(*h, z, ts);
    REQUIRE(gp.plane.has_s);
    REQUIRE(gm.plane.has_s);
    CHECK((gp.plane.s - Mat::Identity(2, 2) / ts).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((gm.plane.s + Mat::Identity(2, 2) / ts).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(gp.plane.symmetry_defect < 1e-10);
    // exact Cauchy increment |1/ts - 2/ts| = 1/ts
    CHECK(gp.cauchy_increment == doctest::Approx(1.0 / ts).epsilon(1e-8));
  }
  // finite-time slopes separate the bundles: rank(S+ - S-) = n
  const GreenResult gp = green_plus(*h, z, 2.0);
  const GreenResult gm = green_minus(*h, z, 2.0);
  CHECK(green_intersection_dim(gm.plane, gp.plane, 1e-8) == 0);
}

TEST_CASE("pendulum hyperbolic point: slopes +/- 2 pi") {
  const auto h = make_hamiltonian("pendulum", 1);
  const CotangentState z(vec1(0.0), vec1(0.0));
  const GreenResult gp = green_plus(*h, z, 5.0, {"verlet", 1e-4});
  const GreenResult gm = green_minus(*h, z, 5.0, {"verlet", 1e-4});
  REQUIRE(gp.plane.has_s);
  REQUIRE(gm.plane.has_s);
  CHECK(gp.plane.s(0, 0) == doctest::Approx(two_pi).epsilon(1e-6));
  CHECK(gm.plane.s(0, 0) == doctest::Approx(-two_pi).epsilon(1e-6));
  // strict monotonicity S- < S+ and exponential Cauchy contraction
  CHECK(gm.plane.s(0, 0) < gp.plane.s(0, 0));
  CHECK(gp.cauchy_increment < 1e-5);
  CHECK(gp.empirical_rate > 2.0);  // hyperbolic: increments shrink superlinearly
  CHECK(green_intersection_dim(gm.plane, gp.plane, 1e-6) == 0);
}

TEST_CASE("shear invariant graph: both bundles tangent to the leaf") {
  const auto h = make_hamiltonian("shear", 1);  // a = 0.3, c = 0
  // leaf p = 1 + g'(theta); tangent slope is g''(theta)
  const double theta = 0.3;
  const CotangentState z(vec1(theta), vec1(1.0 + 0.3 * std::cos(two_pi * theta)));
  const double slope = -0.3 * two_pi * std::sin(two_pi * theta);
  const GreenResult gp = green_plus(*h, z, 40.0, {"midpoint", 1e-3});
  const GreenResult gm = green_minus(*h, z, 40.0, {"midpoint", 1e-3});
  REQUIRE(gp.plane.has_s);
  CHECK(gp.plane.s(0, 0) == doctest::Approx(slope).epsilon(5e-2));
  CHECK(gm.plane.s(0, 0) == doctest::Approx(slope).epsilon(5e-2));
  // S- <= S+ always
  CHECK(gm.plane.s(0, 0) <= gp.plane.s(0, 0) + 1e-9);
}

TEST_CASE("Green bundle invariance under the tangent flow") {
  const auto h = make_hamiltonian("pendulum", 1);
  const CotangentState z(vec1(0.1), vec1(1.8));  // rotation regime
  const double ts = 6.0, t = 0.7;
  const IntegratorSpec spec{"verlet", 1e-4};
  const GreenResult g0 = green_plus(*h, z, ts, spec);
  // push the plane forward with the tangent flow
  const LiftedState z0 = LiftedState::from(z);
  const Mat dphi = tangent_flow(*h, z0, t, spec);
  Mat frame(2, 1);
  frame << 1.0, g0.plane.s(0, 0);
  const Mat pushed = dphi * frame;
  const double pushed_slope = pushed(1, 0) / pushed(0, 0);
  // pushing the window-t* approximant forward by t yields the window-(t*+t)
  // approximant at the image point (both transport the same vertical fiber)
  const LiftedState z1 = flow(*h, z0, t, spec);
  const GreenResult g1 = green_plus(*h, CotangentState(wrap_unit(z1.x), z1.p), ts + t, spec);
  CHECK(pushed_slope == doctest::Approx(g1.plane.s(0, 0)).epsilon(2e-4));
}

TEST_CASE("conjugate point scans") {
  const auto flat = make_hamiltonian("flat", 1);
  CHECK(conjugate_scan(*flat, CotangentState(vec1(0.0), vec1(0.7)), 20.0, 0.05).empty());

  const auto shear = make_hamiltonian("shear", 1);
  CHECK(conjugate_scan(*shear, CotangentState(vec1(0.2), vec1(1.3)), 20.0, 0.05,
                       {"midpoint", 1e-3})
            .empty());

  // elliptic pendulum point: Jacobi field sin(2 pi t)/(2 pi) vanishes at 1/2, 1, ...
  const auto pend = make_hamiltonian("pendulum", 1);
  const auto times =
      conjugate_scan(*pend, CotangentState(vec1(0.5), vec1(0.0)), 1.2, 0.02, {"verlet", 1e-4});
  REQUIRE(times.size() >= 2);
  CHECK(times[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(times[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Lyapunov spectra") {
  const auto flat = make_hamiltonian("flat", 2);
  const LyapunovReport fr =
      lyapunov_spectrum(*flat, CotangentState(vec2(0.1, 0.4), vec2(1.0, 0.3)), 200.0);
  CHECK(fr.exponents.lpNorm<Eigen::Infinity>() < fr.threshold);
  CHECK(fr.zero_count == 4);

  const auto pend = make_hamiltonian("pendulum", 1);
  const LyapunovReport pr = lyapunov_spectrum(
      *pend, CotangentState(vec1(0.0), vec1(0.0)), 50.0, {"verlet", 1e-3});
  CHECK(pr.exponents[0] == doctest::Approx(two_pi).epsilon(1e-2));
  CHECK(pr.exponents[1] == doctest::Approx(-two_pi).epsilon(1e-2));
  CHECK(pr.zero_count == 0);
  // symplectic pairing: exponents sum to ~0
  CHECK(std::abs(pr.exponents.sum()) < 1e-6);
}
