#pragma once

#include <optional>
#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/integrator.hpp"
#include "tonelli/types.hpp"

namespace tonelli {

/// Shortest admissible transit time for fixed-endpoint minimization; below it
/// the discrete problem is too ill-conditioned to trust.
inline constexpr double kMinActionTime = 0.05;

/// Piecewise-linear curve in the universal cover with derived velocities.
struct DiscretePath {
  std::vector<double> times;
  std::vector<Vec> points;      // lifted positions
  std::vector<Vec> velocities;  // symmetric differences inside, one-sided at ends
  bool loop = false;
  IVec homotopy;  // x_N - x_0 rounded, only meaningful for loops

  int nodes() const { return static_cast<int>(times.size()); }
  void derive_velocities();
  void mark_loop();  // sets loop/homotopy, checks x_N - x_0 is near-integer
  void validate() const;
};

/// Trapezoidal Lagrangian action of a path.
double action_of_path(const HamiltonianModel& h, const DiscretePath& path);

/// Action along integrator nodes using the quadrature variationally matched to
/// the scheme (trapezoid-in-x for Verlet, midpoint rule for implicit midpoint),
/// so critical discrete orbits have exactly stationary discrete action.
double discrete_action(const HamiltonianModel& h, const FlowPath& fp);

struct ActionResult {
  double value = 0;
  DiscretePath path;
  bool converged = false;
  double gradient_norm = 0;  // shooting residual or discrete EL residual
  Vec initial_velocity;
  Vec initial_momentum;
  bool tie = false;  // several starts reached the same value (conjugate-point hint)
};

struct MinActionOptions {
  IntegratorSpec integrator{};
  double shoot_tol = 1e-10;
  int direct_nodes = 64;    // fallback broken-extremal resolution
  bool multistart = true;   // integer-offset seeds in {-1,0,1}^n
};

/// Fixed-time minimizer between lifted endpoints: A_t(x, y).
ActionResult min_action(const HamiltonianModel& h, const Vec& x, const Vec& y, double t,
                        const MinActionOptions& opt = {});

struct TriangleReport {
  double lhs = 0;   // A_{t+t'}(x, z)
  double rhs = 0;   // A_t(x, y) + A_{t'}(y, z)
  double gap = 0;   // rhs - lhs, must be >= -tol
  double witness_distance = 0;  // |y - c(t)| for the through-extremal c
  bool equality = false;
};
TriangleReport check_triangle(const HamiltonianModel& h, const Vec& x, const Vec& y, const Vec& z,
                              double t, double tp, const MinActionOptions& opt = {});

struct InjectivityReport {
  double min_pair_ratio = 0;  // min |F(v1)-F(v2)| / |v1-v2| over grid pairs
  double min_abs_det = 0;     // min |det D_v F| over the grid
  bool det_sign_change = false;
};
/// Probe of F(v) = pr(flow_t(x, legendre(x,v))) on a velocity box grid.
InjectivityReport exp_injectivity_probe(const HamiltonianModel& h, const Vec& x, double t,
                                        double v_bound, int points_per_axis,
                                        const IntegratorSpec& spec = {});

}  // namespace tonelli
