#pragma once

#include <vector>

#include "tonelli/action.hpp"
#include "tonelli/fourier.hpp"
#include "tonelli/hamiltonian.hpp"
#include "tonelli/integrator.hpp"

namespace tonelli {

struct TorusDiagnostics {
  double closure_residual = 0;    // sup |pr(flow_T(x, P(x))) - (x + r)|
  double action_spread = 0;       // max f - min f over the grid
  double lagrangian_defect = 0;   // sup antisymmetric part of DP (spectral)
  double invariance_defect = 0;   // sup dist(flow_t(graph P), graph P), t in {T/4, T/2}
  double fixedness = 0;           // sup |flow_T(x, P(x)) - (x + r, P(x))| incl. momentum
  bool homotopy_ok = true;        // lifted winding of each orbit equals r exactly
};

/// Sampled invariant torus of T-periodic orbits in homotopy class r.
struct PeriodicTorusData {
  double T = 0;
  IVec r;
  Grid grid;
  std::vector<Vec> X;  // velocity section at grid nodes
  std::vector<Vec> P;  // momentum section
  double action_per_orbit = 0;
  TorusDiagnostics diagnostics;

  /// Trig interpolant of one momentum component for off-grid evaluation.
  TrigField momentum_field(int component) const;
};

struct TorusOptions {
  IntegratorSpec integrator{"auto", 1e-4};
  IntegratorSpec jacobian_integrator{"auto", 1e-3};  // coarser frame flow for Newton
  double newton_tol = 1e-11;
  bool diagnostics = true;
};

/// Solve pr(flow_T(x, p)) = x + r per grid node (continuation-seeded Newton)
/// and assemble the momentum/velocity sections with diagnostics.
PeriodicTorusData build_torus(const HamiltonianModel& h, double T, const IVec& r, const Grid& grid,
                              const TorusOptions& opt = {});

struct ActionProfile {
  Vec f;  // f(x) = A_T(x, x + r) per grid node, NaN at failed nodes
  int argmin = -1;
  int argmax = -1;
  double spread = 0;
  std::vector<int> failed_nodes;
};
/// Sample f(x) = A_T(x, x + r) via the action module.
ActionProfile period_action_profile(const HamiltonianModel& h, double T, const IVec& r,
                                    const Grid& grid, const MinActionOptions& opt = {});

struct ZeroClassReport {
  PeriodicTorusData torus;
  double sup_velocity = 0;          // sup |X|, should vanish for r = 0
  double critical_point_defect = 0; // sup |dH/dp(x, P(x))|
};
/// r = 0 case: the torus degenerates to the fiberwise critical graph.
ZeroClassReport zero_class_check(const HamiltonianModel& h, double T, const Grid& grid,
                                 const TorusOptions& opt = {});

/// Mean of the momentum section = its cohomology class; the caller should
/// check diagnostics.lagrangian_defect first (closedness).
Vec cohomology_class_of(const PeriodicTorusData& torus);

}  // namespace tonelli
