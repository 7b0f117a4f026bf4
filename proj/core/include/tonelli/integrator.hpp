#pragma once

#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/types.hpp"

namespace tonelli {

/// Symplectic time stepping. "auto" picks Stormer-Verlet for mechanical
/// models and implicit midpoint otherwise.
struct IntegratorSpec {
  std::string method = "auto";  // auto | verlet | midpoint
  double h = 1e-3;              // target step size (actual step divides t evenly)
};

/// Hamiltonian vector field: dx = dH/dp, dp = -dH/dtheta.
void hamiltonian_field(const HamiltonianModel& h, const Vec& x, const Vec& p, Vec& dx, Vec& dp);

/// Lifted flow on R^n x (R^n)*; t may be negative.
LiftedState flow(const HamiltonianModel& h, const LiftedState& z0, double t,
                 const IntegratorSpec& spec = {});
CotangentState flow(const HamiltonianModel& h, const CotangentState& z0, double t,
                    const IntegratorSpec& spec = {});

/// All integrator nodes of the lifted flow, including endpoints.
struct FlowPath {
  std::vector<double> t;
  std::vector<LiftedState> z;
};
FlowPath flow_path(const HamiltonianModel& h, const LiftedState& z0, double t,
                   const IntegratorSpec& spec = {});

/// Flow together with the pushed-forward tangent columns (exact derivative of
/// the discrete step map, so the frame is symplectic to round-off).
struct FlowWithFrame {
  LiftedState state;
  Mat frame;  // 2n x k
};
FlowWithFrame flow_with_frame(const HamiltonianModel& h, const LiftedState& z0, const Mat& frame0,
                              double t, const IntegratorSpec& spec = {});

/// Full monodromy D phi_t as a 2n x 2n matrix.
Mat tangent_flow(const HamiltonianModel& h, const LiftedState& z0, double t,
                 const IntegratorSpec& spec = {});

/// Legendre transform: momentum with dH/dp(x, p) = v (Newton on the fiber).
Vec legendre(const HamiltonianModel& h, const Vec& x, const Vec& v);
/// Inverse Legendre transform: velocity dH/dp(x, p).
Vec inverse_legendre(const HamiltonianModel& h, const Vec& x, const Vec& p);
/// L(x, v), using the model's closed form when present, else p.v - H.
double lagrangian_value(const HamiltonianModel& h, const Vec& x, const Vec& v);

}  // namespace tonelli
