#pragma once

#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/integrator.hpp"

namespace tonelli {

/// Lagrangian plane at a base point, stored as the symmetric slope matrix S
/// (plane = {(dq, S dq)}) when transversal to the vertical, else as a frame.
struct LagrangianPlane {
  CotangentState base;
  Mat s;        // n x n, valid when has_s
  Mat frame;    // 2n x n orthonormal columns, always valid
  bool has_s = true;
  double transversality = 0;  // smallest singular value of the horizontal block
  double symmetry_defect = 0; // asymmetry of S before symmetrization
};

struct GreenResult {
  LagrangianPlane plane;
  double cauchy_increment = 0;  // |S(t*) - S(t*/2)|_inf
  double empirical_rate = 0;    // log2 of successive increment ratio
};

/// G+ at z: vertical frame transported forward from flow_{-t*}(z).
GreenResult green_plus(const HamiltonianModel& h, const CotangentState& z, double t_star,
                       const IntegratorSpec& spec = {});
/// G- at z: vertical frame transported backward from flow_{+t*}(z).
GreenResult green_minus(const HamiltonianModel& h, const CotangentState& z, double t_star,
                        const IntegratorSpec& spec = {});

/// n - rank(S+ - S-) at the given singular-value threshold.
int green_intersection_dim(const LagrangianPlane& gm, const LagrangianPlane& gp, double tol);

/// Times in (0, t_max] where the transported vertical meets the vertical:
/// sign changes (bisected to step*1e-3) and near-touches of the horizontal
/// determinant of the transported frame.
std::vector<double> conjugate_scan(const HamiltonianModel& h, const CotangentState& z,
                                   double t_max, double step, const IntegratorSpec& spec = {});

struct LyapunovReport {
  Vec exponents;  // size 2n, sorted descending
  double horizon = 0;
  double threshold = 0;  // max(1e-3, 5/horizon)
  int zero_count = 0;
};

/// Discrete-QR (Benettin) exponents of the full tangent frame along the orbit.
LyapunovReport lyapunov_spectrum(const HamiltonianModel& h, const CotangentState& z,
                                 double horizon, const IntegratorSpec& spec = {},
                                 double renorm_interval = 0.1);

}  // namespace tonelli
