#pragma once

#include <functional>
#include <vector>

#include "tonelli/fourier.hpp"
#include "tonelli/hamiltonian.hpp"
#include "tonelli/integrator.hpp"
#include "tonelli/periodic_torus.hpp"

namespace tonelli {

/// Frequency vector with an exhaustively checked Diophantine constant:
/// |k.omega + l| >= gamma / |k|_inf^tau for all 0 < |k|_inf <= verified_up_to.
struct DiophantineVector {
  Vec omega;
  double gamma = 0;
  double tau = 0;
  int verified_up_to = 0;
};

/// Catalogue frequencies: (sqrt5-1)/2 for n=1, (sqrt2-1, sqrt3-1) for n=2,
/// (sqrt2-1, sqrt3-1, sqrt5-1) for n=3.
Vec golden_frequency(int n);

/// Exhaustive check up to |k|_inf <= cutoff; gamma is the observed minimum of
/// |k.omega + l| |k|_inf^tau. Throws HypothesisViolated on an exact resonance.
DiophantineVector verify_diophantine(const Vec& omega, double tau, int cutoff);

/// One application of a symplectic map together with its Jacobian.
struct MapJet {
  Vec x;    // lifted angle image
  Vec i;    // momentum/action image
  Mat jac;  // 2n x 2n derivative d(x', I')/d(x, I)
};
using SymplecticMap = std::function<MapJet(const Vec& x, const Vec& i)>;

/// Chirikov-type standard family (exact symplectic twist map, used as a
/// stress case for the invariance solver).
SymplecticMap standard_family(double kappa);

/// Invariant-torus ansatz rho(eta) = (eta + u(eta), I0 + v(eta)) sampled on a
/// grid; u has zero mean.
struct TorusEmbedding {
  Grid grid;
  Vec i0;
  std::vector<Vec> u;  // angle correction per node
  std::vector<Vec> v;  // momentum correction per node

  static TorusEmbedding trivial(const Grid& grid, const Vec& i0);
  Vec angle(int node) const;     // eta + u(eta) at a grid node
  Vec momentum(int node) const;  // I0 + v(eta)
  /// sup over the grid of the Lagrangian-graph defect of the section
  double graph_defect() const;
  double tail_energy() const;  // relative spectral tail of (u, v)
};

struct InvarianceOptions {
  int max_iters = 20;
  double tol = 1e-10;
  double divisor_floor = 1e-14;
};

struct InvarianceResult {
  TorusEmbedding rho;
  std::vector<double> residual_history;  // sup|E| before each Newton step
  bool converged = false;
};

/// Parameterization-method Newton for U(rho(eta)) = rho(eta + omega).
InvarianceResult solve_invariance(const SymplecticMap& map, const DiophantineVector& omega,
                                  const TorusEmbedding& seed, const InvarianceOptions& opt = {});

/// Normal-form data of the time-T map around a periodic torus, in the fiber
/// coordinates p = P(theta) + I.
struct NormalFormData {
  Mat abar;                    // grid average of A(theta)
  double symmetry_defect = 0;  // |Abar - Abar^T|
  double min_eigenvalue = 0;
  double theta_dependence = 0;  // sup |A(theta) - Abar|
  double q_defect = 0;          // sup |dI'/dI - Id| at I = 0
  double cross_defect = 0;      // sup |dI'/dtheta| at I = 0
  double b_defect = 0;          // sup |d2I'/dI2 + dA/dtheta|
};

struct TwistOptions {
  IntegratorSpec integrator{"auto", 1e-4};
  double q_tol = 1e-6;
  double fd_step = 5e-3;  // momentum step for the second-derivative probe
  bool check_b = true;
};
NormalFormData extract_twist(const HamiltonianModel& h, const PeriodicTorusData& torus,
                             const TwistOptions& opt = {});

/// Rescaled return map Phi_eps = R_eps^{-1} (G0^{-1} flow_T G0) R_eps - (r, 0)
/// on the lift; Phi_eps -> id as eps -> 0.
SymplecticMap rescaled_map(const HamiltonianModel& h, const PeriodicTorusData& torus, double eps,
                           const IntegratorSpec& spec = {"auto", 1e-3});

/// Euler-composition convergence: C0 gap between (id + eps X)^m and the
/// reference time-(m eps) flow, with m = floor(c0/eps), on the given samples.
struct EulerSlopeReport {
  std::vector<double> eps;
  std::vector<double> error;
  double slope = 0;     // least-squares log-log slope over nonzero errors
  double max_error = 0;
  bool all_zero = false;
};
EulerSlopeReport euler_composition_error(const std::function<Vec(const Vec&)>& field,
                                         const std::function<Vec(const Vec&, double)>& reference,
                                         const std::vector<Vec>& samples,
                                         const std::vector<double>& eps_list, double c0,
                                         double escape_bound = 1e6);
/// Convenience wrapper: Hamiltonian field vs the symplectic reference flow.
EulerSlopeReport euler_composition_error(const HamiltonianModel& h, const std::vector<Vec>& samples,
                                         const std::vector<double>& eps_list, double c0);

/// One member of the quasi-periodic family accumulating on the base torus.
struct FamilyMember {
  int m = 0;
  bool converged = false;
  double residual = 0;        // final invariance residual of U_m
  double rotation_error = 0;  // | per-T rotation - (r + omega/m) |
  double c0_distance = 0;     // sup momentum gap to the base torus section
  double flow_invariance_T = 0;   // set-invariance residual under flow_T
  double flow_invariance_half = 0;  // same under flow_{T/2}
  TorusEmbedding rho;  // solved embedding in rescaled G0 coordinates
};

struct FamilyOptions {
  IntegratorSpec integrator{"auto", 1e-3};
  int grid_points = 128;  // per axis, eta grid
  InvarianceOptions newton{};
  int invariance_samples = 64;  // eta samples for the flow checks
};

std::vector<FamilyMember> torus_family(const HamiltonianModel& h, const PeriodicTorusData& torus,
                                       const NormalFormData& nf, const DiophantineVector& omega,
                                       int m_min, int m_max, const FamilyOptions& opt = {});

/// Map a solved member back to T*T^n: (angle, momentum) at parameter eta.
std::pair<Vec, Vec> embed_member(const PeriodicTorusData& torus, const FamilyMember& member,
                                 const Vec& eta);

/// Birkhoff-vs-space averages of trigonometric observables along the orbit of
/// flow_T started on the embedded member torus.
struct EquidistributionReport {
  std::vector<double> birkhoff;
  std::vector<double> space;
  double max_gap = 0;
};
EquidistributionReport equidistribution_probe(const HamiltonianModel& h,
                                              const PeriodicTorusData& torus,
                                              const FamilyMember& member, long iterates,
                                              const IntegratorSpec& spec = {"auto", 1e-3});

}  // namespace tonelli
