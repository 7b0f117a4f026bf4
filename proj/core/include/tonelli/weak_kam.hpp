#pragma once

#include <memory>
#include <vector>

#include "tonelli/action.hpp"
#include "tonelli/fourier.hpp"
#include "tonelli/hamiltonian.hpp"

namespace tonelli {

/// Fixed-time action table A_tau(y, x + k) over all grid pairs and the 3^n
/// nearest integer lifts k; built once per (H, grid, tau) and shared across
/// cohomology classes (constant forms only shift the table by c.(x + k - y)).
class ActionKernel {
 public:
  ActionKernel(const HamiltonianModel& h, const Grid& grid, double tau,
               const MinActionOptions& opt = {});

  const Grid& grid() const { return grid_; }
  double tau() const { return tau_; }
  int lifts() const { return lifts_; }
  int dim() const { return n_; }

  double action(int y, int x, int kidx) const { return table_[(y * count_ + x) * lifts_ + kidx]; }
  /// lifted displacement x + k - y
  Vec displacement(int y, int x, int kidx) const;
  /// integer lift vector of a lift index
  IVec lift(int kidx) const;

 private:
  Grid grid_;
  double tau_;
  int n_;
  int count_;
  int lifts_;
  std::vector<double> table_;
};

struct ValueGrid {
  Vec c;
  Grid grid;
  double tau = 0;
  Vec u;  // zero mean
  double alpha = 0;
  int iterations = 0;
  double increment = 0;  // sup-norm of the last normalized update
  bool converged = false;
  Vec last_decrement;  // one-step decrement per node, for calibration residuals
};

struct WeakKamOptions {
  double tau = 0.5;
  double stop_tol = 1e-8;
  int max_sweeps = 10000;
  bool refine = true;  // parabolic sub-grid refinement of the discrete argmin
  MinActionOptions action{};
};

/// Lax-Oleinik value iteration for the critical value alpha(c) and a discrete
/// weak KAM solution u.
ValueGrid lax_oleinik_alpha(const HamiltonianModel& h, const Vec& c, const Grid& grid,
                            const WeakKamOptions& opt = {},
                            std::shared_ptr<const ActionKernel> kernel = nullptr);

struct AubryEstimate {
  std::vector<int> nodes;     // grid nodes passing the calibration test
  std::vector<Vec> momenta;   // p = c + Du at every grid node (spectral Du)
  Vec residual;               // calibration residual per node
  double tol = 0;
};
AubryEstimate aubry_estimate(const ValueGrid& vg, double tol = 1e-5);

struct FoliationReport {
  std::vector<Vec> classes;
  std::vector<Vec> momenta_at_x;  // F_x(c) per class
  std::vector<double> alphas;
  double min_injectivity_ratio = 0;   // min pair |F(c)-F(c')| / |c-c'|
  double min_leaf_separation = 0;     // min over pairs and grid nodes of |p_c - p_c'|
  double energy_identity_defect = 0;  // sup |H(x, c + Du) - alpha(c)|
};
FoliationReport foliation_map(const HamiltonianModel& h, const Vec& x,
                              const std::vector<Vec>& classes, const Grid& grid,
                              const WeakKamOptions& opt = {});

struct RadialReport {
  std::vector<double> periods;
  std::vector<double> distances;  // |loop initial velocity - Aubry velocity at x0|
  std::vector<IVec> loop_classes;
};
/// L - c minimizing loops at x0 over nearby homotopy classes, compared with
/// the Aubry velocity dH/dp(x0, c + Du(x0)).
RadialReport radial_convergence_probe(const HamiltonianModel& h, const ValueGrid& vg,
                                      const Vec& x0, const std::vector<double>& periods,
                                      const MinActionOptions& opt = {});

}  // namespace tonelli
