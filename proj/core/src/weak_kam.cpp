#include "tonelli/weak_kam.hpp"

#include <algorithm>
#include <cmath>

#include "tonelli/parallel.hpp"

namespace tonelli {

namespace {

int pow3(int n) {
  int p = 1;
  for (int i = 0; i < n; ++i) p *= 3;
  return p;
}

IVec lift_of_index(int kidx, int n) {
  IVec k(n);
  for (int i = 0; i < n; ++i) {
    k[i] = (kidx % 3) - 1;
    kidx /= 3;
  }
  return k;
}

}  // namespace

ActionKernel::ActionKernel(const HamiltonianModel& h, const Grid& grid, double tau,
                           const MinActionOptions& opt)
    : grid_(grid), tau_(tau), n_(h.dim()), count_(grid.size()), lifts_(pow3(h.dim())) {
  if (grid.dim() != n_) throw ConfigError("ActionKernel: grid dimension mismatch");
  if (tau < kMinActionTime || tau > 1.0)
    throw ConfigError("ActionKernel: tau must lie in [t_min, 1]");
  table_.resize(static_cast<size_t>(count_) * count_ * lifts_);
  MinActionOptions local = opt;
  local.multistart = false;  // lifts are enumerated explicitly here
  parallel_for(count_ * count_, [&](int pair) {
    const int y = pair / count_;
    const int x = pair % count_;
    const Vec ynode = grid_.node(y);
    const Vec xnode = grid_.node(x);
    for (int kidx = 0; kidx < lifts_; ++kidx) {
      const IVec k = lift_of_index(kidx, n_);
      Vec target = xnode;
      for (int i = 0; i < n_; ++i) target[i] += k[i];
      double value;
      try {
        value = min_action(h, ynode, target, tau_, local).value;
      } catch (const NumericError&) {
        value = std::numeric_limits<double>::infinity();
      }
      table_[(static_cast<size_t>(y) * count_ + x) * lifts_ + kidx] = value;
    }
  });
}

Vec ActionKernel::displacement(int y, int x, int kidx) const {
  Vec d = grid_.node(x) - grid_.node(y);
  const IVec k = lift_of_index(kidx, n_);
  for (int i = 0; i < n_; ++i) d[i] += k[i];
  return d;
}

IVec ActionKernel::lift(int kidx) const { return lift_of_index(kidx, n_); }

namespace {

// one Lax-Oleinik sweep; returns the new (unnormalized) value per node.
// `shifted` holds the class-shifted kernel A^c = A - c.(x + k - y), laid out
// like the kernel table, precomputed once per class.
void sweep(const ActionKernel& kernel, const std::vector<double>& shifted, const Vec& u,
           bool refine, Vec& out) {
  const Grid& grid = kernel.grid();
  const int count = grid.size();
  const int lifts = kernel.lifts();
  const int n = kernel.dim();

  auto phi = [&](int y, int x, int kidx) {
    return u[y] + shifted[(static_cast<size_t>(y) * count + x) * lifts + kidx];
  };

  parallel_for(count, [&](int x) {
    double best = std::numeric_limits<double>::infinity();
    int best_y = 0, best_k = 0;
    for (int y = 0; y < count; ++y)
      for (int kidx = 0; kidx < lifts; ++kidx) {
        const double val = phi(y, x, kidx);
        if (val < best) {
          best = val;
          best_y = y;
          best_k = kidx;
        }
      }
    if (!refine || !std::isfinite(best)) {
      out[x] = best;
      return;
    }
    // per-axis parabolic refinement of the minimum over continuous y
    double refined = best;
    const auto idx = grid.multi(best_y);
    const IVec k = kernel.lift(best_k);
    for (int a = 0; a < n; ++a) {
      auto neighbor = [&](int dir) {  // phi at y shifted by dir grid steps on axis a
        auto nb = idx;
        int lift_shift = 0;
        nb[a] += dir;
        if (nb[a] < 0) {
          nb[a] += grid.shape[a];
          lift_shift = 1;  // y decreased across the seam: A(y-1,x+k)=A(y,x+k+e_a)
        } else if (nb[a] >= grid.shape[a]) {
          nb[a] -= grid.shape[a];
          lift_shift = -1;
        }
        const int ka = k[a] + lift_shift;
        if (ka < -1 || ka > 1) return std::numeric_limits<double>::quiet_NaN();
        int kidx = best_k + lift_shift * static_cast<int>(std::pow(3, a));
        return phi(grid.flat(nb), x, kidx);
      };
      const double fp = neighbor(+1);
      const double fm = neighbor(-1);
      if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
      const double f0 = best;
      const double curv = fp + fm - 2 * f0;
      if (curv <= 1e-14) continue;
      const double s = 0.5 * (fm - fp) / curv;  // vertex offset in grid steps
      if (std::abs(s) > 1.0) continue;
      // deadband: when the vertex sits on the node the quadratic gain is
      // negligible, but symmetric noise in fm - fp would rectify into a
      // coherent downward bias of the fixed point
      if (std::abs(s) < 0.05) continue;
      refined -= (fm - fp) * (fm - fp) / (8 * curv);
    }
    out[x] = refined;
  });
}

}  // namespace

ValueGrid lax_oleinik_alpha(const HamiltonianModel& h, const Vec& c, const Grid& grid,
                            const WeakKamOptions& opt,
                            std::shared_ptr<const ActionKernel> kernel) {
  if (!kernel) kernel = std::make_shared<ActionKernel>(h, grid, opt.tau, opt.action);
  if (kernel->grid().shape != grid.shape || kernel->tau() != opt.tau)
    throw ConfigError("lax_oleinik_alpha: shared kernel does not match grid/tau");
  const int count = grid.size();

  ValueGrid vg;
  vg.c = c;
  vg.grid = grid;
  vg.tau = opt.tau;
  vg.u = Vec::Zero(count);
  vg.last_decrement = Vec::Zero(count);

  // precompute the class-shifted kernel once; the sweeps only add u[y]
  const int lifts = kernel->lifts();
  std::vector<double> shifted(static_cast<size_t>(count) * count * lifts);
  parallel_for(count, [&](int y) {
    for (int x = 0; x < count; ++x)
      for (int kidx = 0; kidx < lifts; ++kidx)
        shifted[(static_cast<size_t>(y) * count + x) * lifts + kidx] =
            kernel->action(y, x, kidx) - c.dot(kernel->displacement(y, x, kidx));
  });

  Vec u_new(count);
  for (int sweep_idx = 0; sweep_idx < opt.max_sweeps; ++sweep_idx) {
    sweep(*kernel, shifted, vg.u, opt.refine, u_new);
    if (!u_new.allFinite()) throw NumericError("lax_oleinik_alpha: kernel has no finite entries");
    vg.last_decrement = u_new - vg.u;
    vg.alpha = -vg.last_decrement.mean() / opt.tau;
    const Vec normalized = u_new.array() - u_new.mean();
    vg.increment = (normalized - vg.u).lpNorm<Eigen::Infinity>();
    vg.u = normalized;
    vg.iterations = sweep_idx + 1;
    if (vg.increment < opt.stop_tol) {
      vg.converged = true;
      break;
    }
  }
  if (!vg.converged) {
    // resonant classes settle into a small argmin limit cycle instead of a
    // fixed point; the Cesaro average over the cycle recovers the solution
    const int window = 64;
    Vec acc = vg.u;
    for (int k = 0; k < window; ++k) {
      sweep(*kernel, shifted, vg.u, opt.refine, u_new);
      vg.u = u_new.array() - u_new.mean();
      acc += vg.u;
    }
    vg.u = acc / (window + 1);
    vg.iterations += window;
    // decrement, alpha and increment recomputed from the averaged iterate
    sweep(*kernel, shifted, vg.u, opt.refine, u_new);
    vg.last_decrement = u_new - vg.u;
    vg.alpha = -vg.last_decrement.mean() / opt.tau;
    vg.increment = ((u_new.array() - u_new.mean()).matrix() - vg.u).lpNorm<Eigen::Infinity>();
  }
  return vg;
}

AubryEstimate aubry_estimate(const ValueGrid& vg, double tol) {
  AubryEstimate est;
  est.tol = tol;
  const int count = vg.grid.size();
  est.residual = vg.last_decrement.array() + vg.alpha * vg.tau;
  for (int x = 0; x < count; ++x)
    if (std::abs(est.residual[x]) <= tol) est.nodes.push_back(x);

  const int n = vg.grid.dim();
  const TrigField uf(vg.grid, vg.u);
  std::vector<Vec> grads(n);
  for (int a = 0; a < n; ++a) grads[a] = uf.derivative_grid(a);
  est.momenta.resize(count);
  for (int x = 0; x < count; ++x) {
    Vec p(n);
    for (int a = 0; a < n; ++a) p[a] = vg.c[a] + grads[a][x];
    est.momenta[x] = p;
  }
  return est;
}

FoliationReport foliation_map(const HamiltonianModel& h, const Vec& x,
                              const std::vector<Vec>& classes, const Grid& grid,
                              const WeakKamOptions& opt) {
  if (classes.empty()) throw ConfigError("foliation_map: empty class list");
  const auto kernel = std::make_shared<const ActionKernel>(h, grid, opt.tau, opt.action);
  const int n = grid.dim();
  const Vec xw = wrap_unit(x);

  FoliationReport rep;
  rep.classes = classes;
  std::vector<std::vector<Vec>> leaf_momenta;
  for (const Vec& c : classes) {
    // unconverged iterations still carry the best estimate: u stalls at the
    // O(1/k) value-iteration floor long after alpha has settled, so proceed
    const ValueGrid vg = lax_oleinik_alpha(h, c, grid, opt, kernel);
    const AubryEstimate est = aubry_estimate(vg);
    const TrigField uf(grid, vg.u);
    rep.momenta_at_x.push_back(c + uf.gradient(xw));
    rep.alphas.push_back(vg.alpha);
    leaf_momenta.push_back(est.momenta);
    double energy = 0;
    for (int node = 0; node < grid.size(); ++node)
      energy = std::max(energy,
                        std::abs(h.eval(grid.node(node), est.momenta[node]) - vg.alpha));
    rep.energy_identity_defect = std::max(rep.energy_identity_defect, energy);
  }

  rep.min_injectivity_ratio = std::numeric_limits<double>::infinity();
  rep.min_leaf_separation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < classes.size(); ++i)
    for (size_t j = i + 1; j < classes.size(); ++j) {
      const double dc = (classes[i] - classes[j]).norm();
      if (dc < 1e-12) continue;
      rep.min_injectivity_ratio = std::min(
          rep.min_injectivity_ratio, (rep.momenta_at_x[i] - rep.momenta_at_x[j]).norm() / dc);
      for (int node = 0; node < grid.size(); ++node)
        rep.min_leaf_separation =
            std::min(rep.min_leaf_separation,
                     (leaf_momenta[i][node] - leaf_momenta[j][node]).lpNorm<Eigen::Infinity>());
    }
  (void)n;
  return rep;
}

RadialReport radial_convergence_probe(const HamiltonianModel& h, const ValueGrid& vg,
                                      const Vec& x0, const std::vector<double>& periods,
                                      const MinActionOptions& opt) {
  const int n = vg.grid.dim();
  const TrigField uf(vg.grid, vg.u);
  const Vec p0 = vg.c + uf.gradient(wrap_unit(x0));
  const Vec v_aubry = inverse_legendre(h, x0, p0);

  RadialReport rep;
  for (const double T : periods) {
    double best = std::numeric_limits<double>::infinity();
    Vec best_v;
    IVec best_r = IVec::Zero(n);
    const int lifts = pow3(n);
    for (int kidx = 0; kidx < lifts; ++kidx) {
      IVec r(n);
      const IVec off = lift_of_index(kidx, n);
      for (int i = 0; i < n; ++i) r[i] = static_cast<int>(std::lround(vg.c[i] * T)) + off[i];
      Vec target = x0;
      for (int i = 0; i < n; ++i) target[i] += r[i];
      ActionResult ar;
      try {
        ar = min_action(h, x0, target, T, opt);
      } catch (const NumericError&) {
        continue;
      }
      double crdot = 0;
      for (int i = 0; i < n; ++i) crdot += vg.c[i] * r[i];
      const double value = ar.value - crdot;
      if (value < best) {
        best = value;
        best_v = ar.initial_velocity;
        best_r = r;
      }
    }
    if (!std::isfinite(best))
      throw NumericError("radial_convergence_probe: no loop minimizer at T = " +
                         std::to_string(T));
    rep.periods.push_back(T);
    rep.distances.push_back((best_v - v_aubry).lpNorm<Eigen::Infinity>());
    rep.loop_classes.push_back(best_r);
  }
  return rep;
}

}  // namespace tonelli
