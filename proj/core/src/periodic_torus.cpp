#include "tonelli/periodic_torus.hpp"

#include <algorithm>
#include <cmath>

#include "tonelli/parallel.hpp"

namespace tonelli {

namespace {

Vec to_vec(const IVec& r) {
  Vec out(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) out[i] = r[i];
  return out;
}

struct ClosureSolve {
  Vec p;
  LiftedState end;
  bool ok = false;
  double residual = 0;
};

// Newton on p for pr(flow_T(x, p)) = x + r; the Jacobian frame runs at a
// coarser step than the residual flow (it only steers Newton).
ClosureSolve solve_closure(const HamiltonianModel& h, const Vec& x, const Vec& target, double T,
                           Vec p, const TorusOptions& opt) {
  const int n = h.dim();
  Mat seed = Mat::Zero(2 * n, n);
  seed.bottomRows(n) = Mat::Identity(n, n);
  ClosureSolve out;
  for (int it = 0; it < 30; ++it) {
    const LiftedState z = flow(h, LiftedState(x, p), T, opt.integrator);
    const Vec res = z.x - target;
    out.p = p;
    out.end = z;
    out.residual = res.lpNorm<Eigen::Infinity>();
    if (out.residual < opt.newton_tol) {
      out.ok = true;
      return out;
    }
    const FlowWithFrame fw =
        flow_with_frame(h, LiftedState(x, p), seed, T, opt.jacobian_integrator);
    Vec step = fw.frame.topRows(n).partialPivLu().solve(res);
    if (!all_finite(step)) return out;
    const double cap = std::max(1.0, p.lpNorm<Eigen::Infinity>());
    if (step.lpNorm<Eigen::Infinity>() > cap) step *= cap / step.lpNorm<Eigen::Infinity>();
    p -= step;
  }
  return out;
}

}  // namespace

TrigField PeriodicTorusData::momentum_field(int component) const {
  Vec samples(grid.size());
  for (int c = 0; c < grid.size(); ++c) samples[c] = P[c][component];
  return TrigField(grid, samples);
}

PeriodicTorusData build_torus(const HamiltonianModel& h, double T, const IVec& r, const Grid& grid,
                              const TorusOptions& opt) {
  const int n = h.dim();
  if (grid.dim() != n) throw ConfigError("build_torus: grid dimension mismatch");
  if (T <= 0) throw ConfigError("build_torus: period must be positive");
  if (r.size() != n) throw ConfigError("build_torus: homotopy class dimension mismatch");
  const Vec rvec = to_vec(r);
  const int count = grid.size();

  PeriodicTorusData torus;
  torus.T = T;
  torus.r = r;
  torus.grid = grid;
  torus.P.resize(count);
  torus.X.resize(count);

  // continuation sweep in row-major order, seeded by the previous node
  Vec seed_p;
  for (int c = 0; c < count; ++c) {
    const Vec x = grid.node(c);
    if (c == 0) seed_p = legendre(h, x, rvec / T);
    const ClosureSolve sol = solve_closure(h, x, x + rvec, T, seed_p, opt);
    if (!sol.ok)
      throw NumericError("build_torus: Newton failed at grid node " + std::to_string(c) +
                         " (residual " + std::to_string(sol.residual) + ")");
    torus.P[c] = sol.p;
    torus.X[c] = inverse_legendre(h, x, sol.p);
    seed_p = sol.p;
  }

  if (!opt.diagnostics) return torus;
  TorusDiagnostics& d = torus.diagnostics;

  // per-node closure, fixedness, winding, and discrete orbit action
  Vec f(count);
  std::vector<double> closure(count), fixed(count);
  std::vector<char> winding_ok(count, 1);
  parallel_for(count, [&](int c) {
    const Vec x = grid.node(c);
    const FlowPath fp = flow_path(h, LiftedState(x, torus.P[c]), T, opt.integrator);
    const LiftedState& z = fp.z.back();
    closure[c] = (z.x - (x + rvec)).lpNorm<Eigen::Infinity>();
    fixed[c] = std::max(closure[c], (z.p - torus.P[c]).lpNorm<Eigen::Infinity>());
    for (int i = 0; i < n; ++i)
      if (std::lround(z.x[i] - x[i]) != r[i]) winding_ok[c] = 0;
    f[c] = discrete_action(h, fp);
  });
  d.closure_residual = *std::max_element(closure.begin(), closure.end());
  d.fixedness = *std::max_element(fixed.begin(), fixed.end());
  d.homotopy_ok = std::all_of(winding_ok.begin(), winding_ok.end(), [](char v) { return v; });
  d.action_spread = f.maxCoeff() - f.minCoeff();
  torus.action_per_orbit = f.mean();

  // closedness of the momentum section: antisymmetric part of DP, spectrally
  std::vector<TrigField> fields(n);
  for (int i = 0; i < n; ++i) fields[i] = torus.momentum_field(i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec dij = fields[i].derivative_grid(j);
      const Vec dji = fields[j].derivative_grid(i);
      d.lagrangian_defect = std::max(d.lagrangian_defect, (dij - dji).lpNorm<Eigen::Infinity>());
    }

  // flow invariance of the graph at intermediate times
  for (const double t : {T / 4, T / 2}) {
    std::vector<double> defect(count);
    parallel_for(count, [&](int c) {
      const Vec x = grid.node(c);
      const LiftedState z = flow(h, LiftedState(x, torus.P[c]), t, opt.integrator);
      const Vec theta = wrap_unit(z.x);
      double dmax = 0;
      for (int i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(z.p[i] - fields[i](theta)));
      defect[c] = dmax;
    });
    d.invariance_defect =
        std::max(d.invariance_defect, *std::max_element(defect.begin(), defect.end()));
  }
  return torus;
}

ActionProfile period_action_profile(const HamiltonianModel& h, double T, const IVec& r,
                                    const Grid& grid, const MinActionOptions& opt) {
  if (grid.dim() != h.dim()) throw ConfigError("period_action_profile: grid dimension mismatch");
  for (int s : grid.shape)
    if (s < 8) throw ConfigError("period_action_profile: need >= 8 points per axis");
  const Vec rvec = to_vec(r);
  const int count = grid.size();
  ActionProfile prof;
  prof.f.resize(count);
  std::vector<char> failed(count, 0);
  parallel_for(count, [&](int c) {
    const Vec x = grid.node(c);
    try {
      prof.f[c] = min_action(h, x, x + rvec, T, opt).value;
    } catch (const NumericError&) {
      prof.f[c] = std::numeric_limits<double>::quiet_NaN();
      failed[c] = 1;
    }
  });
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int c = 0; c < count; ++c) {
    if (failed[c]) {
      prof.failed_nodes.push_back(c);
      continue;
    }
    if (prof.f[c] < lo) {
      lo = prof.f[c];
      prof.argmin = c;
    }
    if (prof.f[c] > hi) {
      hi = prof.f[c];
      prof.argmax = c;
    }
  }
  if (prof.argmin < 0) throw NumericError("period_action_profile: all grid nodes failed");
  prof.spread = hi - lo;
  return prof;
}

ZeroClassReport zero_class_check(const HamiltonianModel& h, double T, const Grid& grid,
                                 const TorusOptions& opt) {
  ZeroClassReport rep;
  rep.torus = build_torus(h, T, IVec::Zero(h.dim()), grid, opt);
  for (int c = 0; c < grid.size(); ++c) {
    rep.sup_velocity = std::max(rep.sup_velocity, rep.torus.X[c].lpNorm<Eigen::Infinity>());
    const Vec v = inverse_legendre(h, grid.node(c), rep.torus.P[c]);
    rep.critical_point_defect =
        std::max(rep.critical_point_defect, v.lpNorm<Eigen::Infinity>());
  }
  return rep;
}

Vec cohomology_class_of(const PeriodicTorusData& torus) {
  const int n = static_cast<int>(torus.P.front().size());
  Vec c = Vec::Zero(n);
  for (const Vec& p : torus.P) c += p;
  return c / static_cast<double>(torus.P.size());
}

}  // namespace tonelli
