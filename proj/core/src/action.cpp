#include "tonelli/action.hpp"

#include <algorithm>
#include <cmath>

namespace tonelli {

void DiscretePath::derive_velocities() {
  const int n = nodes();
  if (n < 2) throw ConfigError("DiscretePath: need at least two nodes");
  velocities.assign(n, Vec());
  velocities[0] = (points[1] - points[0]) / (times[1] - times[0]);
  for (int k = 1; k + 1 < n; ++k)
    velocities[k] = (points[k + 1] - points[k - 1]) / (times[k + 1] - times[k - 1]);
  velocities[n - 1] = (points[n - 1] - points[n - 2]) / (times[n - 1] - times[n - 2]);
}

void DiscretePath::mark_loop() {
  const Vec d = points.back() - points.front();
  homotopy.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    homotopy[i] = static_cast<int>(std::lround(d[i]));
    if (std::abs(d[i] - homotopy[i]) > 1e-9)
      throw ConfigError("DiscretePath: endpoints do not close up modulo 1");
  }
  loop = true;
}

void DiscretePath::validate() const {
  if (nodes() < 2) throw ConfigError("DiscretePath: need at least two nodes");
  if (points.size() != times.size()) throw ConfigError("DiscretePath: times/points mismatch");
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ConfigError("DiscretePath: times must increase");
}

double action_of_path(const HamiltonianModel& h, const DiscretePath& path) {
  path.validate();
  if (path.velocities.size() != path.points.size())
    throw ConfigError("action_of_path: call derive_velocities first");
  const int n = path.nodes();
  std::vector<double> lag(n);
  for (int k = 0; k < n; ++k) {
    lag[k] = lagrangian_value(h, path.points[k], path.velocities[k]);
    if (!std::isfinite(lag[k]))
      throw NumericError("action_of_path: non-finite Lagrangian at node " + std::to_string(k));
  }
  double acc = 0;
  for (int k = 0; k + 1 < n; ++k)
    acc += 0.5 * (lag[k] + lag[k + 1]) * (path.times[k + 1] - path.times[k]);
  return acc;
}

double discrete_action(const HamiltonianModel& h, const FlowPath& fp) {
  const int n = static_cast<int>(fp.t.size());
  double acc = 0;
  for (int k = 0; k + 1 < n; ++k) {
    const double dt = fp.t[k + 1] - fp.t[k];
    const Vec v = (fp.z[k + 1].x - fp.z[k].x) / dt;
    if (h.mechanical()) {
      acc += dt * (0.5 * v.squaredNorm() -
                   0.5 * (h.potential(fp.z[k].x) + h.potential(fp.z[k + 1].x)));
    } else {
      acc += dt * lagrangian_value(h, 0.5 * (fp.z[k].x + fp.z[k + 1].x), v);
    }
  }
  return acc;
}

namespace {

// Action along integrator nodes using the Legendre identity L = p.v - H.
double action_along(const HamiltonianModel& h, const FlowPath& fp) {
  const int n = static_cast<int>(fp.t.size());
  std::vector<double> lag(n);
  for (int k = 0; k < n; ++k) {
    const Vec v = inverse_legendre(h, fp.z[k].x, fp.z[k].p);
    lag[k] = fp.z[k].p.dot(v) - h.eval(fp.z[k].x, fp.z[k].p);
  }
  double acc = 0;
  for (int k = 0; k + 1 < n; ++k) acc += 0.5 * (lag[k] + lag[k + 1]) * (fp.t[k + 1] - fp.t[k]);
  return acc;
}

DiscretePath path_from_flow(const HamiltonianModel& h, const FlowPath& fp, int max_nodes = 257) {
  DiscretePath path;
  const int n = static_cast<int>(fp.t.size());
  const int stride = std::max(1, (n - 1) / (max_nodes - 1));
  for (int k = 0; k < n; k += stride) {
    path.times.push_back(fp.t[k]);
    path.points.push_back(fp.z[k].x);
    path.velocities.push_back(inverse_legendre(h, fp.z[k].x, fp.z[k].p));
  }
  if (path.times.back() != fp.t.back()) {
    path.times.push_back(fp.t.back());
    path.points.push_back(fp.z.back().x);
    path.velocities.push_back(inverse_legendre(h, fp.z.back().x, fp.z.back().p));
  }
  return path;
}

struct ShootResult {
  bool converged = false;
  Vec p0;
  double residual = 0;
};

// Newton on p0 for pr(flow_t(x, p0)) = y on the cover.
ShootResult shoot(const HamiltonianModel& h, const Vec& x, const Vec& y, double t, Vec p0,
                  const IntegratorSpec& spec, double tol) {
  const int n = h.dim();
  Mat seed_frame = Mat::Zero(2 * n, n);
  seed_frame.bottomRows(n) = Mat::Identity(n, n);
  ShootResult out;
  const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    FlowWithFrame fw;
    try {
      fw = flow_with_frame(h, LiftedState(x, p0), seed_frame, t, spec);
    } catch (const NumericError&) {
      return out;
    }
    const Vec res = fw.state.x - y;
    const double rn = res.lpNorm<Eigen::Infinity>();
    if (rn < best) {
      best = rn;
      out.p0 = p0;
      out.residual = rn;
    }
    if (rn < tol * scale) {
      out.converged = true;
      return out;
    }
    const Mat m = fw.frame.topRows(n);  // dx(t)/dp0
    Eigen::PartialPivLU<Mat> lu(m);
    Vec step = lu.solve(res);
    if (!all_finite(step)) return out;
    // trust-region style cap keeps wild Jacobians from throwing the seed away
    const double cap = 2.0 * std::max(1.0, p0.lpNorm<Eigen::Infinity>());
    if (step.lpNorm<Eigen::Infinity>() > cap) step *= cap / step.lpNorm<Eigen::Infinity>();
    p0 -= step;
  }
  // near-separatrix orbits stall at the sensitivity floor of double precision;
  // a residual this small still pins the value to ~|p| * residual
  if (out.residual < 1e-6 * scale) out.converged = true;
  return out;
}

// Broken-extremal fallback: midpoint-rule action over N segments, minimized by
// Barzilai-Borwein gradient descent on the interior nodes.
struct DirectResult {
  bool converged = false;
  std::vector<Vec> pts;
  double grad_norm = 0;
};

// midpoint-rule action of a broken extremal
double direct_action(const HamiltonianModel& h, const std::vector<Vec>& pts, double t) {
  const int segs = static_cast<int>(pts.size()) - 1;
  const double dt = t / segs;
  double acc = 0;
  for (int k = 0; k < segs; ++k)
    acc += dt * lagrangian_value(h, 0.5 * (pts[k] + pts[k + 1]), (pts[k + 1] - pts[k]) / dt);
  return acc;
}

DirectResult direct_minimize(const HamiltonianModel& h, const Vec& x, const Vec& y, double t,
                             int segs, int max_iters = 4000, double tol = 1e-9,
                             const Vec& bump = Vec(),
                             const std::vector<Vec>* init = nullptr) {
  const int n = h.dim();
  const double dt = t / segs;
  std::vector<Vec> pts(segs + 1);
  if (init) {
    // warm start: resample the given path onto this resolution
    const int m = static_cast<int>(init->size()) - 1;
    for (int k = 0; k <= segs; ++k) {
      const double s = double(k) * m / segs;
      const int i = std::min(m - 1, static_cast<int>(s));
      const double f = s - i;
      pts[k] = (1 - f) * (*init)[i] + f * (*init)[i + 1];
    }
  } else {
    for (int k = 0; k <= segs; ++k) pts[k] = x + (y - x) * (double(k) / segs);
    if (bump.size() == n)  // half-sine detour keeps the endpoints fixed
      for (int k = 1; k < segs; ++k) pts[k] += std::sin(0.5 * kTwoPi * k / segs) * bump;
  }

  auto segment_data = [&](const std::vector<Vec>& q, int k, Vec& lx, Vec& p) {
    const Vec mid = 0.5 * (q[k] + q[k + 1]);
    const Vec v = (q[k + 1] - q[k]) / dt;
    p = legendre(h, mid, v);
    Vec dth, dp;
    h.grad(mid, p, dth, dp);
    lx = -dth;  // dL/dx at the Legendre point
  };
  auto gradient = [&](const std::vector<Vec>& q, std::vector<Vec>& g) {
    std::vector<Vec> lx(segs), p(segs);
    for (int k = 0; k < segs; ++k) segment_data(q, k, lx[k], p[k]);
    g.assign(segs + 1, Vec::Zero(n));
    for (int j = 1; j < segs; ++j)
      g[j] = 0.5 * dt * (lx[j - 1] + lx[j]) + p[j - 1] - p[j];
  };

  std::vector<Vec> g, g_prev, pts_prev;
  gradient(pts, g);
  double step = 1e-2;
  DirectResult out;
  for (int it = 0; it < max_iters; ++it) {
    double gn = 0;
    for (int j = 1; j < segs; ++j) gn = std::max(gn, g[j].lpNorm<Eigen::Infinity>());
    out.grad_norm = gn;
    if (gn < tol) {
      out.converged = true;
      break;
    }
    pts_prev = pts;
    g_prev = g;
    for (int j = 1; j < segs; ++j) pts[j] -= step * g[j];
    gradient(pts, g);
    double sy = 0, ss = 0;
    for (int j = 1; j < segs; ++j) {
      const Vec s = pts[j] - pts_prev[j];
      const Vec dy = g[j] - g_prev[j];
      sy += s.dot(dy);
      ss += s.squaredNorm();
    }
    step = (sy > 1e-16) ? std::clamp(ss / sy, 1e-6, 10.0) : 1e-2;
  }
  out.pts = std::move(pts);
  return out;
}

}  // namespace

ActionResult min_action(const HamiltonianModel& h, const Vec& x, const Vec& y, double t,
                        const MinActionOptions& opt) {
  const int n = h.dim();
  if (x.size() != n || y.size() != n) throw ConfigError("min_action: endpoint dimension mismatch");
  if (t < kMinActionTime)
    throw ConfigError("min_action: t below the minimum transit time " +
                      std::to_string(kMinActionTime));

  // unit detour directions; zero first so the straight seed is always tried
  std::vector<Vec> offsets{Vec::Zero(n)};
  if (opt.multistart) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int c = 0; c < std::min(combos, 27); ++c) {
      int rem = c;
      Vec o(n);
      for (int i = 0; i < n; ++i) {
        o[i] = (rem % 3) - 1;
        rem /= 3;
      }
      if (o.lpNorm<Eigen::Infinity>() > 0.5) offsets.push_back(o);
    }
  }

  // seed velocities: straight segments, nudged along each detour direction
  std::vector<Vec> seeds;
  for (const Vec& o : offsets) seeds.push_back((y + o - x) / t);

  struct Candidate {
    double value;
    Vec p0;
    Vec v0;
    double residual;
  };
  std::vector<Candidate> winners;
  auto try_shoot = [&](const Vec& p_seed) -> double {
    const ShootResult sr = shoot(h, x, y, t, p_seed, opt.integrator, opt.shoot_tol);
    if (!sr.converged) return std::numeric_limits<double>::quiet_NaN();
    const FlowPath fp = flow_path(h, LiftedState(x, sr.p0), t, opt.integrator);
    const double value = action_along(h, fp);
    winners.push_back({value, sr.p0, inverse_legendre(h, x, sr.p0), sr.residual});
    return value;
  };
  for (const Vec& v0 : seeds) {
    Vec p_seed;
    try {
      p_seed = legendre(h, x, v0);
    } catch (const NumericError&) {
      continue;
    }
    try_shoot(p_seed);
  }

  if (opt.multistart) {
    // Newton shooting can land on a non-minimal critical point; coarse
    // broken-extremal probes whose initial paths detour into neighboring
    // potential wells find the minimizing basin, and the shoot polish
    // restores integrator accuracy.
    const int probe_segs = 64;
    const int fine_segs = 512;
    // second-order one-sided difference: the O(dt) error of a forward
    // difference is enough to land the Newton polish in the wrong basin
    auto initial_slope = [&](const std::vector<Vec>& pts, int segs) {
      return Vec((-3.0 * pts[0] + 4.0 * pts[1] - pts[2]) * (0.5 * segs / t));
    };
    std::vector<Vec> done;  // distinct probe basins already polished
    for (const Vec& o : offsets) {
      const DirectResult dr = direct_minimize(h, x, y, t, probe_segs, 800, 1e-7, Vec(0.5 * o));
      const Vec slope = initial_slope(dr.pts, probe_segs);
      bool seen = false;
      for (const Vec& s : done)
        if ((s - slope).lpNorm<Eigen::Infinity>() < 1e-6) seen = true;
      if (seen) continue;
      done.push_back(slope);
      const double probe_value = direct_action(h, dr.pts, t);
      try {
        const double shot = try_shoot(legendre(h, x, slope));
        const double agree_tol = 0.05 * std::max(1.0, std::abs(probe_value));
        if (std::isfinite(shot) && std::abs(shot - probe_value) < agree_tol) continue;
        // the polish left the probe's basin (endpoint sensitivity near a
        // separatrix): sharpen the slope on a warm-started fine path first
        const DirectResult fr =
            direct_minimize(h, x, y, t, fine_segs, 2000, 1e-8, Vec(), &dr.pts);
        const double a1 = direct_action(h, fr.pts, t);
        const double fine_shot = try_shoot(legendre(h, x, initial_slope(fr.pts, fine_segs)));
        if (std::isfinite(fine_shot) && std::abs(fine_shot - a1) < agree_tol) continue;
        // shooting cannot hold this basin (near-separatrix hang times); take
        // the broken extremal itself, with a Richardson-extrapolated value
        const DirectResult fr2 =
            direct_minimize(h, x, y, t, 2 * fine_segs, 2000, 1e-8, Vec(), &fr.pts);
        // the value error of a near-stationary path is quadratic in the
        // gradient norm, so a loose stationarity gate is still accurate
        if (fr2.grad_norm > 1e-4) continue;
        const double a2 = direct_action(h, fr2.pts, t);
        const Vec v0 = initial_slope(fr2.pts, 2 * fine_segs);
        winners.push_back({a2 + (a2 - a1) / 3.0, legendre(h, x, v0), v0, fr2.grad_norm});
      } catch (const NumericError&) {
      }
    }
  }

  if (winners.empty()) {
    // broken-extremal fallback, then polish by shooting from its slope
    const DirectResult dr = direct_minimize(h, x, y, t, opt.direct_nodes);
    const Vec v0 = (dr.pts[1] - dr.pts[0]) * (opt.direct_nodes / t);
    const ShootResult sr = shoot(h, x, y, t, legendre(h, x, v0), opt.integrator, opt.shoot_tol);
    if (sr.converged) {
      const FlowPath fp = flow_path(h, LiftedState(x, sr.p0), t, opt.integrator);
      winners.push_back({action_along(h, fp), sr.p0, inverse_legendre(h, x, sr.p0), sr.residual});
    } else if (dr.converged || dr.grad_norm < 1e-6) {
      DiscretePath path;
      const double dt = t / opt.direct_nodes;
      for (int k = 0; k <= opt.direct_nodes; ++k) {
        path.times.push_back(k * dt);
        path.points.push_back(dr.pts[k]);
      }
      path.derive_velocities();
      ActionResult out;
      out.value = action_of_path(h, path);
      out.path = std::move(path);
      out.converged = true;
      out.gradient_norm = dr.grad_norm;
      out.initial_velocity = (dr.pts[1] - dr.pts[0]) / dt;
      out.initial_momentum = legendre(h, x, out.initial_velocity);
      return out;
    } else {
      throw NumericError("min_action: no minimizer found (best EL residual " +
                         std::to_string(dr.grad_norm) + ")");
    }
  }

  std::sort(winners.begin(), winners.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.value - b.value) > 1e-12) return a.value < b.value;
    return std::lexicographical_compare(a.v0.data(), a.v0.data() + a.v0.size(), b.v0.data(),
                                        b.v0.data() + b.v0.size());
  });
  const Candidate& best = winners.front();
  bool tie = false;
  for (size_t i = 1; i < winners.size(); ++i)
    if (std::abs(winners[i].value - best.value) < 1e-9 &&
        (winners[i].v0 - best.v0).lpNorm<Eigen::Infinity>() > 1e-7)
      tie = true;

  const FlowPath fp = flow_path(h, LiftedState(x, best.p0), t, opt.integrator);
  ActionResult out;
  out.value = best.value;
  out.path = path_from_flow(h, fp);
  out.converged = true;
  out.gradient_norm = best.residual;
  out.initial_velocity = best.v0;
  out.initial_momentum = best.p0;
  out.tie = tie;
  return out;
}

TriangleReport check_triangle(const HamiltonianModel& h, const Vec& x, const Vec& y, const Vec& z,
                              double t, double tp, const MinActionOptions& opt) {
  const ActionResult through = min_action(h, x, z, t + tp, opt);
  const ActionResult leg1 = min_action(h, x, y, t, opt);
  const ActionResult leg2 = min_action(h, y, z, tp, opt);
  TriangleReport rep;
  rep.lhs = through.value;
  rep.rhs = leg1.value + leg2.value;
  rep.gap = rep.rhs - rep.lhs;
  const LiftedState mid = flow(h, LiftedState(x, through.initial_momentum), t, opt.integrator);
  rep.witness_distance = (mid.x - y).lpNorm<Eigen::Infinity>();
  // matched to the value accuracy achievable on near-separatrix minimizers
  rep.equality = std::abs(rep.gap) < 1e-6 * std::max(1.0, std::abs(rep.rhs));
  return rep;
}

InjectivityReport exp_injectivity_probe(const HamiltonianModel& h, const Vec& x, double t,
                                        double v_bound, int points_per_axis,
                                        const IntegratorSpec& spec) {
  const int n = h.dim();
  if (points_per_axis < 2) throw ConfigError("exp_injectivity_probe: need >= 2 points per axis");
  int total = 1;
  for (int i = 0; i < n; ++i) total *= points_per_axis;

  std::vector<Vec> vs(total), fs(total);
  std::vector<double> dets(total);
  Mat seed = Mat::Zero(2 * n, n);
  seed.bottomRows(n) = Mat::Identity(n, n);
  for (int c = 0; c < total; ++c) {
    int rem = c;
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      const int j = rem % points_per_axis;
      rem /= points_per_axis;
      v[i] = -v_bound + 2.0 * v_bound * j / (points_per_axis - 1);
    }
    vs[c] = v;
    const Vec p0 = legendre(h, x, v);
    const FlowWithFrame fw = flow_with_frame(h, LiftedState(x, p0), seed, t, spec);
    fs[c] = fw.state.x;
    Mat hqq, hqp, hpp;
    h.hess(x, p0, hqq, hqp, hpp);
    // D_v F = (dx_t/dp0) (dp0/dv), dp0/dv = hpp^{-1}
    dets[c] = (fw.frame.topRows(n) * hpp.inverse()).determinant();
  }

  InjectivityReport rep;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  bool pos = false, neg = false;
  for (double d : dets) {
    rep.min_abs_det = std::min(rep.min_abs_det, std::abs(d));
    (d > 0 ? pos : neg) = true;
  }
  rep.det_sign_change = pos && neg;
  rep.min_pair_ratio = std::numeric_limits<double>::infinity();
  for (int a = 0; a < total; ++a)
    for (int b = a + 1; b < total; ++b) {
      const double dv = (vs[a] - vs[b]).norm();
      if (dv < 1e-12) continue;
      rep.min_pair_ratio = std::min(rep.min_pair_ratio, (fs[a] - fs[b]).norm() / dv);
    }
  return rep;
}

}  // namespace tonelli
