#include "tonelli/integrator.hpp"

#include <cmath>

namespace tonelli {

namespace {

bool use_verlet(const HamiltonianModel& h, const IntegratorSpec& spec) {
  if (spec.method == "verlet") {
    if (!h.mechanical()) throw ConfigError("verlet requires a mechanical Hamiltonian");
    return true;
  }
  if (spec.method == "midpoint") return false;
  if (spec.method == "auto") return h.mechanical();
  throw ConfigError("unknown integrator method '" + spec.method + "'");
}

void verlet_step(const HamiltonianModel& h, double dt, Vec& x, Vec& p) {
  p -= 0.5 * dt * h.potential_grad(x);
  x += dt * p;
  p -= 0.5 * dt * h.potential_grad(x);
}

void verlet_step_frame(const HamiltonianModel& h, double dt, Vec& x, Vec& p, Mat& frame) {
  const int n = static_cast<int>(x.size());
  Mat dxf = frame.topRows(n), dpf = frame.bottomRows(n);
  dpf -= 0.5 * dt * h.potential_hess(x) * dxf;
  p -= 0.5 * dt * h.potential_grad(x);
  x += dt * p;
  dxf += dt * dpf;
  dpf -= 0.5 * dt * h.potential_hess(x) * dxf;
  p -= 0.5 * dt * h.potential_grad(x);
  frame.topRows(n) = dxf;
  frame.bottomRows(n) = dpf;
}

// Solve the midpoint m = z + (dt/2) X_H(m) by Newton, return X_H(m) and
// optionally J Hess(m) for the tangent step.
void midpoint_stage(const HamiltonianModel& h, double dt, const Vec& x, const Vec& p, Vec& mx,
                    Vec& mp, Mat* jhess) {
  const int n = static_cast<int>(x.size());
  mx = x;
  mp = p;
  Vec fx(n), fp(n);
  Mat hqq(n, n), hqp(n, n), hpp(n, n);
  Mat jac(2 * n, 2 * n);
  bool converged = false;
  // cheap fixed-point sweep first; Newton only if the contraction is slow
  const double fp_tol =
      5e-16 * std::max(1.0, std::max(x.lpNorm<Eigen::Infinity>(), p.lpNorm<Eigen::Infinity>()));
  for (int it = 0; it < 16; ++it) {
    hamiltonian_field(h, mx, mp, fx, fp);
    const Vec nx = x + 0.5 * dt * fx;
    const Vec np = p + 0.5 * dt * fp;
    const double delta = std::max((nx - mx).lpNorm<Eigen::Infinity>(),
                                  (np - mp).lpNorm<Eigen::Infinity>());
    mx = nx;
    mp = np;
    if (delta < fp_tol) {
      converged = true;
      break;
    }
  }
  for (int it = 0; !converged && it < 30; ++it) {
    hamiltonian_field(h, mx, mp, fx, fp);
    Vec rx = mx - x - 0.5 * dt * fx;
    Vec rp = mp - p - 0.5 * dt * fp;
    const double res = std::max(rx.lpNorm<Eigen::Infinity>(), rp.lpNorm<Eigen::Infinity>());
    if (res < 1e-14 * std::max(1.0, std::max(mx.lpNorm<Eigen::Infinity>(),
                                             mp.lpNorm<Eigen::Infinity>()))) {
      converged = true;
      break;
    }
    h.hess(mx, mp, hqq, hqp, hpp);
    // D X_H = [[hqp^T, hpp], [-hqq, -hqp]]
    jac.topLeftCorner(n, n) = Mat::Identity(n, n) - 0.5 * dt * hqp.transpose();
    jac.topRightCorner(n, n) = -0.5 * dt * hpp;
    jac.bottomLeftCorner(n, n) = 0.5 * dt * hqq;
    jac.bottomRightCorner(n, n) = Mat::Identity(n, n) + 0.5 * dt * hqp;
    Vec rhs(2 * n);
    rhs << rx, rp;
    Vec delta = jac.partialPivLu().solve(rhs);
    mx -= delta.head(n);
    mp -= delta.tail(n);
  }
  hamiltonian_field(h, mx, mp, fx, fp);
  Vec rx = mx - x - 0.5 * dt * fx;
  Vec rp = mp - p - 0.5 * dt * fp;
  if (!converged &&
      std::max(rx.lpNorm<Eigen::Infinity>(), rp.lpNorm<Eigen::Infinity>()) > 1e-10)
    throw NumericError("implicit midpoint stage did not converge");
  if (jhess) {
    h.hess(mx, mp, hqq, hqp, hpp);
    jhess->resize(2 * n, 2 * n);
    jhess->topLeftCorner(n, n) = hqp.transpose();
    jhess->topRightCorner(n, n) = hpp;
    jhess->bottomLeftCorner(n, n) = -hqq;
    jhess->bottomRightCorner(n, n) = -hqp;
  }
}

void midpoint_step(const HamiltonianModel& h, double dt, Vec& x, Vec& p) {
  const int n = static_cast<int>(x.size());
  Vec mx(n), mp(n), fx(n), fp(n);
  midpoint_stage(h, dt, x, p, mx, mp, nullptr);
  hamiltonian_field(h, mx, mp, fx, fp);
  x += dt * fx;
  p += dt * fp;
}

void midpoint_step_frame(const HamiltonianModel& h, double dt, Vec& x, Vec& p, Mat& frame) {
  const int n = static_cast<int>(x.size());
  Vec mx(n), mp(n), fx(n), fp(n);
  Mat a;  // J Hess at the midpoint
  midpoint_stage(h, dt, x, p, mx, mp, &a);
  hamiltonian_field(h, mx, mp, fx, fp);
  x += dt * fx;
  p += dt * fp;
  // Cayley transform: frame' = (I - dt/2 A)^{-1} (I + dt/2 A) frame.
  const Mat id = Mat::Identity(2 * n, 2 * n);
  frame = ((id - 0.5 * dt * a).partialPivLu().solve((id + 0.5 * dt * a) * frame)).eval();
}

int step_count(double t, double h) {
  if (h <= 0) throw ConfigError("integrator step must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) / h - 1e-12)));
}

}  // namespace

void hamiltonian_field(const HamiltonianModel& h, const Vec& x, const Vec& p, Vec& dx, Vec& dp) {
  Vec dth;
  h.grad(x, p, dth, dx);
  dp = -dth;
}

LiftedState flow(const HamiltonianModel& h, const LiftedState& z0, double t,
                 const IntegratorSpec& spec) {
  if (z0.dim() != h.dim()) throw ConfigError("flow: state dimension mismatch");
  if (t == 0) return z0;
  const bool verlet = use_verlet(h, spec);
  const int steps = step_count(t, spec.h);
  const double dt = t / steps;
  Vec x = z0.x, p = z0.p;
  for (int i = 0; i < steps; ++i)
    verlet ? verlet_step(h, dt, x, p) : midpoint_step(h, dt, x, p);
  if (!all_finite(x) || !all_finite(p)) throw NumericError("flow diverged");
  return LiftedState(std::move(x), std::move(p));
}

CotangentState flow(const HamiltonianModel& h, const CotangentState& z0, double t,
                    const IntegratorSpec& spec) {
  return flow(h, LiftedState::from(z0), t, spec).project();
}

FlowPath flow_path(const HamiltonianModel& h, const LiftedState& z0, double t,
                   const IntegratorSpec& spec) {
  const bool verlet = use_verlet(h, spec);
  const int steps = (t == 0) ? 0 : step_count(t, spec.h);
  const double dt = steps ? t / steps : 0;
  FlowPath path;
  path.t.reserve(steps + 1);
  path.z.reserve(steps + 1);
  Vec x = z0.x, p = z0.p;
  path.t.push_back(0);
  path.z.emplace_back(x, p);
  for (int i = 0; i < steps; ++i) {
    verlet ? verlet_step(h, dt, x, p) : midpoint_step(h, dt, x, p);
    path.t.push_back((i + 1) * dt);
    path.z.emplace_back(x, p);
  }
  if (!all_finite(x) || !all_finite(p)) throw NumericError("flow diverged");
  return path;
}

FlowWithFrame flow_with_frame(const HamiltonianModel& h, const LiftedState& z0, const Mat& frame0,
                              double t, const IntegratorSpec& spec) {
  const int n = h.dim();
  if (frame0.rows() != 2 * n) throw ConfigError("flow_with_frame: frame must have 2n rows");
  const bool verlet = use_verlet(h, spec);
  const int steps = (t == 0) ? 0 : step_count(t, spec.h);
  const double dt = steps ? t / steps : 0;
  Vec x = z0.x, p = z0.p;
  Mat frame = frame0;
  for (int i = 0; i < steps; ++i)
    verlet ? verlet_step_frame(h, dt, x, p, frame) : midpoint_step_frame(h, dt, x, p, frame);
  if (!all_finite(x) || !all_finite(p) || !frame.allFinite())
    throw NumericError("tangent flow diverged");
  return {LiftedState(std::move(x), std::move(p)), std::move(frame)};
}

Mat tangent_flow(const HamiltonianModel& h, const LiftedState& z0, double t,
                 const IntegratorSpec& spec) {
  return flow_with_frame(h, z0, Mat::Identity(2 * h.dim(), 2 * h.dim()), t, spec).frame;
}

Vec legendre(const HamiltonianModel& h, const Vec& x, const Vec& v) {
  const int n = h.dim();
  Vec p = v;  // exact for flat, decent elsewhere
  Vec dth(n), dp(n);
  Mat hqq(n, n), hqp(n, n), hpp(n, n);
  for (int it = 0; it < 60; ++it) {
    h.grad(x, p, dth, dp);
    const Vec r = dp - v;
    if (r.lpNorm<Eigen::Infinity>() < 1e-13 * std::max(1.0, v.lpNorm<Eigen::Infinity>())) return p;
    h.hess(x, p, hqq, hqp, hpp);
    p -= hpp.ldlt().solve(r);
  }
  h.grad(x, p, dth, dp);
  if ((dp - v).lpNorm<Eigen::Infinity>() > 1e-8)
    throw NumericError("legendre transform did not converge");
  return p;
}

Vec inverse_legendre(const HamiltonianModel& h, const Vec& x, const Vec& p) {
  Vec dth, dp;
  h.grad(x, p, dth, dp);
  return dp;
}

double lagrangian_value(const HamiltonianModel& h, const Vec& x, const Vec& v) {
  if (h.has_lagrangian()) return h.lagrangian(x, v);
  const Vec p = legendre(h, x, v);
  return p.dot(v) - h.eval(x, p);
}

}  // namespace tonelli
