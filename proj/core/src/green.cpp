#include "tonelli/green.hpp"

#include <algorithm>
#include <cmath>

namespace tonelli {

namespace {

// QR with positive diagonal of R; returns Q, accumulates log|R_ii| if asked.
Mat renormalize(const Mat& frame, Vec* log_diag = nullptr) {
  Eigen::HouseholderQR<Mat> qr(frame);
  Mat q = qr.householderQ() * Mat::Identity(frame.rows(), frame.cols());
  Mat r = q.transpose() * frame;
  for (int i = 0; i < frame.cols(); ++i) {
    if (r(i, i) < 0) {
      q.col(i) *= -1;
      r.row(i) *= -1;
    }
    if (log_diag) (*log_diag)[i] += std::log(std::max(r(i, i), 1e-300));
  }
  return q;
}

// Transport the vertical frame from 'start' over time 'span' (chunked QR
// renormalization) and convert to a plane at the arrival point.
LagrangianPlane transported_plane(const HamiltonianModel& h, const LiftedState& start, double span,
                                  const IntegratorSpec& spec) {
  const int n = h.dim();
  Mat frame = Mat::Zero(2 * n, n);
  frame.bottomRows(n) = Mat::Identity(n, n);
  LiftedState z = start;
  const double chunk_len = (span > 0 ? 1.0 : -1.0) * std::min(1.0, std::abs(span));
  double done = 0;
  while (std::abs(done) < std::abs(span) - 1e-12) {
    const double dt =
        (std::abs(span - done) < std::abs(chunk_len)) ? span - done : chunk_len;
    const FlowWithFrame fw = flow_with_frame(h, z, frame, dt, spec);
    z = fw.state;
    frame = renormalize(fw.frame);
    done += dt;
  }
  LagrangianPlane plane;
  plane.base = z.project();
  plane.frame = frame;
  Eigen::JacobiSVD<Mat> svd(frame.topRows(n));
  plane.transversality = svd.singularValues().minCoeff();
  if (plane.transversality < 1e-6) {
    plane.has_s = false;
    return plane;
  }
  Mat s = frame.bottomRows(n) * frame.topRows(n).inverse();
  plane.symmetry_defect = (s - s.transpose()).lpNorm<Eigen::Infinity>();
  plane.s = 0.5 * (s + s.transpose());
  return plane;
}

GreenResult green_limit(const HamiltonianModel& h, const CotangentState& z, double t_star,
                        double sign, const IntegratorSpec& spec) {
  if (t_star <= 0) throw ConfigError("green bundle: horizon must be positive");
  GreenResult out;
  std::vector<Mat> slopes;
  for (const double t : {t_star / 4, t_star / 2, t_star}) {
    const LiftedState back = flow(h, LiftedState::from(z), -sign * t, spec);
    const LagrangianPlane plane = transported_plane(h, back, sign * t, spec);
    if (!plane.has_s) {
      out.plane = plane;
      return out;  // frame representation, no Cauchy diagnostic possible
    }
    out.plane = plane;
    slopes.push_back(plane.s);
  }
  out.cauchy_increment = (slopes[2] - slopes[1]).lpNorm<Eigen::Infinity>();
  const double prev_inc = (slopes[1] - slopes[0]).lpNorm<Eigen::Infinity>();
  if (out.cauchy_increment > 1e-15 && prev_inc > 1e-15)
    out.empirical_rate = std::log2(prev_inc / out.cauchy_increment);
  return out;
}

}  // namespace

GreenResult green_plus(const HamiltonianModel& h, const CotangentState& z, double t_star,
                       const IntegratorSpec& spec) {
  return green_limit(h, z, t_star, +1.0, spec);
}

GreenResult green_minus(const HamiltonianModel& h, const CotangentState& z, double t_star,
                        const IntegratorSpec& spec) {
  return green_limit(h, z, t_star, -1.0, spec);
}

int green_intersection_dim(const LagrangianPlane& gm, const LagrangianPlane& gp, double tol) {
  if (!gm.has_s || !gp.has_s)
    throw ConfigError("green_intersection_dim: need S representation for both planes");
  if ((gm.base.theta - gp.base.theta).lpNorm<Eigen::Infinity>() > 1e-6 ||
      (gm.base.p - gp.base.p).lpNorm<Eigen::Infinity>() > 1e-6)
    throw ConfigError("green_intersection_dim: planes at different base points");
  const Mat diff = gp.s - gm.s;
  Eigen::JacobiSVD<Mat> svd(diff);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return static_cast<int>(diff.rows()) - rank;
}

std::vector<double> conjugate_scan(const HamiltonianModel& h, const CotangentState& z,
                                   double t_max, double step, const IntegratorSpec& spec) {
  if (t_max <= 0 || t_max > 1e3) throw ConfigError("conjugate_scan: t_max out of range (0, 1e3]");
  if (step <= 0) throw ConfigError("conjugate_scan: step must be positive");
  const int n = h.dim();
  Mat frame = Mat::Zero(2 * n, n);
  frame.bottomRows(n) = Mat::Identity(n, n);
  LiftedState state = LiftedState::from(z);

  std::vector<double> roots;
  const int samples = static_cast<int>(std::ceil(t_max / step - 1e-12));
  double prev_det = 0;  // det vanishes at t = 0 (frame is vertical)
  double prev_t = 0;
  const double near_zero = 1e-9;
  for (int k = 1; k <= samples; ++k) {
    const double t = std::min(k * step, t_max);
    // keep the pre-step state for bisection restarts
    const LiftedState bracket_state = state;
    const Mat bracket_frame = frame;
    const FlowWithFrame fw = flow_with_frame(h, state, frame, t - prev_t, spec);
    state = fw.state;
    frame = renormalize(fw.frame);  // det sign preserved (R has positive diagonal)
    const double det = frame.topRows(n).determinant();
    if (k > 1 && prev_det * det < 0) {
      // bisection on the sign of the horizontal determinant
      double lo = prev_t, hi = t;
      double flo = prev_det;
      while (hi - lo > step * 1e-3) {
        const double mid = 0.5 * (lo + hi);
        const FlowWithFrame half =
            flow_with_frame(h, bracket_state, bracket_frame, mid - prev_t, spec);
        const double dmid = half.frame.topRows(n).determinant();
        if (flo * dmid <= 0) {
          hi = mid;
        } else {
          lo = mid;
          flo = dmid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    } else if (k > 1 && std::abs(det) < near_zero && std::abs(prev_det) >= near_zero) {
      roots.push_back(t);  // grazing touch without sign change
    }
    prev_det = det;
    prev_t = t;
  }
  return roots;
}

LyapunovReport lyapunov_spectrum(const HamiltonianModel& h, const CotangentState& z,
                                 double horizon, const IntegratorSpec& spec,
                                 double renorm_interval) {
  if (horizon <= 0) throw ConfigError("lyapunov_spectrum: horizon must be positive");
  const int n = h.dim();

  auto run = [&](double interval) {
    Vec log_diag = Vec::Zero(2 * n);
    Mat frame = Mat::Identity(2 * n, 2 * n);
    LiftedState state = LiftedState::from(z);
    double done = 0;
    while (done < horizon - 1e-12) {
      const double dt = std::min(interval, horizon - done);
      const FlowWithFrame fw = flow_with_frame(h, state, frame, dt, spec);
      if (!fw.frame.allFinite() || fw.frame.lpNorm<Eigen::Infinity>() > 1e200)
        throw NumericError("lyapunov_spectrum: frame overflow between renormalizations");
      state = fw.state;
      frame = renormalize(fw.frame, &log_diag);
      done += dt;
    }
    return log_diag;
  };

  Vec log_diag;
  try {
    log_diag = run(renorm_interval);
  } catch (const NumericError&) {
    log_diag = run(renorm_interval / 4);  // one retry with a shorter interval
  }

  LyapunovReport rep;
  rep.horizon = horizon;
  rep.exponents = log_diag / horizon;
  std::sort(rep.exponents.data(), rep.exponents.data() + rep.exponents.size(),
            std::greater<double>());
  rep.threshold = std::max(1e-3, 5.0 / horizon);
  for (int i = 0; i < rep.exponents.size(); ++i)
    if (std::abs(rep.exponents[i]) < rep.threshold) ++rep.zero_count;
  return rep;
}

}  // namespace tonelli
