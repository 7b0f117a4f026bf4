#include "tonelli/types.hpp"

#include <cmath>

namespace tonelli {

double wrap_unit(double x) {
  double y = x - std::floor(x);
  // floor can round up to 1.0 for tiny negative x
  if (y >= 1.0) y -= 1.0;
  return y;
}

Vec wrap_unit(const Vec& x) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = wrap_unit(x[i]);
  return y;
}

bool all_finite(const Vec& x) {
  return x.allFinite();
}

CotangentState::CotangentState(Vec th, Vec mom)
    : theta(wrap_unit(th)), p(std::move(mom)) {
  if (theta.size() != p.size()) throw ConfigError("CotangentState: dimension mismatch");
}

LiftedState::LiftedState(Vec lift, Vec mom) : x(std::move(lift)), p(std::move(mom)) {
  if (x.size() != p.size()) throw ConfigError("LiftedState: dimension mismatch");
  refresh_winding();
}

LiftedState LiftedState::from(const CotangentState& z) {
  LiftedState out;
  out.x = z.theta;
  out.p = z.p;
  out.winding = IVec::Zero(z.dim());
  return out;
}

CotangentState LiftedState::project() const {
  return CotangentState(wrap_unit(x), p);
}

void LiftedState::refresh_winding() {
  winding.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    winding[i] = static_cast<int>(std::lround(x[i] - wrap_unit(x[i])));
}

TangentFrame TangentFrame::vertical_frame(const CotangentState& z) {
  const int n = z.dim();
  TangentFrame f;
  f.base = z;
  f.columns = Mat::Zero(2 * n, n);
  f.columns.bottomRows(n) = Mat::Identity(n, n);
  return f;
}

TangentFrame TangentFrame::full_frame(const CotangentState& z) {
  const int n = z.dim();
  TangentFrame f;
  f.base = z;
  f.columns = Mat::Identity(2 * n, 2 * n);
  return f;
}

Mat symplectic_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return j;
}

}  // namespace tonelli
