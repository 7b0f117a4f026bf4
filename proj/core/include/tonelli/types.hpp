#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tonelli {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

/// Error classes map to CLI exit codes: config 1, numeric 2, hypothesis 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HypothesisViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reduce to [0,1). Angles are measured in turns throughout.
double wrap_unit(double x);
Vec wrap_unit(const Vec& x);

bool all_finite(const Vec& x);

/// Point (theta, p) on T^n x (R^n)*, theta reduced to [0,1)^n.
struct CotangentState {
  Vec theta;
  Vec p;

  CotangentState() = default;
  CotangentState(Vec th, Vec mom);
  int dim() const { return static_cast<int>(theta.size()); }
};

/// Lift of a cotangent point to R^n with explicit winding bookkeeping.
struct LiftedState {
  Vec x;         // lift of theta
  Vec p;
  IVec winding;  // round(x - theta)

  LiftedState() = default;
  LiftedState(Vec lift, Vec mom);
  static LiftedState from(const CotangentState& z);

  int dim() const { return static_cast<int>(x.size()); }
  CotangentState project() const;
  void refresh_winding();
};

/// Column bundle of tangent vectors (dtheta, dp) at a base point.
struct TangentFrame {
  CotangentState base;
  Mat columns;  // 2n x k

  int dim() const { return base.dim(); }
  int count() const { return static_cast<int>(columns.cols()); }
  Mat horizontal() const { return columns.topRows(dim()); }
  Mat vertical() const { return columns.bottomRows(dim()); }

  static TangentFrame vertical_frame(const CotangentState& z);
  static TangentFrame full_frame(const CotangentState& z);
};

/// Standard symplectic matrix J = [[0, I], [-I, 0]] acting on (dtheta, dp).
Mat symplectic_j(int n);

}  // namespace tonelli
