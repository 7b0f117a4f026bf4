#pragma once

#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "tonelli/types.hpp"

namespace tonelli {

/// Tonelli Hamiltonian on T^* T^n with derivatives up to order 2.
/// Angles in turns; 1-periodic in each theta coordinate.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;

  int dim() const { return n_; }
  const std::string& name() const { return name_; }
  const nlohmann::json& params() const;

  virtual double eval(const Vec& theta, const Vec& p) const = 0;
  /// dth = dH/dtheta, dp = dH/dp. Default: central finite differences of eval.
  virtual void grad(const Vec& theta, const Vec& p, Vec& dth, Vec& dp) const;
  /// Second-derivative blocks. Default: central finite differences of grad.
  virtual void hess(const Vec& theta, const Vec& p, Mat& hqq, Mat& hqp, Mat& hpp) const;

  /// True when H = |p|^2/2 + V(theta) (enables Stormer-Verlet).
  virtual bool mechanical() const { return false; }
  /// Potential for mechanical models.
  virtual double potential(const Vec& theta) const;
  virtual Vec potential_grad(const Vec& theta) const;
  virtual Mat potential_hess(const Vec& theta) const;

  /// Closed-form Lagrangian when available (else solved via the Legendre transform).
  virtual bool has_lagrangian() const { return false; }
  virtual double lagrangian(const Vec& x, const Vec& v) const;

 protected:
  HamiltonianModel(int n, std::string name);
  void set_params(const nlohmann::json& p);

 private:
  int n_;
  std::string name_;
  std::shared_ptr<nlohmann::json> params_;
};

using HamiltonianPtr = std::shared_ptr<const HamiltonianModel>;

/// Catalogue keys: "flat", "convex-flat", "shear", "pendulum", "mech2d".
HamiltonianPtr make_hamiltonian(const std::string& name, const nlohmann::json& params, int n);
HamiltonianPtr make_hamiltonian(const std::string& name, int n = 1);

/// Model self-checks (periodicity, fiber convexity via Cholesky, superlinearity
/// probe at s in {10, 100}, derivative/finite-difference agreement).
struct ModelDiagnostics {
  double periodicity_defect = 0;
  bool convex = true;
  bool superlinear = true;
  double grad_fd_error = 0;
  double hess_fd_error = 0;
};
ModelDiagnostics validate_model(const HamiltonianModel& h, unsigned seed = 17, int samples = 16);

inline constexpr double kTwoPi = 6.28318530717958647692;

}  // namespace tonelli
