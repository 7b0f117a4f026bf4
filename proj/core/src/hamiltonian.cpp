#include "tonelli/hamiltonian.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace tonelli {

using nlohmann::json;

HamiltonianModel::HamiltonianModel(int n, std::string name)
    : n_(n), name_(std::move(name)), params_(std::make_shared<json>(json::object())) {
  if (n < 1) throw ConfigError("hamiltonian dimension must be positive");
}

const json& HamiltonianModel::params() const { return *params_; }

void HamiltonianModel::set_params(const json& p) { *params_ = p; }

void HamiltonianModel::grad(const Vec& theta, const Vec& p, Vec& dth, Vec& dp) const {
  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
  const double h = 1e-5 * scale;
  dth.resize(n_);
  dp.resize(n_);
  Vec tq = theta, tp = p;
  for (int i = 0; i < n_; ++i) {
    tq[i] = theta[i] + h;
    const double fp = eval(tq, p);
    tq[i] = theta[i] - h;
    const double fm = eval(tq, p);
    tq[i] = theta[i];
    dth[i] = (fp - fm) / (2 * h);

    tp[i] = p[i] + h;
    const double gp = eval(theta, tp);
    tp[i] = p[i] - h;
    const double gm = eval(theta, tp);
    tp[i] = p[i];
    dp[i] = (gp - gm) / (2 * h);
  }
}

void HamiltonianModel::hess(const Vec& theta, const Vec& p, Mat& hqq, Mat& hqp, Mat& hpp) const {
  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
  const double h = 1e-5 * scale;
  hqq.resize(n_, n_);
  hqp.resize(n_, n_);
  hpp.resize(n_, n_);
  Vec dth_p(n_), dp_p(n_), dth_m(n_), dp_m(n_);
  Vec tq = theta, tp = p;
  for (int j = 0; j < n_; ++j) {
    tq[j] = theta[j] + h;
    grad(tq, p, dth_p, dp_p);
    tq[j] = theta[j] - h;
    grad(tq, p, dth_m, dp_m);
    tq[j] = theta[j];
    hqq.col(j) = (dth_p - dth_m) / (2 * h);
    hqp.col(j) = (dp_p - dp_m) / (2 * h);  // d^2 H / dp dtheta_j

    tp[j] = p[j] + h;
    grad(theta, tp, dth_p, dp_p);
    tp[j] = p[j] - h;
    grad(theta, tp, dth_m, dp_m);
    tp[j] = p[j];
    hpp.col(j) = (dp_p - dp_m) / (2 * h);
  }
  // hqp convention: (hqp)_{ij} = d^2 H / dtheta_i dp_j
  hqp.transposeInPlace();
  hqq = 0.5 * (hqq + hqq.transpose()).eval();
  hpp = 0.5 * (hpp + hpp.transpose()).eval();
}

double HamiltonianModel::potential(const Vec&) const {
  throw ConfigError("potential(): model '" + name_ + "' is not mechanical");
}
Vec HamiltonianModel::potential_grad(const Vec&) const {
  throw ConfigError("potential_grad(): model '" + name_ + "' is not mechanical");
}
Mat HamiltonianModel::potential_hess(const Vec&) const {
  throw ConfigError("potential_hess(): model '" + name_ + "' is not mechanical");
}
double HamiltonianModel::lagrangian(const Vec&, const Vec&) const {
  throw ConfigError("lagrangian(): no closed form for model '" + name_ + "'");
}

namespace {

// H = |p|^2 / 2
class FlatHamiltonian final : public HamiltonianModel {
 public:
  explicit FlatHamiltonian(int n) : HamiltonianModel(n, "flat") {}
  double eval(const Vec&, const Vec& p) const override { return 0.5 * p.squaredNorm(); }
  void grad(const Vec&, const Vec& p, Vec& dth, Vec& dp) const override {
    dth = Vec::Zero(dim());
    dp = p;
  }
  void hess(const Vec&, const Vec&, Mat& hqq, Mat& hqp, Mat& hpp) const override {
    hqq = Mat::Zero(dim(), dim());
    hqp = Mat::Zero(dim(), dim());
    hpp = Mat::Identity(dim(), dim());
  }
  bool mechanical() const override { return true; }
  double potential(const Vec&) const override { return 0; }
  Vec potential_grad(const Vec&) const override { return Vec::Zero(dim()); }
  Mat potential_hess(const Vec&) const override { return Mat::Zero(dim(), dim()); }
  bool has_lagrangian() const override { return true; }
  double lagrangian(const Vec&, const Vec& v) const override { return 0.5 * v.squaredNorm(); }
};

// H = |p|^2 / 2 + (q/4) sum_i p_i^4   (fiberwise convex, theta-independent)
class ConvexFlatHamiltonian final : public HamiltonianModel {
 public:
  ConvexFlatHamiltonian(int n, double quartic) : HamiltonianModel(n, "convex-flat"), q_(quartic) {
    if (q_ < 0) throw ConfigError("convex-flat: quartic coefficient must be >= 0");
    set_params({{"quartic", q_}});
  }
  double eval(const Vec&, const Vec& p) const override {
    return 0.5 * p.squaredNorm() + 0.25 * q_ * p.array().pow(4).sum();
  }
  void grad(const Vec&, const Vec& p, Vec& dth, Vec& dp) const override {
    dth = Vec::Zero(dim());
    dp = p + q_ * p.array().cube().matrix();
  }
  void hess(const Vec&, const Vec& p, Mat& hqq, Mat& hqp, Mat& hpp) const override {
    hqq = Mat::Zero(dim(), dim());
    hqp = Mat::Zero(dim(), dim());
    hpp = (1.0 + 3.0 * q_ * p.array().square()).matrix().asDiagonal();
  }
  bool has_lagrangian() const override { return true; }
  double lagrangian(const Vec&, const Vec& v) const override {
    // Separable: invert p + q p^3 = v_i per component by Newton.
    double total = 0;
    for (int i = 0; i < dim(); ++i) {
      double p = v[i];
      for (int it = 0; it < 60; ++it) {
        const double f = p + q_ * p * p * p - v[i];
        if (std::abs(f) < 1e-15 * std::max(1.0, std::abs(v[i]))) break;
        p -= f / (1.0 + 3.0 * q_ * p * p);
      }
      total += p * v[i] - (0.5 * p * p + 0.25 * q_ * p * p * p * p);
    }
    return total;
  }

 private:
  double q_;
};

// H = |p - c - g'(theta)|^2 / 2 with g(theta) = a sin(2 pi theta_1) / (2 pi).
class ShearHamiltonian final : public HamiltonianModel {
 public:
  ShearHamiltonian(int n, Vec c, double a) : HamiltonianModel(n, "shear"), c_(std::move(c)), a_(a) {
    if (c_.size() != n) throw ConfigError("shear: c must have length n");
    json prm;
    prm["a"] = a_;
    prm["c"] = std::vector<double>(c_.data(), c_.data() + c_.size());
    set_params(prm);
  }
  Vec form(const Vec& theta) const {  // c + g'(theta)
    Vec w = c_;
    w[0] += a_ * std::cos(kTwoPi * theta[0]);
    return w;
  }
  double eval(const Vec& theta, const Vec& p) const override {
    return 0.5 * (p - form(theta)).squaredNorm();
  }
  void grad(const Vec& theta, const Vec& p, Vec& dth, Vec& dp) const override {
    const Vec w = p - form(theta);
    dp = w;
    dth = Vec::Zero(dim());
    dth[0] = w[0] * a_ * kTwoPi * std::sin(kTwoPi * theta[0]);
  }
  void hess(const Vec& theta, const Vec& p, Mat& hqq, Mat& hqp, Mat& hpp) const override {
    const int n = dim();
    const Vec w = p - form(theta);
    const double s = std::sin(kTwoPi * theta[0]);
    const double cth = std::cos(kTwoPi * theta[0]);
    hpp = Mat::Identity(n, n);
    hqp = Mat::Zero(n, n);
    hqp(0, 0) = a_ * kTwoPi * s;  // d^2H / dtheta_1 dp_1
    hqq = Mat::Zero(n, n);
    hqq(0, 0) = a_ * a_ * kTwoPi * kTwoPi * s * s + w[0] * a_ * kTwoPi * kTwoPi * cth;
  }
  bool has_lagrangian() const override { return true; }
  double lagrangian(const Vec& x, const Vec& v) const override {
    return 0.5 * v.squaredNorm() + form(x).dot(v);
  }

 private:
  Vec c_;
  double a_;
};

// H = p^2/2 + cos(2 pi theta), n = 1.
class PendulumHamiltonian final : public HamiltonianModel {
 public:
  PendulumHamiltonian() : HamiltonianModel(1, "pendulum") {}
  double eval(const Vec& theta, const Vec& p) const override {
    return 0.5 * p[0] * p[0] + std::cos(kTwoPi * theta[0]);
  }
  void grad(const Vec& theta, const Vec& p, Vec& dth, Vec& dp) const override {
    dth = potential_grad(theta);
    dp = p;
  }
  void hess(const Vec& theta, const Vec&, Mat& hqq, Mat& hqp, Mat& hpp) const override {
    hqq = potential_hess(theta);
    hqp = Mat::Zero(1, 1);
    hpp = Mat::Identity(1, 1);
  }
  bool mechanical() const override { return true; }
  double potential(const Vec& theta) const override { return std::cos(kTwoPi * theta[0]); }
  Vec potential_grad(const Vec& theta) const override {
    Vec g(1);
    g[0] = -kTwoPi * std::sin(kTwoPi * theta[0]);
    return g;
  }
  Mat potential_hess(const Vec& theta) const override {
    Mat h(1, 1);
    h(0, 0) = -kTwoPi * kTwoPi * std::cos(kTwoPi * theta[0]);
    return h;
  }
  bool has_lagrangian() const override { return true; }
  double lagrangian(const Vec& x, const Vec& v) const override {
    return 0.5 * v[0] * v[0] - std::cos(kTwoPi * x[0]);
  }
};

// H = |p|^2/2 + eps (cos 2 pi theta_1 + cos 2 pi theta_2), n = 2.
class Mech2dHamiltonian final : public HamiltonianModel {
 public:
  explicit Mech2dHamiltonian(double eps) : HamiltonianModel(2, "mech2d"), eps_(eps) {
    set_params({{"eps", eps_}});
  }
  double eval(const Vec& theta, const Vec& p) const override {
    return 0.5 * p.squaredNorm() + potential(theta);
  }
  void grad(const Vec& theta, const Vec& p, Vec& dth, Vec& dp) const override {
    dth = potential_grad(theta);
    dp = p;
  }
  void hess(const Vec& theta, const Vec&, Mat& hqq, Mat& hqp, Mat& hpp) const override {
    hqq = potential_hess(theta);
    hqp = Mat::Zero(2, 2);
    hpp = Mat::Identity(2, 2);
  }
  bool mechanical() const override { return true; }
  double potential(const Vec& theta) const override {
    return eps_ * (std::cos(kTwoPi * theta[0]) + std::cos(kTwoPi * theta[1]));
  }
  Vec potential_grad(const Vec& theta) const override {
    Vec g(2);
    g[0] = -eps_ * kTwoPi * std::sin(kTwoPi * theta[0]);
    g[1] = -eps_ * kTwoPi * std::sin(kTwoPi * theta[1]);
    return g;
  }
  Mat potential_hess(const Vec& theta) const override {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = -eps_ * kTwoPi * kTwoPi * std::cos(kTwoPi * theta[0]);
    h(1, 1) = -eps_ * kTwoPi * kTwoPi * std::cos(kTwoPi * theta[1]);
    return h;
  }
  bool has_lagrangian() const override { return true; }
  double lagrangian(const Vec& x, const Vec& v) const override {
    return 0.5 * v.squaredNorm() - potential(x);
  }

 private:
  double eps_;
};

}  // namespace

HamiltonianPtr make_hamiltonian(const std::string& name, const json& params, int n) {
  if (name == "flat") return std::make_shared<FlatHamiltonian>(n);
  if (name == "convex-flat") {
    const double q = params.value("quartic", 1.0);
    return std::make_shared<ConvexFlatHamiltonian>(n, q);
  }
  if (name == "shear") {
    Vec c = Vec::Zero(n);
    if (params.contains("c")) {
      const auto arr = params.at("c").get<std::vector<double>>();
      if (static_cast<int>(arr.size()) != n) throw ConfigError("shear: c length != n");
      for (int i = 0; i < n; ++i) c[i] = arr[i];
    }
    const double a = params.value("a", 0.3);
    return std::make_shared<ShearHamiltonian>(n, c, a);
  }
  if (name == "pendulum") {
    if (n != 1) throw ConfigError("pendulum is one-dimensional");
    return std::make_shared<PendulumHamiltonian>();
  }
  if (name == "mech2d") {
    if (n != 2) throw ConfigError("mech2d is two-dimensional");
    return std::make_shared<Mech2dHamiltonian>(params.value("eps", 0.2));
  }
  throw ConfigError("unknown hamiltonian '" + name + "'");
}

HamiltonianPtr make_hamiltonian(const std::string& name, int n) {
  return make_hamiltonian(name, json::object(), n);
}

ModelDiagnostics validate_model(const HamiltonianModel& h, unsigned seed, int samples) {
  ModelDiagnostics d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uth(0.0, 1.0), up(-2.0, 2.0);
  const int n = h.dim();
  for (int s = 0; s < samples; ++s) {
    Vec theta(n), p(n);
    for (int i = 0; i < n; ++i) {
      theta[i] = uth(rng);
      p[i] = up(rng);
    }
    // 1-periodicity
    for (int i = 0; i < n; ++i) {
      Vec shifted = theta;
      shifted[i] += 1.0;
      d.periodicity_defect =
          std::max(d.periodicity_defect, std::abs(h.eval(shifted, p) - h.eval(theta, p)));
    }
    // fiberwise convexity via Cholesky
    Mat hqq, hqp, hpp;
    h.hess(theta, p, hqq, hqp, hpp);
    Eigen::LLT<Mat> llt(hpp);
    if (llt.info() != Eigen::Success) d.convex = false;
    // superlinearity probe along the unit covector direction of p
    Vec dir = p.norm() > 1e-12 ? Vec(p / p.norm()) : Vec(Vec::Ones(n) / std::sqrt(double(n)));
    const double v10 = h.eval(theta, 10.0 * dir) / 10.0;
    const double v100 = h.eval(theta, 100.0 * dir) / 100.0;
    if (!(v100 > 2.0 * v10) && !(v100 > v10 + 10.0)) d.superlinear = false;
    // derivative consistency against central differences of eval
    Vec gth, gp;
    h.grad(theta, p, gth, gp);
    const double fd = 1e-5;
    for (int i = 0; i < n; ++i) {
      Vec tq = theta;
      tq[i] += fd;
      double fplus = h.eval(tq, p);
      tq[i] = theta[i] - fd;
      double fminus = h.eval(tq, p);
      d.grad_fd_error = std::max(d.grad_fd_error, std::abs((fplus - fminus) / (2 * fd) - gth[i]));
      Vec tp = p;
      tp[i] += fd;
      fplus = h.eval(theta, tp);
      tp[i] = p[i] - fd;
      fminus = h.eval(theta, tp);
      d.grad_fd_error = std::max(d.grad_fd_error, std::abs((fplus - fminus) / (2 * fd) - gp[i]));
    }
    // hessian consistency against central differences of grad
    Mat fqq(n, n), fqp(n, n), fpp(n, n);
    Vec gthp(n), gpp(n), gthm(n), gpm(n);
    for (int j = 0; j < n; ++j) {
      Vec tq = theta;
      tq[j] += fd;
      h.grad(tq, p, gthp, gpp);
      tq[j] = theta[j] - fd;
      h.grad(tq, p, gthm, gpm);
      fqq.col(j) = (gthp - gthm) / (2 * fd);
      fqp.col(j) = (gpp - gpm) / (2 * fd);
      Vec tp = p;
      tp[j] += fd;
      h.grad(theta, tp, gthp, gpp);
      tp[j] = p[j] - fd;
      h.grad(theta, tp, gthm, gpm);
      fpp.col(j) = (gpp - gpm) / (2 * fd);
    }
    d.hess_fd_error = std::max(d.hess_fd_error, (fqq - hqq).lpNorm<Eigen::Infinity>());
    d.hess_fd_error = std::max(d.hess_fd_error, (fqp.transpose() - hqp).lpNorm<Eigen::Infinity>());
    d.hess_fd_error = std::max(d.hess_fd_error, (fpp - hpp).lpNorm<Eigen::Infinity>());
  }
  return d;
}

}  // namespace tonelli
