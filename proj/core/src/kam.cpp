#include "tonelli/kam.hpp"

#include <algorithm>
#include <cmath>

#include "tonelli/parallel.hpp"

namespace tonelli {

namespace {

constexpr double kTau_ = 6.28318530717958647692;
using Cplx = std::complex<double>;

// per-component forward transforms of a grid-sampled vector field
std::vector<CVec> field_coefficients(const Grid& grid, const std::vector<Vec>& samples, int n) {
  std::vector<CVec> coef(n);
  for (int i = 0; i < n; ++i) {
    CVec f(grid.size());
    for (int j = 0; j < grid.size(); ++j) f[j] = samples[j][i];
    coef[i] = dftn(grid, f);
  }
  return coef;
}

CVec shift_coefficients(const Grid& grid, const CVec& coef, const Vec& shift) {
  CVec out(coef.size());
  for (int j = 0; j < coef.size(); ++j) {
    const auto k = dft_frequency_multi(grid, j);
    double phase = 0;
    for (int a = 0; a < grid.dim(); ++a) phase += k[a] * shift[a];
    out[j] = coef[j] * std::polar(1.0, kTau_ * phase);
  }
  return out;
}

CVec derivative_coefficients(const Grid& grid, const CVec& coef, int axis) {
  CVec out(coef.size());
  for (int j = 0; j < coef.size(); ++j) {
    const auto k = dft_frequency_multi(grid, j);
    const bool nyquist = grid.shape[axis] % 2 == 0 && k[axis] == -grid.shape[axis] / 2;
    out[j] = nyquist ? Cplx(0, 0) : coef[j] * Cplx(0, kTau_ * k[axis]);
  }
  return out;
}

Vec real_grid(const Grid& grid, const CVec& coef) {
  const CVec vals = idftn(grid, coef);
  Vec out(vals.size());
  for (int j = 0; j < vals.size(); ++j) out[j] = vals[j].real();
  return out;
}

// w(eta) - w(eta + omega) = g(eta), zero-mean solution
CVec solve_cohomological(const Grid& grid, const CVec& g_coef, const Vec& omega,
                         double divisor_floor) {
  CVec w(g_coef.size());
  for (int j = 0; j < g_coef.size(); ++j) {
    const auto k = dft_frequency_multi(grid, j);
    bool zero = true;
    double phase = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      if (k[a] != 0) zero = false;
      phase += k[a] * omega[a];
    }
    if (zero) {
      w[j] = Cplx(0, 0);
      continue;
    }
    const Cplx divisor = Cplx(1, 0) - std::polar(1.0, kTau_ * phase);
    if (std::abs(divisor) < divisor_floor)
      throw NumericError("solve_invariance: small divisor below floor at a resolved mode");
    w[j] = g_coef[j] / divisor;
  }
  return w;
}

}  // namespace

Vec golden_frequency(int n) {
  Vec w(n);
  if (n == 1) {
    w[0] = (std::sqrt(5.0) - 1.0) / 2.0;
  } else if (n == 2) {
    w[0] = std::sqrt(2.0) - 1.0;
    w[1] = std::sqrt(3.0) - 1.0;
  } else if (n == 3) {
    w[0] = std::sqrt(2.0) - 1.0;
    w[1] = std::sqrt(3.0) - 1.0;
    w[2] = (std::sqrt(5.0) - 1.0) / 2.0;
  } else {
    throw ConfigError("golden_frequency: n must be 1, 2, or 3");
  }
  return w;
}

DiophantineVector verify_diophantine(const Vec& omega, double tau, int cutoff) {
  const int n = static_cast<int>(omega.size());
  if (cutoff < 1) throw ConfigError("verify_diophantine: cutoff must be >= 1");
  DiophantineVector dv;
  dv.omega = omega;
  dv.tau = tau;
  dv.verified_up_to = cutoff;
  double gamma = std::numeric_limits<double>::infinity();
  std::vector<int> k(n, -cutoff);
  while (true) {
    bool zero = true;
    double dot = 0;
    int knorm = 0;
    for (int a = 0; a < n; ++a) {
      if (k[a] != 0) zero = false;
      dot += k[a] * omega[a];
      knorm = std::max(knorm, std::abs(k[a]));
    }
    if (!zero) {
      const double frac = std::abs(dot - std::round(dot));  // min over l of |k.w + l|
      if (frac == 0) throw HypothesisViolated("verify_diophantine: exact resonance found");
      gamma = std::min(gamma, frac * std::pow(double(knorm), tau));
    }
    int a = 0;
    while (a < n && k[a] == cutoff) k[a++] = -cutoff;
    if (a == n) break;
    ++k[a];
  }
  dv.gamma = gamma;
  return dv;
}

SymplecticMap standard_family(double kappa) {
  return [kappa](const Vec& x, const Vec& i) {
    if (x.size() != 1 || i.size() != 1) throw ConfigError("standard_family: one-dimensional map");
    MapJet jet;
    const double di_dx = -kappa * std::cos(kTau_ * x[0]);
    jet.i = Vec::Constant(1, i[0] - (kappa / kTau_) * std::sin(kTau_ * x[0]));
    jet.x = Vec::Constant(1, x[0] + jet.i[0]);
    jet.jac.resize(2, 2);
    jet.jac(1, 0) = di_dx;
    jet.jac(1, 1) = 1.0;
    jet.jac(0, 0) = 1.0 + di_dx;
    jet.jac(0, 1) = 1.0;
    return jet;
  };
}

TorusEmbedding TorusEmbedding::trivial(const Grid& grid, const Vec& i0) {
  TorusEmbedding e;
  e.grid = grid;
  e.i0 = i0;
  e.u.assign(grid.size(), Vec::Zero(i0.size()));
  e.v.assign(grid.size(), Vec::Zero(i0.size()));
  return e;
}

Vec TorusEmbedding::angle(int node) const { return grid.node(node) + u[node]; }
Vec TorusEmbedding::momentum(int node) const { return i0 + v[node]; }

double TorusEmbedding::graph_defect() const {
  const int n = static_cast<int>(i0.size());
  if (n == 1) return 0;
  const auto cu = field_coefficients(grid, u, n);
  const auto cv = field_coefficients(grid, v, n);
  std::vector<std::vector<Vec>> du(n, std::vector<Vec>(n)), dv(n, std::vector<Vec>(n));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      du[i][a] = real_grid(grid, derivative_coefficients(grid, cu[i], a));
      dv[i][a] = real_grid(grid, derivative_coefficients(grid, cv[i], a));
    }
  double defect = 0;
  for (int j = 0; j < grid.size(); ++j) {
    Mat dxu(n, n), dxv(n, n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) {
        dxu(i, a) = du[i][a][j];
        dxv(i, a) = dv[i][a][j];
      }
    const Mat dp = dxv * (Mat::Identity(n, n) + dxu).inverse();
    defect = std::max(defect, (dp - dp.transpose()).lpNorm<Eigen::Infinity>());
  }
  return defect;
}

double TorusEmbedding::tail_energy() const {
  const int n = static_cast<int>(i0.size());
  const auto cu = field_coefficients(grid, u, n);
  const auto cv = field_coefficients(grid, v, n);
  double total = 0, tail = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < grid.size(); ++j) {
      const auto k = dft_frequency_multi(grid, j);
      bool high = false;
      for (int a = 0; a < grid.dim(); ++a)
        if (std::abs(k[a]) >= std::max(1, grid.shape[a] / 4)) high = true;
      const double e = std::norm(cu[i][j]) + std::norm(cv[i][j]);
      total += e;
      if (high) tail += e;
    }
  return total > 0 ? tail / total : 0;
}

InvarianceResult solve_invariance(const SymplecticMap& map, const DiophantineVector& omega,
                                  const TorusEmbedding& seed, const InvarianceOptions& opt) {
  const Grid& grid = seed.grid;
  const int n = static_cast<int>(seed.i0.size());
  const int count = grid.size();
  const Mat jmat = symplectic_j(n);

  InvarianceResult result;
  result.rho = seed;
  TorusEmbedding& rho = result.rho;

  for (int iter = 0; iter <= opt.max_iters; ++iter) {
    const auto cu = field_coefficients(grid, rho.u, n);
    const auto cv = field_coefficients(grid, rho.v, n);

    // values and first derivatives at eta and eta + omega, spectrally
    std::vector<Vec> u_shift(n), v_shift(n);
    std::vector<std::vector<Vec>> du(n, std::vector<Vec>(n)), dv(n, std::vector<Vec>(n));
    std::vector<std::vector<Vec>> du_s(n, std::vector<Vec>(n)), dv_s(n, std::vector<Vec>(n));
    for (int i = 0; i < n; ++i) {
      u_shift[i] = real_grid(grid, shift_coefficients(grid, cu[i], omega.omega));
      v_shift[i] = real_grid(grid, shift_coefficients(grid, cv[i], omega.omega));
      for (int a = 0; a < n; ++a) {
        const CVec dci = derivative_coefficients(grid, cu[i], a);
        const CVec dcv = derivative_coefficients(grid, cv[i], a);
        du[i][a] = real_grid(grid, dci);
        dv[i][a] = real_grid(grid, dcv);
        du_s[i][a] = real_grid(grid, shift_coefficients(grid, dci, omega.omega));
        dv_s[i][a] = real_grid(grid, shift_coefficients(grid, dcv, omega.omega));
      }
    }

    std::vector<Vec> e1(count), e2(count);
    std::vector<Mat> s_blocks(count);
    double residual = 0;
    std::vector<double> node_residual(count);
    parallel_for(count, [&](int j) {
      const Vec eta = grid.node(j);
      const MapJet jet = map(eta + rho.u[j], rho.i0 + rho.v[j]);
      Vec err(2 * n);
      for (int i = 0; i < n; ++i) {
        err[i] = jet.x[i] - (eta[i] + omega.omega[i] + u_shift[i][j]);
        err[n + i] = jet.i[i] - (rho.i0[i] + v_shift[i][j]);
      }
      node_residual[j] = err.lpNorm<Eigen::Infinity>();

      auto frame_at = [&](const std::vector<std::vector<Vec>>& duu,
                          const std::vector<std::vector<Vec>>& dvv) {
        Mat l(2 * n, n);
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < n; ++a) {
            l(i, a) = (i == a ? 1.0 : 0.0) + duu[i][a][j];
            l(n + i, a) = dvv[i][a][j];
          }
        const Mat nmat = l * (l.transpose() * l).inverse();
        Mat m(2 * n, 2 * n);
        m.leftCols(n) = l;
        m.rightCols(n) = jmat * nmat;
        return m;
      };
      const Mat m_here = frame_at(du, dv);
      const Mat m_shift = frame_at(du_s, dv_s);
      const Eigen::PartialPivLU<Mat> lu(m_shift);
      const Vec e = lu.solve(-err);
      e1[j] = e.head(n);
      e2[j] = e.tail(n);
      s_blocks[j] = lu.solve(jet.jac * m_here).topRightCorner(n, n);
    });
    residual = *std::max_element(node_residual.begin(), node_residual.end());
    result.residual_history.push_back(residual);
    if (residual < opt.tol) {
      result.converged = true;
      break;
    }
    if (iter == opt.max_iters) break;

    // w2(eta) - w2(eta+omega) = e2 (zero-mean part), then the average b is
    // fixed by the solvability of the w1 equation through the twist S
    std::vector<Vec> w2(count, Vec::Zero(n));
    for (int i = 0; i < n; ++i) {
      CVec g(count);
      double mean = 0;
      for (int j = 0; j < count; ++j) mean += e2[j][i];
      mean /= count;
      for (int j = 0; j < count; ++j) g[j] = e2[j][i] - mean;
      const Vec wi = real_grid(
          grid, solve_cohomological(grid, dftn(grid, g), omega.omega, opt.divisor_floor));
      for (int j = 0; j < count; ++j) w2[j][i] = wi[j];
    }
    Mat s_mean = Mat::Zero(n, n);
    Vec rhs_mean = Vec::Zero(n);
    for (int j = 0; j < count; ++j) {
      s_mean += s_blocks[j];
      rhs_mean += e1[j] - s_blocks[j] * w2[j];
    }
    s_mean /= count;
    rhs_mean /= count;
    const Vec b = s_mean.partialPivLu().solve(rhs_mean);
    for (int j = 0; j < count; ++j) w2[j] += b;

    std::vector<Vec> w1(count, Vec::Zero(n));
    for (int i = 0; i < n; ++i) {
      CVec g(count);
      double mean = 0;
      for (int j = 0; j < count; ++j) {
        const double val = e1[j][i] - s_blocks[j].row(i).dot(w2[j]);
        g[j] = val;
        mean += val;
      }
      mean /= count;
      for (int j = 0; j < count; ++j) g[j] -= mean;  // residual mean is quadratically small
      const Vec wi = real_grid(
          grid, solve_cohomological(grid, dftn(grid, g), omega.omega, opt.divisor_floor));
      for (int j = 0; j < count; ++j) w1[j][i] = wi[j];
    }

    Vec v_mean = Vec::Zero(n);
    for (int j = 0; j < count; ++j) {
      Vec w(2 * n);
      w << w1[j], w2[j];
      const Mat m_here = [&] {
        Mat l(2 * n, n);
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < n; ++a) {
            l(i, a) = (i == a ? 1.0 : 0.0) + du[i][a][j];
            l(n + i, a) = dv[i][a][j];
          }
        const Mat nmat = l * (l.transpose() * l).inverse();
        Mat m(2 * n, 2 * n);
        m.leftCols(n) = l;
        m.rightCols(n) = jmat * nmat;
        return m;
      }();
      const Vec delta = m_here * w;
      rho.u[j] += delta.head(n);
      rho.v[j] += delta.tail(n);
      v_mean += rho.v[j];
    }
    v_mean /= count;
    rho.i0 += v_mean;
    for (int j = 0; j < count; ++j) rho.v[j] -= v_mean;
  }

  // reparameterize so that u has exactly zero mean: rho(eta) <- rho(eta + d)
  Vec u_mean = Vec::Zero(n);
  for (int j = 0; j < count; ++j) u_mean += rho.u[j];
  u_mean /= count;
  if (u_mean.lpNorm<Eigen::Infinity>() > 1e-15) {
    const Vec d = -u_mean;
    const auto cu = field_coefficients(grid, rho.u, n);
    const auto cv = field_coefficients(grid, rho.v, n);
    for (int i = 0; i < n; ++i) {
      const Vec ui = real_grid(grid, shift_coefficients(grid, cu[i], d));
      const Vec vi = real_grid(grid, shift_coefficients(grid, cv[i], d));
      for (int j = 0; j < count; ++j) {
        rho.u[j][i] = ui[j] + d[i];
        rho.v[j][i] = vi[j];
      }
    }
  }
  return result;
}

NormalFormData extract_twist(const HamiltonianModel& h, const PeriodicTorusData& torus,
                             const TwistOptions& opt) {
  const int n = h.dim();
  const Grid& grid = torus.grid;
  const int count = grid.size();
  if (torus.diagnostics.closure_residual > 1e-6)
    throw HypothesisViolated("extract_twist: torus closure residual too large");

  std::vector<TrigField> pf(n);
  for (int i = 0; i < n; ++i) pf[i] = torus.momentum_field(i);
  // DP on the grid, spectrally
  std::vector<std::vector<Vec>> dp(n, std::vector<Vec>(n));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) dp[i][a] = pf[i].derivative_grid(a);

  const Vec rvec = [&] {
    Vec r(n);
    for (int i = 0; i < n; ++i) r[i] = torus.r[i];
    return r;
  }();

  std::vector<Mat> a_blocks(count);
  std::vector<double> qd(count), cd(count);
  parallel_for(count, [&](int c) {
    const Vec theta = grid.node(c);
    Mat dg0 = Mat::Identity(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) dg0(n + i, a) = dp[i][a][c];
    const FlowWithFrame fw =
        flow_with_frame(h, LiftedState(theta, torus.P[c]), dg0, torus.T, opt.integrator);
    Mat dg0_inv = Mat::Identity(2 * n, 2 * n);
    // closure brings the orbit back to the same node, so reuse DP there
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) dg0_inv(n + i, a) = -dp[i][a][c];
    const Mat dpsi = dg0_inv * fw.frame;
    a_blocks[c] = dpsi.topRightCorner(n, n);
    qd[c] = (dpsi.bottomRightCorner(n, n) - Mat::Identity(n, n)).lpNorm<Eigen::Infinity>();
    cd[c] = dpsi.bottomLeftCorner(n, n).lpNorm<Eigen::Infinity>();
  });

  NormalFormData nf;
  nf.q_defect = *std::max_element(qd.begin(), qd.end());
  nf.cross_defect = *std::max_element(cd.begin(), cd.end());
  if (nf.q_defect > opt.q_tol)
    throw NumericError("extract_twist: dI'/dI deviates from identity beyond tolerance");

  nf.abar = Mat::Zero(n, n);
  for (const Mat& a : a_blocks) nf.abar += a;
  nf.abar /= count;
  for (const Mat& a : a_blocks)
    nf.theta_dependence = std::max(nf.theta_dependence, (a - nf.abar).lpNorm<Eigen::Infinity>());
  nf.symmetry_defect = (nf.abar - nf.abar.transpose()).lpNorm<Eigen::Infinity>();
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (nf.abar + nf.abar.transpose()));
  nf.min_eigenvalue = eig.eigenvalues().minCoeff();

  if (!opt.check_b) return nf;

  // B = d2 I'/dI2 at I=0 against -dA/dtheta (generating-function symmetry),
  // probed on a sub-grid to keep the flow count modest
  std::vector<TrigField> a_fields(n * n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      Vec samples(count);
      for (int c = 0; c < count; ++c) samples[c] = a_blocks[c](i, a);
      a_fields[i * n + a] = TrigField(grid, samples);
    }

  const int probes = std::min(count, 16);
  const int stride = std::max(1, count / probes);
  const double d = opt.fd_step;
  auto momentum_out = [&](const Vec& theta, const Vec& i_in) {
    Vec p0 = torus.P[0];  // placeholder size
    p0.resize(n);
    for (int i = 0; i < n; ++i) p0[i] = pf[i](theta) + i_in[i];
    const LiftedState z = flow(h, LiftedState(theta, p0), torus.T, opt.integrator);
    const Vec th_end = wrap_unit(z.x);
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = z.p[i] - pf[i](th_end);
    return out;
  };
  double b_defect = 0;
  for (int c = 0; c < count; c += stride) {
    const Vec theta = grid.node(c);
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Vec bjk(n);
        if (j == k) {
          const Vec fp = momentum_out(theta, d * Vec::Unit(n, j));
          const Vec fm = momentum_out(theta, -d * Vec::Unit(n, j));
          const Vec f0 = momentum_out(theta, Vec::Zero(n));
          bjk = (fp + fm - 2 * f0) / (d * d);
        } else {
          const Vec fpp = momentum_out(theta, d * (Vec::Unit(n, j) + Vec::Unit(n, k)));
          const Vec fpm = momentum_out(theta, d * (Vec::Unit(n, j) - Vec::Unit(n, k)));
          const Vec fmp = momentum_out(theta, d * (-Vec::Unit(n, j) + Vec::Unit(n, k)));
          const Vec fmm = momentum_out(theta, -d * (Vec::Unit(n, j) + Vec::Unit(n, k)));
          bjk = (fpp - fpm - fmp + fmm) / (4 * d * d);
        }
        for (int i = 0; i < n; ++i) {
          const double da = a_fields[j * n + k].gradient(theta)[i];
          b_defect = std::max(b_defect, std::abs(bjk[i] + da));
        }
      }
  }
  nf.b_defect = b_defect;
  return nf;
}

SymplecticMap rescaled_map(const HamiltonianModel& h, const PeriodicTorusData& torus, double eps,
                           const IntegratorSpec& spec) {
  if (eps <= 0 || eps > 1) throw ConfigError("rescaled_map: eps must lie in (0, 1]");
  const int n = h.dim();
  auto fields = std::make_shared<std::vector<TrigField>>(n);
  for (int i = 0; i < n; ++i) (*fields)[i] = torus.momentum_field(i);
  Vec rvec(n);
  for (int i = 0; i < n; ++i) rvec[i] = torus.r[i];
  const double period = torus.T;
  const HamiltonianModel* model = &h;

  return [fields, rvec, period, eps, spec, model, n](const Vec& x, const Vec& i_in) {
    const Vec theta0 = wrap_unit(x);
    Vec p0(n);
    Mat dg0 = Mat::Identity(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      p0[i] = (*fields)[i](theta0) + eps * i_in[i];
      const Vec grad = (*fields)[i].gradient(theta0);
      for (int a = 0; a < n; ++a) dg0(n + i, a) = grad[a];
    }
    Mat r_eps = Mat::Identity(2 * n, 2 * n);
    r_eps.bottomRightCorner(n, n) *= eps;
    const FlowWithFrame fw =
        flow_with_frame(*model, LiftedState(x, p0), dg0 * r_eps, period, spec);
    const Vec theta1 = wrap_unit(fw.state.x);
    MapJet jet;
    jet.x = fw.state.x - rvec;
    jet.i.resize(n);
    Mat dg0_inv = Mat::Identity(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      jet.i[i] = (fw.state.p[i] - (*fields)[i](theta1)) / eps;
      const Vec grad = (*fields)[i].gradient(theta1);
      for (int a = 0; a < n; ++a) dg0_inv(n + i, a) = -grad[a];
    }
    Mat r_inv = Mat::Identity(2 * n, 2 * n);
    r_inv.bottomRightCorner(n, n) /= eps;
    jet.jac = r_inv * dg0_inv * fw.frame;
    return jet;
  };
}

EulerSlopeReport euler_composition_error(const std::function<Vec(const Vec&)>& field,
                                         const std::function<Vec(const Vec&, double)>& reference,
                                         const std::vector<Vec>& samples,
                                         const std::vector<double>& eps_list, double c0,
                                         double escape_bound) {
  EulerSlopeReport rep;
  for (const double eps : eps_list) {
    const long m = static_cast<long>(std::floor(c0 / eps));
    double worst = 0;
    for (const Vec& z0 : samples) {
      Vec z = z0;
      for (long k = 0; k < m; ++k) {
        z += eps * field(z);
        if (z.lpNorm<Eigen::Infinity>() > escape_bound)
          throw NumericError("euler_composition_error: iterate escaped the window at step " +
                             std::to_string(k));
      }
      const Vec ref = reference(z0, m * eps);
      worst = std::max(worst, (z - ref).lpNorm<Eigen::Infinity>());
    }
    rep.eps.push_back(eps);
    rep.error.push_back(worst);
    rep.max_error = std::max(rep.max_error, worst);
  }
  // least-squares slope over clearly nonzero gaps
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (size_t i = 0; i < rep.eps.size(); ++i) {
    if (rep.error[i] < 1e-14) continue;
    const double lx = std::log(rep.eps[i]);
    const double ly = std::log(rep.error[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used >= 2) {
    rep.slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  } else {
    rep.all_zero = true;
  }
  return rep;
}

EulerSlopeReport euler_composition_error(const HamiltonianModel& h, const std::vector<Vec>& samples,
                                         const std::vector<double>& eps_list, double c0) {
  const int n = h.dim();
  auto field = [&h, n](const Vec& z) {
    Vec dx(n), dp(n);
    hamiltonian_field(h, z.head(n), z.tail(n), dx, dp);
    Vec out(2 * n);
    out << dx, dp;
    return out;
  };
  auto reference = [&h, n](const Vec& z, double t) {
    const LiftedState end = flow(h, LiftedState(z.head(n), z.tail(n)), t, {"auto", 1e-5});
    Vec out(2 * n);
    out << end.x, end.p;
    return out;
  };
  return euler_composition_error(field, reference, samples, eps_list, c0);
}

std::pair<Vec, Vec> embed_member(const PeriodicTorusData& torus, const FamilyMember& member,
                                 const Vec& eta) {
  const int n = static_cast<int>(eta.size());
  const TorusEmbedding& rho = member.rho;
  std::vector<TrigField> uf(n), vf(n);
  Vec samples(rho.grid.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rho.grid.size(); ++j) samples[j] = rho.u[j][i];
    uf[i] = TrigField(rho.grid, samples);
    for (int j = 0; j < rho.grid.size(); ++j) samples[j] = rho.v[j][i];
    vf[i] = TrigField(rho.grid, samples);
  }
  const Vec eta_w = wrap_unit(eta);
  Vec x(n), p(n);
  for (int i = 0; i < n; ++i) x[i] = eta[i] + uf[i](eta_w);
  const Vec theta = wrap_unit(x);
  const double eps = 1.0 / member.m;
  for (int i = 0; i < n; ++i)
    p[i] = torus.momentum_field(i)(theta) + eps * (rho.i0[i] + vf[i](eta_w));
  return {x, p};
}

std::vector<FamilyMember> torus_family(const HamiltonianModel& h, const PeriodicTorusData& torus,
                                       const NormalFormData& nf, const DiophantineVector& omega,
                                       int m_min, int m_max, const FamilyOptions& opt) {
  const int n = h.dim();
  if (m_min < 2 || m_max < m_min) throw ConfigError("torus_family: bad m range");
  const Grid eta_grid = Grid::cubic(n, opt.grid_points);
  const Vec i0_seed = nf.abar.partialPivLu().solve(omega.omega);
  Vec rvec(n);
  for (int i = 0; i < n; ++i) rvec[i] = torus.r[i];
  std::vector<TrigField> pf(n);
  for (int i = 0; i < n; ++i) pf[i] = torus.momentum_field(i);

  std::vector<FamilyMember> family;
  for (int m = m_min; m <= m_max; ++m) {
    FamilyMember member;
    member.m = m;
    const double eps = 1.0 / m;
    const SymplecticMap phi = rescaled_map(h, torus, eps, opt.integrator);
    const SymplecticMap u_m = [phi, m, n](const Vec& x, const Vec& i_in) {
      MapJet acc = phi(x, i_in);
      for (int k = 1; k < m; ++k) {
        const MapJet next = phi(acc.x, acc.i);
        acc.x = next.x;
        acc.i = next.i;
        acc.jac = (next.jac * acc.jac).eval();
      }
      return acc;
    };
    try {
      const InvarianceResult inv =
          solve_invariance(u_m, omega, TorusEmbedding::trivial(eta_grid, i0_seed), opt.newton);
      member.rho = inv.rho;
      member.residual = inv.residual_history.back();
      member.converged = inv.converged;
    } catch (const NumericError&) {
      member.converged = false;
      family.push_back(member);
      continue;
    }
    if (!member.converged) {
      family.push_back(member);
      continue;
    }

    // flow checks on eta samples: per-T rotation r + omega/m, set invariance,
    // and the C0 gap to the base section
    std::vector<TrigField> uf(n), vf(n);
    Vec samples(eta_grid.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < eta_grid.size(); ++j) samples[j] = member.rho.u[j][i];
      uf[i] = TrigField(eta_grid, samples);
      for (int j = 0; j < eta_grid.size(); ++j) samples[j] = member.rho.v[j][i];
      vf[i] = TrigField(eta_grid, samples);
    }
    auto angle_to_eta = [&](const Vec& x_lift) {
      Vec eta = x_lift;
      for (int it = 0; it < 60; ++it) {
        Vec next(n);
        const Vec w = wrap_unit(eta);
        for (int i = 0; i < n; ++i) next[i] = x_lift[i] - uf[i](w);
        if ((next - eta).lpNorm<Eigen::Infinity>() < 1e-13) return next;
        eta = next;
      }
      return eta;
    };
    auto section_momentum = [&](const Vec& x_lift, const Vec& eta) {
      const Vec theta = wrap_unit(x_lift);
      const Vec ew = wrap_unit(eta);
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = pf[i](theta) + eps * (member.rho.i0[i] + vf[i](ew));
      return p;
    };

    for (int s = 0; s < opt.invariance_samples; ++s) {
      Vec eta = Vec::Zero(n);
      eta[0] = static_cast<double>(s) / opt.invariance_samples;
      if (n > 1) eta[n - 1] = wrap_unit(0.618 * s);
      const auto [x0, p0] = embed_member(torus, member, eta);
      const LiftedState z1 = flow(h, LiftedState(x0, p0), torus.T, opt.integrator);
      const Vec eta1 = angle_to_eta(z1.x);
      double rot_err = 0;
      for (int i = 0; i < n; ++i)
        rot_err = std::max(rot_err,
                           std::abs(eta1[i] - eta[i] - (rvec[i] + omega.omega[i] * eps)));
      member.rotation_error = std::max(member.rotation_error, rot_err);
      member.flow_invariance_T = std::max(
          member.flow_invariance_T,
          (z1.p - section_momentum(z1.x, eta1)).lpNorm<Eigen::Infinity>());
      const LiftedState zh = flow(h, LiftedState(x0, p0), torus.T / 2, opt.integrator);
      const Vec etah = angle_to_eta(zh.x);
      member.flow_invariance_half = std::max(
          member.flow_invariance_half,
          (zh.p - section_momentum(zh.x, etah)).lpNorm<Eigen::Infinity>());
    }
    for (int j = 0; j < eta_grid.size(); ++j)
      member.c0_distance = std::max(
          member.c0_distance, eps * (member.rho.i0 + member.rho.v[j]).lpNorm<Eigen::Infinity>());
    family.push_back(member);
  }
  return family;
}

EquidistributionReport equidistribution_probe(const HamiltonianModel& h,
                                              const PeriodicTorusData& torus,
                                              const FamilyMember& member, long iterates,
                                              const IntegratorSpec& spec) {
  const int n = h.dim();
  if (!member.converged) throw HypothesisViolated("equidistribution_probe: member not solved");

  // five trigonometric observables with low integer frequencies
  std::vector<std::pair<IVec, bool>> modes;  // (k, use_sin)
  {
    IVec k = IVec::Zero(n);
    k[0] = 1;
    modes.push_back({k, false});
    modes.push_back({k, true});
    IVec k2 = IVec::Zero(n);
    k2[0] = 2;
    modes.push_back({k2, false});
    if (n > 1) {
      IVec k3 = IVec::Zero(n);
      k3[1] = 1;
      modes.push_back({k3, false});
      modes.push_back({k3, true});
    } else {
      modes.push_back({k2, true});
      IVec k3 = IVec::Zero(n);
      k3[0] = 3;
      modes.push_back({k3, false});
    }
  }
  auto observe = [&](const Vec& theta, int idx) {
    double phase = 0;
    for (int i = 0; i < n; ++i) phase += modes[idx].first[i] * theta[i];
    return modes[idx].second ? std::sin(kTau_ * phase) : std::cos(kTau_ * phase);
  };

  EquidistributionReport rep;
  rep.space.assign(modes.size(), 0.0);
  const Grid& grid = member.rho.grid;
  for (int j = 0; j < grid.size(); ++j) {
    const Vec theta = wrap_unit(grid.node(j) + member.rho.u[j]);
    for (size_t idx = 0; idx < modes.size(); ++idx)
      rep.space[idx] += observe(theta, idx) / grid.size();
  }

  rep.birkhoff.assign(modes.size(), 0.0);
  auto [x, p] = embed_member(torus, member, Vec::Zero(n));
  LiftedState z(x, p);
  for (long k = 0; k < iterates; ++k) {
    const Vec theta = wrap_unit(z.x);
    for (size_t idx = 0; idx < modes.size(); ++idx) rep.birkhoff[idx] += observe(theta, idx);
    z = flow(h, z, torus.T, spec);
    z.x = wrap_unit(z.x);  // keep the lift bounded over long orbits
  }
  for (size_t idx = 0; idx < modes.size(); ++idx) {
    rep.birkhoff[idx] /= iterates;
    rep.max_gap = std::max(rep.max_gap, std::abs(rep.birkhoff[idx] - rep.space[idx]));
  }
  return rep;
}

}  // namespace tonelli
