#include "lrmc/gamp.hpp"

#include <cmath>
#include <string>

namespace lrmc {
namespace {

void check_messages(const GampColumnState& st, int sweep) {
  auto fail = [&](const char* name, Index m) {
    throw NumericalError(std::string("GAMP message ") + name +
                             " is non-finite or non-positive at sweep " +
                             std::to_string(sweep) + ", coordinate " +
                             std::to_string(m),
                         m, sweep);
  };
  for (Index m = 0; m < st.mu_x.size(); ++m) {
    if (!std::isfinite(st.mu_x[m])) fail("mu_x", m);
    if (!(st.phi_x[m] > 0.0) || !std::isfinite(st.phi_x[m])) fail("phi_x", m);
    if (!(st.tau_r[m] > 0.0) || !std::isfinite(st.tau_r[m])) fail("tau_r", m);
    if (!std::isfinite(st.psi_hat[m])) fail("psi_hat", m);
    if (!(st.tau_p[m] > 0.0)) fail("tau_p", m);
    if (!(st.tau_s[m] > 0.0)) fail("tau_s", m);
  }
}

}  // namespace

SpectralCache spectral_decompose(const Matrix& sigma_mean, double eig_floor) {
  if (sigma_mean.rows() != sigma_mean.cols() || sigma_mean.rows() == 0) {
    throw ValidationError("spectral_decompose: matrix must be square");
  }
  const double scale = std::max(sigma_mean.cwiseAbs().maxCoeff(), 1e-300);
  if ((sigma_mean - sigma_mean.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * scale) {
    throw ValidationError("spectral_decompose: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_mean);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("spectral_decompose: eigendecomposition failed");
  }
  SpectralCache out;
  out.u = eig.eigenvectors();
  out.s = eig.eigenvalues().cwiseMax(eig_floor);
  out.u_sq = out.u.cwiseAbs2();
  return out;
}

SpectralCache spectral_from_precision(const Matrix& eigenvectors,
                                      const Vector& eigenvalues, double nu_hat,
                                      double eig_floor) {
  SpectralCache out;
  out.u = eigenvectors;
  out.s = (nu_hat * eigenvalues.cwiseInverse()).cwiseMax(eig_floor);
  out.u_sq = out.u.cwiseAbs2();
  return out;
}

GampColumnState GampColumnState::initial(const Vector& kappa,
                                         const Vector& pi) {
  const Index m = kappa.size();
  GampColumnState st;
  st.mu_x = pi.cwiseProduct(kappa);
  st.phi_x = Vector::Constant(m, 1e-5);
  st.psi_hat = Vector::Zero(m);
  st.r_hat = st.mu_x;
  st.tau_r = st.phi_x;
  st.p_hat = Vector::Zero(m);
  st.tau_p = st.phi_x;
  st.tau_s = Vector::Ones(m);
  st.z_hat = Vector::Zero(m);
  return st;
}

ScalarPosterior g_in(double r_hat, double tau_r, bool pi, double kappa,
                     double xi) {
  if (!pi) return {r_hat, tau_r};
  const double var = tau_r / (1.0 + xi * tau_r);
  return {var * (xi * kappa + r_hat / tau_r), var};
}

OutputMessage g_out(double p_hat, double tau_p, double b, double s) {
  const double denom = 1.0 + s * tau_p;
  return {s * (b - p_hat) / denom, s / denom};
}

GampColumnState gamp_iterate(GampColumnState st,
                             const SurrogateProblem& problem, int n_iters,
                             double damping) {
  if (problem.spectral == nullptr) {
    throw ValidationError("gamp_iterate: surrogate problem has no spectrum");
  }
  const SpectralCache& sp = *problem.spectral;
  const Index m = sp.s.size();
  if (st.mu_x.size() != m || problem.kappa.size() != m ||
      problem.pi.size() != m || problem.b.size() != m) {
    throw ValidationError("gamp_iterate: inconsistent sizes");
  }
  const bool damped = damping < 1.0;
  for (int it = 0; it < n_iters; ++it) {
    // Output side.
    st.z_hat.noalias() = sp.u.transpose() * st.mu_x;
    st.tau_p.noalias() = sp.u_sq.transpose() * st.phi_x;
    st.p_hat = st.z_hat - st.tau_p.cwiseProduct(st.psi_hat);
    for (Index i = 0; i < m; ++i) {
      const OutputMessage msg =
          g_out(st.p_hat[i], st.tau_p[i], problem.b[i], sp.s[i]);
      st.psi_hat[i] =
          damped ? damping * msg.psi + (1.0 - damping) * st.psi_hat[i]
                 : msg.psi;
      st.tau_s[i] = msg.tau_s;
    }

    // Input side.
    st.tau_r.noalias() = sp.u_sq * st.tau_s;
    st.tau_r = st.tau_r.cwiseInverse();
    st.r_hat.noalias() = sp.u * st.psi_hat;
    st.r_hat = st.mu_x + st.tau_r.cwiseProduct(st.r_hat);
    for (Index k = 0; k < m; ++k) {
      const ScalarPosterior post =
          g_in(st.r_hat[k], st.tau_r[k], problem.pi[k] != 0.0,
               problem.kappa[k], problem.xi);
      if (damped) {
        st.mu_x[k] = damping * post.mean + (1.0 - damping) * st.mu_x[k];
        st.phi_x[k] = damping * post.var + (1.0 - damping) * st.phi_x[k];
      } else {
        st.mu_x[k] = post.mean;
        st.phi_x[k] = post.var;
      }
    }
    check_messages(st, it);
  }
  return st;
}

ColumnApproximation approximate_qx_column(
    const Vector& y, const Vector& o, const SpectralCache& spectral,
    double gamma_mean, const std::optional<GampColumnState>& warm,
    const SolverConfig& config) {
  SurrogateProblem problem;
  problem.spectral = &spectral;
  problem.b = Vector::Zero(y.size());
  problem.kappa = y;
  problem.pi = o;
  problem.xi = gamma_mean;
  GampColumnState start = warm ? *warm : GampColumnState::initial(y, o);
  ColumnApproximation out;
  out.state =
      gamp_iterate(std::move(start), problem, config.inner_gamp_iters,
                   config.damping);
  out.mu_x = out.state.mu_x;
  out.phi_x = out.state.phi_x;
  return out;
}

}  // namespace lrmc
