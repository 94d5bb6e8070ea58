#ifndef LRMC_VB_EXACT_HPP
#define LRMC_VB_EXACT_HPP

#include <vector>

#include "lrmc/data.hpp"
#include "lrmc/model.hpp"
#include "lrmc/solver_config.hpp"

namespace lrmc {

// Variational posterior q(X) q(Sigma) q(gamma).
//
//   q(x_n)   = N(mu_n, Q_n)           columns of x_mean; x_var holds diag(Q_n)
//   q(Sigma) = Wishart(W_hat, nu_hat) sigma_mean = nu_hat W_hat
//   q(gamma) = Gamma(c, d)            gamma_mean = c / d
//
// The GAMP backend only produces marginal variances, so col_cov_sum is then
// sum_n diag(phi_n) instead of sum_n Q_n.
struct PosteriorState {
  Matrix x_mean;
  Matrix x_var;
  Matrix col_cov_sum;
  // sum_n log|Q_n|; exact backend only (0 otherwise).
  double col_log_det_sum = 0.0;
  Matrix sigma_w_hat;
  double sigma_nu_hat = 0.0;
  double gamma_c = 0.0;
  double gamma_d = 0.0;
  Matrix sigma_mean;
  double gamma_mean = 0.0;
  Matrix xxT_mean;
};

struct SolveResult {
  PosteriorState state;
  int iterations = 0;
  bool converged = false;
  // Wall-clock seconds of each outer iteration.
  std::vector<double> iteration_seconds;
  // The problem had more rows than columns and was solved on its transpose.
  // x_mean and x_var are reported in the caller's orientation; the
  // Sigma-related fields refer to the transposed problem.
  bool transposed = false;
};

struct ColumnPosterior {
  Vector mu;
  Matrix q;
  double log_det_q = 0.0;
};

// Q = (gamma O + Sigma)^{-1}, mu = gamma Q O y with O = diag(o). Entries of
// y where o is 0 never enter. Throws NumericalError carrying `column` if the
// precision cannot be factorized.
ColumnPosterior update_qx_column(const Vector& y, const Vector& o,
                                 const Matrix& sigma_mean, double gamma_mean,
                                 double jitter = 0.0, Index column = -1);

struct SigmaUpdate {
  Matrix w_hat;
  double nu_hat = 0.0;
  // Eigenpairs of W^{-1} + <XX^T> = W_hat^{-1}, ascending.
  Matrix eigenvectors;
  Vector eigenvalues;
};

// W_hat = (W^{-1} + <XX^T>)^{-1}, nu_hat = nu + N. The inverse goes through
// a symmetric eigendecomposition with eigenvalues clamped below at the
// smallest eigenvalue of W^{-1}, which bounds them in exact arithmetic.
SigmaUpdate update_qsigma(const Matrix& xxT_mean, const ScaleMatrix& w,
                          double nu, Index n_cols);

struct GammaUpdate {
  double c = 0.0;
  double d = 0.0;
};

// c = L/2 + a, d = b + 1/2 sum_{observed} (y^2 - 2 y <x> + <x^2>) with
// <x^2> = <x>^2 + x_var. Throws ValidationError when nothing is observed.
GammaUpdate update_qgamma(const ObservedMatrix& observed, const Matrix& x_mean,
                          const Matrix& x_var, double a, double b);

// <X><X>^T + sum_n Q_n.
Matrix accumulate_xxT(const Matrix& x_mean, const std::vector<Matrix>& covs);
// <X><X>^T + sum_n diag(var_n), var holding one variance column per column.
Matrix accumulate_xxT(const Matrix& x_mean, const Matrix& var);

// Coordinate-ascent VB with exact Gaussian column posteriors. Works on the
// problem as given (no transposition); see solve_exact for the driver.
class ExactVbSolver {
 public:
  ExactVbSolver(const ObservedMatrix& observed, const HyperParams& hyper,
                const SolverConfig& config);

  // One pass q_x (all columns) -> q_Sigma -> q_gamma.
  void sweep();

  const PosteriorState& state() const { return state_; }
  const ScaleMatrix& scale() const { return scale_; }

  // Evidence lower bound of the current factors, up to an additive
  // constant that depends only on (M, N, L, nu, W, a, b). Meaningful only
  // after at least one sweep.
  double elbo() const;

 private:
  const ObservedMatrix& observed_;
  HyperParams hyper_;
  SolverConfig config_;
  ScaleMatrix scale_;
  PosteriorState state_;
  int sweeps_ = 0;
};

SolveResult solve_exact(const ObservedMatrix& observed,
                        const HyperParams& hyper, const SolverConfig& config);

}  // namespace lrmc

#endif  // LRMC_VB_EXACT_HPP
