#ifndef LRMC_GAMP_HPP
#define LRMC_GAMP_HPP

#include <optional>

#include "lrmc/common.hpp"
#include "lrmc/solver_config.hpp"

namespace lrmc {

// <Sigma> = U diag(s) U^T with U orthogonal. u_sq holds U elementwise
// squared; u_sq(m, i) = U(m, i)^2 is the weight of coordinate m in output i.
struct SpectralCache {
  Matrix u;
  Vector s;
  Matrix u_sq;
};

// Symmetric eigendecomposition with eigenvalues clamped below at eig_floor.
// Throws ValidationError if sigma_mean is not symmetric to within 1e-10
// relative.
SpectralCache spectral_decompose(const Matrix& sigma_mean, double eig_floor);

// Builds the cache for <Sigma> = nu_hat A^{-1} from the eigenpairs of A.
SpectralCache spectral_from_precision(const Matrix& eigenvectors,
                                      const Vector& eigenvalues, double nu_hat,
                                      double eig_floor);

// Linear-Gaussian surrogate b = U^T x + e, e ~ N(0, S^{-1}), with a
// separable prior on x: N(kappa_m, 1/xi) where pi_m = 1 and flat where
// pi_m = 0. With b = 0, kappa = y_n, pi = o_n and xi = <gamma> its exact
// posterior is q(x_n).
struct SurrogateProblem {
  const SpectralCache* spectral = nullptr;
  Vector b;
  Vector kappa;
  Vector pi;
  double xi = 1.0;
};

// Messages of one GAMP run over a single column. psi_hat and tau_s are
// indexed by eigen-direction, the rest by coordinate.
struct GampColumnState {
  Vector mu_x;
  Vector phi_x;
  Vector r_hat;
  Vector tau_r;
  Vector p_hat;
  Vector tau_p;
  Vector psi_hat;
  Vector tau_s;
  Vector z_hat;

  // mu_x = pi * kappa, phi_x = 1e-5, psi_hat = 0.
  static GampColumnState initial(const Vector& kappa, const Vector& pi);
};

struct ScalarPosterior {
  double mean;
  double var;
};

// Input channel. pi = 1: var = tau_r / (1 + xi tau_r),
// mean = var (xi kappa + r_hat / tau_r). pi = 0: (r_hat, tau_r).
ScalarPosterior g_in(double r_hat, double tau_r, bool pi, double kappa,
                     double xi);

struct OutputMessage {
  double psi;
  double tau_s;
};

// Output channel for b_i ~ N(z_i, 1/s_i): psi = s (b - p_hat) / (1 + s tau_p)
// and tau_s = s / (1 + s tau_p), the negated derivative of psi in p_hat.
OutputMessage g_out(double p_hat, double tau_p, double b, double s);

// Runs `n_iters` GAMP sweeps. `damping` weights the new (mu_x, phi_x,
// psi_hat) against the previous ones. Throws NumericalError naming the
// sweep and coordinate if a message becomes non-finite or a variance
// non-positive.
GampColumnState gamp_iterate(GampColumnState state,
                             const SurrogateProblem& problem, int n_iters,
                             double damping);

struct ColumnApproximation {
  Vector mu_x;
  Vector phi_x;
  GampColumnState state;
};

// Approximate q(x_n) through the surrogate problem, running
// config.inner_gamp_iters sweeps from `warm` when given.
ColumnApproximation approximate_qx_column(
    const Vector& y, const Vector& o, const SpectralCache& spectral,
    double gamma_mean, const std::optional<GampColumnState>& warm,
    const SolverConfig& config);

}  // namespace lrmc

#endif  // LRMC_GAMP_HPP
