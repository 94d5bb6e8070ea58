#ifndef LRMC_MODEL_HPP
#define LRMC_MODEL_HPP

#include <string>
#include <variant>

#include "lrmc/common.hpp"

namespace lrmc {

// Scale matrix variants for the Wishart hyperprior over the column precision.
//
// ScaledIdentity(s):     W = s I. Large s (default 1e10) gives the log-sum
//                        eigenvalue penalty that favours low rank.
// SecondOrderDifference: W = F^T F, F tridiagonal with -2 on the diagonal
//                        and 1 on the first off-diagonals.
// GraphLaplacian:        W = D - A + eps_hat I with a_ij =
//                        exp(-|i-j|^2 / theta^2) and d_ii = sum_j a_ij
//                        (the self weight a_ii = 1 is part of the sum).
struct ScaledIdentity {
  double scale = 1e10;
};
struct SecondOrderDifference {};
struct GraphLaplacian {
  double theta = 1.7320508075688772;  // sqrt(3)
  double eps_hat = 1e-6;
};
using WMatrixSpec =
    std::variant<ScaledIdentity, SecondOrderDifference, GraphLaplacian>;

std::string variant_name(const WMatrixSpec& spec);

struct HyperParams {
  double a = 1e-10;  // Gamma shape of the noise precision prior
  double b = 1e-10;  // Gamma rate
  double nu = 1.0;   // Wishart degrees of freedom; any nu > 0 is accepted
  WMatrixSpec w_spec = ScaledIdentity{};

  // Throws ValidationError on a non-positive parameter.
  void validate() const;
};

// Symmetric positive-definite W together with its inverse.
class ScaleMatrix {
 public:
  // Takes ownership of a symmetric matrix; throws ValidationError if it is
  // not positive definite.
  ScaleMatrix(Matrix w, const std::string& label = "custom");

  const Matrix& w() const { return w_; }
  const Matrix& w_inv() const { return w_inv_; }
  Index dim() const { return w_.rows(); }
  double log_det_w_inv() const { return log_det_w_inv_; }
  double w_inv_min_eigenvalue() const { return w_inv_min_eig_; }

 private:
  Matrix w_;
  Matrix w_inv_;
  double log_det_w_inv_ = 0.0;
  double w_inv_min_eig_ = 0.0;
};

ScaleMatrix build_scale_matrix(const WMatrixSpec& spec, Index m);

// log|A| for symmetric positive-definite A, via a Cholesky factorization
// (falling back to pivoted LDL^T when the plain factorization breaks down
// on a barely definite argument).
double log_det_spd(const Matrix& a);

// -((nu + N) / 2) log|W^{-1} + X X^T|, i.e. the log of the marginal prior
// of X with the precision integrated out, up to an additive constant that
// depends only on (M, N, nu, W).
double log_marginal_prior(const Matrix& x, const ScaleMatrix& w, double nu);

// log|X X^T + W^{-1}| - (log|W^{-1}| + log|I_N + X^T W X|). Zero in exact
// arithmetic; the two sides are evaluated independently.
double determinant_identity_residual(const Matrix& x, const ScaleMatrix& w);

}  // namespace lrmc

#endif  // LRMC_MODEL_HPP
