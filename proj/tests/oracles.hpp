// Reference computations used by the tests. Everything here goes through
// dense LU factorizations and explicit loops, never through the library's
// own solver paths.
#ifndef LRMC_TESTS_ORACLES_HPP
#define LRMC_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// log|det A| from the pivots of a partial-pivot LU.
inline double log_abs_det(const Matrix& a) {
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& f = lu.matrixLU();
  double s = 0.0;
  for (Index i = 0; i < f.rows(); ++i) s += std::log(std::abs(f(i, i)));
  return s;
}

// F with -2 on the diagonal and 1 beside it; returns F^T F.
inline Matrix second_difference_w(Index m) {
  Matrix f = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i == j) f(i, j) = -2.0;
      if (i - j == 1 || j - i == 1) f(i, j) = 1.0;
    }
  }
  Matrix w = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k) w(i, j) += f(k, i) * f(k, j);
  return w;
}

inline Matrix laplacian_w(Index m, double theta, double eps_hat) {
  Matrix w(m, m);
  for (Index i = 0; i < m; ++i) {
    double degree = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double a = std::exp(-double((i - j) * (i - j)) / (theta * theta));
      degree += a;
      w(i, j) = -a;
    }
    w(i, i) += degree + eps_hat;
  }
  return w;
}

struct Gaussian {
  Vector mean;
  Matrix cov;
};

// Exact posterior of x ~ N(0, sigma^{-1}) given y_m = x_m + N(0, 1/xi) at
// the coordinates with o_m = 1.
inline Gaussian column_posterior(const Vector& y, const Vector& o,
                                 const Matrix& sigma, double xi) {
  Matrix precision = sigma;
  for (Index m = 0; m < o.size(); ++m) precision(m, m) += xi * o(m);
  Gaussian g;
  g.cov = precision.fullPivLu().inverse();
  Vector rhs(o.size());
  for (Index m = 0; m < o.size(); ++m) rhs(m) = xi * o(m) * y(m);
  g.mean = g.cov * rhs;
  return g;
}

inline double relative_error(const Matrix& truth, const Matrix& est) {
  double num = 0.0;
  double den = 0.0;
  for (Index j = 0; j < truth.cols(); ++j) {
    for (Index i = 0; i < truth.rows(); ++i) {
      const double d = truth(i, j) - est(i, j);
      num += d * d;
      den += truth(i, j) * truth(i, j);
    }
  }
  return std::sqrt(num / den);
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  return a;
}

// A A^T / m + shift I with Gaussian A.
inline Matrix random_spd(Index m, std::mt19937_64& rng, double shift = 0.1) {
  const Matrix a = gaussian_matrix(m, m, rng);
  Matrix s = a * a.transpose() / double(m);
  s.diagonal().array() += shift;
  return 0.5 * (s + s.transpose());
}

inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  return qr.householderQ() * Matrix::Identity(n, n);
}

}  // namespace oracle

#endif  // LRMC_TESTS_ORACLES_HPP
