#include "lrmc/model.hpp"

#include <cmath>
#include <type_traits>

namespace lrmc {
namespace {

// Copies the lower triangle onto the upper one so that A == A^T bitwise.
void mirror_lower(Matrix& a) {
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
}

Matrix second_order_difference(Index m) {
  Matrix f = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    f(i, i) = -2.0;
    if (i + 1 < m) {
      f(i, i + 1) = 1.0;
      f(i + 1, i) = 1.0;
    }
  }
  Matrix w = f.transpose() * f;
  mirror_lower(w);
  return w;
}

Matrix graph_laplacian(Index m, double theta, double eps_hat) {
  Matrix adjacency(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double d = static_cast<double>(i - j);
      adjacency(i, j) = std::exp(-(d * d) / (theta * theta));
    }
  }
  Matrix w = -adjacency;
  w.diagonal() += adjacency.rowwise().sum();
  w.diagonal().array() += eps_hat;
  mirror_lower(w);
  return w;
}

}  // namespace

std::string variant_name(const WMatrixSpec& spec) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScaledIdentity>) {
          return "identity";
        } else if constexpr (std::is_same_v<T, SecondOrderDifference>) {
          return "difference";
        } else {
          return "laplacian";
        }
      },
      spec);
}

void HyperParams::validate() const {
  if (!(a > 0.0)) throw ValidationError("hyperparameter a must be > 0");
  if (!(b > 0.0)) throw ValidationError("hyperparameter b must be > 0");
  if (!(nu > 0.0)) throw ValidationError("hyperparameter nu must be > 0");
  if (const auto* id = std::get_if<ScaledIdentity>(&w_spec)) {
    if (!(id->scale > 0.0)) {
      throw ValidationError("identity scale must be > 0");
    }
  } else if (const auto* lap = std::get_if<GraphLaplacian>(&w_spec)) {
    if (!(lap->theta > 0.0) || !(lap->eps_hat > 0.0)) {
      throw ValidationError("laplacian theta and eps_hat must be > 0");
    }
  }
}

ScaleMatrix::ScaleMatrix(Matrix w, const std::string& label)
    : w_(std::move(w)) {
  if (w_.rows() != w_.cols() || w_.rows() == 0) {
    throw ValidationError("scale matrix (" + label + ") must be square");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(w_);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
    throw ValidationError("scale matrix (" + label +
                          ") is not positive definite");
  }
  const Matrix& v = eig.eigenvectors();
  const Vector inv = eig.eigenvalues().cwiseInverse();
  w_inv_ = v * inv.asDiagonal() * v.transpose();
  mirror_lower(w_inv_);
  log_det_w_inv_ = -eig.eigenvalues().array().log().sum();
  w_inv_min_eig_ = 1.0 / eig.eigenvalues().maxCoeff();
}

ScaleMatrix build_scale_matrix(const WMatrixSpec& spec, Index m) {
  if (m < 2) throw ValidationError("scale matrix dimension must be >= 2");
  const std::string label = variant_name(spec);
  if (const auto* id = std::get_if<ScaledIdentity>(&spec)) {
    if (!(id->scale > 0.0)) throw ValidationError("identity scale must be > 0");
    return ScaleMatrix(id->scale * Matrix::Identity(m, m), label);
  }
  if (std::holds_alternative<SecondOrderDifference>(spec)) {
    return ScaleMatrix(second_order_difference(m), label);
  }
  const auto& lap = std::get<GraphLaplacian>(spec);
  if (!(lap.theta > 0.0) || !(lap.eps_hat > 0.0)) {
    throw ValidationError("laplacian theta and eps_hat must be > 0");
  }
  return ScaleMatrix(graph_laplacian(m, lap.theta, lap.eps_hat), label);
}

double log_det_spd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  Eigen::LDLT<Matrix> ldlt(a);
  const Vector d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 0.0)) {
    throw NumericalError("log-determinant of a non-positive-definite matrix");
  }
  return d.array().log().sum();
}

double log_marginal_prior(const Matrix& x, const ScaleMatrix& w, double nu) {
  if (x.rows() != w.dim()) {
    throw ValidationError("log_marginal_prior: X rows must match W");
  }
  Matrix gram = w.w_inv();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  mirror_lower(gram);
  const double n = static_cast<double>(x.cols());
  return -0.5 * (nu + n) * log_det_spd(gram);
}

double determinant_identity_residual(const Matrix& x, const ScaleMatrix& w) {
  if (x.rows() != w.dim()) {
    throw ValidationError("determinant identity: X rows must match W");
  }
  Matrix lhs = w.w_inv();
  lhs.selfadjointView<Eigen::Lower>().rankUpdate(x);
  mirror_lower(lhs);

  Matrix rhs = x.transpose() * w.w() * x;
  rhs.diagonal().array() += 1.0;
  mirror_lower(rhs);

  return log_det_spd(lhs) - (log_det_spd(w.w_inv()) + log_det_spd(rhs));
}

}  // namespace lrmc
