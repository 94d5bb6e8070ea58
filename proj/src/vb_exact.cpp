#include "lrmc/vb_exact.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numbers>

#include "lrmc/parallel.hpp"
#include "vb_common.hpp"

namespace lrmc {
namespace {

void symmetrize(Matrix& a) {
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
}

double log_multivariate_gamma(double x, Index m) {
  double out = 0.25 * static_cast<double>(m * (m - 1)) *
               std::log(std::numbers::pi);
  for (Index j = 1; j <= m; ++j) {
    out += std::lgamma(x + 0.5 * static_cast<double>(1 - j));
  }
  return out;
}

}  // namespace

ColumnPosterior update_qx_column(const Vector& y, const Vector& o,
                                 const Matrix& sigma_mean, double gamma_mean,
                                 double jitter, Index column) {
  const Index m = y.size();
  if (o.size() != m || sigma_mean.rows() != m || sigma_mean.cols() != m) {
    throw ValidationError("update_qx_column: inconsistent shapes");
  }
  Matrix precision = sigma_mean;
  precision.diagonal() += gamma_mean * o;
  if (jitter > 0.0) precision.diagonal().array() += jitter;

  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("column precision is not positive definite (column " +
                             std::to_string(column) + ")",
                         column);
  }
  ColumnPosterior out;
  out.q = llt.solve(Matrix::Identity(m, m));
  symmetrize(out.q);
  out.mu = llt.solve((gamma_mean * o.array() * y.array()).matrix());
  out.log_det_q = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return out;
}

SigmaUpdate update_qsigma(const Matrix& xxT_mean, const ScaleMatrix& w,
                          double nu, Index n_cols) {
  if (xxT_mean.rows() != w.dim() || xxT_mean.cols() != w.dim()) {
    throw ValidationError("update_qsigma: <XX^T> does not match W");
  }
  Matrix precision = w.w_inv() + xxT_mean;
  symmetrize(precision);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(precision);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of W^-1 + <XX^T> failed");
  }
  const double floor = w.w_inv_min_eigenvalue();
  SigmaUpdate out;
  out.eigenvectors = eig.eigenvectors();
  out.eigenvalues = eig.eigenvalues().cwiseMax(floor);
  out.w_hat = out.eigenvectors * out.eigenvalues.cwiseInverse().asDiagonal() *
              out.eigenvectors.transpose();
  symmetrize(out.w_hat);
  out.nu_hat = nu + static_cast<double>(n_cols);
  return out;
}

GammaUpdate update_qgamma(const ObservedMatrix& observed, const Matrix& x_mean,
                          const Matrix& x_var, double a, double b) {
  if (observed.observed_count() < 1) {
    throw ValidationError("no observations");
  }
  if (x_mean.rows() != observed.rows() || x_mean.cols() != observed.cols() ||
      x_var.rows() != observed.rows() || x_var.cols() != observed.cols()) {
    throw ValidationError("update_qgamma: inconsistent shapes");
  }
  double residual = 0.0;
  for (Index j = 0; j < observed.cols(); ++j) {
    for (Index i = 0; i < observed.rows(); ++i) {
      if (!observed.observed(i, j)) continue;
      const double y = observed.values()(i, j);
      const double x = x_mean(i, j);
      residual += y * y - 2.0 * y * x + x * x + x_var(i, j);
    }
  }
  GammaUpdate out;
  out.c = 0.5 * static_cast<double>(observed.observed_count()) + a;
  // y^2 - 2yx + x^2 is a square; only rounding can push the sum below zero.
  out.d = b + 0.5 * std::max(residual, 0.0);
  return out;
}

Matrix accumulate_xxT(const Matrix& x_mean, const std::vector<Matrix>& covs) {
  if (static_cast<Index>(covs.size()) != x_mean.cols()) {
    throw ValidationError("accumulate_xxT: one covariance per column expected");
  }
  Matrix out = Matrix::Zero(x_mean.rows(), x_mean.rows());
  out.selfadjointView<Eigen::Lower>().rankUpdate(x_mean);
  for (const auto& q : covs) out += q;
  symmetrize(out);
  return out;
}

Matrix accumulate_xxT(const Matrix& x_mean, const Matrix& var) {
  if (var.rows() != x_mean.rows() || var.cols() != x_mean.cols()) {
    throw ValidationError("accumulate_xxT: variance shape mismatch");
  }
  Matrix out = Matrix::Zero(x_mean.rows(), x_mean.rows());
  out.selfadjointView<Eigen::Lower>().rankUpdate(x_mean);
  symmetrize(out);
  out.diagonal() += var.rowwise().sum();
  return out;
}

namespace detail {

void check_solver_input(const ObservedMatrix& observed,
                        const HyperParams& hyper, const SolverConfig& config) {
  hyper.validate();
  config.validate();
  if (observed.rows() < 2 || observed.cols() < 2) {
    throw ValidationError("matrix must be at least 2 x 2");
  }
  if (observed.observed_count() < 1) throw ValidationError("no observations");
}

PosteriorState initial_state(const ObservedMatrix& observed,
                             const HyperParams& hyper,
                             const SolverConfig& config) {
  const Index m = observed.rows();
  const Index n = observed.cols();
  const double count = static_cast<double>(observed.observed_count());

  PosteriorState s;
  s.x_mean = observed.values();
  s.x_var = Matrix::Zero(m, n);
  s.col_cov_sum = Matrix::Zero(m, m);
  s.sigma_nu_hat = hyper.nu + static_cast<double>(n);
  s.sigma_w_hat = Matrix::Identity(m, m) / s.sigma_nu_hat;
  s.sigma_mean = Matrix::Identity(m, m);

  const double mean = observed.values().sum() / count;
  double var = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (observed.observed(i, j)) {
        const double d = observed.values()(i, j) - mean;
        var += d * d;
      }
    }
  }
  var /= count;
  const double gamma = var > 0.0 ? std::min(1.0 / var, config.gamma_cap) : 1.0;
  s.gamma_c = 0.5 * count + hyper.a;
  s.gamma_d = s.gamma_c / gamma;
  s.gamma_mean = gamma;
  s.xxT_mean = accumulate_xxT(s.x_mean, s.x_var);
  return s;
}

SigmaUpdate finish_sweep(PosteriorState& state, const ObservedMatrix& observed,
                         const HyperParams& hyper, const ScaleMatrix& scale,
                         const SolverConfig& config) {
  state.xxT_mean = Matrix::Zero(state.x_mean.rows(), state.x_mean.rows());
  state.xxT_mean.selfadjointView<Eigen::Lower>().rankUpdate(state.x_mean);
  symmetrize(state.xxT_mean);
  state.xxT_mean += state.col_cov_sum;

  SigmaUpdate sigma =
      update_qsigma(state.xxT_mean, scale, hyper.nu, state.x_mean.cols());
  state.sigma_w_hat = sigma.w_hat;
  state.sigma_nu_hat = sigma.nu_hat;
  state.sigma_mean = sigma.nu_hat * sigma.w_hat;

  const GammaUpdate gamma = update_qgamma(observed, state.x_mean, state.x_var,
                                          hyper.a, hyper.b);
  state.gamma_c = gamma.c;
  // Capping <gamma> moves the rate so that <gamma> = c / d still holds.
  state.gamma_d = std::max(gamma.d, gamma.c / config.gamma_cap);
  state.gamma_mean = state.gamma_c / state.gamma_d;
  return sigma;
}

}  // namespace detail

ExactVbSolver::ExactVbSolver(const ObservedMatrix& observed,
                             const HyperParams& hyper,
                             const SolverConfig& config)
    : observed_(observed),
      hyper_(hyper),
      config_(config),
      scale_(build_scale_matrix(hyper.w_spec, observed.rows())) {
  detail::check_solver_input(observed, hyper, config);
  state_ = detail::initial_state(observed, hyper, config);
}

void ExactVbSolver::sweep() {
  const Index m = observed_.rows();
  const Index n = observed_.cols();
  const int chunks = static_cast<int>(
      std::clamp<Index>(config_.threads, 1, std::max<Index>(n, 1)));
  std::vector<Matrix> cov_sums(static_cast<std::size_t>(chunks),
                               Matrix::Zero(m, m));
  std::vector<double> log_dets(static_cast<std::size_t>(chunks), 0.0);

  Matrix x_mean(m, n);
  Matrix x_var(m, n);
  const Matrix& sigma_mean = state_.sigma_mean;
  const double gamma_mean = state_.gamma_mean;
  parallel_chunks(n, chunks, [&](int chunk, Index begin, Index end) {
    for (Index j = begin; j < end; ++j) {
      const Vector y = observed_.values().col(j);
      const Vector o = observed_.mask().col(j).cast<double>();
      const ColumnPosterior post = update_qx_column(
          y, o, sigma_mean, gamma_mean, config_.cov_jitter, j);
      x_mean.col(j) = post.mu;
      x_var.col(j) = post.q.diagonal();
      cov_sums[static_cast<std::size_t>(chunk)] += post.q;
      log_dets[static_cast<std::size_t>(chunk)] += post.log_det_q;
    }
  });

  state_.x_mean = std::move(x_mean);
  state_.x_var = std::move(x_var);
  state_.col_cov_sum = Matrix::Zero(m, m);
  state_.col_log_det_sum = 0.0;
  for (int c = 0; c < chunks; ++c) {
    state_.col_cov_sum += cov_sums[static_cast<std::size_t>(c)];
    state_.col_log_det_sum += log_dets[static_cast<std::size_t>(c)];
  }
  detail::finish_sweep(state_, observed_, hyper_, scale_, config_);
  ++sweeps_;
}

double ExactVbSolver::elbo() const {
  using boost::math::digamma;
  const auto& s = state_;
  const Index m = observed_.rows();
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(observed_.cols());
  const double ld = static_cast<double>(observed_.observed_count());
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  const double nu = hyper_.nu;
  const double nu_hat = s.sigma_nu_hat;

  const double e_gamma = s.gamma_c / s.gamma_d;
  const double e_log_gamma = digamma(s.gamma_c) - std::log(s.gamma_d);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.sigma_w_hat,
                                            Eigen::EigenvaluesOnly);
  const double log_det_w_hat = eig.eigenvalues().array().log().sum();
  double e_log_det_sigma = md * std::log(2.0) + log_det_w_hat;
  for (Index j = 1; j <= m; ++j) {
    e_log_det_sigma += digamma(0.5 * (nu_hat + 1.0 - static_cast<double>(j)));
  }

  double residual = 0.0;
  for (Index j = 0; j < observed_.cols(); ++j) {
    for (Index i = 0; i < m; ++i) {
      if (!observed_.observed(i, j)) continue;
      const double r = observed_.values()(i, j) - s.x_mean(i, j);
      residual += r * r + s.x_var(i, j);
    }
  }

  const double likelihood =
      0.5 * ld * e_log_gamma - 0.5 * e_gamma * residual - 0.5 * ld * log_2pi;
  const double x_prior = 0.5 * nd * e_log_det_sigma -
                         0.5 * (s.sigma_mean.cwiseProduct(s.xxT_mean)).sum() -
                         0.5 * md * nd * log_2pi;
  // The Wishart prior may be improper (nu <= M - 1); its normalizer is one
  // of the dropped constants.
  const double sigma_prior =
      0.5 * (nu - md - 1.0) * e_log_det_sigma -
      0.5 * (scale_.w_inv().cwiseProduct(s.sigma_mean)).sum() +
      0.5 * nu * scale_.log_det_w_inv();
  const double gamma_prior = (hyper_.a - 1.0) * e_log_gamma -
                             hyper_.b * e_gamma + hyper_.a * std::log(hyper_.b) -
                             std::lgamma(hyper_.a);

  const double x_entropy =
      0.5 * s.col_log_det_sum + 0.5 * md * nd * (1.0 + log_2pi);
  const double log_wishart_norm = -0.5 * nu_hat * log_det_w_hat -
                                  0.5 * nu_hat * md * std::log(2.0) -
                                  log_multivariate_gamma(0.5 * nu_hat, m);
  const double sigma_entropy = -log_wishart_norm -
                               0.5 * (nu_hat - md - 1.0) * e_log_det_sigma +
                               0.5 * nu_hat * md;
  const double gamma_entropy = s.gamma_c - std::log(s.gamma_d) +
                               std::lgamma(s.gamma_c) +
                               (1.0 - s.gamma_c) * digamma(s.gamma_c);

  return likelihood + x_prior + sigma_prior + gamma_prior + x_entropy +
         sigma_entropy + gamma_entropy;
}

SolveResult solve_exact(const ObservedMatrix& observed,
                        const HyperParams& hyper, const SolverConfig& config) {
  return detail::drive<ExactVbSolver>(observed, hyper, config);
}

}  // namespace lrmc
