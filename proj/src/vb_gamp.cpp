#include "lrmc/vb_gamp.hpp"

#include "lrmc/parallel.hpp"
#include "vb_common.hpp"

namespace lrmc {

GampVbSolver::GampVbSolver(const ObservedMatrix& observed,
                           const HyperParams& hyper, const SolverConfig& config)
    : observed_(observed),
      hyper_(hyper),
      config_(config),
      scale_(build_scale_matrix(hyper.w_spec, observed.rows())) {
  detail::check_solver_input(observed, hyper, config);
  state_ = detail::initial_state(observed, hyper, config);
  spectral_ = spectral_decompose(state_.sigma_mean, config.eig_floor);
}

void GampVbSolver::sweep() {
  const Index m = observed_.rows();
  const Index n = observed_.cols();
  const bool warm = config_.warm_start && !columns_.empty();
  std::vector<GampColumnState> next(static_cast<std::size_t>(n));
  Matrix x_mean(m, n);
  Matrix x_var(m, n);

  parallel_chunks(n, config_.threads, [&](int, Index begin, Index end) {
    for (Index j = begin; j < end; ++j) {
      const Vector y = observed_.values().col(j);
      const Vector o = observed_.mask().col(j).cast<double>();
      // Only the means carry over between outer iterations. The message
      // variances restart small and psi_hat restarts at zero.
      std::optional<GampColumnState> start;
      if (warm) {
        start = GampColumnState::initial(y, o);
        start->mu_x = columns_[static_cast<std::size_t>(j)].mu_x;
      }
      try {
        ColumnApproximation approx = approximate_qx_column(
            y, o, spectral_, state_.gamma_mean, start, config_);
        x_mean.col(j) = approx.mu_x;
        x_var.col(j) = approx.phi_x;
        next[static_cast<std::size_t>(j)] = std::move(approx.state);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (column " +
                                 std::to_string(j) + ")",
                             j, e.iteration());
      }
    }
  });

  state_.x_mean = std::move(x_mean);
  state_.x_var = std::move(x_var);
  state_.col_cov_sum = Matrix::Zero(m, m);
  state_.col_cov_sum.diagonal() = state_.x_var.rowwise().sum();
  state_.col_log_det_sum = 0.0;
  const SigmaUpdate sigma =
      detail::finish_sweep(state_, observed_, hyper_, scale_, config_);

  SpectralCache updated = spectral_from_precision(
      sigma.eigenvectors, sigma.eigenvalues, sigma.nu_hat, config_.eig_floor);

  spectral_ = std::move(updated);
  columns_ = std::move(next);
}

SolveResult solve_gamp(const ObservedMatrix& observed, const HyperParams& hyper,
                       const SolverConfig& config) {
  return detail::drive<GampVbSolver>(observed, hyper, config);
}

Index effective_rank(const PosteriorState& posterior, double threshold_ratio) {
  if (posterior.xxT_mean.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(posterior.xxT_mean,
                                            Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) return 0;
  return (ev.array() > threshold_ratio * top).count();
}

}  // namespace lrmc
