#ifndef LRMC_SRC_VB_COMMON_HPP
#define LRMC_SRC_VB_COMMON_HPP

#include <chrono>
#include <utility>

#include "lrmc/vb_exact.hpp"

namespace lrmc::detail {

// <Sigma> = I, <gamma> = 1 / var(observed values) (clamped to the cap),
// <X> = Y * Omega, zero variances.
PosteriorState initial_state(const ObservedMatrix& observed,
                             const HyperParams& hyper,
                             const SolverConfig& config);

// Given fresh x_mean, x_var and col_cov_sum: forms <XX^T>, updates q_Sigma
// and q_gamma, and refreshes the cached moments. Returns the q_Sigma update
// so callers can reuse its eigendecomposition.
SigmaUpdate finish_sweep(PosteriorState& state, const ObservedMatrix& observed,
                         const HyperParams& hyper, const ScaleMatrix& scale,
                         const SolverConfig& config);

void check_solver_input(const ObservedMatrix& observed,
                        const HyperParams& hyper, const SolverConfig& config);

// Outer loop shared by both backends. `Solver` exposes sweep() and state().
template <typename Solver>
SolveResult drive(const ObservedMatrix& observed, const HyperParams& hyper,
                  const SolverConfig& config) {
  check_solver_input(observed, hyper, config);
  const bool transpose = observed.rows() > observed.cols();
  const ObservedMatrix flipped =
      transpose ? observed.transposed() : ObservedMatrix();
  const ObservedMatrix& problem = transpose ? flipped : observed;

  Solver solver(problem, hyper, config);
  SolveResult result;
  result.transposed = transpose;
  Matrix previous = solver.state().x_mean;
  for (int it = 0; it < config.max_outer_iters; ++it) {
    const auto start = std::chrono::steady_clock::now();
    solver.sweep();
    const auto stop = std::chrono::steady_clock::now();
    result.iteration_seconds.push_back(
        std::chrono::duration<double>(stop - start).count());
    result.iterations = it + 1;

    const Matrix& current = solver.state().x_mean;
    const double base = previous.norm();
    const double change = (current - previous).norm();
    previous = current;
    if (change == 0.0 || (base > 0.0 && change / base < config.rel_tol)) {
      result.converged = true;
      break;
    }
  }
  result.state = solver.state();
  if (transpose) {
    result.state.x_mean.transposeInPlace();
    result.state.x_var.transposeInPlace();
  }
  return result;
}

}  // namespace lrmc::detail

#endif  // LRMC_SRC_VB_COMMON_HPP
