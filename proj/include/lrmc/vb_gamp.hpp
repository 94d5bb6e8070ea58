#ifndef LRMC_VB_GAMP_HPP
#define LRMC_VB_GAMP_HPP

#include <vector>

#include "lrmc/gamp.hpp"
#include "lrmc/vb_exact.hpp"

namespace lrmc {

// VB with the column posteriors approximated by GAMP on the surrogate
// problem. One eigendecomposition of <Sigma> per outer iteration, then
// O(M^2) work per column and GAMP sweep.
class GampVbSolver {
 public:
  GampVbSolver(const ObservedMatrix& observed, const HyperParams& hyper,
               const SolverConfig& config);

  void sweep();

  const PosteriorState& state() const { return state_; }
  const SpectralCache& spectral() const { return spectral_; }
  const std::vector<GampColumnState>& column_states() const { return columns_; }

 private:
  const ObservedMatrix& observed_;
  HyperParams hyper_;
  SolverConfig config_;
  ScaleMatrix scale_;
  PosteriorState state_;
  SpectralCache spectral_;
  std::vector<GampColumnState> columns_;
};

SolveResult solve_gamp(const ObservedMatrix& observed, const HyperParams& hyper,
                       const SolverConfig& config);

// Number of eigenvalues of <XX^T> above threshold_ratio times the largest.
Index effective_rank(const PosteriorState& posterior,
                     double threshold_ratio = 1e-3);

}  // namespace lrmc

#endif  // LRMC_VB_GAMP_HPP
