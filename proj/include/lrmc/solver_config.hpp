#ifndef LRMC_SOLVER_CONFIG_HPP
#define LRMC_SOLVER_CONFIG_HPP

#include <cstdint>

#include "lrmc/common.hpp"

namespace lrmc {

struct SolverConfig {
  int max_outer_iters = 200;
  // Stop when ||X_k - X_{k-1}||_F / ||X_{k-1}||_F falls below this.
  double rel_tol = 1e-5;
  // Upper bound on <gamma>; noiseless data otherwise drives it to infinity.
  double gamma_cap = 1e12;
  // Added to the diagonal of every column precision before factorizing.
  double cov_jitter = 0.0;
  int inner_gamp_iters = 1;
  // Weight on the new GAMP messages; 1 disables damping.
  double damping = 1.0;
  // Lower clamp on eigenvalues of <Sigma> fed to GAMP.
  double eig_floor = 1e-12;
  // Carry GAMP column states across outer iterations.
  bool warm_start = true;
  // Number of worker threads for column updates; 1 is sequential.
  int threads = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_outer_iters < 1) throw ValidationError("max_outer_iters < 1");
    if (!(rel_tol >= 0.0)) throw ValidationError("rel_tol must be >= 0");
    if (!(gamma_cap > 0.0)) throw ValidationError("gamma_cap must be > 0");
    if (!(cov_jitter >= 0.0)) throw ValidationError("cov_jitter must be >= 0");
    if (inner_gamp_iters < 1) throw ValidationError("inner_gamp_iters < 1");
    if (!(damping > 0.0) || damping > 1.0) {
      throw ValidationError("damping must lie in (0, 1]");
    }
    if (!(eig_floor > 0.0)) throw ValidationError("eig_floor must be > 0");
    if (threads < 1) throw ValidationError("threads must be >= 1");
  }
};

}  // namespace lrmc

#endif  // LRMC_SOLVER_CONFIG_HPP
