#include "lrmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrmc {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(what) + ": shapes differ");
  }
}

void require_mask_shape(const Matrix& a, const Mask& mask, const char* what) {
  if (a.rows() != mask.rows() || a.cols() != mask.cols()) {
    throw ValidationError(std::string(what) + ": mask shape differs");
  }
}

}  // namespace

double relative_error(const Matrix& x_true, const Matrix& x_hat) {
  require_same_shape(x_true, x_hat, "relative_error");
  const double base = x_true.norm();
  if (!(base > 0.0)) {
    throw ValidationError("relative_error: truth has zero norm");
  }
  return (x_true - x_hat).norm() / base;
}

bool success(const Matrix& x_true, const Matrix& x_hat) {
  return relative_error(x_true, x_hat) < kSuccessThreshold;
}

double allelic_error_rate(const Matrix& x_true, const Matrix& x_hat,
                          const Mask& eval_mask) {
  require_same_shape(x_true, x_hat, "allelic_error_rate");
  require_mask_shape(x_true, eval_mask, "allelic_error_rate");
  Index total = 0;
  Index wrong = 0;
  for (Index j = 0; j < x_true.cols(); ++j) {
    for (Index i = 0; i < x_true.rows(); ++i) {
      if (!eval_mask(i, j)) continue;
      ++total;
      if (x_true(i, j) != std::round(x_hat(i, j))) ++wrong;
    }
  }
  if (total == 0) throw ValidationError("allelic_error_rate: empty eval set");
  return static_cast<double>(wrong) / static_cast<double>(total);
}

double nmae(const Matrix& x_true, const Matrix& x_hat, const Mask& eval_mask,
            double r_min, double r_max) {
  require_same_shape(x_true, x_hat, "nmae");
  require_mask_shape(x_true, eval_mask, "nmae");
  if (!(r_max > r_min)) throw ValidationError("nmae: r_max must exceed r_min");
  Index total = 0;
  double sum = 0.0;
  for (Index j = 0; j < x_true.cols(); ++j) {
    for (Index i = 0; i < x_true.rows(); ++i) {
      if (!eval_mask(i, j)) continue;
      ++total;
      sum += std::abs(x_true(i, j) - x_hat(i, j));
    }
  }
  if (total == 0) throw ValidationError("nmae: empty eval set");
  return sum / ((r_max - r_min) * static_cast<double>(total));
}

double psnr(const Matrix& x_true, const Matrix& x_hat, double peak) {
  require_same_shape(x_true, x_hat, "psnr");
  const double mse = (x_true - x_hat).squaredNorm() /
                     static_cast<double>(x_true.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Matrix& x_true, const Matrix& x_hat, double peak) {
  require_same_shape(x_true, x_hat, "ssim");
  if (x_true.size() == 0) throw ValidationError("ssim: empty image");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const Index wr = std::min<Index>(8, x_true.rows());
  const Index wc = std::min<Index>(8, x_true.cols());
  const double count = static_cast<double>(wr * wc);

  double total = 0.0;
  Index windows = 0;
  for (Index r = 0; r + wr <= x_true.rows(); ++r) {
    for (Index c = 0; c + wc <= x_true.cols(); ++c) {
      const auto a = x_true.block(r, c, wr, wc).array();
      const auto b = x_hat.block(r, c, wr, wc).array();
      const double mu_a = a.sum() / count;
      const double mu_b = b.sum() / count;
      const double var_a = (a - mu_a).square().sum() / count;
      const double var_b = (b - mu_b).square().sum() / count;
      const double cov = ((a - mu_a) * (b - mu_b)).sum() / count;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace lrmc
