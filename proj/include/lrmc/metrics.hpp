#ifndef LRMC_METRICS_HPP
#define LRMC_METRICS_HPP

#include "lrmc/data.hpp"

namespace lrmc {

inline constexpr double kSuccessThreshold = 1e-2;

// ||X - X_hat||_F / ||X||_F. Throws ValidationError on a zero-norm truth or
// mismatched shapes.
double relative_error(const Matrix& x_true, const Matrix& x_hat);
// relative_error < 1e-2.
bool success(const Matrix& x_true, const Matrix& x_hat);

// Fraction of evaluated entries whose estimate, rounded half away from
// zero, differs from the (integer) truth.
double allelic_error_rate(const Matrix& x_true, const Matrix& x_hat,
                          const Mask& eval_mask);

// sum |x - x_hat| / ((r_max - r_min) |S|) over the evaluated set S.
double nmae(const Matrix& x_true, const Matrix& x_hat, const Mask& eval_mask,
            double r_min, double r_max);

// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Matrix& x_true, const Matrix& x_hat, double peak = 255.0);

// Mean SSIM over all 8x8 windows at stride 1 (uniform weights, population
// statistics, C1 = (0.01 peak)^2, C2 = (0.03 peak)^2). Images smaller than
// 8 pixels along an axis use a single window spanning that axis.
double ssim(const Matrix& x_true, const Matrix& x_hat, double peak = 255.0);

}  // namespace lrmc

#endif  // LRMC_METRICS_HPP
