#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lrmc/metrics.hpp"
#include "oracles.hpp"

using namespace lrmc;

namespace {

Mask single(Index rows, Index cols, Index i, Index j) {
  Mask m = Mask::Zero(rows, cols);
  m(i, j) = 1;
  return m;
}

Matrix checkerboard(Index n, Index cell) {
  Matrix img(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      img(i, j) = ((i / cell + j / cell) % 2) ? 230.0 : 20.0;
  return img;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("relative error and success") {
  std::mt19937_64 rng(1);
  const Matrix x = oracle::gaussian_matrix(5, 7, rng);
  CHECK(relative_error(x, x) == 0.0);
  CHECK(success(x, x));
  CHECK(relative_error(x, Matrix::Zero(5, 7)) == doctest::Approx(1.0));
  CHECK_FALSE(success(x, Matrix::Zero(5, 7)));
  CHECK(relative_error(x, 1.005 * x) == doctest::Approx(0.005).epsilon(1e-10));
  CHECK(success(x, 1.005 * x));
  CHECK_FALSE(success(x, 1.0100001 * x));
  CHECK(kSuccessThreshold == 1e-2);
  CHECK_THROWS_AS(relative_error(Matrix::Zero(2, 2), x.topLeftCorner(2, 2)),
                  ValidationError);
  CHECK_THROWS_AS(relative_error(x, Matrix::Zero(5, 6)), ValidationError);
}

TEST_CASE("relative error against an elementwise recomputation") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix x = oracle::gaussian_matrix(6, 9, rng);
    const Matrix d = oracle::gaussian_matrix(6, 9, rng);
    const double e1 = relative_error(x, x + d);
    CHECK(e1 == doctest::Approx(oracle::relative_error(x, x + d)).epsilon(1e-13));
    CHECK(relative_error(x, x + 2.0 * d) == doctest::Approx(2.0 * e1).epsilon(1e-13));
  }
}

TEST_CASE("allelic error rate") {
  Matrix truth(1, 1);
  truth << 1;
  Matrix est(1, 1);
  const Mask m = Mask::Ones(1, 1);
  est << 1.4;
  CHECK(allelic_error_rate(truth, est, m) == 0.0);
  est << 1.6;
  CHECK(allelic_error_rate(truth, est, m) == 1.0);
  est << 0.5;  // half rounds away from zero
  CHECK(allelic_error_rate(truth, est, m) == 0.0);

  Matrix t2(2, 3);
  t2 << 0, 1, 2, 2, 1, 0;
  CHECK(allelic_error_rate(t2, t2, Mask::Ones(2, 3)) == 0.0);
  Matrix e2 = t2;
  e2(0, 0) = 0.7;
  CHECK(allelic_error_rate(t2, e2, Mask::Ones(2, 3)) == doctest::Approx(1.0 / 6));
  CHECK_THROWS_AS(allelic_error_rate(t2, e2, Mask::Zero(2, 3)), ValidationError);
}

TEST_CASE("nmae") {
  Matrix truth(1, 1);
  truth << 5;
  Matrix est(1, 1);
  est << 1;
  CHECK(nmae(truth, est, Mask::Ones(1, 1), 1, 5) == doctest::Approx(1.0));
  CHECK(nmae(truth, truth, Mask::Ones(1, 1), 1, 5) == 0.0);

  const Matrix t10 = Matrix::Constant(2, 5, 3.0);
  const Matrix e10 = t10.array() + 0.4;
  CHECK(nmae(t10, e10, Mask::Ones(2, 5), 1, 5) == doctest::Approx(0.1));
  CHECK_THROWS_AS(nmae(t10, e10, Mask::Zero(2, 5), 1, 5), ValidationError);
  CHECK_THROWS_AS(nmae(t10, e10, Mask::Ones(2, 5), 5, 5), ValidationError);
}

TEST_CASE("masked metrics ignore entries outside the mask") {
  std::mt19937_64 rng(9);
  Matrix truth = (oracle::gaussian_matrix(4, 4, rng).array().abs() * 2).round();
  Matrix est = truth + 0.3 * oracle::gaussian_matrix(4, 4, rng);
  const Mask m = single(4, 4, 2, 1);
  const double a = allelic_error_rate(truth, est, m);
  const double n = nmae(truth, est, m, 0, 4);
  Matrix est2 = est;
  est2(0, 0) += 50;
  est2(3, 3) -= 7;
  CHECK(allelic_error_rate(truth, est2, m) == a);
  CHECK(nmae(truth, est2, m, 0, 4) == n);
}

TEST_CASE("psnr") {
  const Matrix img = checkerboard(16, 4);
  CHECK(psnr(img, img) == std::numeric_limits<double>::infinity());
  const Matrix off = img.array() + 16.0;
  CHECK(psnr(img, off) == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 256.0)));
  CHECK(psnr(img, off) == doctest::Approx(24.05).epsilon(1e-3));
  double last = psnr(img, off);
  for (double e : {20.0, 40.0, 80.0}) {
    const double p = psnr(img, img.array() + e);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("ssim") {
  const Matrix img = checkerboard(24, 3);
  CHECK(ssim(img, img) == doctest::Approx(1.0));
  const Matrix inverted = 255.0 - img.array();
  const double s = ssim(img, inverted);
  CHECK(s < 0.0);
  CHECK(s >= -1.0);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = (oracle::gaussian_matrix(12, 10, rng).array() * 40 + 128);
    const Matrix b = (oracle::gaussian_matrix(12, 10, rng).array() * 40 + 128);
    const double v = ssim(a, b);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  // Smaller than one window along an axis.
  const Matrix tiny = checkerboard(5, 1);
  CHECK(ssim(tiny, tiny) == doctest::Approx(1.0));
}

}
