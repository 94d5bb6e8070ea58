#ifndef LRMC_DATA_HPP
#define LRMC_DATA_HPP

#include <cstdint>
#include <filesystem>
#include <utility>

#include "lrmc/common.hpp"

namespace lrmc {

using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Observed values plus a binary observation mask. Values at unobserved
// positions are stored as zero and carry no meaning.
class ObservedMatrix {
 public:
  ObservedMatrix() = default;
  // Zeroes `values` wherever `mask` is 0. Throws ValidationError on a shape
  // mismatch, a mask entry other than 0/1, or a non-finite observed value.
  ObservedMatrix(Matrix values, Mask mask);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  const Mask& mask() const { return mask_; }
  bool observed(Index i, Index j) const { return mask_(i, j) != 0; }
  Index observed_count() const { return observed_count_; }

  ObservedMatrix transposed() const;

 private:
  Matrix values_;
  Mask mask_;
  Index observed_count_ = 0;
};

// Mask with exactly `count` ones chosen uniformly without replacement.
Mask sample_mask(Index rows, Index cols, Index count, std::uint64_t seed);

// floor(fraction * total), guarded against representation error just below
// an integer (0.29 * 100 gives 29, not 28).
Index fraction_count(double fraction, Index total);

struct SyntheticInstance {
  Matrix x_true;
  ObservedMatrix observed;
  Index rank = 0;
  double sampling_ratio = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

// X = A B^T with standard normal A (m x k) and B (n x k); floor(rho m n)
// entries observed, each with additive N(0, noise_std^2) noise.
SyntheticInstance generate_synthetic(Index m, Index n, Index k, double rho,
                                     double noise_std, std::uint64_t seed);

// Masked CSV:
//   # rows=M cols=N
//   row,col,value
//   <0-based row>,<0-based col>,<value>
//   ...
ObservedMatrix load_masked_csv(const std::filesystem::path& path);
void save_masked_csv(const std::filesystem::path& path,
                     const ObservedMatrix& observed);
// Writes every entry of a dense matrix in the masked CSV format.
void save_dense_csv(const std::filesystem::path& path, const Matrix& x);

// Ratings as `user,item,rating` triples (0-based by default; comma, tab or
// space separated; trailing fields such as timestamps ignored). The matrix
// is sized by the largest indices.
ObservedMatrix load_ratings(const std::filesystem::path& path, double r_min,
                            double r_max, int index_base = 0);

// Splits the observed set (not the full grid) into floor(train_fraction L)
// training entries and the rest, uniformly at random.
std::pair<ObservedMatrix, ObservedMatrix> split_holdout(
    const ObservedMatrix& observed, double train_fraction, std::uint64_t seed);

// Binary 8-bit portable graymap (P5). Pixel values returned in [0, 255].
Matrix load_gray_image(const std::filesystem::path& path);
// Clamps to [0, 255] and rounds.
void save_gray_image(const std::filesystem::path& path, const Matrix& image);
// Keeps floor(keep_fraction * pixels) pixels chosen uniformly at random.
ObservedMatrix mask_pixels(const Matrix& image, double keep_fraction,
                           std::uint64_t seed);

}  // namespace lrmc

#endif  // LRMC_DATA_HPP
