#include "lrmc/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lrmc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on commas, tabs and spaces; empty fields between repeated
// whitespace are dropped.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto next = line.find_first_of(", \t", pos);
    const auto end = next == std::string_view::npos ? line.size() : next;
    const auto field = trim(line.substr(pos, end - pos));
    if (!field.empty()) fields.push_back(field);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_index(std::string_view s, long long& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::ifstream open_input(const std::filesystem::path& path,
                         std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path,
                          std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// Shortest round-trip representation.
std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

ObservedMatrix::ObservedMatrix(Matrix values, Mask mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    throw ValidationError("values and mask shapes differ");
  }
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      const auto bit = mask_(i, j);
      if (bit > 1) throw ValidationError("mask entries must be 0 or 1");
      if (bit == 0) {
        values_(i, j) = 0.0;
      } else {
        if (!std::isfinite(values_(i, j))) {
          throw ValidationError("non-finite observed value at (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ")");
        }
        ++observed_count_;
      }
    }
  }
}

ObservedMatrix ObservedMatrix::transposed() const {
  return ObservedMatrix(values_.transpose(), mask_.transpose());
}

Index fraction_count(double fraction, Index total) {
  return static_cast<Index>(
      std::floor(fraction * static_cast<double>(total) + 1e-9));
}

Mask sample_mask(Index rows, Index cols, Index count, std::uint64_t seed) {
  const Index total = rows * cols;
  if (count < 0 || count > total) {
    throw ValidationError("sample count out of range");
  }
  std::vector<Index> cells(static_cast<std::size_t>(total));
  std::iota(cells.begin(), cells.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `count` cells become the sample.
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(cells[i], cells[pick(rng)]);
  }
  Mask mask = Mask::Zero(rows, cols);
  for (Index i = 0; i < count; ++i) {
    mask(cells[i] % rows, cells[i] / rows) = 1;
  }
  return mask;
}

SyntheticInstance generate_synthetic(Index m, Index n, Index k, double rho,
                                     double noise_std, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ValidationError("dimensions must be positive");
  if (k < 1 || k > std::min(m, n)) {
    throw ValidationError("rank must satisfy 1 <= k <= min(m, n)");
  }
  if (!(rho > 0.0) || rho > 1.0) {
    throw ValidationError("sampling ratio must lie in (0, 1]");
  }
  if (!(noise_std >= 0.0)) throw ValidationError("noise_std must be >= 0");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Index r, Index c) {
    Matrix out(r, c);
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < r; ++i) out(i, j) = normal(rng);
    }
    return out;
  };
  const Matrix a = draw(m, k);
  const Matrix b = draw(n, k);

  SyntheticInstance inst;
  inst.x_true = a * b.transpose();
  inst.rank = k;
  inst.sampling_ratio = rho;
  inst.noise_std = noise_std;
  inst.seed = seed;

  const Mask mask = sample_mask(m, n, fraction_count(rho, m * n), rng());
  Matrix values = inst.x_true;
  if (noise_std > 0.0) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < m; ++i) {
        if (mask(i, j)) values(i, j) += noise_std * normal(rng);
      }
    }
  }
  inst.observed = ObservedMatrix(std::move(values), mask);
  return inst;
}

ObservedMatrix load_masked_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  long long rows = -1;
  long long cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::string header(t);
    if (std::sscanf(header.c_str(), "# rows=%lld cols=%lld", &rows, &cols) !=
        2) {
      throw ValidationError(location(path, line_no) +
                            ": expected header '# rows=M cols=N'");
    }
    break;
  }
  if (rows < 1 || cols < 1) {
    throw ValidationError(path.string() + ": missing or invalid shape header");
  }

  Matrix values = Matrix::Zero(rows, cols);
  Mask mask = Mask::Zero(rows, cols);
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == "row,col,value") continue;
    const auto fields = split_fields(t);
    long long r = 0;
    long long c = 0;
    double v = 0.0;
    if (fields.size() != 3 || !parse_index(fields[0], r) ||
        !parse_index(fields[1], c) || !parse_double(fields[2], v)) {
      throw ValidationError(location(path, line_no) +
                            ": expected 'row,col,value'");
    }
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ValidationError(location(path, line_no) + ": index (" +
                            std::to_string(r) + "," + std::to_string(c) +
                            ") out of range");
    }
    if (!std::isfinite(v)) {
      throw ValidationError(location(path, line_no) + ": non-finite value");
    }
    if (mask(r, c)) {
      throw ValidationError(location(path, line_no) + ": duplicate entry (" +
                            std::to_string(r) + "," + std::to_string(c) + ")");
    }
    mask(r, c) = 1;
    values(r, c) = v;
  }
  return ObservedMatrix(std::move(values), std::move(mask));
}

void save_masked_csv(const std::filesystem::path& path,
                     const ObservedMatrix& observed) {
  auto out = open_output(path);
  out << "# rows=" << observed.rows() << " cols=" << observed.cols() << "\n";
  out << "row,col,value\n";
  for (Index i = 0; i < observed.rows(); ++i) {
    for (Index j = 0; j < observed.cols(); ++j) {
      if (!observed.observed(i, j)) continue;
      out << i << ',' << j << ',' << format_double(observed.values()(i, j))
          << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void save_dense_csv(const std::filesystem::path& path, const Matrix& x) {
  save_masked_csv(path, ObservedMatrix(x, Mask::Ones(x.rows(), x.cols())));
}

ObservedMatrix load_ratings(const std::filesystem::path& path, double r_min,
                            double r_max, int index_base) {
  if (!(r_max > r_min)) throw ValidationError("rating range is empty");
  auto in = open_input(path);
  struct Triple {
    long long user;
    long long item;
    double rating;
  };
  std::vector<Triple> triples;
  std::string line;
  std::size_t line_no = 0;
  long long max_user = -1;
  long long max_item = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    Triple tr{};
    const bool ok = fields.size() >= 3 && parse_index(fields[0], tr.user) &&
                    parse_index(fields[1], tr.item) &&
                    parse_double(fields[2], tr.rating);
    if (!ok) {
      // A leading column-name row is allowed.
      if (triples.empty() && line_no == 1) continue;
      throw ValidationError(location(path, line_no) +
                            ": expected 'user,item,rating'");
    }
    tr.user -= index_base;
    tr.item -= index_base;
    if (tr.user < 0 || tr.item < 0) {
      throw ValidationError(location(path, line_no) + ": negative index");
    }
    if (!std::isfinite(tr.rating)) {
      throw ValidationError(location(path, line_no) + ": non-finite rating");
    }
    if (tr.rating < r_min || tr.rating > r_max) {
      throw ValidationError(location(path, line_no) + ": rating " +
                            format_double(tr.rating) + " outside [" +
                            format_double(r_min) + ", " +
                            format_double(r_max) + "]");
    }
    max_user = std::max(max_user, tr.user);
    max_item = std::max(max_item, tr.item);
    triples.push_back(tr);
  }
  if (triples.empty()) throw ValidationError(path.string() + ": no ratings");

  Matrix values = Matrix::Zero(max_user + 1, max_item + 1);
  Mask mask = Mask::Zero(max_user + 1, max_item + 1);
  for (const auto& tr : triples) {
    if (mask(tr.user, tr.item)) {
      throw ValidationError(path.string() + ": duplicate rating (" +
                            std::to_string(tr.user) + "," +
                            std::to_string(tr.item) + ")");
    }
    mask(tr.user, tr.item) = 1;
    values(tr.user, tr.item) = tr.rating;
  }
  return ObservedMatrix(std::move(values), std::move(mask));
}

std::pair<ObservedMatrix, ObservedMatrix> split_holdout(
    const ObservedMatrix& observed, double train_fraction,
    std::uint64_t seed) {
  if (!(train_fraction >= 0.0) || train_fraction > 1.0) {
    throw ValidationError("train fraction must lie in [0, 1]");
  }
  std::vector<Index> cells;
  cells.reserve(static_cast<std::size_t>(observed.observed_count()));
  for (Index j = 0; j < observed.cols(); ++j) {
    for (Index i = 0; i < observed.rows(); ++i) {
      if (observed.observed(i, j)) cells.push_back(j * observed.rows() + i);
    }
  }
  const Index total = static_cast<Index>(cells.size());
  const Index n_train = fraction_count(train_fraction, total);
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < n_train; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(cells[i], cells[pick(rng)]);
  }
  Mask train = Mask::Zero(observed.rows(), observed.cols());
  for (Index i = 0; i < n_train; ++i) {
    train(cells[i] % observed.rows(), cells[i] / observed.rows()) = 1;
  }
  const Mask test = observed.mask() - train;
  return {ObservedMatrix(observed.values(), train),
          ObservedMatrix(observed.values(), test)};
}

Matrix load_gray_image(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  auto next_token = [&]() {
    std::string token;
    int ch = 0;
    while ((ch = in.get()) != EOF) {
      if (ch == '#') {
        std::string discard;
        std::getline(in, discard);
        if (!token.empty()) break;
        continue;
      }
      if (std::isspace(ch)) {
        if (!token.empty()) break;
        continue;
      }
      token.push_back(static_cast<char>(ch));
    }
    return token;
  };
  if (next_token() != "P5") {
    throw ValidationError(path.string() + ": not a binary graymap (P5)");
  }
  long long width = 0;
  long long height = 0;
  long long maxval = 0;
  if (!parse_index(next_token(), width) || !parse_index(next_token(), height) ||
      !parse_index(next_token(), maxval) || width < 1 || height < 1) {
    throw ValidationError(path.string() + ": malformed graymap header");
  }
  if (maxval < 1 || maxval > 255) {
    throw ValidationError(path.string() + ": only 8-bit graymaps supported");
  }
  std::vector<unsigned char> pixels(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw ValidationError(path.string() + ": truncated pixel data");
  }
  Matrix image(height, width);
  for (long long r = 0; r < height; ++r) {
    for (long long c = 0; c < width; ++c) {
      image(r, c) = pixels[static_cast<std::size_t>(r * width + c)];
    }
  }
  return image;
}

void save_gray_image(const std::filesystem::path& path, const Matrix& image) {
  auto out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> pixels(
      static_cast<std::size_t>(image.rows() * image.cols()));
  for (Index r = 0; r < image.rows(); ++r) {
    for (Index c = 0; c < image.cols(); ++c) {
      const double v = std::isfinite(image(r, c)) ? image(r, c) : 0.0;
      pixels[static_cast<std::size_t>(r * image.cols() + c)] =
          static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ObservedMatrix mask_pixels(const Matrix& image, double keep_fraction,
                           std::uint64_t seed) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw ValidationError("keep fraction must lie in (0, 1]");
  }
  const Index count = fraction_count(keep_fraction, image.size());
  return ObservedMatrix(image,
                        sample_mask(image.rows(), image.cols(), count, seed));
}

}  // namespace lrmc
