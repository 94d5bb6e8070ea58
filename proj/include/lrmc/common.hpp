#ifndef LRMC_COMMON_HPP
#define LRMC_COMMON_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Bad arguments, shapes, or file contents.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Loss of definiteness, non-finite messages and similar failures inside a
// solver. `column` / `iteration` are -1 when not applicable.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, Index column = -1,
                          Index iteration = -1)
      : std::runtime_error(what), column_(column), iteration_(iteration) {}

  Index column() const { return column_; }
  Index iteration() const { return iteration_; }

 private:
  Index column_;
  Index iteration_;
};

}  // namespace lrmc

#endif  // LRMC_COMMON_HPP
