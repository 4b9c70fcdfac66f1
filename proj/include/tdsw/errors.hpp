#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tdsw {

// Operands live on different Hilbert spaces or have inconsistent shapes.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameters outside the documented domain (negative frequencies, bad truncation...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A perturbative denominator (E_l - E_j) + k.w fell below the resonance threshold.
class ParametricResonance : public std::runtime_error {
 public:
  ParametricResonance(const std::string& what, int row, int col,
                      std::vector<int> key, double denominator)
      : std::runtime_error(what),
        row_(row),
        col_(col),
        key_(std::move(key)),
        denominator_(denominator) {}
  int row() const { return row_; }
  int col() const { return col_; }
  const std::vector<int>& key() const { return key_; }
  double denominator() const { return denominator_; }

 private:
  int row_;
  int col_;
  std::vector<int> key_;
  double denominator_;
};

class NoBlindSpot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Floquet state cannot be attributed to a bare product state.
class LabelingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integrator or iterative procedure did not meet its accuracy contract.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what
                                       : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace tdsw
