#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace woldkit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical knobs shared by every rank decision and acceptance check.
struct ToleranceConfig {
  double rank_tol = 1e-10;       // relative singular-value cutoff
  double residual_tol = 1e-8;    // operator-norm acceptance threshold
  int stabilization_window = 2;  // unchanged-dimension steps to declare convergence
  int max_power = 64;            // budget on operator powers per iteration

  void validate() const;

  // Budget sized for truncated-shift content of the given depth.
  static ToleranceConfig for_depth(int max_depth);
};

enum class Classification { Shift, Unitary, Mixed };
enum class Resolution { Stabilized, BudgetExhausted };

const char* to_string(Classification c);
const char* to_string(Resolution r);

// Dense operator on C^N. Entries are validated to be finite and square.
class Operator {
 public:
  Operator() = default;
  explicit Operator(ComplexMatrix entries);

  static Operator identity(Index n);
  static Operator zero(Index n);

  Index dim() const { return mat_.rows(); }
  const ComplexMatrix& mat() const { return mat_; }
  Operator adjoint() const { return Operator(mat_.adjoint()); }

 private:
  ComplexMatrix mat_;
};

Operator operator*(const Operator& a, const Operator& b);

// Largest singular value; the norm used by every defect in this library.
double spectral_norm(const ComplexMatrix& m);

// ---------------------------------------------------------------------------
// Errors. Iteration-budget exhaustion is a result status, never an exception.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: non-finite entries, dimension mismatches, parse failures.
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured resource cap (ambient dimension) was exceeded.
class CapError : public Error {
 public:
  using Error::Error;
};

// A precondition on otherwise-valid values failed (containment, invariance);
// carries the measured violation.
class DomainError : public Error {
 public:
  DomainError(const std::string& msg, double defect)
      : Error(msg), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_ = 0.0;
};

// Two independent computation routes disagreed beyond tolerance.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& msg, double defect)
      : Error(msg), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_ = 0.0;
};

// A tuple failed the acceptance gate; carries the defect values by name.
class GateError : public Error {
 public:
  GateError(const std::string& msg, std::map<std::string, double> defects)
      : Error(msg), defects_(std::move(defects)) {}
  const std::map<std::string, double>& defects() const { return defects_; }

 private:
  std::map<std::string, double> defects_;
};

// A decomposition's verification checks failed; carries the residual record.
class DecompositionError : public Error {
 public:
  DecompositionError(const std::string& msg,
                     std::map<std::string, double> residuals)
      : Error(msg), residuals_(std::move(residuals)) {}
  const std::map<std::string, double>& residuals() const { return residuals_; }

 private:
  std::map<std::string, double> residuals_;
};

}  // namespace woldkit
