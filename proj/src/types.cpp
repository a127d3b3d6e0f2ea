#include "woldkit/types.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <sstream>

namespace woldkit {

void ToleranceConfig::validate() const {
  if (!(rank_tol > 0.0) || !(rank_tol < 1.0))
    throw InputError("tolerance config: rank_tol must lie in (0,1)");
  if (!(residual_tol > 0.0) || !(residual_tol < 1.0))
    throw InputError("tolerance config: residual_tol must lie in (0,1)");
  if (stabilization_window < 1)
    throw InputError("tolerance config: stabilization_window must be >= 1");
  if (max_power < 1)
    throw InputError("tolerance config: max_power must be >= 1");
}

ToleranceConfig ToleranceConfig::for_depth(int max_depth) {
  ToleranceConfig cfg;
  cfg.max_power = std::max(8, 4 * max_depth);
  return cfg;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Shift:
      return "shift";
    case Classification::Unitary:
      return "unitary";
    case Classification::Mixed:
      return "mixed";
  }
  return "?";
}

const char* to_string(Resolution r) {
  return r == Resolution::Stabilized ? "stabilized" : "budget-exhausted";
}

Operator::Operator(ComplexMatrix entries) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols()) {
    std::ostringstream os;
    os << "operator: matrix must be square, got " << mat_.rows() << "x"
       << mat_.cols();
    throw InputError(os.str());
  }
  if (!mat_.allFinite())
    throw InputError("operator: matrix has non-finite entries");
}

Operator Operator::identity(Index n) {
  return Operator(ComplexMatrix::Identity(n, n));
}

Operator Operator::zero(Index n) { return Operator(ComplexMatrix::Zero(n, n)); }

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim())
    throw InputError("operator product: dimension mismatch");
  return Operator(a.mat() * b.mat());
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // Jacobi for the same reason as the subspace cuts: BDC misbehaves on
  // clustered spectra, and these matrices are small.
  return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues()(0);
}

}  // namespace woldkit
