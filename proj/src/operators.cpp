#include "woldkit/operators.hpp"

#include <algorithm>
#include <sstream>

namespace woldkit {

namespace {

double vec_max(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

double DefectReport::max_isometry() const { return vec_max(isometry_defect); }

double DefectReport::max_interior_isometry() const {
  return vec_max(interior_isometry_defect);
}

std::map<std::string, double> DefectReport::as_map() const {
  return {{"isometry", max_isometry()},
          {"interior_isometry", max_interior_isometry()},
          {"commutation", commutation_defect},
          {"double_commutation", double_commutation_defect}};
}

DefectReport defect_report(const std::vector<Operator>& ops,
                           const Operator& interior_projector) {
  if (ops.empty()) throw InputError("defect report: empty tuple");
  const Index n = ops.front().dim();
  if (interior_projector.dim() != n)
    throw InputError("defect report: interior projector dimension mismatch");
  DefectReport report;
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (const Operator& v : ops) {
    if (v.dim() != n)
      throw InputError("defect report: operators act on different spaces");
    const ComplexMatrix gram_defect = v.mat().adjoint() * v.mat() - eye;
    report.isometry_defect.push_back(spectral_norm(gram_defect));
    report.interior_isometry_defect.push_back(
        spectral_norm(gram_defect * interior_projector.mat()));
  }
  for (size_t i = 0; i < ops.size(); ++i) {
    for (size_t j = i + 1; j < ops.size(); ++j) {
      const ComplexMatrix& a = ops[i].mat();
      const ComplexMatrix& b = ops[j].mat();
      report.commutation_defect =
          std::max(report.commutation_defect, spectral_norm(a * b - b * a));
      report.double_commutation_defect =
          std::max(report.double_commutation_defect,
                   spectral_norm(a * b.adjoint() - b.adjoint() * a));
    }
  }
  return report;
}

IsometryTuple::IsometryTuple(std::vector<Operator> ops)
    : ops_(std::move(ops)) {
  if (ops_.empty()) throw InputError("isometry tuple: empty tuple");
  init(Operator::identity(ops_.front().dim()), false);
}

IsometryTuple::IsometryTuple(std::vector<Operator> ops,
                             Operator interior_projector)
    : ops_(std::move(ops)) {
  if (ops_.empty()) throw InputError("isometry tuple: empty tuple");
  init(std::move(interior_projector), true);
}

void IsometryTuple::init(Operator interior, bool explicit_interior) {
  const Index n = ops_.front().dim();
  if (n == 0) throw InputError("isometry tuple: zero-dimensional operators");
  for (const Operator& v : ops_)
    if (v.dim() != n)
      throw InputError("isometry tuple: operators act on different spaces");
  if (interior.dim() != n)
    throw InputError("isometry tuple: interior projector dimension mismatch");
  const ComplexMatrix& p = interior.mat();
  const double proj_defect = std::max(spectral_norm(p * p - p),
                                      spectral_norm(p - p.adjoint()));
  if (proj_defect > 1e-8) {
    std::ostringstream os;
    os << "isometry tuple: interior projector is not an orthogonal projector "
       << "(defect " << proj_defect << ")";
    throw InputError(os.str());
  }
  interior_ = std::move(interior);
  explicit_interior_ = explicit_interior;
  defects_ = defect_report(ops_, interior_);
}

const Operator& IsometryTuple::op(int i) const {
  if (i < 1 || i > size()) {
    std::ostringstream os;
    os << "isometry tuple: coordinate " << i << " out of range 1.." << size();
    throw InputError(os.str());
  }
  return ops_[static_cast<size_t>(i - 1)];
}

GateResult check_gate(const IsometryTuple& tuple, const ToleranceConfig& cfg,
                      GatePolicy policy) {
  cfg.validate();
  GateResult result;
  result.defects = tuple.defects();
  std::ostringstream reasons;
  const char* sep = "";
  auto flag = [&](const char* what, double value) {
    reasons << sep << what << " defect " << value << " exceeds "
            << cfg.residual_tol;
    sep = "; ";
  };
  if (result.defects.max_interior_isometry() > cfg.residual_tol)
    flag("interior isometry", result.defects.max_interior_isometry());
  if (result.defects.commutation_defect > cfg.residual_tol)
    flag("commutation", result.defects.commutation_defect);
  if (policy == GatePolicy::DoublyCommuting &&
      result.defects.double_commutation_defect > cfg.residual_tol)
    flag("double commutation", result.defects.double_commutation_defect);
  result.reason = reasons.str();
  result.pass = result.reason.empty();
  return result;
}

void require_gate(const IsometryTuple& tuple, const ToleranceConfig& cfg,
                  GatePolicy policy) {
  GateResult gate = check_gate(tuple, cfg, policy);
  if (!gate.pass)
    throw GateError("tuple rejected: " + gate.reason, gate.defects.as_map());
}

Operator restrict_to(const Operator& v, const Subspace& s,
                     const ToleranceConfig& cfg) {
  cfg.validate();
  if (v.dim() != s.ambient_dim())
    throw InputError("restriction: operator/subspace dimension mismatch");
  const ComplexMatrix& q = s.frame();
  const ComplexMatrix image = v.mat() * q;
  const ComplexMatrix compressed = q.adjoint() * image;
  const double defect = spectral_norm(image - q * compressed);
  if (defect > cfg.residual_tol) {
    std::ostringstream os;
    os << "restriction: subspace is not invariant (defect " << defect << ")";
    throw DomainError(os.str(), defect);
  }
  return Operator(compressed);
}

double reducing_defect(const Operator& v, const Subspace& s) {
  if (v.dim() != s.ambient_dim())
    throw InputError("reducing defect: operator/subspace dimension mismatch");
  if (s.is_zero() || s.is_full()) return 0.0;
  const ComplexMatrix& q = s.frame();
  // ||(I-P) V P|| via the frame: (I-P)VP = ((I-P)VQ) Q*, and a co-isometric
  // right factor does not change the spectral norm. Same for the adjoint.
  const ComplexMatrix image = v.mat() * q;
  const double leak_out = spectral_norm(image - q * (q.adjoint() * image));
  const ComplexMatrix adj_image = v.mat().adjoint() * q;
  const double leak_in =
      spectral_norm(adj_image - q * (q.adjoint() * adj_image));
  return std::max(leak_out, leak_in);
}

Subspace kernel(const Operator& t, const ToleranceConfig& cfg) {
  return kernel(t.mat(), cfg);
}

Subspace range(const Operator& t, const ToleranceConfig& cfg) {
  return range(t.mat(), cfg);
}

}  // namespace woldkit
