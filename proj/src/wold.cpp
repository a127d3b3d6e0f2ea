#include "woldkit/wold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace woldkit {

std::map<std::string, double> WoldResiduals::as_map() const {
  std::map<std::string, double> m = {
      {"orthogonality", orthogonality},
      {"shift_reducing", shift_reducing},
      {"unitary_reducing", unitary_reducing},
      {"unitary_isometry", unitary_isometry},
      {"unitary_coisometry", unitary_coisometry},
      {"exhaustion", exhaustion},
  };
  if (cross_check_ran) m["cross_check_angle"] = cross_check_angle;
  return m;
}

double WoldResiduals::worst() const {
  double w = 0.0;
  for (const auto& [name, value] : as_map()) w = std::max(w, value);
  return w;
}

Subspace wandering_subspace(const Operator& v, const ToleranceConfig& cfg) {
  cfg.validate();
  const Index n = v.dim();
  const ComplexMatrix defect =
      ComplexMatrix::Identity(n, n) - v.mat() * v.mat().adjoint();
  // The defect of an (interior) isometry is a projector, so rank it by the
  // absolute unit-scale cut; when W is empty the defect is pure noise and a
  // relative cut would hallucinate directions out of it.
  Subspace by_range = orthonormal_above(defect, 0.5);
  Subspace by_kernel = kernel(v.mat().adjoint(), cfg);
  if (by_range.dim() != by_kernel.dim()) {
    std::ostringstream os;
    os << "wandering subspace: ran(I-VV*) has dimension " << by_range.dim()
       << " but ker V* has dimension " << by_kernel.dim();
    throw ConsistencyError(os.str(),
                           static_cast<double>(std::abs(by_range.dim() -
                                                        by_kernel.dim())));
  }
  if (by_range.dim() > 0) {
    const double angle = max_principal_angle(by_range, by_kernel);
    if (angle > cfg.residual_tol) {
      std::ostringstream os;
      os << "wandering subspace: ran(I-VV*) and ker V* differ by angle "
         << angle;
      throw ConsistencyError(os.str(), angle);
    }
  }
  return by_range;
}

SpanAccumulation shift_part(const Operator& v, const Subspace& wandering,
                            const ToleranceConfig& cfg) {
  cfg.validate();
  if (v.dim() != wandering.ambient_dim())
    throw InputError("shift part: operator/subspace dimension mismatch");
  SpanAccumulation result;
  if (wandering.is_zero()) {
    result.space = Subspace::zero(v.dim());
    return result;
  }

  FrameAccumulator acc(v.dim());
  acc.add(wandering.frame(), cfg);
  result.powers = 1;

  ComplexMatrix current = wandering.frame();
  bool closed = false;
  for (int m = 1; m <= cfg.max_power; ++m) {
    // Absolute cut: surviving images of unit vectors have norm near 1, and
    // once the whole frame dies the product is noise with no top scale.
    Subspace image = orthonormal_above(v.mat() * current, 0.5);
    if (image.dim() == 0) {
      closed = true;
      break;
    }
    if (image.dim() < current.cols()) result.boundary_leakage = true;
    const Index appended = acc.add(image.frame(), cfg);
    if (appended < image.dim()) result.boundary_leakage = true;
    if (appended == 0) {
      // The image collapsed into the span already built: nothing new can
      // appear at higher powers of an (interior) isometry either.
      closed = true;
      break;
    }
    ++result.powers;
    current = image.frame();
  }
  result.resolution =
      closed ? Resolution::Stabilized : Resolution::BudgetExhausted;
  result.orthogonality_defect = acc.worst_cross_norm();
  result.space = acc.take();
  return result;
}

IteratedRange unitary_part_iterative(const Operator& v,
                                     const ToleranceConfig& cfg) {
  cfg.validate();
  IteratedRange result;
  Subspace current = Subspace::full(v.dim());
  Index prev_dim = current.dim();
  int stable = 0;
  for (int m = 1; m <= cfg.max_power; ++m) {
    current = orthonormal_above(v.mat() * current.frame(), 0.5);
    result.steps = m;
    if (current.dim() == 0) {
      // Fixed point: further images of the zero space stay zero.
      result.space = current;
      return result;
    }
    stable = (current.dim() == prev_dim) ? stable + 1 : 0;
    prev_dim = current.dim();
    if (stable >= cfg.stabilization_window) {
      result.space = current;
      return result;
    }
  }
  result.space = current;
  result.resolution = Resolution::BudgetExhausted;
  return result;
}

WoldDecomposition wold_decompose(const Operator& v,
                                 const ToleranceConfig& cfg) {
  cfg.validate();
  if (v.dim() == 0) throw InputError("wold: zero-dimensional operator");

  WoldDecomposition d;
  d.wandering = wandering_subspace(v, cfg);
  d.multiplicity = d.wandering.dim();

  SpanAccumulation span = shift_part(v, d.wandering, cfg);
  d.shift_part = span.space;
  d.unitary_part = orth_complement(d.shift_part);
  d.resolution = span.resolution;

  WoldResiduals& r = d.residuals;
  r.exhaustion = span.orthogonality_defect;
  if (!d.shift_part.is_zero() && !d.unitary_part.is_zero())
    r.orthogonality = spectral_norm(d.shift_part.frame().adjoint() *
                                    d.unitary_part.frame());
  r.shift_reducing = reducing_defect(v, d.shift_part);
  r.unitary_reducing = reducing_defect(v, d.unitary_part);
  if (!d.unitary_part.is_zero()) {
    const ComplexMatrix& q = d.unitary_part.frame();
    const ComplexMatrix restricted = q.adjoint() * v.mat() * q;
    const ComplexMatrix eye =
        ComplexMatrix::Identity(restricted.rows(), restricted.cols());
    r.unitary_isometry =
        spectral_norm(restricted.adjoint() * restricted - eye);
    r.unitary_coisometry =
        spectral_norm(restricted * restricted.adjoint() - eye);
  }

  // Independent route: the unitary part must equal the intersection of the
  // iterated ranges. Only meaningful when that iteration stabilized.
  IteratedRange iterated = unitary_part_iterative(v, cfg);
  if (iterated.resolution == Resolution::Stabilized) {
    r.cross_check_ran = true;
    r.cross_check_angle =
        (iterated.space.dim() == d.unitary_part.dim())
            ? max_principal_angle(d.unitary_part, iterated.space)
            : std::asin(1.0);  // dimension mismatch: maximal disagreement
  }

  if (d.resolution == Resolution::Stabilized && r.worst() > cfg.residual_tol) {
    std::ostringstream os;
    os << "wold decomposition failed verification (worst residual "
       << r.worst() << ")";
    throw DecompositionError(os.str(), r.as_map());
  }

  if (d.unitary_part.is_zero())
    d.classification = Classification::Shift;
  else if (d.shift_part.is_zero())
    d.classification = Classification::Unitary;
  else
    d.classification = Classification::Mixed;
  return d;
}

}  // namespace woldkit
