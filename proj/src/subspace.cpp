#include "woldkit/subspace.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace woldkit {

namespace detail {

Subspace make_subspace_unchecked(ComplexMatrix frame, bool marginal) {
  Subspace s;
  s.ambient_dim_ = frame.rows();
  s.frame_ = std::move(frame);
  s.marginal_rank_ = marginal;
  return s;
}

}  // namespace detail

namespace {

// Jacobi, not BDC: the divide-and-conquer kernel mishandles tightly
// clustered singular values (projectors have eigenvalue 1 with high
// multiplicity) and can return singular vectors outside the corresponding
// eigenspace. Jacobi is the most accurate choice and every matrix here is
// small.
Eigen::JacobiSVD<ComplexMatrix> thin_svd(const ComplexMatrix& m,
                                         unsigned opts) {
  return Eigen::JacobiSVD<ComplexMatrix>(m, opts);
}

void require_same_ambient(const Subspace& a, const Subspace& b,
                          const char* who) {
  if (a.ambient_dim() != b.ambient_dim()) {
    std::ostringstream os;
    os << who << ": ambient dimensions differ (" << a.ambient_dim() << " vs "
       << b.ambient_dim() << ")";
    throw InputError(os.str());
  }
}

}  // namespace

Subspace orthonormal_above(const ComplexMatrix& columns, double cut) {
  if (!columns.allFinite())
    throw InputError("orthonormal_above: non-finite entries");
  if (columns.cols() == 0) return Subspace::zero(columns.rows());
  auto svd = thin_svd(columns, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) >= cut) ++rank;
  const bool marginal = rank > 0 && rank < sv.size() && sv(rank) > 0.0 &&
                        sv(rank - 1) < 10.0 * sv(rank);
  return detail::make_subspace_unchecked(svd.matrixU().leftCols(rank),
                                         marginal);
}

Subspace Subspace::zero(Index ambient_dim) {
  if (ambient_dim < 0) throw InputError("subspace: negative ambient dimension");
  return detail::make_subspace_unchecked(ComplexMatrix(ambient_dim, 0), false);
}

Subspace Subspace::full(Index ambient_dim) {
  if (ambient_dim < 0) throw InputError("subspace: negative ambient dimension");
  return detail::make_subspace_unchecked(
      ComplexMatrix::Identity(ambient_dim, ambient_dim), false);
}

Subspace Subspace::from_frame(ComplexMatrix frame) {
  if (!frame.allFinite())
    throw InputError("subspace: frame has non-finite entries");
  if (frame.cols() > frame.rows())
    throw InputError("subspace: more columns than ambient dimension");
  if (frame.cols() > 0) {
    const double defect =
        spectral_norm(frame.adjoint() * frame -
                      ComplexMatrix::Identity(frame.cols(), frame.cols()));
    if (defect > 1e-12) {
      std::ostringstream os;
      os << "subspace: columns not orthonormal (defect " << defect << ")";
      throw InputError(os.str());
    }
  }
  return detail::make_subspace_unchecked(std::move(frame), false);
}

RankCut rank_by_gap(const RealVector& singular_values, double rank_tol) {
  RankCut cut;
  const Index n = singular_values.size();
  if (n == 0 || !(singular_values(0) > 0.0)) return cut;
  const double threshold = rank_tol * singular_values(0);
  while (cut.rank < n && singular_values(cut.rank) >= threshold) ++cut.rank;
  if (cut.rank > 0 && cut.rank < n && singular_values(cut.rank) > 0.0 &&
      singular_values(cut.rank - 1) < 10.0 * singular_values(cut.rank))
    cut.marginal = true;
  return cut;
}

Subspace orthonormalize(const ComplexMatrix& columns,
                        const ToleranceConfig& cfg) {
  cfg.validate();
  if (!columns.allFinite())
    throw InputError("orthonormalize: non-finite entries");
  if (columns.cols() == 0) return Subspace::zero(columns.rows());
  auto svd = thin_svd(columns, Eigen::ComputeThinU);
  const RankCut cut = rank_by_gap(svd.singularValues(), cfg.rank_tol);
  return detail::make_subspace_unchecked(svd.matrixU().leftCols(cut.rank),
                                         cut.marginal);
}

Subspace kernel(const ComplexMatrix& t, const ToleranceConfig& cfg) {
  cfg.validate();
  if (!t.allFinite()) throw InputError("kernel: non-finite entries");
  if (t.rows() < t.cols())
    throw InputError("kernel: matrix must have rows >= cols");
  if (t.cols() == 0) return Subspace::zero(0);
  auto svd = thin_svd(t, Eigen::ComputeThinV);
  const RankCut cut = rank_by_gap(svd.singularValues(), cfg.rank_tol);
  // Thin V has t.cols() columns here since rows >= cols; its trailing
  // columns are the near-null right singular directions.
  return detail::make_subspace_unchecked(
      svd.matrixV().rightCols(t.cols() - cut.rank), cut.marginal);
}

Subspace range(const ComplexMatrix& t, const ToleranceConfig& cfg) {
  return orthonormalize(t, cfg);
}

Subspace intersect(const std::vector<Subspace>& spaces,
                   const ToleranceConfig& cfg) {
  cfg.validate();
  if (spaces.empty()) throw InputError("intersect: empty list of subspaces");
  const Index n = spaces.front().ambient_dim();
  bool marginal = false;
  std::vector<const Subspace*> proper;
  for (const Subspace& s : spaces) {
    require_same_ambient(spaces.front(), s, "intersect");
    marginal = marginal || s.marginal_rank();
    if (s.is_zero()) return Subspace::zero(n);
    if (!s.is_full()) proper.push_back(&s);
  }
  if (proper.empty()) return Subspace::full(n);
  if (proper.size() == 1)
    return detail::make_subspace_unchecked(proper.front()->frame(), marginal);

  // x lies in every space iff every complement projector annihilates it,
  // i.e. x is in the kernel of the stack [I-P_1; ...; I-P_k].
  ComplexMatrix stacked(static_cast<Index>(proper.size()) * n, n);
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (size_t i = 0; i < proper.size(); ++i) {
    const ComplexMatrix& q = proper[i]->frame();
    stacked.middleRows(static_cast<Index>(i) * n, n) = eye - q * q.adjoint();
  }
  Subspace result = kernel(stacked, cfg);
  if (marginal)
    result = detail::make_subspace_unchecked(result.frame(), true);
  return result;
}

Subspace orth_complement(const Subspace& s) {
  const Index n = s.ambient_dim();
  if (s.is_zero()) return Subspace::full(n);
  if (s.is_full()) return Subspace::zero(n);
  // The trailing columns of the full Q factor are exactly orthogonal to the
  // leading ones, so the complement has exact dimension N - dim S.
  Eigen::HouseholderQR<ComplexMatrix> qr(s.frame());
  ComplexMatrix q = qr.householderQ();
  return detail::make_subspace_unchecked(q.rightCols(n - s.dim()),
                                         s.marginal_rank());
}

Subspace subspace_minus(const Subspace& s1, const Subspace& s2,
                        const ToleranceConfig& cfg) {
  cfg.validate();
  require_same_ambient(s1, s2, "subspace difference");
  if (s2.is_zero()) return s1;
  const double angle = containment_angle(s2, s1);
  if (angle > cfg.residual_tol) {
    std::ostringstream os;
    os << "subspace difference: subtrahend not contained in minuend "
       << "(containment angle " << angle << ")";
    throw DomainError(os.str(), angle);
  }
  Subspace diff = intersect({s1, orth_complement(s2)}, cfg);
  if (diff.dim() != s1.dim() - s2.dim()) {
    std::ostringstream os;
    os << "subspace difference: dimension " << diff.dim()
       << " does not match " << s1.dim() << " - " << s2.dim();
    throw ConsistencyError(os.str(), static_cast<double>(std::abs(
                                         diff.dim() - s1.dim() + s2.dim())));
  }
  return diff;
}

Operator projector(const Subspace& s) {
  if (s.is_zero())
    return Operator::zero(s.ambient_dim());
  return Operator(s.frame() * s.frame().adjoint());
}

RealVector principal_angles(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b, "principal angles");
  const Index q = std::min(a.dim(), b.dim());
  RealVector angles(q);
  if (q == 0) return angles;

  const ComplexMatrix cross = a.frame().adjoint() * b.frame();
  const RealVector cosines =
      thin_svd(cross, 0).singularValues();  // descending, length q

  // Cosines lose the small angles to cancellation, so recover those from the
  // singular values of the projection of b off a (the sines). The sines of
  // the q smallest angles are the q smallest singular values of (I-P_a)Q_b.
  const ComplexMatrix residual = b.frame() - a.frame() * cross;
  const RealVector sines_desc = thin_svd(residual, 0).singularValues();

  for (Index i = 0; i < q; ++i) {
    const double c = std::min(1.0, std::max(-1.0, cosines(i)));
    // sines ascending: smallest sine pairs with largest cosine
    const double s =
        std::min(1.0, std::max(0.0, sines_desc(sines_desc.size() - 1 - i)));
    angles(i) = (c * c >= 0.5) ? std::asin(s) : std::acos(c);
  }
  // angles currently ascending in i; report nonincreasing
  return angles.reverse();
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b, "max principal angle");
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "max principal angle: dimensions differ (" << a.dim() << " vs "
       << b.dim() << ")";
    throw InputError(os.str());
  }
  if (a.dim() == 0) return 0.0;
  return principal_angles(a, b)(0);
}

double containment_angle(const Subspace& inner, const Subspace& outer) {
  require_same_ambient(inner, outer, "containment angle");
  if (inner.is_zero()) return 0.0;
  if (outer.is_zero()) return std::asin(1.0);
  const ComplexMatrix residual =
      inner.frame() - outer.frame() * (outer.frame().adjoint() * inner.frame());
  return std::asin(std::min(1.0, spectral_norm(residual)));
}

double direct_sum_residual(const std::vector<Subspace>& spaces,
                           bool check_completeness) {
  if (spaces.empty())
    throw InputError("direct sum residual: empty list of subspaces");
  double worst = 0.0;
  Index total = 0;
  for (size_t i = 0; i < spaces.size(); ++i) {
    require_same_ambient(spaces.front(), spaces[i], "direct sum residual");
    total += spaces[i].dim();
    for (size_t j = i + 1; j < spaces.size(); ++j) {
      if (spaces[i].is_zero() || spaces[j].is_zero()) continue;
      worst = std::max(
          worst, spectral_norm(spaces[i].frame().adjoint() * spaces[j].frame()));
    }
  }
  if (check_completeness)
    worst += static_cast<double>(
        std::abs(total - spaces.front().ambient_dim()));
  return worst;
}

FrameAccumulator::FrameAccumulator(Index ambient_dim)
    : frame_(ambient_dim, 0) {
  if (ambient_dim < 0)
    throw InputError("frame accumulator: negative ambient dimension");
}

Index FrameAccumulator::add(const ComplexMatrix& columns,
                            const ToleranceConfig& cfg) {
  if (columns.rows() != frame_.rows())
    throw InputError("frame accumulator: ambient dimension mismatch");
  Subspace incoming = orthonormalize(columns, cfg);
  marginal_ = marginal_ || incoming.marginal_rank();
  if (incoming.dim() == 0) return 0;
  if (frame_.cols() == 0) {
    frame_ = incoming.frame();
    return frame_.cols();
  }

  worst_cross_ = std::max(
      worst_cross_, spectral_norm(frame_.adjoint() * incoming.frame()));

  // Two rounds of classical Gram-Schmidt against the accumulated frame,
  // re-orthonormalizing in between, keep the purge stable even when the
  // incoming block leans heavily on the existing span. The incoming columns
  // are unit vectors, so the first cut is absolute at rank_tol (sines of
  // angles to the span); after one clean purge a genuine new direction has
  // residual norm near one, so the second cut at 1/2 removes only the
  // renormalized-noise vectors the first pass can amplify.
  ComplexMatrix y = incoming.frame();
  y -= frame_ * (frame_.adjoint() * y);
  Subspace pass1 = orthonormal_above(y, cfg.rank_tol);
  marginal_ = marginal_ || pass1.marginal_rank();
  if (pass1.dim() == 0) return 0;
  y = pass1.frame();
  y -= frame_ * (frame_.adjoint() * y);
  Subspace pass2 = orthonormal_above(y, 0.5);
  marginal_ = marginal_ || pass2.marginal_rank();
  if (pass2.dim() == 0) return 0;

  const Index appended = pass2.dim();
  frame_.conservativeResize(Eigen::NoChange, frame_.cols() + appended);
  frame_.rightCols(appended) = pass2.frame();
  return appended;
}

Subspace FrameAccumulator::take() {
  return detail::make_subspace_unchecked(std::move(frame_), marginal_);
}

}  // namespace woldkit
