#pragma once

#include <vector>

#include "woldkit/types.hpp"

namespace woldkit {

class Subspace;

namespace detail {
Subspace make_subspace_unchecked(ComplexMatrix frame, bool marginal);
}

// A closed subspace of C^N held as an orthonormal column frame.
// Zero-dimensional subspaces are ordinary values with an N x 0 frame.
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(Index ambient_dim);
  static Subspace full(Index ambient_dim);
  // Validates that `frame` has orthonormal columns before adopting it.
  static Subspace from_frame(ComplexMatrix frame);

  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return frame_.cols(); }
  const ComplexMatrix& frame() const { return frame_; }
  bool is_zero() const { return frame_.cols() == 0; }
  bool is_full() const { return frame_.cols() == ambient_dim_; }

  // True when the rank decision behind this frame sat near the cutoff
  // (singular-value gap below 10x), so the dimension is suspect.
  bool marginal_rank() const { return marginal_rank_; }

 private:
  friend Subspace detail::make_subspace_unchecked(ComplexMatrix, bool);

  Index ambient_dim_ = 0;
  ComplexMatrix frame_;
  bool marginal_rank_ = false;
};

// Rank decision shared by every SVD-based cut in the library: keep singular
// values >= rank_tol * sigma_max, and flag the cut as marginal when the
// ratio across it is below 10.
struct RankCut {
  Index rank = 0;
  bool marginal = false;
};
RankCut rank_by_gap(const RealVector& singular_values, double rank_tol);

// Column space of `columns` as an orthonormal frame (SVD-based).
Subspace orthonormalize(const ComplexMatrix& columns,
                        const ToleranceConfig& cfg);

// Near-null space {x : ||Tx|| <= rank_tol * ||T||} of a matrix with
// rows >= cols. For the zero matrix this is everything.
Subspace kernel(const ComplexMatrix& t, const ToleranceConfig& cfg);

// Column space of a matrix, rank-truncated by the gap rule.
Subspace range(const ComplexMatrix& t, const ToleranceConfig& cfg);

// Column space keeping only singular values >= cut, an absolute threshold.
// The right rank rule when the input has a natural unit scale: defect
// projectors, products of commuting projectors, and images of orthonormal
// frames under interior isometries all carry meaningful singular values
// near 1, and when nothing survives a relative cut would promote pure
// rounding noise to full rank.
Subspace orthonormal_above(const ComplexMatrix& columns, double cut);

// Intersection of subspaces of a common ambient space, computed as the
// kernel of the stacked complement projectors [I-P_1; ...; I-P_k].
Subspace intersect(const std::vector<Subspace>& spaces,
                   const ToleranceConfig& cfg);

// Orthogonal complement via a full QR of the frame; dimensions are exact.
Subspace orth_complement(const Subspace& s);

// S1 (-) S2 for S2 contained in S1. Throws DomainError when the containment
// angle exceeds residual_tol, and ConsistencyError when the resulting
// dimension is not dim S1 - dim S2.
Subspace subspace_minus(const Subspace& s1, const Subspace& s2,
                        const ToleranceConfig& cfg);

// Orthogonal projector Q Q* onto the subspace.
Operator projector(const Subspace& s);

// Principal angles between two subspaces, nonincreasing, length min(dims).
// Small angles are recovered from sines so values near zero keep full
// precision instead of flooring at sqrt(eps).
RealVector principal_angles(const Subspace& a, const Subspace& b);

// Largest principal angle between subspaces of equal dimension; the
// equality certificate used by cross-checks. Throws InputError on
// dimension mismatch.
double max_principal_angle(const Subspace& a, const Subspace& b);

// asin ||(I - P_outer) Q_inner||: zero iff inner is contained in outer.
double containment_angle(const Subspace& inner, const Subspace& outer);

// Worst pairwise cross-norm ||Q_i* Q_j||; with check_completeness the
// absolute dimension gap |sum dims - N| is added on.
double direct_sum_residual(const std::vector<Subspace>& spaces,
                           bool check_completeness = false);

// Grows an orthonormal frame by orthogonal increments. Each add() purges the
// new columns against the accumulated frame (two Gram-Schmidt passes),
// rank-trims the remainder and appends it, recording the worst cross-norm
// seen before purging as an orthogonality certificate.
class FrameAccumulator {
 public:
  explicit FrameAccumulator(Index ambient_dim);

  // Returns the number of columns actually appended.
  Index add(const ComplexMatrix& columns, const ToleranceConfig& cfg);

  Index dim() const { return frame_.cols(); }
  double worst_cross_norm() const { return worst_cross_; }
  Subspace take();

 private:
  ComplexMatrix frame_;
  double worst_cross_ = 0.0;
  bool marginal_ = false;
};

}  // namespace woldkit
