#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "woldkit/operators.hpp"
#include "woldkit/subspace.hpp"
#include "woldkit/types.hpp"
#include "woldkit/wold.hpp"

namespace woldkit {

// A subset of the first m coordinates {1..m}, the label of one block of the
// 2^m decomposition. Members are 1-based; the mask bit for coordinate i is
// 1 << (i-1).
class SubsetLabel {
 public:
  SubsetLabel(int m, std::uint32_t mask);
  SubsetLabel(int m, std::initializer_list<int> members);

  static SubsetLabel empty_set(int m) { return SubsetLabel(m, 0u); }
  static SubsetLabel full_set(int m);
  // All 2^m labels in mask order (empty set first, full set last).
  static std::vector<SubsetLabel> all(int m);

  int m() const { return m_; }
  std::uint32_t mask() const { return mask_; }
  int count() const;
  bool empty() const { return mask_ == 0; }
  bool contains(int i) const;
  std::vector<int> members() const;   // ascending
  SubsetLabel with(int i) const;
  SubsetLabel without(int i) const;
  SubsetLabel complement() const;     // within {1..m}

  bool operator==(const SubsetLabel& o) const = default;
  bool operator<(const SubsetLabel& o) const;

  std::string to_string() const;      // "{1,3}", "{}" for the empty set

 private:
  int m_ = 0;
  std::uint32_t mask_ = 0;
};

// W_A = ran( prod_{i in A} (I - V_i V_i*) ), cross-checked against the
// intersection of the per-coordinate wandering spaces.
Subspace wandering_intersection(const IsometryTuple& tuple,
                                const SubsetLabel& a,
                                const ToleranceConfig& cfg);

struct WanderingCheck {
  Subspace space;
  double consistency_angle = 0.0;  // product route vs intersection route
};
WanderingCheck wandering_intersection_checked(const IsometryTuple& tuple,
                                              const SubsetLabel& a,
                                              const ToleranceConfig& cfg);

// Two-route check of the identity
//     W_A (-) clos(V_j W_A)  =  (intersection of W_i over i in A) meet W_j
// for a coordinate j outside A, together with the precondition that W_A
// reduces V_j. Reported, not thrown, so sweeps can tabulate failures.
struct IdentityReport {
  double reducing_defect = 0.0;
  bool reducing_ok = false;
  Index lhs_dim = 0;
  Index rhs_dim = 0;
  double angle = 0.0;
  bool pass = false;
};
IdentityReport generalized_wandering_identity(const IsometryTuple& tuple,
                                              const SubsetLabel& a, int j,
                                              const ToleranceConfig& cfg);

// The innermost space of block A: starting from W_A (or the full space when
// A is empty), sweep S <- clos(V_j S) round-robin over the coordinates of
// {1..m} \ A until the dimension stabilizes.
struct CoreResult {
  Subspace space;
  int sweeps = 0;
  Resolution resolution = Resolution::Stabilized;
};
CoreResult inner_core(const IsometryTuple& tuple, const SubsetLabel& a,
                      const ToleranceConfig& cfg);

// Orthogonal span of V_A^k(core) over multi-indices k supported on A,
// enumerated in graded order. A coordinate direction is pruned as soon as
// its image dies, which is exact for commuting tuples.
SpanAccumulation block_span(const IsometryTuple& tuple, const SubsetLabel& a,
                            const Subspace& core, const ToleranceConfig& cfg);

struct BlockResult {
  explicit BlockResult(SubsetLabel l) : label(std::move(l)) {}

  SubsetLabel label;
  Subspace space;
  // Inner core the span was built from; absent for the recursive method.
  std::optional<Subspace> core;
  // Verified type of V_i restricted to this block, i = 1..m:
  // Shift for i in A, Unitary otherwise.
  std::vector<Classification> coordinate_class;
  double joint_reducing = 0.0;      // max over i in {1..m} of reducing defect
  double span_orthogonality = 0.0;  // orthogonality certificate of the span
  double classification_defect = 0.0;
  Resolution resolution = Resolution::Stabilized;
};

struct MultiWoldDecomposition {
  int n = 0;  // tuple size
  int m = 0;  // decomposition depth, blocks indexed by subsets of {1..m}
  std::vector<BlockResult> blocks;  // indexed by label mask
  double pairwise_orthogonality = 0.0;
  Index completeness_gap = 0;  // sum of block dims minus ambient dim
  double max_joint_reducing = 0.0;
  double wandering_consistency = 0.0;
  double max_classification_defect = 0.0;
  Resolution resolution = Resolution::Stabilized;

  const BlockResult& block(const SubsetLabel& a) const;
};

// Direct method: every block is block_span(inner_core(W_A)). Requires the gate
// (interior isometries, commuting, doubly commuting) and 2 <= m <= n.
MultiWoldDecomposition decompose_direct(const IsometryTuple& tuple, int m,
                                        const ToleranceConfig& cfg);

// Recursive method: split by the classical decomposition one coordinate at
// a time, restricting the remaining operators to each part. Produces the
// same block layout; used to cross-validate the direct method.
MultiWoldDecomposition decompose_recursive(const IsometryTuple& tuple, int m,
                                           const ToleranceConfig& cfg);

// The four named blocks of the n = 2 case.
struct PairBlocks {
  Subspace ss;  // both coordinates shift
  Subspace su;  // first shift, second unitary
  Subspace us;
  Subspace uu;
  MultiWoldDecomposition full;
};
PairBlocks pair_blocks(const IsometryTuple& tuple, const ToleranceConfig& cfg);

}  // namespace woldkit
