#pragma once

#include <map>
#include <string>
#include <vector>

#include "woldkit/subspace.hpp"
#include "woldkit/types.hpp"

namespace woldkit {

// Measured deviations of a tuple from the structure the decompositions
// assume. Raw isometry defects are reported alongside the interior ones
// because truncated models are only isometric away from their top grade.
struct DefectReport {
  std::vector<double> isometry_defect;           // ||V_i* V_i - I||
  std::vector<double> interior_isometry_defect;  // ||(V_i* V_i - I) P_int||
  double commutation_defect = 0.0;               // max ||V_i V_j - V_j V_i||
  double double_commutation_defect = 0.0;        // max ||V_i V_j* - V_j* V_i||

  double max_isometry() const;
  double max_interior_isometry() const;
  std::map<std::string, double> as_map() const;
};

DefectReport defect_report(const std::vector<Operator>& ops,
                           const Operator& interior_projector);

// An n-tuple of operators on a common space, with an optional interior
// projector marking where the isometry relations are expected to hold
// exactly. Coordinates are addressed 1-based to match subset labels.
class IsometryTuple {
 public:
  explicit IsometryTuple(std::vector<Operator> ops);
  IsometryTuple(std::vector<Operator> ops, Operator interior_projector);

  int size() const { return static_cast<int>(ops_.size()); }
  Index dim() const { return ops_.front().dim(); }

  const Operator& op(int i) const;  // 1-based
  const std::vector<Operator>& ops() const { return ops_; }

  // Identity when no explicit projector was supplied.
  const Operator& interior_projector() const { return interior_; }
  bool has_explicit_interior() const { return explicit_interior_; }

  const DefectReport& defects() const { return defects_; }

 private:
  void init(Operator interior, bool explicit_interior);

  std::vector<Operator> ops_;
  Operator interior_;
  bool explicit_interior_ = false;
  DefectReport defects_;
};

enum class GatePolicy { DoublyCommuting, CommutingOnly };

struct GateResult {
  bool pass = false;
  std::string reason;  // empty when pass
  DefectReport defects;
};

// Entry check for decompositions: interior isometry defects, pairwise
// commutation, and (by default) double commutation must all sit below
// residual_tol. Merely commuting tuples are rejected by default because
// the block decomposition genuinely fails for them.
GateResult check_gate(const IsometryTuple& tuple, const ToleranceConfig& cfg,
                      GatePolicy policy = GatePolicy::DoublyCommuting);
void require_gate(const IsometryTuple& tuple, const ToleranceConfig& cfg,
                  GatePolicy policy = GatePolicy::DoublyCommuting);

// Compression Q* V Q of V to an invariant subspace. Throws DomainError when
// the invariance defect ||(I-P) V Q|| exceeds residual_tol.
Operator restrict_to(const Operator& v, const Subspace& s,
                     const ToleranceConfig& cfg);

// max(||(I-P) V P||, ||P V (I-P)||): zero iff S reduces V.
double reducing_defect(const Operator& v, const Subspace& s);

// Operator-typed conveniences for the matrix-level subspace maps.
Subspace kernel(const Operator& t, const ToleranceConfig& cfg);
Subspace range(const Operator& t, const ToleranceConfig& cfg);

}  // namespace woldkit
