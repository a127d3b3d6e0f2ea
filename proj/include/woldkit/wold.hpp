#pragma once

#include <map>
#include <string>

#include "woldkit/operators.hpp"
#include "woldkit/subspace.hpp"
#include "woldkit/types.hpp"

namespace woldkit {

// Result of accumulating the orthogonal powers span  W + V W + V^2 W + ...
struct SpanAccumulation {
  Subspace space;
  // Worst cross-norm between a new power image and the span built so far,
  // measured before purging. This certifies the sum was actually orthogonal.
  double orthogonality_defect = 0.0;
  // Number of power levels that contributed a nonzero increment.
  int powers = 0;
  // A power image lost dimension without dying; boundary folding.
  bool boundary_leakage = false;
  Resolution resolution = Resolution::Stabilized;
};

// Result of the shrinking iteration  H >= V H >= V^2 H >= ...
struct IteratedRange {
  Subspace space;
  int steps = 0;
  Resolution resolution = Resolution::Stabilized;
};

struct WoldResiduals {
  double orthogonality = 0.0;      // ||Q_s* Q_u||
  double shift_reducing = 0.0;     // reducing defect of the shift part
  double unitary_reducing = 0.0;   // reducing defect of the unitary part
  double unitary_isometry = 0.0;   // ||R*R - I|| for R = V restricted
  double unitary_coisometry = 0.0; // ||RR* - I||
  double exhaustion = 0.0;         // span orthogonality defect
  bool cross_check_ran = false;
  double cross_check_angle = 0.0;  // angle between complement and iterated range

  std::map<std::string, double> as_map() const;
  double worst() const;
};

struct WoldDecomposition {
  Subspace shift_part;    // span of V^m W
  Subspace unitary_part;  // orthogonal complement of the shift part
  Subspace wandering;     // W = ran(I - V V*)
  Index multiplicity = 0; // dim W
  Classification classification = Classification::Mixed;
  WoldResiduals residuals;
  Resolution resolution = Resolution::Stabilized;
};

// W = ran(I - V V*), cross-checked against ker V*. The two routes must agree
// in dimension and angle or a ConsistencyError is thrown.
Subspace wandering_subspace(const Operator& v, const ToleranceConfig& cfg);

// Accumulates the orthogonal sum of V^m W, stopping at the first power whose
// image adds nothing. Exceeding max_power with live increments reports
// BudgetExhausted rather than guessing.
SpanAccumulation shift_part(const Operator& v, const Subspace& wandering,
                            const ToleranceConfig& cfg);

// Iterates S <- clos(V S) from the full space until the dimension holds for
// stabilization_window consecutive steps. Independent route to the unitary
// part, used as a cross-check.
IteratedRange unitary_part_iterative(const Operator& v,
                                     const ToleranceConfig& cfg);

// Full decomposition H = H_shift (+) H_unitary with residual verification.
// Throws DecompositionError when any verified residual exceeds residual_tol;
// budget exhaustion is reported through `resolution` instead.
WoldDecomposition wold_decompose(const Operator& v, const ToleranceConfig& cfg);

}  // namespace woldkit
