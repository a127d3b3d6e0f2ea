#pragma once

#include <string>
#include <vector>

#include "woldkit/fixtures.hpp"
#include "woldkit/multiwold.hpp"
#include "woldkit/operators.hpp"

namespace woldkit {

// Intersection of every coordinate's wandering subspace.
Subspace joint_wandering(const IsometryTuple& tuple,
                         const ToleranceConfig& cfg);

struct ConditionReport {
  bool pass = false;
  double residual = 0.0;
  std::string note;
};

// Joint-shift characterization: for a commuting tuple of interior isometries
// these five conditions hold or fail together. Each is checked by an
// independent computation so disagreement indicates a numerical problem.
struct EquivalenceReport {
  ConditionReport spanning_wandering;     // some wandering subspace spans H
  ConditionReport coordinates_all_shift;  // every V_i pure + doubly commuting
  ConditionReport coordinate_wandering;   // W_i recovered from the joint one
  ConditionReport joint_wandering_spans;  // the canonical W spans H
  ConditionReport model_equivalent;       // unitarily a coordinate-shift model

  bool all_pass() const;
  // True when the five verdicts agree (all pass or all fail).
  bool consistent() const;
  std::vector<std::pair<std::string, const ConditionReport*>> items() const;
};

EquivalenceReport check_equivalence_conditions(const IsometryTuple& tuple,
                                               const ToleranceConfig& cfg);

// Explicit unitary onto the truncated coordinate-multiplication model,
// sending V^k eta_j to the monomial basis vector of exponent k and slot j.
// Only meaningful when the joint wandering subspace spans (condition iv).
struct ModelEquivalence {
  Operator intertwiner;         // U : H -> model space
  double unitarity_defect = 0.0;
  // max over coordinates i of ||(U V_i - M_i U) restricted to the columns
  // whose exponent stays inside the truncation||.
  double interior_residual = 0.0;
  int coefficient_dim = 0;
  std::vector<int> depths;      // discovered per-coordinate truncation depth
  IsometryTuple model;          // the target tuple, with interior projector
};

ModelEquivalence build_model_equivalence(const IsometryTuple& tuple,
                                         const ToleranceConfig& cfg);

}  // namespace woldkit
