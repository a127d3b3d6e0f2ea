#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "woldkit/multiwold.hpp"
#include "woldkit/operators.hpp"
#include "woldkit/types.hpp"

namespace woldkit {

// Elementary single-coordinate factors of a fixture block.
ComplexMatrix truncated_shift(int depth);  // nilpotent raising map on C^depth
ComplexMatrix circular_shift(int dim);     // cyclic permutation unitary

enum class UnitaryKind { Circular, Random };

struct ShiftAtom {
  int depth = 2;  // >= 2 so the shift behaviour is visible
};

struct UnitaryAtom {
  int dim = 1;  // >= 1
  UnitaryKind kind = UnitaryKind::Circular;
};

using Atom = std::variant<ShiftAtom, UnitaryAtom>;

// One tensor block of a fixture: atom i is the factor coordinate i acts on,
// and the whole block is repeated `multiplicity` times via a trailing
// identity factor. The block's subset label is {i : atom i is a shift}.
struct BlockRecipe {
  std::vector<Atom> atoms;
  int multiplicity = 1;

  Index dim() const;
  std::uint32_t subset_mask() const;
};

// Recipe for a tuple with known block structure: a direct sum of tensor
// blocks, optionally conjugated by a seeded unitary to hide the layout.
struct FixtureSpec {
  std::string name;
  int n = 0;
  std::vector<BlockRecipe> blocks;
  std::optional<std::uint64_t> scramble_seed;
  std::uint64_t atom_seed = 0;  // base seed for random unitary atoms
  Index dim_cap = 4096;

  Index ambient_dim() const;
  int max_shift_depth() const;
  // Tolerances with the power budget sized for this spec's content.
  ToleranceConfig suggested_config() const;
  void validate() const;
};

// Ground truth recorded while building a fixture, used to judge computed
// decompositions without rerunning the construction.
struct FixtureOracle {
  int n = 0;
  Index ambient_dim = 0;
  std::vector<Index> block_dims;  // indexed by subset mask, size 2^n
  Index joint_wandering_dim = 0;
  // Per present subset: column range [offset, offset+extent) of the block in
  // the unscrambled basis.
  std::map<std::uint32_t, std::pair<Index, Index>> block_ranges;
  // Per present subset, per shift coordinate: multiplicity of the restricted
  // shift (block dimension divided by that coordinate's depth).
  std::map<std::uint32_t, std::map<int, Index>> shift_multiplicities;
  std::optional<ComplexMatrix> scramble;

  Index block_dim(const SubsetLabel& a) const;
  // The true block subspace, as columns of the scrambling unitary (or of
  // the identity when the fixture was not scrambled).
  Subspace expected_block(const SubsetLabel& a) const;
};

struct Fixture {
  FixtureSpec spec;
  IsometryTuple tuple;
  FixtureOracle oracle;
};

Fixture build_fixture(const FixtureSpec& spec);

// Coordinate multiplication operators on polynomial truncations of the
// vector-valued Hardy space over the n-polydisc: basis indexed by monomial
// multi-exponents below `depth` in each variable times a coefficient slot.
class PolydiscModel {
 public:
  PolydiscModel(int e, int depth, int n, Index dim_cap = 4096);

  int n() const { return n_; }
  int coefficient_dim() const { return e_; }
  int depth() const { return depth_; }
  Index dim() const { return tuple_.dim(); }
  const IsometryTuple& tuple() const { return tuple_; }

  // Basis position of monomial exponent k (size n, entries in [0, depth))
  // with coefficient slot j in [0, e): k runs slowest-first, j fastest.
  Index index_of(const std::vector<int>& k, int j) const;

 private:
  int e_;
  int depth_;
  int n_;
  IsometryTuple tuple_;
};

// Deterministic fixture corpus covering one block per subset, all-subset
// sums and mixed multiplicities for n = 2 and 3, each in plain and
// scrambled form.
std::vector<FixtureSpec> standard_grid();

}  // namespace woldkit
