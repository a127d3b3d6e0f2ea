#include "woldkit/fixtures.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <sstream>

#include "woldkit/rng.hpp"

namespace woldkit {

ComplexMatrix truncated_shift(int depth) {
  if (depth < 1) throw InputError("truncated shift: depth must be >= 1");
  ComplexMatrix j = ComplexMatrix::Zero(depth, depth);
  for (int t = 0; t + 1 < depth; ++t) j(t + 1, t) = 1.0;
  return j;
}

ComplexMatrix circular_shift(int dim) {
  if (dim < 1) throw InputError("circular shift: dimension must be >= 1");
  ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
  for (int t = 0; t < dim; ++t) c((t + 1) % dim, t) = 1.0;
  return c;
}

namespace {

Index atom_dim(const Atom& atom) {
  if (const auto* s = std::get_if<ShiftAtom>(&atom)) return s->depth;
  return std::get<UnitaryAtom>(atom).dim;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace

Index BlockRecipe::dim() const {
  Index d = multiplicity;
  for (const Atom& atom : atoms) d *= atom_dim(atom);
  return d;
}

std::uint32_t BlockRecipe::subset_mask() const {
  std::uint32_t mask = 0;
  for (size_t s = 0; s < atoms.size(); ++s)
    if (std::holds_alternative<ShiftAtom>(atoms[s])) mask |= 1u << s;
  return mask;
}

Index FixtureSpec::ambient_dim() const {
  Index total = 0;
  for (const BlockRecipe& b : blocks) total += b.dim();
  return total;
}

int FixtureSpec::max_shift_depth() const {
  int depth = 2;
  for (const BlockRecipe& b : blocks)
    for (const Atom& atom : b.atoms)
      if (const auto* s = std::get_if<ShiftAtom>(&atom))
        depth = std::max(depth, s->depth);
  return depth;
}

ToleranceConfig FixtureSpec::suggested_config() const {
  return ToleranceConfig::for_depth(max_shift_depth());
}

void FixtureSpec::validate() const {
  if (n < 1 || n > 16)
    throw InputError("fixture spec: tuple size must lie in 1..16");
  if (blocks.empty()) throw InputError("fixture spec: no blocks");
  std::vector<std::uint32_t> seen;
  for (const BlockRecipe& b : blocks) {
    if (static_cast<int>(b.atoms.size()) != n)
      throw InputError("fixture spec: block must have one atom per coordinate");
    if (b.multiplicity < 1)
      throw InputError("fixture spec: block multiplicity must be >= 1");
    for (const Atom& atom : b.atoms) {
      if (const auto* s = std::get_if<ShiftAtom>(&atom)) {
        if (s->depth < 2)
          throw InputError("fixture spec: shift atoms need depth >= 2");
      } else if (std::get<UnitaryAtom>(atom).dim < 1) {
        throw InputError("fixture spec: unitary atoms need dimension >= 1");
      }
    }
    seen.push_back(b.subset_mask());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw InputError("fixture spec: two blocks share a subset label");
  if (ambient_dim() > dim_cap) {
    std::ostringstream os;
    os << "fixture spec: ambient dimension " << ambient_dim()
       << " exceeds cap " << dim_cap;
    throw CapError(os.str());
  }
}

Index FixtureOracle::block_dim(const SubsetLabel& a) const {
  if (a.m() != n)
    throw InputError("fixture oracle: label does not match tuple size");
  return block_dims.at(a.mask());
}

Subspace FixtureOracle::expected_block(const SubsetLabel& a) const {
  const Index d = block_dim(a);
  if (d == 0) return Subspace::zero(ambient_dim);
  const auto [offset, extent] = block_ranges.at(a.mask());
  ComplexMatrix frame(ambient_dim, extent);
  if (scramble)
    frame = scramble->middleCols(offset, extent);
  else
    frame = ComplexMatrix::Identity(ambient_dim, ambient_dim)
                .middleCols(offset, extent);
  return Subspace::from_frame(std::move(frame));
}

Fixture build_fixture(const FixtureSpec& spec) {
  spec.validate();
  const Index n_total = spec.ambient_dim();
  const int n = spec.n;

  // Canonical layout: blocks sorted by subset mask.
  std::vector<const BlockRecipe*> ordered;
  for (const BlockRecipe& b : spec.blocks) ordered.push_back(&b);
  std::sort(ordered.begin(), ordered.end(),
            [](const BlockRecipe* a, const BlockRecipe* b) {
              return a->subset_mask() < b->subset_mask();
            });

  FixtureOracle oracle;
  oracle.n = n;
  oracle.ambient_dim = n_total;
  oracle.block_dims.assign(size_t{1} << n, 0);

  std::vector<ComplexMatrix> ops(static_cast<size_t>(n),
                                 ComplexMatrix::Zero(n_total, n_total));
  ComplexMatrix interior = ComplexMatrix::Zero(n_total, n_total);

  Index offset = 0;
  for (const BlockRecipe* block : ordered) {
    const std::uint32_t mask = block->subset_mask();
    const Index d = block->dim();
    const ComplexMatrix mult_eye =
        ComplexMatrix::Identity(block->multiplicity, block->multiplicity);

    // Resolve each atom to its matrix and its interior projector.
    std::vector<ComplexMatrix> factors;
    std::vector<ComplexMatrix> interiors;
    for (size_t s = 0; s < block->atoms.size(); ++s) {
      const Atom& atom = block->atoms[s];
      if (const auto* sh = std::get_if<ShiftAtom>(&atom)) {
        factors.push_back(truncated_shift(sh->depth));
        ComplexMatrix p = ComplexMatrix::Identity(sh->depth, sh->depth);
        p(sh->depth - 1, sh->depth - 1) = 0.0;  // top grade is not interior
        interiors.push_back(std::move(p));
      } else {
        const UnitaryAtom& u = std::get<UnitaryAtom>(atom);
        if (u.kind == UnitaryKind::Circular) {
          factors.push_back(circular_shift(u.dim));
        } else {
          factors.push_back(seeded_unitary(
              u.dim, mix_seed(spec.atom_seed, (std::uint64_t{mask} << 8) | s)));
        }
        interiors.push_back(ComplexMatrix::Identity(u.dim, u.dim));
      }
    }

    for (int i = 1; i <= n; ++i) {
      ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
      for (size_t s = 0; s < factors.size(); ++s) {
        if (static_cast<int>(s) == i - 1)
          acc = kron(acc, factors[s]);
        else
          acc = kron(acc, ComplexMatrix::Identity(factors[s].rows(),
                                                  factors[s].rows()));
      }
      acc = kron(acc, mult_eye);
      ops[static_cast<size_t>(i - 1)].block(offset, offset, d, d) = acc;
    }

    ComplexMatrix pacc = ComplexMatrix::Identity(1, 1);
    for (const ComplexMatrix& p : interiors) pacc = kron(pacc, p);
    interior.block(offset, offset, d, d) = kron(pacc, mult_eye);

    oracle.block_dims[mask] = d;
    oracle.block_ranges[mask] = {offset, d};
    for (size_t s = 0; s < block->atoms.size(); ++s)
      if (const auto* sh = std::get_if<ShiftAtom>(&block->atoms[s]))
        oracle.shift_multiplicities[mask][static_cast<int>(s) + 1] =
            d / sh->depth;
    offset += d;
  }

  // The joint wandering subspace is the bottom corner of the all-shift
  // block: one dimension per copy of it, not the whole block.
  const std::uint32_t full_mask = (1u << n) - 1u;
  oracle.joint_wandering_dim = 0;
  for (const BlockRecipe* block : ordered)
    if (block->subset_mask() == full_mask)
      oracle.joint_wandering_dim = block->multiplicity;

  if (spec.scramble_seed) {
    const ComplexMatrix q = seeded_unitary(n_total, *spec.scramble_seed);
    for (ComplexMatrix& v : ops) v = q * v * q.adjoint();
    interior = q * interior * q.adjoint();
    oracle.scramble = q;
  }

  std::vector<Operator> tuple_ops;
  tuple_ops.reserve(ops.size());
  for (ComplexMatrix& v : ops) tuple_ops.emplace_back(std::move(v));
  return Fixture{spec, IsometryTuple(std::move(tuple_ops),
                                     Operator(std::move(interior))),
                 oracle};
}

namespace {

IsometryTuple make_polydisc_tuple(int e, int depth, int n, Index dim_cap) {
  if (e < 1) throw InputError("polydisc model: coefficient dimension >= 1");
  if (depth < 2) throw InputError("polydisc model: depth must be >= 2");
  if (n < 1 || n > 16)
    throw InputError("polydisc model: variable count must lie in 1..16");
  BlockRecipe block;
  for (int i = 0; i < n; ++i) block.atoms.push_back(ShiftAtom{depth});
  block.multiplicity = e;
  FixtureSpec spec;
  spec.name = "polydisc";
  spec.n = n;
  spec.blocks = {block};
  spec.dim_cap = dim_cap;
  return build_fixture(spec).tuple;
}

}  // namespace

PolydiscModel::PolydiscModel(int e, int depth, int n, Index dim_cap)
    : e_(e), depth_(depth), n_(n),
      tuple_(make_polydisc_tuple(e, depth, n, dim_cap)) {}

Index PolydiscModel::index_of(const std::vector<int>& k, int j) const {
  if (static_cast<int>(k.size()) != n_)
    throw InputError("polydisc model: exponent has wrong length");
  if (j < 0 || j >= e_)
    throw InputError("polydisc model: coefficient slot out of range");
  Index idx = 0;
  for (int s = 0; s < n_; ++s) {
    if (k[s] < 0 || k[s] >= depth_)
      throw InputError("polydisc model: exponent out of range");
    idx = idx * depth_ + k[s];
  }
  return idx * e_ + j;
}

std::vector<FixtureSpec> standard_grid() {
  auto sh = [](int depth) { return Atom{ShiftAtom{depth}}; };
  auto uc = [](int dim) { return Atom{UnitaryAtom{dim, UnitaryKind::Circular}}; };
  auto ur = [](int dim) { return Atom{UnitaryAtom{dim, UnitaryKind::Random}}; };
  auto block = [](std::vector<Atom> atoms, int mult) {
    BlockRecipe b;
    b.atoms = std::move(atoms);
    b.multiplicity = mult;
    return b;
  };

  std::vector<FixtureSpec> grid;
  auto add = [&](std::string name, int n, std::vector<BlockRecipe> blocks) {
    FixtureSpec spec;
    spec.name = std::move(name);
    spec.n = n;
    spec.blocks = std::move(blocks);
    spec.atom_seed = 101 + static_cast<std::uint64_t>(grid.size());
    grid.push_back(std::move(spec));
  };

  add("pair-pure-ss", 2, {block({sh(3), sh(2)}, 1)});
  add("pair-pure-ss-wide", 2, {block({sh(2), sh(2)}, 2)});
  add("pair-su", 2, {block({sh(3), uc(2)}, 1)});
  add("pair-us", 2, {block({uc(2), sh(3)}, 1)});
  add("pair-uu", 2, {block({uc(2), ur(3)}, 1)});
  add("pair-all-blocks", 2,
      {block({sh(3), sh(2)}, 1), block({sh(2), uc(2)}, 1),
       block({uc(2), sh(2)}, 1), block({uc(2), uc(1)}, 1)});
  add("pair-mixed-depths", 2,
      {block({sh(4), sh(3)}, 1), block({ur(2), uc(2)}, 2)});
  add("pair-skewed", 2, {block({sh(4), uc(1)}, 1), block({uc(1), sh(4)}, 1)});

  add("triple-pure", 3, {block({sh(2), sh(2), sh(2)}, 1)});
  add("triple-deep", 3, {block({sh(4), sh(3), sh(2)}, 1)});
  add("triple-su-mix", 3,
      {block({sh(2), sh(2), sh(2)}, 1), block({sh(2), uc(2), sh(2)}, 1),
       block({uc(2), sh(2), ur(2)}, 1)});
  {
    // One block per subset of {1,2,3}: shifts of depth 2 on the subset,
    // one-dimensional unitaries elsewhere.
    std::vector<BlockRecipe> blocks;
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
      std::vector<Atom> atoms;
      for (int s = 0; s < 3; ++s)
        atoms.push_back((mask >> s) & 1u ? sh(2) : uc(1));
      blocks.push_back(block(std::move(atoms), 1));
    }
    add("triple-all-subsets", 3, std::move(blocks));
  }
  add("triple-partial", 3,
      {block({sh(3), sh(2), uc(2)}, 1), block({uc(2), ur(2), uc(2)}, 1)});
  add("triple-wide", 3,
      {block({sh(2), sh(2), sh(2)}, 2), block({uc(1), sh(2), uc(1)}, 1)});

  // Scrambled twin of every spec: same content conjugated by a seeded
  // unitary, so nothing about the block layout is visible in the entries.
  const size_t plain_count = grid.size();
  for (size_t i = 0; i < plain_count; ++i) {
    FixtureSpec spec = grid[i];
    spec.name += "-scrambled";
    spec.scramble_seed = 9000 + static_cast<std::uint64_t>(i);
    grid.push_back(std::move(spec));
  }
  return grid;
}

}  // namespace woldkit
