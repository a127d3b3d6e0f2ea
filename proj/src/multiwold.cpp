#include "woldkit/multiwold.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace woldkit {

namespace {

Resolution worse(Resolution a, Resolution b) {
  return (a == Resolution::BudgetExhausted || b == Resolution::BudgetExhausted)
             ? Resolution::BudgetExhausted
             : Resolution::Stabilized;
}

}  // namespace

SubsetLabel::SubsetLabel(int m, std::uint32_t mask) : m_(m), mask_(mask) {
  if (m < 0 || m > 24)
    throw InputError("subset label: coordinate count out of range 0..24");
  if (m < 32 && mask >= (1u << m))
    throw InputError("subset label: mask has bits beyond the coordinate count");
}

SubsetLabel::SubsetLabel(int m, std::initializer_list<int> members)
    : SubsetLabel(m, 0u) {
  for (int i : members) {
    if (i < 1 || i > m) {
      std::ostringstream os;
      os << "subset label: member " << i << " out of range 1.." << m;
      throw InputError(os.str());
    }
    mask_ |= 1u << (i - 1);
  }
}

SubsetLabel SubsetLabel::full_set(int m) {
  if (m < 0 || m > 24)
    throw InputError("subset label: coordinate count out of range 0..24");
  return SubsetLabel(m, m == 0 ? 0u : ((1u << m) - 1u));
}

std::vector<SubsetLabel> SubsetLabel::all(int m) {
  std::vector<SubsetLabel> labels;
  const std::uint32_t total = 1u << m;
  labels.reserve(total);
  for (std::uint32_t mask = 0; mask < total; ++mask)
    labels.emplace_back(m, mask);
  return labels;
}

int SubsetLabel::count() const { return std::popcount(mask_); }

bool SubsetLabel::contains(int i) const {
  return i >= 1 && i <= m_ && (mask_ & (1u << (i - 1))) != 0;
}

std::vector<int> SubsetLabel::members() const {
  std::vector<int> out;
  for (int i = 1; i <= m_; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

SubsetLabel SubsetLabel::with(int i) const {
  if (i < 1 || i > m_) throw InputError("subset label: member out of range");
  return SubsetLabel(m_, mask_ | (1u << (i - 1)));
}

SubsetLabel SubsetLabel::without(int i) const {
  if (i < 1 || i > m_) throw InputError("subset label: member out of range");
  return SubsetLabel(m_, mask_ & ~(1u << (i - 1)));
}

SubsetLabel SubsetLabel::complement() const {
  return SubsetLabel(m_, full_set(m_).mask() & ~mask_);
}

bool SubsetLabel::operator<(const SubsetLabel& o) const {
  return m_ != o.m_ ? m_ < o.m_ : mask_ < o.mask_;
}

std::string SubsetLabel::to_string() const {
  std::ostringstream os;
  os << "{";
  const char* sep = "";
  for (int i : members()) {
    os << sep << i;
    sep = ",";
  }
  os << "}";
  return os.str();
}

WanderingCheck wandering_intersection_checked(const IsometryTuple& tuple,
                                              const SubsetLabel& a,
                                              const ToleranceConfig& cfg) {
  cfg.validate();
  if (a.empty())
    throw InputError("wandering intersection: subset must be nonempty");
  if (a.m() > tuple.size())
    throw InputError("wandering intersection: label exceeds tuple size");

  const Index n = tuple.dim();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  ComplexMatrix product = eye;
  std::vector<Subspace> coordinates;
  for (int i : a.members()) {
    const ComplexMatrix& v = tuple.op(i).mat();
    const ComplexMatrix defect = eye - v * v.adjoint();
    product = product * defect;
    coordinates.push_back(orthonormal_above(defect, 0.5));
  }

  // Defects of doubly commuting isometries commute, so the product is again
  // a projector and the absolute unit-scale cut applies.
  WanderingCheck check;
  check.space = orthonormal_above(product, 0.5);
  const Subspace meet = intersect(coordinates, cfg);
  if (check.space.dim() != meet.dim()) {
    std::ostringstream os;
    os << "wandering intersection " << a.to_string()
       << ": product route has dimension " << check.space.dim()
       << " but intersection route has " << meet.dim();
    throw ConsistencyError(
        os.str(),
        static_cast<double>(std::abs(check.space.dim() - meet.dim())));
  }
  if (check.space.dim() > 0) {
    check.consistency_angle = max_principal_angle(check.space, meet);
    if (check.consistency_angle > cfg.residual_tol) {
      std::ostringstream os;
      os << "wandering intersection " << a.to_string()
         << ": product and intersection routes differ by angle "
         << check.consistency_angle;
      throw ConsistencyError(os.str(), check.consistency_angle);
    }
  }
  return check;
}

Subspace wandering_intersection(const IsometryTuple& tuple,
                                const SubsetLabel& a,
                                const ToleranceConfig& cfg) {
  return wandering_intersection_checked(tuple, a, cfg).space;
}

IdentityReport generalized_wandering_identity(const IsometryTuple& tuple,
                                              const SubsetLabel& a, int j,
                                              const ToleranceConfig& cfg) {
  cfg.validate();
  if (a.empty())
    throw InputError("wandering identity: subset must be nonempty");
  if (j < 1 || j > tuple.size() || a.contains(j))
    throw InputError(
        "wandering identity: coordinate must lie outside the subset");

  IdentityReport report;
  const Subspace wa = wandering_intersection(tuple, a, cfg);
  report.reducing_defect = reducing_defect(tuple.op(j), wa);
  report.reducing_ok = report.reducing_defect <= cfg.residual_tol;
  if (!report.reducing_ok) return report;

  Subspace lhs;
  try {
    const Subspace image =
        orthonormal_above(tuple.op(j).mat() * wa.frame(), 0.5);
    lhs = subspace_minus(wa, image, cfg);
  } catch (const DomainError& e) {
    report.angle = e.defect();
    return report;
  }

  const Index n = tuple.dim();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  std::vector<Subspace> pieces;
  for (int i : a.members()) {
    const ComplexMatrix& v = tuple.op(i).mat();
    pieces.push_back(orthonormal_above(eye - v * v.adjoint(), 0.5));
  }
  const ComplexMatrix& vj = tuple.op(j).mat();
  pieces.push_back(orthonormal_above(eye - vj * vj.adjoint(), 0.5));
  const Subspace rhs = intersect(pieces, cfg);

  report.lhs_dim = lhs.dim();
  report.rhs_dim = rhs.dim();
  if (lhs.dim() == rhs.dim()) {
    report.angle = lhs.dim() == 0 ? 0.0 : max_principal_angle(lhs, rhs);
    report.pass = report.angle <= cfg.residual_tol;
  } else {
    report.angle = std::asin(1.0);
  }
  return report;
}

namespace {

CoreResult core_sweep(const IsometryTuple& tuple, const SubsetLabel& a,
                      Subspace start, const ToleranceConfig& cfg) {
  CoreResult result;
  result.space = std::move(start);
  const std::vector<int> outside = a.complement().members();
  if (outside.empty() || result.space.dim() == 0) return result;

  Index prev = result.space.dim();
  int stable = 0;
  for (int sweep = 1; sweep <= cfg.max_power; ++sweep) {
    for (int j : outside) {
      result.space = orthonormal_above(
          tuple.op(j).mat() * result.space.frame(), 0.5);
      if (result.space.dim() == 0) {
        result.sweeps = sweep;
        return result;
      }
    }
    result.sweeps = sweep;
    stable = (result.space.dim() == prev) ? stable + 1 : 0;
    prev = result.space.dim();
    if (stable >= cfg.stabilization_window) return result;
  }
  result.resolution = Resolution::BudgetExhausted;
  return result;
}

}  // namespace

CoreResult inner_core(const IsometryTuple& tuple, const SubsetLabel& a,
                      const ToleranceConfig& cfg) {
  cfg.validate();
  if (a.m() > tuple.size())
    throw InputError("inner core: label exceeds tuple size");
  Subspace start = a.empty() ? Subspace::full(tuple.dim())
                             : wandering_intersection(tuple, a, cfg);
  return core_sweep(tuple, a, std::move(start), cfg);
}

SpanAccumulation block_span(const IsometryTuple& tuple, const SubsetLabel& a,
                            const Subspace& core, const ToleranceConfig& cfg) {
  cfg.validate();
  if (a.m() > tuple.size())
    throw InputError("block span: label exceeds tuple size");
  if (core.ambient_dim() != tuple.dim())
    throw InputError("block span: core/tuple dimension mismatch");

  SpanAccumulation result;
  if (core.dim() == 0) {
    result.space = Subspace::zero(tuple.dim());
    return result;
  }
  const std::vector<int> members = a.members();
  if (members.empty()) {
    result.space = core;
    result.powers = 1;
    return result;
  }

  // Graded enumeration of multi-indices supported on the subset. Every node
  // is generated once, from the predecessor that decrements its leading
  // nonzero coordinate; for commuting tuples a dead sub-index kills all
  // its successors, so pruning dead nodes is exact.
  struct Node {
    std::vector<int> k;
    ComplexMatrix frame;
    int lead;  // index into `members` of the first nonzero coordinate
  };

  FrameAccumulator acc(tuple.dim());
  acc.add(core.frame(), cfg);
  result.powers = 1;

  const int r = static_cast<int>(members.size());
  std::vector<Node> frontier;
  frontier.push_back(Node{std::vector<int>(r, 0), core.frame(), r});

  bool closed = false;
  for (int grade = 1; grade <= cfg.max_power; ++grade) {
    std::vector<Node> next;
    bool grade_contributed = false;
    for (const Node& node : frontier) {
      const int limit = std::min(node.lead, r - 1);
      for (int idx = 0; idx <= limit; ++idx) {
        const Subspace image = orthonormal_above(
            tuple.op(members[idx]).mat() * node.frame, 0.5);
        if (image.dim() == 0) continue;
        const Index appended = acc.add(image.frame(), cfg);
        if (appended > 0) grade_contributed = true;
        Node child;
        child.k = node.k;
        child.k[idx] += 1;
        child.frame = image.frame();
        child.lead = idx;
        next.push_back(std::move(child));
      }
    }
    if (grade_contributed) ++result.powers;
    frontier = std::move(next);
    if (frontier.empty()) {
      closed = true;
      break;
    }
  }
  result.resolution =
      closed ? Resolution::Stabilized : Resolution::BudgetExhausted;
  result.orthogonality_defect = acc.worst_cross_norm();
  result.space = acc.take();
  return result;
}

const BlockResult& MultiWoldDecomposition::block(const SubsetLabel& a) const {
  if (a.m() != m)
    throw InputError("block lookup: label depth does not match decomposition");
  return blocks.at(a.mask());
}

namespace {

void validate_depth(const IsometryTuple& tuple, int m) {
  if (m < 2 || m > tuple.size()) {
    std::ostringstream os;
    os << "block decomposition: depth " << m << " out of range 2.."
       << tuple.size() << " (use the single-operator path for depth 1)";
    throw InputError(os.str());
  }
}

// Shared verification: pairwise orthogonality, completeness, joint reducing
// defects, and per-coordinate classification of each block via the classical
// decomposition of the restricted operator.
void classify_and_verify(const IsometryTuple& tuple, int m,
                         MultiWoldDecomposition& d,
                         const ToleranceConfig& cfg) {
  std::vector<Subspace> spaces;
  spaces.reserve(d.blocks.size());
  Index total = 0;
  for (const BlockResult& b : d.blocks) {
    spaces.push_back(b.space);
    total += b.space.dim();
  }
  d.pairwise_orthogonality = direct_sum_residual(spaces, false);
  d.completeness_gap = total - tuple.dim();

  double worst_span = 0.0;
  std::string classification_note;
  for (BlockResult& b : d.blocks) {
    worst_span = std::max(worst_span, b.span_orthogonality);
    b.coordinate_class.assign(static_cast<size_t>(m),
                              Classification::Unitary);
    if (b.space.dim() == 0) {
      for (int i = 1; i <= m; ++i)
        b.coordinate_class[i - 1] = b.label.contains(i)
                                        ? Classification::Shift
                                        : Classification::Unitary;
      continue;
    }
    for (int i = 1; i <= m; ++i) {
      b.joint_reducing =
          std::max(b.joint_reducing, reducing_defect(tuple.op(i), b.space));
    }
    d.max_joint_reducing = std::max(d.max_joint_reducing, b.joint_reducing);

    const ComplexMatrix& q = b.space.frame();
    for (int i = 1; i <= m; ++i) {
      const Classification expected = b.label.contains(i)
                                          ? Classification::Shift
                                          : Classification::Unitary;
      Classification got = Classification::Mixed;
      try {
        const Operator restricted(q.adjoint() * tuple.op(i).mat() * q);
        WoldDecomposition wd = wold_decompose(restricted, cfg);
        got = wd.classification;
        b.resolution = worse(b.resolution, wd.resolution);
      } catch (const Error&) {
        // Leave the classification as Mixed; the defect below records it.
      }
      b.coordinate_class[i - 1] = got;
      if (got != expected) {
        b.classification_defect = 1.0;
        if (classification_note.empty()) {
          std::ostringstream os;
          os << "block " << b.label.to_string() << " coordinate " << i
             << " classified " << to_string(got) << ", expected "
             << to_string(expected);
          classification_note = os.str();
        }
      }
    }
    d.max_classification_defect =
        std::max(d.max_classification_defect, b.classification_defect);
    d.resolution = worse(d.resolution, b.resolution);
  }

  if (d.resolution != Resolution::Stabilized) return;

  std::map<std::string, double> failing;
  if (d.completeness_gap != 0)
    failing["completeness_gap"] = static_cast<double>(d.completeness_gap);
  if (d.pairwise_orthogonality > cfg.residual_tol)
    failing["pairwise_orthogonality"] = d.pairwise_orthogonality;
  if (d.max_joint_reducing > cfg.residual_tol)
    failing["joint_reducing"] = d.max_joint_reducing;
  if (worst_span > cfg.residual_tol)
    failing["span_orthogonality"] = worst_span;
  if (d.wandering_consistency > cfg.residual_tol)
    failing["wandering_consistency"] = d.wandering_consistency;
  if (m == d.n && d.max_classification_defect > cfg.residual_tol)
    failing["classification"] = d.max_classification_defect;
  if (!failing.empty()) {
    std::ostringstream os;
    os << "block decomposition failed verification:";
    for (const auto& [name, value] : failing) os << " " << name << "=" << value;
    if (!classification_note.empty()) os << " (" << classification_note << ")";
    throw DecompositionError(os.str(), failing);
  }
}

}  // namespace

MultiWoldDecomposition decompose_direct(const IsometryTuple& tuple, int m,
                                        const ToleranceConfig& cfg) {
  cfg.validate();
  validate_depth(tuple, m);
  require_gate(tuple, cfg);

  MultiWoldDecomposition d;
  d.n = tuple.size();
  d.m = m;
  for (const SubsetLabel& label : SubsetLabel::all(m)) {
    BlockResult b{label};
    Subspace start;
    if (label.empty()) {
      start = Subspace::full(tuple.dim());
    } else {
      WanderingCheck wc = wandering_intersection_checked(tuple, label, cfg);
      d.wandering_consistency =
          std::max(d.wandering_consistency, wc.consistency_angle);
      start = std::move(wc.space);
    }
    CoreResult core = core_sweep(tuple, label, std::move(start), cfg);
    SpanAccumulation span = block_span(tuple, label, core.space, cfg);
    b.space = std::move(span.space);
    b.core = std::move(core.space);
    b.span_orthogonality = span.orthogonality_defect;
    b.resolution = worse(core.resolution, span.resolution);
    d.resolution = worse(d.resolution, b.resolution);
    d.blocks.push_back(std::move(b));
  }
  classify_and_verify(tuple, m, d, cfg);
  return d;
}

namespace {

void recursive_split(const IsometryTuple& tuple, int m, int coord,
                     std::uint32_t mask, const ComplexMatrix& q,
                     std::vector<ComplexMatrix>& frames,
                     Resolution& resolution, const ToleranceConfig& cfg) {
  if (coord > m) {
    frames[mask] = q;
    return;
  }
  const std::uint32_t bit = 1u << (coord - 1);
  if (q.cols() == 0) {
    recursive_split(tuple, m, coord + 1, mask | bit, q, frames, resolution,
                    cfg);
    recursive_split(tuple, m, coord + 1, mask, q, frames, resolution, cfg);
    return;
  }

  const Subspace s = detail::make_subspace_unchecked(q, false);
  const double rdef = reducing_defect(tuple.op(coord), s);
  if (rdef > cfg.residual_tol) {
    std::ostringstream os;
    os << "recursive split: coordinate " << coord
       << " does not reduce the block reached through "
       << SubsetLabel(coord - 1, mask & ((1u << (coord - 1)) - 1u)).to_string()
       << " (defect " << rdef << ")";
    throw DomainError(os.str(), rdef);
  }

  WoldDecomposition wd;
  try {
    wd = wold_decompose(Operator(q.adjoint() * tuple.op(coord).mat() * q),
                        cfg);
  } catch (const DecompositionError& e) {
    std::ostringstream os;
    os << "recursive split at coordinate " << coord << ": " << e.what();
    throw DecompositionError(os.str(), e.residuals());
  }
  resolution = worse(resolution, wd.resolution);
  recursive_split(tuple, m, coord + 1, mask | bit,
                  q * wd.shift_part.frame(), frames, resolution, cfg);
  recursive_split(tuple, m, coord + 1, mask, q * wd.unitary_part.frame(),
                  frames, resolution, cfg);
}

}  // namespace

MultiWoldDecomposition decompose_recursive(const IsometryTuple& tuple, int m,
                                           const ToleranceConfig& cfg) {
  cfg.validate();
  validate_depth(tuple, m);
  require_gate(tuple, cfg);

  MultiWoldDecomposition d;
  d.n = tuple.size();
  d.m = m;
  std::vector<ComplexMatrix> frames(static_cast<size_t>(1) << m);
  recursive_split(tuple, m, 1, 0u,
                  ComplexMatrix::Identity(tuple.dim(), tuple.dim()), frames,
                  d.resolution, cfg);
  for (const SubsetLabel& label : SubsetLabel::all(m)) {
    BlockResult b{label};
    b.space = detail::make_subspace_unchecked(frames[label.mask()], false);
    d.blocks.push_back(std::move(b));
  }
  classify_and_verify(tuple, m, d, cfg);
  return d;
}

PairBlocks pair_blocks(const IsometryTuple& tuple, const ToleranceConfig& cfg) {
  if (tuple.size() != 2)
    throw InputError("pair blocks: tuple must have exactly two coordinates");
  PairBlocks out;
  out.full = decompose_direct(tuple, 2, cfg);
  out.ss = out.full.block(SubsetLabel(2, {1, 2})).space;
  out.su = out.full.block(SubsetLabel(2, {1})).space;
  out.us = out.full.block(SubsetLabel(2, {2})).space;
  out.uu = out.full.block(SubsetLabel::empty_set(2)).space;
  return out;
}

}  // namespace woldkit
