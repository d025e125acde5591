#pragma once

#include <optional>
#include <span>

#include "types.hpp"

namespace pdk {

// ---------------------------------------------------------------------------
// Group law
// ---------------------------------------------------------------------------

/// Componentwise sum; residues are reduced into [0, m) for cyclic sums.
GroupElement add(const GroupElement& g, const GroupElement& h);
GroupElement neg(const GroupElement& g);
GroupElement identity(const GroupDescriptor& desc);

/// Reduces raw coordinates into canonical form (mod m for cyclic sums) and
/// validates the length against the descriptor.
Coords canonicalize(const GroupDescriptor& desc, std::span<const std::int64_t> raw);

/// chi(g) as a unit complex number:
///   lattice:    exp(2*pi*i * <g, theta>)
///   cyclic sum: exp(2*pi*i * (sum g_n b_n) / m)
cplx char_eval(const Character& chi, const GroupElement& g);
cplx char_eval(const Character& chi, std::span<const std::int64_t> coords);

/// Pointwise difference of dual points (theta mod 1 / residues mod m).
Character char_sub(const Character& a, const Character& b);
Character trivial_character(const GroupDescriptor& desc);

// ---------------------------------------------------------------------------
// Finite subsets
// ---------------------------------------------------------------------------

/// An explicit finite set of group elements, stored as a deduplicated,
/// lexicographically sorted flat coordinate buffer.
class FinitePart {
public:
  FinitePart() = default;
  FinitePart(GroupDescriptor desc, std::vector<Coords> elements);

  /// Half-open box: product of [lo_i, hi_i). For cyclic sums the range must
  /// lie inside [0, m].
  static FinitePart box(const GroupDescriptor& desc, const Coords& lo, const Coords& hi);
  /// Box [0, side)^rank.
  static FinitePart cube(const GroupDescriptor& desc, std::int64_t side);
  static FinitePart singleton(const GroupDescriptor& desc, const Coords& c);
  /// Interval [lo, hi) over Z.
  static FinitePart interval(std::int64_t lo, std::int64_t hi);
  /// The whole (finite) group; cyclic sums only.
  static FinitePart full_group(const GroupDescriptor& desc);

  const GroupDescriptor& descriptor() const { return desc_; }
  std::int64_t rank() const { return desc_.rank(); }
  std::size_t size() const { return flat_.empty() ? 0 : flat_.size() / desc_.rank(); }
  bool empty() const { return flat_.empty(); }
  std::span<const std::int64_t> at(std::size_t i) const {
    return {flat_.data() + i * desc_.rank(), static_cast<std::size_t>(desc_.rank())};
  }
  bool contains(std::span<const std::int64_t> coords) const;
  bool subset_of(const FinitePart& other) const;

  /// True when the set is exactly a product of integer intervals.
  bool is_box() const { return is_box_; }
  const Coords& box_lo() const { return box_lo_; }
  const Coords& box_hi() const { return box_hi_; }

  bool operator==(const FinitePart& other) const {
    return desc_ == other.desc_ && flat_ == other.flat_;
  }

private:
  friend FinitePart minkowski_sum(const FinitePart&, const FinitePart&);
  friend FinitePart negate(const FinitePart&);
  friend FinitePart translate(const FinitePart&, std::span<const std::int64_t>);

  void detect_box();

  GroupDescriptor desc_;
  std::vector<std::int64_t> flat_;  // size() * rank(), sorted lexicographically
  bool is_box_ = false;
  Coords box_lo_, box_hi_;
};

/// Exact Minkowski sum {a + b} under the group law.
FinitePart minkowski_sum(const FinitePart& a, const FinitePart& b);
FinitePart negate(const FinitePart& a);
FinitePart translate(const FinitePart& a, std::span<const std::int64_t> by);

/// |KF symdiff F| / |F| with KF = {k + f}, computed by exact set construction.
Ratio invariance_defect(const FinitePart& k_set, const FinitePart& f_set);

// ---------------------------------------------------------------------------
// Folner plans
// ---------------------------------------------------------------------------

/// Ordered nested finite sets F_1 subset F_2 subset ... with strictly
/// increasing sizes. Defaults are boxes [0, n)^d over lattices and the full
/// group over (finite) cyclic sums.
class FolnerPlan {
public:
  FolnerPlan(GroupDescriptor desc, std::vector<FinitePart> sets);
  static FolnerPlan boxes(const GroupDescriptor& desc, std::span<const std::int64_t> sides);
  static FolnerPlan full_group(const GroupDescriptor& desc);

  const GroupDescriptor& descriptor() const { return desc_; }
  std::size_t depth() const { return sets_.size(); }
  /// 1-based level access, matching F_1, F_2, ...
  const FinitePart& level(std::size_t n) const;

private:
  GroupDescriptor desc_;
  std::vector<FinitePart> sets_;
};

/// |union_{k<n} (-F_k + F_n)| / |F_n| for 1-based n >= 2.
Ratio tempered_constant(const FolnerPlan& plan, std::size_t n);

// ---------------------------------------------------------------------------
// S(G)
// ---------------------------------------------------------------------------

/// The smallest subset of the unit circle containing every character image:
/// the full circle for lattices, the m-th roots of unity for cyclic sums.
struct CircleRange {
  bool full_circle = false;
  std::optional<std::int64_t> root_order;
};

CircleRange s_of_g(const GroupDescriptor& desc);

/// Distance from a unit complex value to the reported S(G) set.
double distance_to_range(const CircleRange& range, cplx value);

}  // namespace pdk
