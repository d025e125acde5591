#include "group.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <numeric>

namespace pdk {

namespace {

std::int64_t mod_reduce(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

void check_same_descriptor(const GroupDescriptor& a, const GroupDescriptor& b,
                           const char* what) {
  if (!(a == b))
    throw invalid_argument(std::string("descriptor mismatch in ") + what + ": " +
                           a.to_string() + " vs " + b.to_string());
}

std::int64_t parse_int(std::string_view s, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw invalid_argument(std::string("unsupported group: bad ") + what);
  return v;
}

// Lexicographic compare of two rank-r blocks in a flat buffer.
struct FlatLess {
  const std::int64_t* data;
  std::int64_t rank;
  bool operator()(std::size_t a, std::size_t b) const {
    const std::int64_t* pa = data + a * rank;
    const std::int64_t* pb = data + b * rank;
    for (std::int64_t i = 0; i < rank; ++i) {
      if (pa[i] != pb[i]) return pa[i] < pb[i];
    }
    return false;
  }
};

// Sorts and deduplicates a flat element buffer in place.
std::vector<std::int64_t> sort_unique_flat(std::vector<std::int64_t> flat, std::int64_t rank) {
  const std::size_t n = flat.size() / rank;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), FlatLess{flat.data(), rank});
  std::vector<std::int64_t> out;
  out.reserve(flat.size());
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::int64_t* p = flat.data() + idx[pos] * rank;
    if (!out.empty()) {
      const std::int64_t* prev = out.data() + out.size() - rank;
      if (std::equal(p, p + rank, prev)) continue;
    }
    out.insert(out.end(), p, p + rank);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// GroupDescriptor
// ---------------------------------------------------------------------------

GroupDescriptor GroupDescriptor::parse(std::string_view text) {
  if (text.empty()) throw invalid_argument("unsupported group: empty descriptor");
  if (text[0] == 'Z') {
    if (text.size() == 1) return lattice(1);
    if (text[1] != '^') throw invalid_argument("unsupported group: " + std::string(text));
    return lattice(parse_int(text.substr(2), "lattice dimension"));
  }
  if (text[0] == 'C') {
    auto open = text.find('(');
    auto close = text.find(')');
    if (open != 1 || close == std::string_view::npos || close < open)
      throw invalid_argument("unsupported group: " + std::string(text));
    std::int64_t m = parse_int(text.substr(open + 1, close - open - 1), "modulus");
    std::int64_t len = 1;
    if (close + 1 < text.size()) {
      if (text[close + 1] != '^')
        throw invalid_argument("unsupported group: " + std::string(text));
      len = parse_int(text.substr(close + 2), "sum length");
    }
    return cyclic_sum(m, len);
  }
  throw invalid_argument("unsupported group: " + std::string(text));
}

std::string GroupDescriptor::to_string() const {
  if (is_lattice()) {
    return rank_ == 1 ? "Z" : "Z^" + std::to_string(rank_);
  }
  std::string s = "C(" + std::to_string(modulus_) + ")";
  if (rank_ != 1) s += "^" + std::to_string(rank_);
  return s;
}

// ---------------------------------------------------------------------------
// Group law
// ---------------------------------------------------------------------------

Coords canonicalize(const GroupDescriptor& desc, std::span<const std::int64_t> raw) {
  if (std::cmp_not_equal(raw.size(), desc.rank()))
    throw invalid_argument("element length " + std::to_string(raw.size()) +
                           " does not match " + desc.to_string());
  Coords out(raw.begin(), raw.end());
  if (!desc.is_lattice()) {
    for (auto& v : out) v = mod_reduce(v, desc.modulus());
  }
  return out;
}

GroupElement add(const GroupElement& g, const GroupElement& h) {
  check_same_descriptor(g.desc, h.desc, "add");
  GroupElement out{g.desc, Coords(g.coords.size())};
  for (std::size_t i = 0; i < g.coords.size(); ++i) out.coords[i] = g.coords[i] + h.coords[i];
  if (!g.desc.is_lattice()) {
    for (auto& v : out.coords) v = mod_reduce(v, g.desc.modulus());
  }
  return out;
}

GroupElement neg(const GroupElement& g) {
  GroupElement out{g.desc, Coords(g.coords.size())};
  for (std::size_t i = 0; i < g.coords.size(); ++i) out.coords[i] = -g.coords[i];
  if (!g.desc.is_lattice()) {
    for (auto& v : out.coords) v = mod_reduce(v, g.desc.modulus());
  }
  return out;
}

GroupElement identity(const GroupDescriptor& desc) {
  return GroupElement{desc, Coords(desc.rank(), 0)};
}

cplx char_eval(const Character& chi, std::span<const std::int64_t> coords) {
  if (std::cmp_not_equal(coords.size(), chi.desc.rank()))
    throw invalid_argument("descriptor mismatch in char_eval");
  if (chi.desc.is_lattice()) {
    // Accumulate the phase in extended precision so the homomorphism
    // identity holds to 1e-12 on moderate windows.
    long double phase = 0.0L;
    for (std::size_t i = 0; i < coords.size(); ++i)
      phase += static_cast<long double>(coords[i]) * static_cast<long double>(chi.theta[i]);
    phase -= std::floor(phase);
    const double frac = static_cast<double>(phase);
    return cplx(std::cos(kTwoPi * frac), std::sin(kTwoPi * frac));
  }
  const std::int64_t m = chi.desc.modulus();
  std::int64_t dot = 0;
  for (std::size_t i = 0; i < coords.size(); ++i)
    dot = mod_reduce(dot + mod_reduce(coords[i] * chi.residues[i], m), m);
  const double frac = static_cast<double>(dot) / static_cast<double>(m);
  return cplx(std::cos(kTwoPi * frac), std::sin(kTwoPi * frac));
}

cplx char_eval(const Character& chi, const GroupElement& g) {
  check_same_descriptor(chi.desc, g.desc, "char_eval");
  return char_eval(chi, std::span<const std::int64_t>(g.coords));
}

Character char_sub(const Character& a, const Character& b) {
  check_same_descriptor(a.desc, b.desc, "char_sub");
  Character out{a.desc, {}, {}};
  if (a.desc.is_lattice()) {
    out.theta.resize(a.theta.size());
    for (std::size_t i = 0; i < a.theta.size(); ++i) {
      double d = a.theta[i] - b.theta[i];
      d -= std::floor(d);
      out.theta[i] = d;
    }
  } else {
    out.residues.resize(a.residues.size());
    for (std::size_t i = 0; i < a.residues.size(); ++i)
      out.residues[i] = mod_reduce(a.residues[i] - b.residues[i], a.desc.modulus());
  }
  return out;
}

Character trivial_character(const GroupDescriptor& desc) {
  Character chi{desc, {}, {}};
  if (desc.is_lattice())
    chi.theta.assign(desc.rank(), 0.0);
  else
    chi.residues.assign(desc.rank(), 0);
  return chi;
}

// ---------------------------------------------------------------------------
// FinitePart
// ---------------------------------------------------------------------------

FinitePart::FinitePart(GroupDescriptor desc, std::vector<Coords> elements) : desc_(desc) {
  flat_.reserve(elements.size() * desc.rank());
  for (const auto& e : elements) {
    Coords c = canonicalize(desc, e);
    flat_.insert(flat_.end(), c.begin(), c.end());
  }
  flat_ = sort_unique_flat(std::move(flat_), desc.rank());
  detect_box();
}

FinitePart FinitePart::box(const GroupDescriptor& desc, const Coords& lo, const Coords& hi) {
  if (std::cmp_not_equal(lo.size(), desc.rank()) || std::cmp_not_equal(hi.size(), desc.rank()))
    throw invalid_argument("box bounds do not match descriptor rank");
  std::int64_t count = 1;
  for (std::int64_t i = 0; i < desc.rank(); ++i) {
    if (hi[i] <= lo[i]) throw invalid_argument("box must be nonempty in every coordinate");
    if (!desc.is_lattice() && (lo[i] < 0 || hi[i] > desc.modulus()))
      throw invalid_argument("cyclic box must lie inside [0, m)");
    count *= hi[i] - lo[i];
    if (count > (std::int64_t{1} << 28))
      throw invalid_argument("box too large to enumerate");
  }
  FinitePart out;
  out.desc_ = desc;
  out.flat_.reserve(count * desc.rank());
  Coords cur = lo;
  while (true) {
    out.flat_.insert(out.flat_.end(), cur.begin(), cur.end());
    std::int64_t axis = desc.rank() - 1;
    while (axis >= 0) {
      if (++cur[axis] < hi[axis]) break;
      cur[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  out.is_box_ = true;
  out.box_lo_ = lo;
  out.box_hi_ = hi;
  return out;
}

FinitePart FinitePart::cube(const GroupDescriptor& desc, std::int64_t side) {
  return box(desc, Coords(desc.rank(), 0), Coords(desc.rank(), side));
}

FinitePart FinitePart::singleton(const GroupDescriptor& desc, const Coords& c) {
  return FinitePart(desc, {c});
}

FinitePart FinitePart::interval(std::int64_t lo, std::int64_t hi) {
  return box(GroupDescriptor::lattice(1), {lo}, {hi});
}

FinitePart FinitePart::full_group(const GroupDescriptor& desc) {
  if (desc.is_lattice()) throw invalid_argument("lattices are infinite");
  return box(desc, Coords(desc.rank(), 0), Coords(desc.rank(), desc.modulus()));
}

bool FinitePart::contains(std::span<const std::int64_t> coords) const {
  const std::int64_t r = desc_.rank();
  if (std::cmp_not_equal(coords.size(), r)) return false;
  if (is_box_) {
    for (std::int64_t i = 0; i < r; ++i)
      if (coords[i] < box_lo_[i] || coords[i] >= box_hi_[i]) return false;
    return true;
  }
  // binary search over the sorted flat buffer
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const std::int64_t* p = flat_.data() + mid * r;
    int cmp = 0;
    for (std::int64_t i = 0; i < r; ++i) {
      if (p[i] != coords[i]) {
        cmp = p[i] < coords[i] ? -1 : 1;
        break;
      }
    }
    if (cmp == 0) return true;
    if (cmp < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return false;
}

bool FinitePart::subset_of(const FinitePart& other) const {
  if (!(desc_ == other.desc_)) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (!other.contains(at(i))) return false;
  return true;
}

void FinitePart::detect_box() {
  const std::int64_t r = desc_.rank();
  if (flat_.empty()) {
    is_box_ = false;
    return;
  }
  const std::size_t n = size();
  Coords lo(r), hi(r);
  for (std::int64_t i = 0; i < r; ++i) {
    lo[i] = hi[i] = flat_[i];
  }
  for (std::size_t e = 1; e < n; ++e) {
    for (std::int64_t i = 0; i < r; ++i) {
      lo[i] = std::min(lo[i], flat_[e * r + i]);
      hi[i] = std::max(hi[i], flat_[e * r + i]);
    }
  }
  std::int64_t volume = 1;
  for (std::int64_t i = 0; i < r; ++i) {
    volume *= hi[i] - lo[i] + 1;
    if (volume > static_cast<std::int64_t>(n)) {
      is_box_ = false;
      return;
    }
  }
  is_box_ = (volume == static_cast<std::int64_t>(n));
  if (is_box_) {
    box_lo_ = lo;
    box_hi_ = hi;
    for (auto& v : box_hi_) ++v;  // half-open
  }
}

FinitePart negate(const FinitePart& a) {
  FinitePart out;
  out.desc_ = a.desc_;
  out.flat_ = a.flat_;
  const std::int64_t m = a.desc_.is_lattice() ? 0 : a.desc_.modulus();
  for (auto& v : out.flat_) v = m == 0 ? -v : mod_reduce(-v, m);
  out.flat_ = sort_unique_flat(std::move(out.flat_), a.desc_.rank());
  out.detect_box();
  return out;
}

FinitePart translate(const FinitePart& a, std::span<const std::int64_t> by) {
  if (std::cmp_not_equal(by.size(), a.desc_.rank()))
    throw invalid_argument("translate: rank mismatch");
  FinitePart out;
  out.desc_ = a.desc_;
  out.flat_ = a.flat_;
  const std::int64_t r = a.desc_.rank();
  const std::int64_t m = a.desc_.is_lattice() ? 0 : a.desc_.modulus();
  for (std::size_t e = 0; e < a.size(); ++e)
    for (std::int64_t i = 0; i < r; ++i) {
      auto& v = out.flat_[e * r + i];
      v += by[i];
      if (m != 0) v = mod_reduce(v, m);
    }
  out.flat_ = sort_unique_flat(std::move(out.flat_), r);
  out.detect_box();
  return out;
}

FinitePart minkowski_sum(const FinitePart& a, const FinitePart& b) {
  check_same_descriptor(a.desc_, b.desc_, "minkowski_sum");
  const std::int64_t r = a.desc_.rank();

  // Box + box over a lattice is again a box; no enumeration needed.
  if (a.desc_.is_lattice() && a.is_box_ && b.is_box_) {
    Coords lo(r), hi(r);
    for (std::int64_t i = 0; i < r; ++i) {
      lo[i] = a.box_lo_[i] + b.box_lo_[i];
      hi[i] = a.box_hi_[i] + b.box_hi_[i] - 1;  // half-open sum
    }
    std::int64_t volume = 1;
    bool small_enough = true;
    for (std::int64_t i = 0; i < r; ++i) {
      volume *= hi[i] - lo[i];
      if (volume > (std::int64_t{1} << 28)) small_enough = false;
    }
    if (small_enough) return FinitePart::box(a.desc_, lo, hi);
  }

  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;

  // Pairwise sums when affordable, otherwise a bounding-box membership scan.
  const std::int64_t pair_cost =
      static_cast<std::int64_t>(small.size()) * static_cast<std::int64_t>(large.size());
  if (pair_cost <= (std::int64_t{1} << 24) || !a.desc_.is_lattice()) {
    if (pair_cost > (std::int64_t{1} << 27))
      throw invalid_argument("minkowski_sum: sets too large to enumerate");
    FinitePart out;
    out.desc_ = a.desc_;
    out.flat_.reserve(pair_cost * r);
    const std::int64_t m = a.desc_.is_lattice() ? 0 : a.desc_.modulus();
    for (std::size_t i = 0; i < small.size(); ++i) {
      auto p = small.at(i);
      for (std::size_t j = 0; j < large.size(); ++j) {
        auto q = large.at(j);
        for (std::int64_t c = 0; c < r; ++c) {
          std::int64_t v = p[c] + q[c];
          out.flat_.push_back(m == 0 ? v : mod_reduce(v, m));
        }
      }
    }
    out.flat_ = sort_unique_flat(std::move(out.flat_), r);
    out.detect_box();
    return out;
  }

  // Scan candidates in the bounding box of the sum; x is in A+B iff some
  // a in A has x-a in B. For the box-like sets used here the first probe
  // almost always decides.
  Coords lo(r), hi(r);
  for (std::int64_t i = 0; i < r; ++i) {
    std::int64_t alo = small.at(0)[i], ahi = small.at(0)[i];
    for (std::size_t e = 1; e < small.size(); ++e) {
      alo = std::min(alo, small.at(e)[i]);
      ahi = std::max(ahi, small.at(e)[i]);
    }
    std::int64_t blo = large.at(0)[i], bhi = large.at(0)[i];
    for (std::size_t e = 1; e < large.size(); ++e) {
      blo = std::min(blo, large.at(e)[i]);
      bhi = std::max(bhi, large.at(e)[i]);
    }
    lo[i] = alo + blo;
    hi[i] = ahi + bhi + 1;
  }
  std::int64_t volume = 1;
  for (std::int64_t i = 0; i < r; ++i) {
    volume *= hi[i] - lo[i];
    if (volume > (std::int64_t{1} << 26))
      throw invalid_argument("minkowski_sum: candidate range too large");
  }
  FinitePart out;
  out.desc_ = a.desc_;
  Coords cur = lo, diff(r);
  while (true) {
    bool member = false;
    for (std::size_t e = 0; e < small.size() && !member; ++e) {
      auto p = small.at(e);
      for (std::int64_t i = 0; i < r; ++i) diff[i] = cur[i] - p[i];
      member = large.contains(diff);
    }
    if (member) out.flat_.insert(out.flat_.end(), cur.begin(), cur.end());
    std::int64_t axis = r - 1;
    while (axis >= 0) {
      if (++cur[axis] < hi[axis]) break;
      cur[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  // Already generated in lexicographic order without duplicates.
  out.detect_box();
  return out;
}

Ratio invariance_defect(const FinitePart& k_set, const FinitePart& f_set) {
  if (f_set.empty()) throw invalid_argument("invariance_defect: F must be nonempty");
  if (k_set.empty()) return Ratio{0, static_cast<std::int64_t>(f_set.size())};
  check_same_descriptor(k_set.descriptor(), f_set.descriptor(), "invariance_defect");

  // KF = F whenever F is the whole finite group.
  if (!f_set.descriptor().is_lattice()) {
    std::int64_t full = 1;
    for (std::int64_t i = 0; i < f_set.rank(); ++i) full *= f_set.descriptor().modulus();
    if (std::cmp_equal(f_set.size(), full))
      return Ratio{0, static_cast<std::int64_t>(f_set.size())};
  }

  const FinitePart kf = minkowski_sum(k_set, f_set);
  std::int64_t inter = 0;
  if (kf.size() < f_set.size()) {
    for (std::size_t i = 0; i < kf.size(); ++i) inter += f_set.contains(kf.at(i)) ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < f_set.size(); ++i) inter += kf.contains(f_set.at(i)) ? 1 : 0;
  }
  const std::int64_t sym =
      static_cast<std::int64_t>(kf.size()) + static_cast<std::int64_t>(f_set.size()) - 2 * inter;
  return Ratio{sym, static_cast<std::int64_t>(f_set.size())};
}

// ---------------------------------------------------------------------------
// FolnerPlan
// ---------------------------------------------------------------------------

FolnerPlan::FolnerPlan(GroupDescriptor desc, std::vector<FinitePart> sets)
    : desc_(desc), sets_(std::move(sets)) {
  if (sets_.empty()) throw invalid_argument("Folner plan must be nonempty");
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (sets_[i].empty()) throw invalid_argument("Folner sets must be nonempty");
    if (!(sets_[i].descriptor() == desc_))
      throw invalid_argument("Folner set descriptor mismatch");
    if (i > 0) {
      if (sets_[i].size() <= sets_[i - 1].size())
        throw invalid_argument("Folner sizes must be strictly increasing");
      if (!sets_[i - 1].subset_of(sets_[i]))
        throw invalid_argument("Folner sets must be nested");
    }
  }
}

FolnerPlan FolnerPlan::boxes(const GroupDescriptor& desc, std::span<const std::int64_t> sides) {
  std::vector<FinitePart> sets;
  sets.reserve(sides.size());
  for (std::int64_t s : sides) sets.push_back(FinitePart::cube(desc, s));
  return FolnerPlan(desc, std::move(sets));
}

FolnerPlan FolnerPlan::full_group(const GroupDescriptor& desc) {
  return FolnerPlan(desc, {FinitePart::full_group(desc)});
}

const FinitePart& FolnerPlan::level(std::size_t n) const {
  if (n < 1 || n > sets_.size())
    throw invalid_argument("Folner level out of range: " + std::to_string(n));
  return sets_[n - 1];
}

Ratio tempered_constant(const FolnerPlan& plan, std::size_t n) {
  if (n < 2 || n > plan.depth())
    throw invalid_argument("tempered_constant requires 2 <= n <= depth");
  const FinitePart& fn = plan.level(n);

  // Accumulate union_{k<n} (-F_k + F_n). Sum sets of boxes are boxes, so the
  // common case reduces to an exact union of boxes via sorted flat merge.
  std::vector<std::int64_t> acc;
  const std::int64_t r = fn.rank();
  for (std::size_t k = 1; k < n; ++k) {
    FinitePart term = minkowski_sum(negate(plan.level(k)), fn);
    // nested plans make later terms supersets of earlier ones
    for (std::size_t e = 0; e < term.size(); ++e) {
      auto p = term.at(e);
      acc.insert(acc.end(), p.begin(), p.end());
    }
  }
  acc = sort_unique_flat(std::move(acc), r);
  return Ratio{static_cast<std::int64_t>(acc.size() / r),
               static_cast<std::int64_t>(fn.size())};
}

// ---------------------------------------------------------------------------
// S(G)
// ---------------------------------------------------------------------------

CircleRange s_of_g(const GroupDescriptor& desc) {
  CircleRange out;
  if (desc.is_lattice()) {
    out.full_circle = true;
  } else {
    out.root_order = desc.modulus();
  }
  return out;
}

double distance_to_range(const CircleRange& range, cplx value) {
  if (range.full_circle) return std::abs(std::abs(value) - 1.0);
  const std::int64_t m = *range.root_order;
  double best = 2.0;
  for (std::int64_t k = 0; k < m; ++k) {
    const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
    best = std::min(best, std::abs(value - cplx(std::cos(ang), std::sin(ang))));
  }
  return best;
}

}  // namespace pdk
