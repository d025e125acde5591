#include "sequence.hpp"

#include <cmath>

namespace pdk {

UnimodularSeq::UnimodularSeq(GroupDescriptor desc, Coords window_sides, std::vector<cplx> values,
                             Provenance prov)
    : desc_(desc), sides_(std::move(window_sides)), values_(std::move(values)),
      prov_(std::move(prov)) {
  std::int64_t total = 1;
  for (std::int64_t s : sides_) {
    if (s < 1) throw invalid_argument("sequence window sides must be >= 1");
    total *= s;
  }
  if (std::cmp_not_equal(values_.size(), total))
    throw invalid_argument("sequence value count does not match its window");
}

bool UnimodularSeq::in_window(std::span<const std::int64_t> coords) const {
  if (std::cmp_not_equal(coords.size(), sides_.size())) return false;
  for (std::size_t i = 0; i < sides_.size(); ++i)
    if (coords[i] < 0 || coords[i] >= sides_[i]) return false;
  return true;
}

std::int64_t UnimodularSeq::flat_index(std::span<const std::int64_t> coords) const {
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < sides_.size(); ++i) idx = idx * sides_[i] + coords[i];
  return idx;
}

cplx UnimodularSeq::at(std::span<const std::int64_t> coords) const {
  if (!in_window(coords)) {
    std::string msg = "sequence window underflow at (";
    for (std::size_t i = 0; i < coords.size(); ++i)
      msg += (i ? "," : "") + std::to_string(coords[i]);
    msg += ")";
    throw invalid_argument(msg);
  }
  return values_[static_cast<std::size_t>(flat_index(coords))];
}

RealPairSeq realify(const UnimodularSeq& seq) {
  const double root2 = std::sqrt(2.0);
  RealPairSeq out;
  out.desc = seq.descriptor();
  out.window_sides = seq.window_sides();
  out.component_1.reserve(seq.values().size());
  out.component_2.reserve(seq.values().size());
  for (const cplx& v : seq.values()) {
    out.component_1.push_back(root2 * v.real());
    out.component_2.push_back(root2 * v.imag());
  }
  return out;
}

double paired_correlation(const RealPairSeq& pair, std::span<const std::int64_t> h,
                          const FinitePart& f_set) {
  if (f_set.empty()) throw invalid_argument("paired_correlation: empty average set");
  const std::size_t r = pair.window_sides.size();
  auto flat = [&](std::span<const std::int64_t> c) -> std::int64_t {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (c[i] < 0 || c[i] >= pair.window_sides[i])
        throw invalid_argument("paired_correlation: window underflow");
      idx = idx * pair.window_sides[i] + c[i];
    }
    return idx;
  };
  double acc1 = 0.0, acc2 = 0.0;
  Coords shifted(r);
  for (std::size_t e = 0; e < f_set.size(); ++e) {
    auto g = f_set.at(e);
    for (std::size_t i = 0; i < r; ++i) shifted[i] = g[i] + h[i];
    const std::int64_t a = flat(g);
    const std::int64_t b = flat(shifted);
    acc1 += pair.component_1[b] * pair.component_1[a];
    acc2 += pair.component_2[b] * pair.component_2[a];
  }
  const double n = static_cast<double>(f_set.size());
  return 0.5 * (acc1 / n) + 0.5 * (acc2 / n);
}

}  // namespace pdk
