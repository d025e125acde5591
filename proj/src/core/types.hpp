#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdk {

using cplx = std::complex<double>;
using Coords = std::vector<std::int64_t>;

/// Validation failure (bad arguments, descriptor mismatch, malformed config).
/// Maps to exit code 2 at the tool boundary.
class invalid_argument : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical rejection (indefinite covariance, sampler failure, failed
/// verification). Maps to exit code 3 at the tool boundary.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class GroupKind { IntegerLattice, CyclicSum };

/// A supported countable abelian group: Z^d, or a length-L truncation of the
/// infinite direct sum of Z/mZ. Elements are integer vectors of length rank().
class GroupDescriptor {
public:
  GroupDescriptor() : kind_(GroupKind::IntegerLattice), rank_(1), modulus_(0) {}

  static GroupDescriptor lattice(std::int64_t d) {
    if (d < 1) throw invalid_argument("lattice dimension must be >= 1");
    return GroupDescriptor(GroupKind::IntegerLattice, d, 0);
  }
  static GroupDescriptor cyclic_sum(std::int64_t m, std::int64_t length) {
    if (m < 2) throw invalid_argument("cyclic modulus must be >= 2");
    if (length < 1) throw invalid_argument("cyclic sum length must be >= 1");
    return GroupDescriptor(GroupKind::CyclicSum, length, m);
  }
  /// Parses "Z", "Z^d", "C(m)", "C(m)^L".
  static GroupDescriptor parse(std::string_view text);

  GroupKind kind() const { return kind_; }
  bool is_lattice() const { return kind_ == GroupKind::IntegerLattice; }
  std::int64_t rank() const { return rank_; }
  std::int64_t modulus() const { return modulus_; }
  std::string to_string() const;

  bool operator==(const GroupDescriptor&) const = default;

private:
  GroupDescriptor(GroupKind k, std::int64_t r, std::int64_t m)
      : kind_(k), rank_(r), modulus_(m) {}

  GroupKind kind_;
  std::int64_t rank_;
  std::int64_t modulus_;  // 0 for lattices
};

struct GroupElement {
  GroupDescriptor desc;
  Coords coords;
};

/// A point of the dual group. Lattice duals are torus points theta in [0,1)^d;
/// cyclic duals are residue vectors b in [0,m)^L.
struct Character {
  GroupDescriptor desc;
  std::vector<double> theta;   // lattice only
  Coords residues;             // cyclic only
};

/// Exact nonnegative ratio |A|/|B| from set counting.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Reproducibility record for every stochastic operation. Identical records
/// give identical output; parallel callers must partition stream indices.
struct SeedRecord {
  std::string generator = "xoshiro256++/splitmix64";
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace pdk
