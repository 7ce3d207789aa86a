#pragma once

// Enumeration of lattice elements in the norm ball B_Q = { g : ||g|| < Q }.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hypangles/hyperbolic.hpp"

namespace hypangles {

enum class LatticeKind {
  psl2z,       // PSL2(Z), base point i
  octagon,     // unit group of the order Z<i, j>, i^2 = -1, j^2 = 3, ij = -ji
  generators,  // user-supplied generating set
};

struct LatticeSpec {
  LatticeKind kind = LatticeKind::psl2z;
  /// Generating set, closed under inverses (empty for the builtin kinds).
  std::vector<GroupElement> generators;
  /// Hyperbolic area of a fundamental domain; vol(B_Q) ~ pi Q^2 normalization.
  double covolume = kPi / 3.0;
  /// Order of the stabilizer of the base point in the lattice.
  int stabilizer_order = 2;
  /// Maps the user's base point to i. Generators are stored already conjugated.
  GroupElement conjugator;
  std::string label = "psl2z";

  static LatticeSpec psl2z();
  /// The cocompact arithmetic lattice with a right-angled octagon as
  /// fundamental domain (covolume 2 pi by Gauss-Bonnet).
  static LatticeSpec octagon();

  /// Throws std::invalid_argument on a nonpositive covolume or stabilizer
  /// order, or a generator set that is not closed under inverses.
  void validate() const;
};

/// "psl2z" or "octagon"; throws std::invalid_argument otherwise.
LatticeSpec builtin_lattice(std::string_view name);

/// Identifies the orbit point g i exactly (integer lattices) or on a 1e-9 grid.
struct PointKey {
  std::array<std::int64_t, 3> v{};
  friend bool operator==(const PointKey&, const PointKey&) = default;
  friend auto operator<=>(const PointKey&, const PointKey&) = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const noexcept;
};

/// For integer matrices: g i = (ac + bd + i) / (c^2 + d^2).
PointKey integer_point_key(const IntEntries& e);
/// Orbit point quantized to a 1e-9 grid.
PointKey quantized_point_key(const GroupElement& g);

/// Norm-one quaternion alpha + beta i + gamma j + delta ij with i^2 = -1,
/// j^2 = 3, embedded as [[alpha + gamma s, beta - delta s],
///                       [-beta - delta s, alpha - gamma s]], s = sqrt 3.
struct QuaternionUnit {
  std::int64_t alpha = 1, beta = 0, gamma = 0, delta = 0;
};

GroupElement octagon_matrix(const QuaternionUnit& q);
/// Exact key of q . i; invariant under q -> -q and right multiplication by i.
PointKey octagon_point_key(const QuaternionUnit& q);

struct BallEnumeration {
  double Q = 0.0;
  /// Canonical representatives with norm_sq < Q^2, sorted lexicographically by
  /// entries, no duplicates.
  std::vector<GroupElement> elements;
  /// point_keys[k] identifies elements[k] . i.
  std::vector<PointKey> point_keys;
  /// False when the generated search hit its element budget.
  bool complete = true;
  std::string warning;

  std::size_t count() const { return elements.size(); }
};

/// Direct Diophantine enumeration of PSL2(Z) cap B_Q.
BallEnumeration enumerate_psl2z(double Q);

/// Direct enumeration of the octagon lattice cap B_Q via quaternion norms.
BallEnumeration enumerate_octagon(double Q);

struct GeneratedSearch {
  /// Words are expanded while their norm stays below margin * Q.
  double margin = 4.0;
  /// Search budget on the number of distinct elements visited.
  std::size_t max_elements = 20'000'000;
};

/// Breadth-first closure under the generators of `spec`. Exact when every
/// generator has integer entries; otherwise duplicates are merged on a 1e-9
/// grid. Throws std::invalid_argument for an empty generator list or margin < 1.
BallEnumeration enumerate_generated(const LatticeSpec& spec, double Q,
                                    const GeneratedSearch& search = {});

/// Dispatches on spec.kind.
BallEnumeration enumerate_lattice(const LatticeSpec& spec, double Q,
                                  const GeneratedSearch& search = {});

/// count * V / (pi Q^2); tends to 1 as Q grows.
double count_vs_asymptotic(const BallEnumeration& ball, const LatticeSpec& spec);

}  // namespace hypangles
