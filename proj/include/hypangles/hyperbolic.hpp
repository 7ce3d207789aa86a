#pragma once

// Matrix algebra in PSL2(R), the Moebius action on the upper half-plane and the
// Cartan (K A+ K) decomposition.
//
// Conventions used throughout the library:
//   k_theta = [[cos(theta/2), sin(theta/2)], [-sin(theta/2), cos(theta/2)]]
//   a_t     = diag(e^{t/2}, e^{-t/2}),  t >= 0
// so that k_theta acts on the Poincare disk as w -> e^{i theta} w and a_t moves
// i straight up to e^t i. The base point is always i; lattices given relative to
// another base point are conjugated first (see LatticeSpec::conjugator).

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>

namespace hypangles {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

/// Distance from theta to 2*pi*Z, in [0, pi].
double circle_distance(double theta);

struct IntEntries {
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  friend bool operator==(const IntEntries&, const IntEntries&) = default;
  friend auto operator<=>(const IntEntries&, const IntEntries&) = default;
};

struct HPoint {
  double x = 0.0;
  double y = 1.0;
};

/// Element of PSL2(R), stored as the representative whose first nonzero entry
/// (in the order a, b, c, d) is positive. Integer matrices keep an exact copy of
/// their entries so arithmetic lattices can be deduplicated without tolerance.
class GroupElement {
 public:
  GroupElement() = default;

  /// Validates ad - bc = 1 (relative tolerance 1e-12 of the squared norm) and
  /// canonicalizes the sign. Throws std::invalid_argument otherwise.
  static GroupElement from_entries(double a, double b, double c, double d);
  /// Exact determinant check; throws std::invalid_argument if ad - bc != 1.
  static GroupElement from_integers(std::int64_t a, std::int64_t b, std::int64_t c,
                                    std::int64_t d);
  /// No determinant check. For products of already-valid elements.
  static GroupElement unchecked(double a, double b, double c, double d);

  double a() const { return m_[0]; }
  double b() const { return m_[1]; }
  double c() const { return m_[2]; }
  double d() const { return m_[3]; }
  const std::array<double, 4>& entries() const { return m_; }
  const std::optional<IntEntries>& exact() const { return exact_; }

  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& rhs) const;

  HPoint act(HPoint z) const;
  /// g . i
  HPoint orbit_point() const;

 private:
  void canonicalize();

  std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
  std::optional<IntEntries> exact_ = IntEntries{};
};

/// Puts integer entries into the canonical PSL sign.
IntEntries canonical_sign(IntEntries e);

/// Angles of the K A+ K decomposition g = k_theta a_t k_phi.
struct CartanCoords {
  double theta = 0.0;
  double t = 0.0;
  double phi = 0.0;
};

GroupElement rotation(double theta);
GroupElement translation(double t);
GroupElement recompose(const CartanCoords& coords);

/// ||g||^2 = a^2 + b^2 + c^2 + d^2 = 2 cosh d(i, g i).
double norm_sq(const GroupElement& g);

/// Hyperbolic distance in the upper half-plane.
double hyperbolic_distance(HPoint z, HPoint w);

/// True when g fixes i (g lies in K), up to a 1e-12 relative tolerance on the
/// norm. Exact for integer-backed elements.
bool fixes_base_point(const GroupElement& g);

CartanCoords decompose_cartan(const GroupElement& g);

struct RayAngle {
  double theta = 0.0;
  /// g i = i; theta is then the placeholder 0 and must not be paired.
  bool stabilizer = false;
};

/// Direction at i of the geodesic ray towards g i, measured from the upward
/// vertical: theta = arg((g i - i) / (g i + i)) in [-pi, pi).
RayAngle angle_of(const GroupElement& g);

/// Closed forms for ||g M||^2 and tan(theta_{gM} - theta_g) when
/// g = k_theta a_t k_phi k_{-m} and M = k_m a_ell k_*.
struct PairNormAngle {
  double norm_sq = 0.0;
  double tan_delta = 0.0;
  /// Denominator A sinh t + B cos(phi) cosh t vanished (only possible for t <= ell).
  bool degenerate = false;
};

PairNormAngle pair_norm_and_angle(double t, double phi, double ell);

}  // namespace hypangles
