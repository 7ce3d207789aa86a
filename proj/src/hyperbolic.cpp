#include "hypangles/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypangles {

namespace {

// Relative size below which a floating entry counts as zero when choosing the
// PSL sign.
constexpr double kSignTolerance = 1e-11;

bool mul_exact(std::int64_t x, std::int64_t y, std::int64_t& out) {
  return !__builtin_mul_overflow(x, y, &out);
}

std::optional<IntEntries> multiply_exact(const IntEntries& l, const IntEntries& r) {
  std::int64_t p[8];
  if (!mul_exact(l.a, r.a, p[0]) || !mul_exact(l.b, r.c, p[1]) ||
      !mul_exact(l.a, r.b, p[2]) || !mul_exact(l.b, r.d, p[3]) ||
      !mul_exact(l.c, r.a, p[4]) || !mul_exact(l.d, r.c, p[5]) ||
      !mul_exact(l.c, r.b, p[6]) || !mul_exact(l.d, r.d, p[7])) {
    return std::nullopt;
  }
  IntEntries e;
  if (__builtin_add_overflow(p[0], p[1], &e.a) || __builtin_add_overflow(p[2], p[3], &e.b) ||
      __builtin_add_overflow(p[4], p[5], &e.c) || __builtin_add_overflow(p[6], p[7], &e.d)) {
    return std::nullopt;
  }
  return e;
}

}  // namespace

double wrap_angle(double theta) {
  double r = std::fmod(theta + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  // fmod can land exactly on the excluded endpoint after the shift.
  if (r >= kPi) r -= kTwoPi;
  return r;
}

double circle_distance(double theta) { return std::abs(wrap_angle(theta)); }

IntEntries canonical_sign(IntEntries e) {
  const std::int64_t first = e.a != 0 ? e.a : e.b != 0 ? e.b : e.c != 0 ? e.c : e.d;
  if (first < 0) e = IntEntries{-e.a, -e.b, -e.c, -e.d};
  return e;
}

GroupElement GroupElement::unchecked(double a, double b, double c, double d) {
  GroupElement g;
  g.m_ = {a, b, c, d};
  g.exact_.reset();
  g.canonicalize();
  return g;
}

GroupElement GroupElement::from_entries(double a, double b, double c, double d) {
  for (double v : {a, b, c, d}) {
    if (!std::isfinite(v)) throw std::invalid_argument("matrix entry is not finite");
  }
  const double scale = std::max(1.0, a * a + b * b + c * c + d * d);
  if (std::abs(a * d - b * c - 1.0) > 1e-12 * scale) {
    throw std::invalid_argument("matrix determinant is not 1");
  }
  GroupElement g = unchecked(a, b, c, d);
  // Entries that are exact integers keep the exact backing.
  if (std::all_of(g.m_.begin(), g.m_.end(),
                  [](double v) { return v == std::nearbyint(v) && std::abs(v) < 9.0e15; })) {
    IntEntries e{static_cast<std::int64_t>(g.m_[0]), static_cast<std::int64_t>(g.m_[1]),
                 static_cast<std::int64_t>(g.m_[2]), static_cast<std::int64_t>(g.m_[3])};
    if (e.a * e.d - e.b * e.c == 1) g.exact_ = e;
  }
  return g;
}

GroupElement GroupElement::from_integers(std::int64_t a, std::int64_t b, std::int64_t c,
                                         std::int64_t d) {
  std::int64_t ad = 0, bc = 0;
  if (!mul_exact(a, d, ad) || !mul_exact(b, c, bc) || ad - bc != 1) {
    throw std::invalid_argument("integer matrix determinant is not 1");
  }
  const IntEntries e = canonical_sign({a, b, c, d});
  GroupElement g;
  g.m_ = {static_cast<double>(e.a), static_cast<double>(e.b), static_cast<double>(e.c),
          static_cast<double>(e.d)};
  g.exact_ = e;
  return g;
}

void GroupElement::canonicalize() {
  const double scale = std::max({std::abs(m_[0]), std::abs(m_[1]), std::abs(m_[2]),
                                 std::abs(m_[3])});
  for (double v : m_) {
    if (std::abs(v) > kSignTolerance * scale) {
      if (v < 0.0) {
        for (double& x : m_) x = -x;
      }
      break;
    }
  }
}

GroupElement GroupElement::inverse() const {
  if (exact_) {
    const IntEntries& e = *exact_;
    return from_integers(e.d, -e.b, -e.c, e.a);
  }
  return unchecked(m_[3], -m_[1], -m_[2], m_[0]);
}

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  if (exact_ && rhs.exact_) {
    if (auto e = multiply_exact(*exact_, *rhs.exact_)) {
      GroupElement g;
      const IntEntries c = canonical_sign(*e);
      g.m_ = {static_cast<double>(c.a), static_cast<double>(c.b), static_cast<double>(c.c),
              static_cast<double>(c.d)};
      g.exact_ = c;
      return g;
    }
  }
  const auto& l = m_;
  const auto& r = rhs.m_;
  return unchecked(l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3],
                   l[2] * r[0] + l[3] * r[2], l[2] * r[1] + l[3] * r[3]);
}

HPoint GroupElement::act(HPoint z) const {
  // (a z + b) / (c z + d) with z = x + i y
  const double nr = m_[0] * z.x + m_[1];
  const double ni = m_[0] * z.y;
  const double dr = m_[2] * z.x + m_[3];
  const double di = m_[2] * z.y;
  const double den = dr * dr + di * di;
  return {(nr * dr + ni * di) / den, (ni * dr - nr * di) / den};
}

HPoint GroupElement::orbit_point() const {
  const auto [a, b, c, d] = m_;
  const double den = c * c + d * d;
  return {(a * c + b * d) / den, 1.0 / den};
}

GroupElement rotation(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return GroupElement::unchecked(c, s, -s, c);
}

GroupElement translation(double t) {
  return GroupElement::unchecked(std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t));
}

GroupElement recompose(const CartanCoords& coords) {
  return rotation(coords.theta) * translation(coords.t) * rotation(coords.phi);
}

double norm_sq(const GroupElement& g) {
  if (const auto& e = g.exact()) {
    return static_cast<double>(e->a * e->a + e->b * e->b + e->c * e->c + e->d * e->d);
  }
  const auto& m = g.entries();
  return m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
}

double hyperbolic_distance(HPoint z, HPoint w) {
  const double dx = z.x - w.x;
  const double dy = z.y - w.y;
  return std::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y));
}

bool fixes_base_point(const GroupElement& g) {
  if (const auto& e = g.exact()) {
    return e->a * e->c + e->b * e->d == 0 &&
           e->a * e->a + e->b * e->b == e->c * e->c + e->d * e->d;
  }
  return norm_sq(g) - 2.0 <= 1e-12 * norm_sq(g);
}

namespace {

// arg((g i - i)/(g i + i)). With g i = x + i y the disk point is proportional to
// (x^2 + y^2 - 1) - 2 i x, and in matrix entries that is
// (a^2 + b^2 - c^2 - d^2) - 2 i (ac + bd) over c^2 + d^2.
double ray_angle_raw(const GroupElement& g) {
  if (const auto& e = g.exact()) {
    const auto y = -2 * (e->a * e->c + e->b * e->d);
    const auto x = e->a * e->a + e->b * e->b - e->c * e->c - e->d * e->d;
    return wrap_angle(std::atan2(static_cast<double>(y), static_cast<double>(x)));
  }
  const auto [a, b, c, d] = g.entries();
  return wrap_angle(std::atan2(-2.0 * (a * c + b * d), a * a + b * b - c * c - d * d));
}

}  // namespace

RayAngle angle_of(const GroupElement& g) {
  if (fixes_base_point(g)) return {0.0, true};
  return {ray_angle_raw(g), false};
}

CartanCoords decompose_cartan(const GroupElement& g) {
  const double n2 = norm_sq(g);
  if (fixes_base_point(g)) {
    // g = k_phi; phi/2 is the rotation angle of the matrix, defined mod pi.
    return {0.0, 0.0, wrap_angle(2.0 * std::atan2(g.b(), g.a()))};
  }
  CartanCoords out;
  out.t = std::acosh(std::max(1.0, 0.5 * n2));
  out.theta = ray_angle_raw(g);
  // theta(g^{-1}) = pi - phi(g), which avoids forming a_{-t} k_{-theta} g.
  out.phi = wrap_angle(kPi - ray_angle_raw(g.inverse()));
  return out;
}

PairNormAngle pair_norm_and_angle(double t, double phi, double ell) {
  const double A = std::cosh(ell);
  const double B = std::sinh(ell);
  const double ct = std::cosh(t);
  const double st = std::sinh(t);
  PairNormAngle out;
  out.norm_sq = 2.0 * (A * ct + B * std::cos(phi) * st);
  const double den = A * st + B * std::cos(phi) * ct;
  const double num = B * std::sin(phi);
  if (std::abs(den) <= 1e-300 || std::abs(den) <= 1e-15 * (A * st + B * ct)) {
    out.degenerate = true;
    out.tan_delta = num >= 0.0 ? HUGE_VAL : -HUGE_VAL;
    return out;
  }
  out.tan_delta = num / den;
  return out;
}

}  // namespace hypangles
