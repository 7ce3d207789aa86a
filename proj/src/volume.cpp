#include "hypangles/volume.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypangles/parallel.hpp"

namespace hypangles {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr std::size_t kShards = 64;

double angle_window(const RegionSpec& spec) { return 2.0 * spec.xi / (spec.Q * spec.Q); }

bool direct_member(const RegionSpec& spec, const GroupElement& g, const GroupElement& gM) {
  const double q2 = spec.Q * spec.Q;
  if (!(norm_sq(g) < q2) || !(norm_sq(gM) < q2)) return false;
  const RayAngle a = angle_of(g);
  const RayAngle b = angle_of(gM);
  if (a.stabilizer || b.stabilizer) return false;
  return circle_distance(b.theta - a.theta) < angle_window(spec);
}

// Membership of k_theta a_t k_{phi - m}, which is independent of theta.
bool sampled_member(const RegionSpec& spec, double t, double phi) {
  const PairNormAngle pair = pair_norm_and_angle(t, phi, spec.ell);
  if (!(pair.norm_sq < spec.Q * spec.Q)) return false;
  if (t >= spec.ell) return std::abs(std::atan(pair.tan_delta)) < angle_window(spec);
  const GroupElement g = translation(t) * rotation(phi);
  return direct_member(spec, g, g * translation(spec.ell));
}

// Integral over phi of |J_xi(cos phi)| for y = cos phi in [lo, hi].
double integrate_y_interval(const RegionSpec& spec, YInterval iv) {
  const double phi_lo = std::acos(std::clamp(iv.hi, -1.0, 1.0));
  const double phi_hi = std::acos(std::clamp(iv.lo, -1.0, 1.0));
  if (!(phi_hi > phi_lo)) return 0.0;
  auto f = [&spec](double phi) { return J_length(spec, std::cos(phi)); };
  return gauss_kronrod<double, 31>::integrate(f, phi_lo, phi_hi, 12, 1e-12);
}

}  // namespace

RegionSpec RegionSpec::make(const GroupElement& M, double Q, double xi) {
  if (fixes_base_point(M)) throw std::invalid_argument("M must not fix the base point");
  if (!(Q > 0.0)) throw std::invalid_argument("Q must be positive");
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
  RegionSpec s;
  s.M = M;
  s.Q = Q;
  s.xi = xi;
  const CartanCoords c = decompose_cartan(M);
  s.ell = c.t;
  s.m = c.theta;
  s.A = std::cosh(s.ell);
  s.B = std::sinh(s.ell);
  s.C = 2.0 * std::sinh(0.5 * s.ell);
  return s;
}

RegionSpec RegionSpec::from_length(double ell, double Q, double xi) {
  return make(translation(ell), Q, xi);
}

IntervalSet interval_endpoints(const RegionSpec& spec) {
  const double A = spec.A, B = spec.B, xi = spec.xi;
  IntervalSet out;
  out.y_split = (1.0 - A) / B;
  if (xi > B) {
    out.I1 = {{-1.0, out.y_split}};
    out.I2 = {{out.y_split, 1.0}};
    return out;
  }
  // B^2 (xi^2 + 1) y^2 + 2 A B xi^2 y + A^2 xi^2 - B^2 = 0, discriminant
  // 4 B^2 (B^2 - xi^2); q = -B (A xi^2 + r) keeps both roots cancellation-free.
  const double r = std::sqrt(std::max(0.0, (B - xi) * (B + xi)));
  const double q = -B * (A * xi * xi + r);
  const double lm = q / (B * B * (xi * xi + 1.0));
  const double lp = (A * A * xi * xi - B * B) / q;
  out.lambda_minus = std::min(lm, lp);
  out.lambda_plus = std::max(lm, lp);
  out.alpha = r / B;
  const double a = *out.alpha;
  if (xi > spec.C) {
    out.I1 = {{-1.0, *out.lambda_minus}, {*out.lambda_plus, out.y_split}};
    out.I2 = {{out.y_split, -a}, {a, 1.0}};
  } else {
    out.I1 = {{-1.0, *out.lambda_minus}};
    out.I2 = {{a, 1.0}};
  }
  return out;
}

double J_length(const RegionSpec& spec, double y) {
  const double s = std::sqrt(std::max(0.0, 1.0 - y * y));
  const double base = spec.A + spec.B * y;
  const double lower = spec.B * s / (spec.xi * base);
  const double upper = std::min(1.0, 1.0 / base);
  return std::max(0.0, upper - lower);
}

double F_M(const RegionSpec& spec) {
  const IntervalSet sets = interval_endpoints(spec);
  double total = 0.0;
  for (const auto& iv : sets.I1) total += integrate_y_interval(spec, iv);
  for (const auto& iv : sets.I2) total += integrate_y_interval(spec, iv);
  return total;
}

double closed_form_volume(const RegionSpec& spec) { return spec.Q * spec.Q * F_M(spec); }

Membership region_membership(const RegionSpec& spec, const GroupElement& g) {
  Membership out;
  const GroupElement gM = g * spec.M;
  out.direct = direct_member(spec, g, gM);
  const CartanCoords c = decompose_cartan(g);
  if (c.t < spec.ell) {
    out.fell_back = true;
    out.closed_form = out.direct;
    return out;
  }
  // ||g|| >= ||M|| keeps theta_{gM} - theta_g in [-pi/2, pi/2].
  const PairNormAngle pair = pair_norm_and_angle(c.t, c.phi + spec.m, spec.ell);
  const double q2 = spec.Q * spec.Q;
  out.closed_form = 2.0 * std::cosh(c.t) < q2 && pair.norm_sq < q2 &&
                    std::abs(std::atan(pair.tan_delta)) < angle_window(spec);
  return out;
}

bool region_contains(const RegionSpec& spec, const GroupElement& g) {
  return region_membership(spec, g).closed_form;
}

VolumeEstimate mc_volume(const RegionSpec& spec, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 10000) throw std::invalid_argument("mc_volume needs at least 10^4 samples");
  const double u_max = 0.5 * spec.Q * spec.Q;
  std::vector<std::uint64_t> hits(kShards, 0);
  parallel_chunks(samples, kShards, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    std::mt19937_64 rng(seq);
    // cosh t uniform matches the sinh t dt density.
    std::uniform_real_distribution<double> u_dist(1.0, u_max);
    std::uniform_real_distribution<double> phi_dist(-kPi, kPi);
    std::uint64_t h = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double t = std::acosh(u_dist(rng));
      const double phi = phi_dist(rng);
      if (sampled_member(spec, t, phi)) ++h;
    }
    hits[shard] = h;
  });
  std::uint64_t total_hits = 0;
  for (auto h : hits) total_hits += h;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(total_hits) / n;
  const double total = kPi * (spec.Q * spec.Q - 2.0);
  VolumeEstimate est;
  est.mean = total * p;
  est.stderr = total * std::sqrt(p * (1.0 - p) * n / (n - 1.0)) / std::sqrt(n);
  est.samples = samples;
  est.seed = seed;
  return est;
}

}  // namespace hypangles
