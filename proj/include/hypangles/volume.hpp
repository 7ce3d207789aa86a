#pragma once

// The region R_M(Q, xi) = { g : ||g|| < Q, ||g M|| < Q, |theta_g - theta_{gM}| < 2 xi / Q^2 }
// and three independent ways of measuring it: the one-dimensional integral
// F_M(xi), whose Q^2 multiple is the leading volume term, the pointwise
// membership test, and a Monte Carlo estimate under Haar measure.
//
// With x = 2 cosh t / Q^2 and y = cos phi the region becomes, to leading order,
//   x < 1,  x (A + B y) < 1,  B sqrt(1 - y^2) / (xi (A + B y)) < x,
// so F_M(xi) = int_{-1}^{1} |J_xi(y)| dy / sqrt(1 - y^2) with J_xi(y) the
// admissible x-interval.

#include <cstdint>
#include <optional>
#include <vector>

#include "hypangles/hyperbolic.hpp"

namespace hypangles {

struct RegionSpec {
  GroupElement M;
  double Q = 0.0;
  double xi = 0.0;
  double ell = 0.0;
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
  /// First Cartan angle of M; g = k_theta a_t k_{phi - m} pairs with phi.
  double m = 0.0;

  /// Throws std::invalid_argument if M fixes i, Q <= 0 or xi <= 0.
  static RegionSpec make(const GroupElement& M, double Q, double xi);
  /// M = a_ell.
  static RegionSpec from_length(double ell, double Q, double xi);
};

struct YInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// I1 is where x < 1 binds (y <= (1 - A)/B), I2 where x (A + B y) < 1 binds;
/// J_xi is empty on the rest of [-1, 1].
struct IntervalSet {
  std::vector<YInterval> I1;
  std::vector<YInterval> I2;
  /// Roots of B sqrt(1 - y^2) = xi (A + B y); present iff xi <= B.
  std::optional<double> lambda_minus;
  std::optional<double> lambda_plus;
  /// B sqrt(1 - alpha^2) = xi, alpha >= 0; present iff xi <= B.
  std::optional<double> alpha;
  double y_split = 0.0;  // (1 - A) / B
};

IntervalSet interval_endpoints(const RegionSpec& spec);

/// |J_xi(y)| for y in [-1, 1].
double J_length(const RegionSpec& spec, double y);

double F_M(const RegionSpec& spec);

/// Q^2 F_M(xi).
double closed_form_volume(const RegionSpec& spec);

struct Membership {
  bool direct = false;
  bool closed_form = false;
  /// ||g|| < ||M||: the closed-form angle is ambiguous and the direct
  /// decomposition was used for closed_form too.
  bool fell_back = false;
};

/// Both membership computations for g not fixing i.
Membership region_membership(const RegionSpec& spec, const GroupElement& g);

bool region_contains(const RegionSpec& spec, const GroupElement& g);

struct VolumeEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Haar-measure volume of R_M(Q, xi) by sampling B_Q, whose total measure is
/// pi (Q^2 - 2). Reproducible from (seed, samples) regardless of thread count.
/// Throws std::invalid_argument for fewer than 10^4 samples.
VolumeEstimate mc_volume(const RegionSpec& spec, std::uint64_t samples, std::uint64_t seed);

}  // namespace hypangles
