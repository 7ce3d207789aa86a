#pragma once

// Limiting pair correlation density. For a displacement length ell with
// A = cosh ell, B = sinh ell, C = 2 sinh(ell / 2):
//
//   f_xi(ell) = 2/xi^2 * ell                                          if B <= xi
//             = 2/xi^2 * (ell + log(1 + xi^2) - 2 log(A + sqrt(B^2 - xi^2)))  if C <= xi <= B
//             = 2/xi^2 * (ell - log(A + sqrt(B^2 - xi^2)))           if xi <= C
//
// and the lattice density is g2(x) = V/(2 pi) * sum_M f_{V x}(ell(M)).

#include <cstddef>
#include <span>
#include <vector>

#include "hypangles/lattice.hpp"

namespace hypangles {

enum class FxiCase {
  above_b,  // B <= xi
  between,  // C <= xi < B
  below_c,  // xi < C
};

struct FxiEval {
  double ell = 0.0;
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
  double value = 0.0;
  FxiCase case_tag = FxiCase::above_b;
};

/// Requires xi > 0 and ell >= 0 (std::domain_error otherwise).
FxiEval f_xi(double xi, double ell);

struct FxiSlope {
  double value = 0.0;
  /// False at the kinks ell1(xi), ell2(xi).
  bool differentiable = true;
};

/// d/d ell of f_xi(ell).
FxiSlope f_xi_prime(double xi, double ell);

/// sinh(ell1) = 2 sinh(ell2 / 2) = xi.
struct Breakpoints {
  double ell1 = 0.0;
  double ell2 = 0.0;
};

Breakpoints breakpoints(double xi);

/// Integral over zeta in [0, xi] of f_zeta(ell), by quadrature split at
/// zeta = C(ell) and zeta = B(ell).
double cumulative_f(double xi, double ell);

/// Haar integral of f_xi(ell(g)) over G: 2 pi * int_0^inf f_xi(t) sinh t dt.
double integral_f_xi(double xi);

/// Same with the weight ||g||^{-alpha} = (2 cosh t)^{-alpha/2}.
double integral_f_xi_weighted(double xi, double alpha);

/// The kernel is indexed by V x when the density is read at x; this is the
/// only place that rescaling happens.
inline double kernel_argument(double xi, double covolume) { return covolume * xi; }

/// Displacement lengths of a ball enumeration, grouped by norm.
class LengthSpectrum {
 public:
  struct Shell {
    double norm_sq = 0.0;
    double ell = 0.0;
    std::size_t multiplicity = 0;
  };

  LengthSpectrum() = default;
  /// Drops elements of K (ell = 0), which contribute nothing.
  static LengthSpectrum from_enumeration(const BallEnumeration& ball);
  static LengthSpectrum from_norms(std::span<const double> norm_sq, double T_max);

  const std::vector<Shell>& shells() const { return shells_; }
  double T_max() const { return T_max_; }

 private:
  std::vector<Shell> shells_;
  double T_max_ = 0.0;
};

struct G2Value {
  double value = 0.0;
  /// Estimated size of the omitted terms with ||M|| >= T_max.
  double tail_bound = 0.0;
};

/// g2 at x (density argument; the kernel sees V x). Throws std::domain_error
/// "truncation below support knee" unless the outer dyadic shell
/// T_max/2 <= ||M|| < T_max lies beyond the kink ell2(V x).
G2Value g2_theoretical(double xi, const LengthSpectrum& spectrum, double covolume);
G2Value g2_theoretical(double xi, const BallEnumeration& ball, const LatticeSpec& spec);

/// g2(0) = V/pi * sum_{ell(M) > 0} 1 / (e^{2 ell(M)} - 1).
double g2_at_zero(const LengthSpectrum& spectrum, double covolume);

struct R2Theory {
  std::vector<double> value;
  std::vector<double> tail_bound;
};

/// R2(x) = 1/(2 pi) * sum_M int_0^{V x} f_zeta(ell(M)) d zeta on a strictly
/// increasing grid of nonnegative x.
R2Theory R2_theoretical(std::span<const double> xi_grid, const LengthSpectrum& spectrum,
                        double covolume);

}  // namespace hypangles
