#pragma once

// Empirical pair correlation of the ray angles theta_gamma, gamma in Gamma cap B_Q.
//
// N_Q(xi) counts unordered pairs of records with distinct orbit points whose
// angles are within 2 V xi / Q^2 on the circle; R2(xi) = V / (pi Q^2) N_Q(xi).

#include <optional>
#include <span>
#include <vector>

#include "hypangles/lattice.hpp"

namespace hypangles {

struct AngleRecord {
  double theta = 0.0;  // [-pi, pi)
  double norm_sq = 0.0;
  PointKey point_key;
};

/// Records for every enumerated element that moves the base point. Elements of
/// the stabilizer have no ray angle and take part in no pair.
std::vector<AngleRecord> angle_records(const BallEnumeration& ball);

/// Half-open arc [lo, lo + length) on R/2piZ.
struct Arc {
  double lo = -kPi;
  double length = kTwoPi;

  /// Arc from lo to hi going counterclockwise; hi - lo >= 2 pi gives the full
  /// circle. Throws std::invalid_argument for an empty arc.
  static Arc between(double lo, double hi);
  bool contains(double theta) const;
  bool full() const { return length >= kTwoPi; }
};

struct CorrelationCurve {
  double Q = 0.0;
  std::vector<double> xi_grid;
  std::vector<double> N_Q;
  std::vector<double> R2_emp;
  std::vector<double> g2_emp;
  std::optional<Arc> interval;
};

/// Number of unordered pairs with distinct point keys and circle distance
/// below 2 V xi / Q^2. Zero for xi <= 0.
double pair_count(std::span<const AngleRecord> records, double Q, double xi, double covolume);

/// pair_count at every grid value in one sweep. The grid must be strictly
/// increasing (std::invalid_argument otherwise).
std::vector<double> pair_counts(std::span<const AngleRecord> records, double Q,
                                std::span<const double> xi_grid, double covolume);

/// O(n^2) reference count, for testing.
double pair_count_brute_force(std::span<const AngleRecord> records, double Q, double xi,
                              double covolume);

CorrelationCurve empirical_R2(std::span<const AngleRecord> records, double Q,
                              std::span<const double> xi_grid, double covolume);

/// Only pairs with both angles in `interval`, normalized by 2 pi / |interval|.
CorrelationCurve restricted_R2(std::span<const AngleRecord> records, double Q,
                               std::span<const double> xi_grid, double covolume,
                               const Arc& interval);

/// Centered differences of r on the grid, with R2(0) = 0 as the left neighbour
/// of the first point and a backward difference at the last.
std::vector<double> density_from_cumulative(std::span<const double> xi_grid,
                                            std::span<const double> r);

/// xi_step, 2 xi_step, ... up to xi_max (inclusive within rounding).
std::vector<double> make_xi_grid(double xi_max, double xi_step);

}  // namespace hypangles
