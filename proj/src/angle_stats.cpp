#include "hypangles/angle_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hypangles/parallel.hpp"

namespace hypangles {

namespace {

std::vector<double> windows(std::span<const double> xi_grid, double Q, double covolume) {
  for (std::size_t j = 1; j < xi_grid.size(); ++j) {
    if (!(xi_grid[j] > xi_grid[j - 1])) {
      throw std::invalid_argument("xi grid must be strictly increasing");
    }
  }
  std::vector<double> w(xi_grid.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 2.0 * covolume * xi_grid[j] / (Q * Q);
  return w;
}

// Unordered pairs with equal point keys.
std::uint64_t same_point_pairs(std::span<const AngleRecord> records) {
  std::vector<PointKey> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.push_back(r.point_key);
  std::sort(keys.begin(), keys.end());
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const std::uint64_t m = j - i;
    pairs += m * (m - 1) / 2;
    i = j;
  }
  return pairs;
}

}  // namespace

std::vector<AngleRecord> angle_records(const BallEnumeration& ball) {
  std::vector<AngleRecord> out;
  out.reserve(ball.count());
  for (std::size_t k = 0; k < ball.count(); ++k) {
    const RayAngle ray = angle_of(ball.elements[k]);
    if (ray.stabilizer) continue;
    out.push_back({ray.theta, norm_sq(ball.elements[k]), ball.point_keys[k]});
  }
  return out;
}

Arc Arc::between(double lo, double hi) {
  const double length = hi - lo;
  if (!(length > 0.0)) throw std::invalid_argument("interval must have positive length");
  return {wrap_angle(lo), std::min(length, kTwoPi)};
}

bool Arc::contains(double theta) const {
  if (full()) return true;
  double offset = std::fmod(theta - lo, kTwoPi);
  if (offset < 0.0) offset += kTwoPi;
  return offset < length;
}

std::vector<double> pair_counts(std::span<const AngleRecord> records, double Q,
                                std::span<const double> xi_grid, double covolume) {
  const std::vector<double> w = windows(xi_grid, Q, covolume);
  std::vector<double> counts(w.size(), 0.0);
  const std::size_t n = records.size();
  if (n < 2 || w.empty()) return counts;

  struct Entry {
    double theta;
    PointKey key;
  };
  std::vector<Entry> sorted;
  sorted.reserve(n);
  for (const auto& r : records) sorted.push_back({r.theta, r.point_key});
  std::sort(sorted.begin(), sorted.end(), [](const Entry& l, const Entry& r) {
    return l.theta < r.theta || (l.theta == r.theta && l.key < r.key);
  });

  // Windows wider than pi contain every pair; the sweep only needs distances
  // below pi, where each unordered pair appears exactly once going around.
  const double scan = std::min(w.back(), kPi);
  const std::size_t chunks = 64;
  std::vector<std::vector<std::uint64_t>> hist(chunks, std::vector<std::uint64_t>(w.size() + 1, 0));
  parallel_chunks(n, chunks, [&](std::size_t k, std::size_t begin, std::size_t end) {
    auto& h = hist[k];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t step = 1; step < n; ++step) {
        std::size_t j = i + step;
        double diff;
        if (j < n) {
          diff = sorted[j].theta - sorted[i].theta;
        } else {
          j -= n;
          diff = sorted[j].theta + kTwoPi - sorted[i].theta;
        }
        if (!(diff < scan)) break;
        if (sorted[j].key == sorted[i].key) continue;
        ++h[static_cast<std::size_t>(std::upper_bound(w.begin(), w.end(), diff) - w.begin())];
      }
    }
  });

  std::vector<std::uint64_t> total(w.size() + 1, 0);
  for (const auto& h : hist) {
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += h[j];
  }
  const std::uint64_t all_pairs =
      static_cast<std::uint64_t>(n) * (n - 1) / 2 - same_point_pairs(records);
  std::uint64_t running = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    running += total[j];
    if (xi_grid[j] <= 0.0) {
      counts[j] = 0.0;
    } else if (w[j] > kPi) {
      counts[j] = static_cast<double>(all_pairs);
    } else {
      counts[j] = static_cast<double>(running);
    }
  }
  return counts;
}

double pair_count(std::span<const AngleRecord> records, double Q, double xi, double covolume) {
  if (xi <= 0.0) return 0.0;
  const double grid[] = {xi};
  return pair_counts(records, Q, grid, covolume).front();
}

double pair_count_brute_force(std::span<const AngleRecord> records, double Q, double xi,
                              double covolume) {
  if (xi <= 0.0) return 0.0;
  const double w = 2.0 * covolume * xi / (Q * Q);
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      if (records[i].point_key == records[j].point_key) continue;
      if (circle_distance(records[i].theta - records[j].theta) < w) ++pairs;
    }
  }
  return static_cast<double>(pairs);
}

std::vector<double> density_from_cumulative(std::span<const double> xi_grid,
                                            std::span<const double> r) {
  const std::size_t n = xi_grid.size();
  std::vector<double> g(n, 0.0);
  if (n == 0) return g;
  if (n == 1) {
    g[0] = xi_grid[0] > 0.0 ? r[0] / xi_grid[0] : 0.0;
    return g;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double x_lo = j == 0 ? 0.0 : xi_grid[j - 1];
    const double r_lo = j == 0 ? 0.0 : r[j - 1];
    const double x_hi = j + 1 < n ? xi_grid[j + 1] : xi_grid[j];
    const double r_hi = j + 1 < n ? r[j + 1] : r[j];
    g[j] = (r_hi - r_lo) / (x_hi - x_lo);
  }
  return g;
}

CorrelationCurve empirical_R2(std::span<const AngleRecord> records, double Q,
                              std::span<const double> xi_grid, double covolume) {
  CorrelationCurve curve;
  curve.Q = Q;
  curve.xi_grid.assign(xi_grid.begin(), xi_grid.end());
  curve.N_Q = pair_counts(records, Q, xi_grid, covolume);
  const double scale = covolume / (kPi * Q * Q);
  curve.R2_emp.reserve(curve.N_Q.size());
  for (double c : curve.N_Q) curve.R2_emp.push_back(scale * c);
  curve.g2_emp = density_from_cumulative(curve.xi_grid, curve.R2_emp);
  return curve;
}

CorrelationCurve restricted_R2(std::span<const AngleRecord> records, double Q,
                               std::span<const double> xi_grid, double covolume,
                               const Arc& interval) {
  if (!(interval.length > 0.0)) throw std::invalid_argument("interval must have positive length");
  std::vector<AngleRecord> inside;
  for (const auto& r : records) {
    if (interval.contains(r.theta)) inside.push_back(r);
  }
  CorrelationCurve curve;
  curve.Q = Q;
  curve.interval = interval;
  curve.xi_grid.assign(xi_grid.begin(), xi_grid.end());
  curve.N_Q = pair_counts(inside, Q, xi_grid, covolume);
  const double scale = (kTwoPi / interval.length) * covolume / (kPi * Q * Q);
  for (double c : curve.N_Q) curve.R2_emp.push_back(scale * c);
  curve.g2_emp = density_from_cumulative(curve.xi_grid, curve.R2_emp);
  return curve;
}

std::vector<double> make_xi_grid(double xi_max, double xi_step) {
  if (!(xi_step > 0.0)) throw std::invalid_argument("xi_step must be positive");
  if (!(xi_max > 0.0)) throw std::invalid_argument("xi_max must be positive");
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor(xi_max / xi_step + 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) grid.push_back(static_cast<double>(k) * xi_step);
  return grid;
}

}  // namespace hypangles
