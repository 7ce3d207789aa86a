#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace oracle {

std::uint64_t psl2z_count(double Q) {
  const auto R = static_cast<std::int64_t>(std::floor(Q));
  const double q2 = Q * Q;
  std::uint64_t n = 0;
  for (std::int64_t a = -R; a <= R; ++a) {
    for (std::int64_t b = -R; b <= R; ++b) {
      for (std::int64_t c = -R; c <= R; ++c) {
        for (std::int64_t d = -R; d <= R; ++d) {
          if (a * d - b * c != 1) continue;
          if (static_cast<double>(a * a + b * b + c * c + d * d) >= q2) continue;
          ++n;
        }
      }
    }
  }
  return n / 2;  // g and -g
}

std::uint64_t octagon_count(double Q) {
  // ||g||^2 = 2 (alpha^2 + beta^2 + 3 gamma^2 + 3 delta^2) < Q^2
  const double half = Q * Q / 2.0;
  const auto R = static_cast<std::int64_t>(std::ceil(std::sqrt(half)));
  std::uint64_t n = 0;
  for (std::int64_t al = -R; al <= R; ++al) {
    for (std::int64_t be = -R; be <= R; ++be) {
      for (std::int64_t ga = -R; ga <= R; ++ga) {
        for (std::int64_t de = -R; de <= R; ++de) {
          if (al * al + be * be - 3 * (ga * ga + de * de) != 1) continue;
          if (static_cast<double>(al * al + be * be + 3 * ga * ga + 3 * de * de) >= half) continue;
          ++n;
        }
      }
    }
  }
  return n / 2;
}

double f_naive(double xi_in, double ell_in) {
  // Extended precision absorbs the cancellation in ell - log(A + r) deep in the tail.
  const long double xi = xi_in, ell = ell_in;
  const long double A = std::cosh(ell), B = std::sinh(ell), C = 2.0L * std::sinh(ell / 2.0L);
  const long double k = 2.0L / (xi * xi);
  if (B <= xi) return static_cast<double>(k * ell);
  const long double r = std::sqrt(B * B - xi * xi);
  if (C <= xi) return static_cast<double>(k * (ell + std::log(1.0L + xi * xi) - 2.0L * std::log(A + r)));
  return static_cast<double>(k * (ell - std::log(A + r)));
}

namespace {

// zeta-antiderivatives, valid on the stated case ranges.
double anti_below(double z, double ell) {
  const double B = std::sinh(ell);
  const double A = std::cosh(ell);
  const double psi = std::asin(std::min(1.0, z / B));
  const double h = ell - std::log(A + std::sqrt(std::max(0.0, B * B - z * z)));
  const double first = z > 0.0 ? -2.0 * h / z : 0.0;
  return first + 4.0 * std::atan(std::exp(-ell) * std::tan(psi / 2.0));
}

double anti_between(double z, double ell) {
  const double B = std::sinh(ell);
  const double A = std::cosh(ell);
  const double psi = std::asin(std::min(1.0, z / B));
  const double h = ell + std::log(1.0 + z * z) - 2.0 * std::log(A + std::sqrt(std::max(0.0, B * B - z * z)));
  return -2.0 * h / z + 4.0 * std::atan(z) + 8.0 * std::atan(std::exp(-ell) * std::tan(psi / 2.0));
}

}  // namespace

double cumulative_f_closed(double xi, double ell) {
  if (ell <= 0.0 || xi <= 0.0) return 0.0;
  const double B = std::sinh(ell), C = 2.0 * std::sinh(ell / 2.0);
  double total = 0.0;
  // [0, min(xi, C)]: h(z) ~ z^2 near 0 so the antiderivative starts at 0.
  const double z1 = std::min(xi, C);
  total += anti_below(z1, ell) - anti_below(0.0, ell);
  if (xi <= C) return total;
  const double z2 = std::min(xi, B);
  total += anti_between(z2, ell) - anti_between(C, ell);
  if (xi <= B) return total;
  return total + 2.0 * ell * (1.0 / B - 1.0 / xi);
}

double J_naive(double xi, double ell, double y) {
  const double A = std::cosh(ell), B = std::sinh(ell);
  const double base = A + B * y;
  const double lo = B * std::sqrt(std::max(0.0, 1.0 - y * y)) / (xi * base);
  const double hi = std::min(1.0, 1.0 / base);
  return std::max(0.0, hi - lo);
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double F_closed(double xi, double ell) {
  const double A = std::cosh(ell), B = std::sinh(ell);
  // In phi in [0, pi]: split points where the active upper bound changes or
  // J crosses zero, found on a fine grid and refined by bisection.
  auto upper_switch = [&](double phi) { return A + B * std::cos(phi) - 1.0; };
  auto lower_hits_upper = [&](double phi) {
    const double base = A + B * std::cos(phi);
    return std::min(1.0, 1.0 / base) - B * std::sin(phi) / (xi * base);
  };
  std::vector<double> cuts = {0.0, pi};
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const double p0 = pi * k / n, p1 = pi * (k + 1) / n;
    if ((upper_switch(p0) < 0.0) != (upper_switch(p1) < 0.0)) cuts.push_back(bisect(upper_switch, p0, p1));
    if ((lower_hits_upper(p0) < 0.0) != (lower_hits_upper(p1) < 0.0)) {
      cuts.push_back(bisect(lower_hits_upper, p0, p1));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  // Antiderivatives in phi.
  auto anti_I1 = [&](double phi) { return phi + std::log(A + B * std::cos(phi)) / xi; };
  auto anti_I2 = [&](double phi) {
    const double half = phi / 2.0;
    return 2.0 * std::atan2(std::exp(-ell) * std::sin(half), std::cos(half)) +
           std::log(A + B * std::cos(phi)) / xi;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double p0 = cuts[k], p1 = cuts[k + 1];
    if (!(p1 > p0)) continue;
    const double mid = 0.5 * (p0 + p1);
    if (!(lower_hits_upper(mid) > 0.0)) continue;
    if (upper_switch(mid) <= 0.0) {
      total += anti_I1(p1) - anti_I1(p0);
    } else {
      total += anti_I2(p1) - anti_I2(p0);
    }
  }
  return total;  // y = cos phi covers [-1, 1] once for phi in [0, pi]
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 30);
}

double haar_integral(double xi, double alpha) {
  const double l1 = std::asinh(xi), l2 = 2.0 * std::asinh(xi / 2.0);
  auto g = [xi, alpha](double t) {
    if (t <= 0.0) return 0.0;
    return f_naive(xi, t) * std::sinh(t) * std::pow(2.0 * std::cosh(t), -alpha / 2.0);
  };
  // t = l1 + s^2 flattens the square-root cusp at l1.
  auto cusp = [&g, l1](double s) { return 2.0 * s * g(l1 + s * s); };
  const double end = l2 + 40.0;
  const double total = simpson(g, 0.0, l1, 1e-12) + simpson(cusp, 0.0, std::sqrt(l2 - l1), 1e-12) +
                       simpson(g, l2, l2 + 3.0, 1e-12) + simpson(g, l2 + 3.0, end, 1e-12);
  return 2.0 * pi * total;
}

double theta_complex(double a, double b, double c, double d) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> z = (a * i + b) / (c * i + d);
  return std::arg((z - i) / (z + i));
}

Mat random_sl2(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (std::abs(a) < 0.2) continue;
    return {a, b, c, (1.0 + b * c) / a};
  }
}

}  // namespace oracle
