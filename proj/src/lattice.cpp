#include "hypangles/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "hypangles/parallel.hpp"

namespace hypangles {

namespace {

constexpr double kPointGrid = 1e-9;
constexpr double kDedupGrid = 1e-9;
constexpr double kSqrt3 = 1.7320508075688772;

std::size_t mix(std::size_t h, std::uint64_t v) {
  // boost::hash_combine with the 64-bit golden ratio
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct IntEntriesHash {
  std::size_t operator()(const IntEntries& e) const noexcept {
    std::size_t h = 0;
    for (auto v : {e.a, e.b, e.c, e.d}) h = mix(h, static_cast<std::uint64_t>(v));
    return h;
  }
};

bool entries_less(const GroupElement& l, const GroupElement& r) {
  return l.entries() < r.entries();
}

// (g, x, y) with g = a x + b y = gcd(a, b) >= 0.
std::array<std::int64_t, 3> ext_gcd(std::int64_t a, std::int64_t b) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
    old_t = std::exchange(t, old_t - q * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

void finish(BallEnumeration& ball, std::vector<GroupElement> elements,
            const std::function<PointKey(const GroupElement&)>& key_of) {
  std::sort(elements.begin(), elements.end(), entries_less);
  ball.point_keys.reserve(elements.size());
  for (const auto& g : elements) ball.point_keys.push_back(key_of(g));
  ball.elements = std::move(elements);
}

void warn_if_tiny(BallEnumeration& ball) {
  if (ball.Q * ball.Q <= 2.0) {
    ball.warning = "Q is at most sqrt(2): the ball contains no lattice elements";
  }
}

// Approximate set of floating elements. Cells are 1e-9 in each entry; a lookup
// probes the cell and its nearer neighbour in every coordinate, so two copies of
// one element that differ by less than half a cell always collide.
class ApproxElementSet {
 public:
  bool insert(const GroupElement& g) {
    const auto& m = g.entries();
    std::array<std::int64_t, 4> base{};
    std::array<std::int64_t, 4> alt{};
    for (int i = 0; i < 4; ++i) {
      const double s = m[i] / kDedupGrid;
      base[i] = static_cast<std::int64_t>(std::floor(s));
      alt[i] = (s - std::floor(s) < 0.5) ? base[i] - 1 : base[i] + 1;
    }
    for (int mask = 0; mask < 16; ++mask) {
      std::array<std::int64_t, 4> cell = base;
      for (int i = 0; i < 4; ++i) {
        if (mask & (1 << i)) cell[i] = alt[i];
      }
      auto it = cells_.find(cell);
      if (it == cells_.end()) continue;
      for (const auto& other : it->second) {
        const auto& o = other.entries();
        bool same = true;
        for (int i = 0; i < 4 && same; ++i) same = std::abs(o[i] - m[i]) < kDedupGrid;
        if (same) return false;
      }
    }
    cells_[base].push_back(g);
    return true;
  }

 private:
  struct CellHash {
    std::size_t operator()(const std::array<std::int64_t, 4>& c) const noexcept {
      std::size_t h = 0;
      for (auto v : c) h = mix(h, static_cast<std::uint64_t>(v));
      return h;
    }
  };
  std::unordered_map<std::array<std::int64_t, 4>, std::vector<GroupElement>, CellHash> cells_;
};

}  // namespace

LatticeSpec LatticeSpec::psl2z() {
  LatticeSpec s;
  s.kind = LatticeKind::psl2z;
  s.covolume = kPi / 3.0;
  s.stabilizer_order = 2;
  s.label = "psl2z";
  return s;
}

LatticeSpec LatticeSpec::octagon() {
  LatticeSpec s;
  s.kind = LatticeKind::octagon;
  s.covolume = kTwoPi;
  s.stabilizer_order = 2;
  s.label = "octagon";
  return s;
}

void LatticeSpec::validate() const {
  if (!(covolume > 0.0)) throw std::invalid_argument("covolume must be positive");
  if (stabilizer_order < 1) throw std::invalid_argument("stabilizer_order must be positive");
  if (kind != LatticeKind::generators) return;
  if (generators.empty()) throw std::invalid_argument("generator list is empty");
  for (const auto& g : generators) {
    const double scale = std::max(1.0, norm_sq(g));
    if (std::abs(g.det() - 1.0) > 1e-12 * scale) {
      throw std::invalid_argument("generator determinant is not 1");
    }
    const GroupElement inv = g.inverse();
    const bool has_inverse = std::any_of(generators.begin(), generators.end(), [&](const auto& h) {
      for (int i = 0; i < 4; ++i) {
        if (std::abs(h.entries()[i] - inv.entries()[i]) > kDedupGrid) return false;
      }
      return true;
    });
    if (!has_inverse) throw std::invalid_argument("generator set is not closed under inverses");
  }
}

LatticeSpec builtin_lattice(std::string_view name) {
  if (name == "psl2z") return LatticeSpec::psl2z();
  if (name == "octagon") return LatticeSpec::octagon();
  throw std::invalid_argument("unknown lattice '" + std::string(name) + "'");
}

std::size_t PointKeyHash::operator()(const PointKey& k) const noexcept {
  std::size_t h = 0;
  for (auto v : k.v) h = mix(h, static_cast<std::uint64_t>(v));
  return h;
}

PointKey integer_point_key(const IntEntries& e) {
  return {{e.a * e.c + e.b * e.d, e.c * e.c + e.d * e.d, 0}};
}

PointKey quantized_point_key(const GroupElement& g) {
  const HPoint z = g.orbit_point();
  return {{std::llround(z.x / kPointGrid), std::llround(z.y / kPointGrid), 1}};
}

GroupElement octagon_matrix(const QuaternionUnit& q) {
  const double a = static_cast<double>(q.alpha), b = static_cast<double>(q.beta);
  const double c = static_cast<double>(q.gamma), d = static_cast<double>(q.delta);
  return GroupElement::unchecked(a + c * kSqrt3, b - d * kSqrt3, -b - d * kSqrt3, a - c * kSqrt3);
}

PointKey octagon_point_key(const QuaternionUnit& q) {
  // q . i = (num + i) / den with num = -2 s (alpha delta + beta gamma) and
  // den = alpha^2 + beta^2 + 3 gamma^2 + 3 delta^2 + 2 s (beta delta - alpha gamma).
  const auto [a, b, c, d] = q;
  return {{a * d + b * c, b * d - a * c, a * a + b * b + 3 * (c * c + d * d)}};
}

BallEnumeration enumerate_psl2z(double Q) {
  BallEnumeration ball;
  ball.Q = Q;
  warn_if_tiny(ball);
  const double q2 = Q * Q;
  if (q2 <= 2.0) return ball;

  auto inside = [q2](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return static_cast<double>(a * a + b * b + c * c + d * d) < q2;
  };

  // One representative of each +-pair has c > 0, or c = 0 and d = 1.
  const auto c_max = static_cast<std::int64_t>(std::ceil(Q));
  const std::size_t chunks = 64;
  std::vector<std::vector<GroupElement>> parts(chunks);
  parallel_chunks(static_cast<std::size_t>(c_max + 1), chunks,
                  [&](std::size_t k, std::size_t begin, std::size_t end) {
    auto& out = parts[k];
    for (auto c = static_cast<std::int64_t>(begin); c < static_cast<std::int64_t>(end); ++c) {
      if (c == 0) {
        const auto b_max = static_cast<std::int64_t>(std::ceil(Q));
        for (std::int64_t b = -b_max; b <= b_max; ++b) {
          if (inside(1, b, 0, 1)) out.push_back(GroupElement::from_integers(1, b, 0, 1));
        }
        continue;
      }
      for (std::int64_t d = -c_max; d <= c_max; ++d) {
        const std::int64_t m = c * c + d * d;
        if (static_cast<double>(m) + 1.0 >= q2) continue;
        const auto [g, x, y] = ext_gcd(d, c);
        if (g != 1) continue;
        // a d - b c = 1 with (a, b) = (x, -y) + k (c, d)
        const std::int64_t a0 = x, b0 = -y;
        const double r2 = q2 - static_cast<double>(m);
        const double p = static_cast<double>(a0 * c + b0 * d);
        const double root = std::sqrt(std::max(0.0, static_cast<double>(m) * r2 - 1.0));
        const auto k_lo = static_cast<std::int64_t>(std::floor((-p - root) / m)) - 1;
        const auto k_hi = static_cast<std::int64_t>(std::ceil((-p + root) / m)) + 1;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
          const std::int64_t a = a0 + k * c, b = b0 + k * d;
          if (inside(a, b, c, d)) out.push_back(GroupElement::from_integers(a, b, c, d));
        }
      }
    }
  });

  std::vector<GroupElement> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  finish(ball, std::move(all), [](const GroupElement& g) { return integer_point_key(*g.exact()); });
  return ball;
}

BallEnumeration enumerate_octagon(double Q) {
  BallEnumeration ball;
  ball.Q = Q;
  warn_if_tiny(ball);
  const double q2 = Q * Q;
  if (q2 <= 2.0) return ball;

  // ||g||^2 = 2 (alpha^2 + beta^2 + 3 gamma^2 + 3 delta^2) = 2 (2 n - 1) with
  // n = alpha^2 + beta^2 = 1 + 3 (gamma^2 + delta^2).
  std::int64_t n_max = 1;
  while (2.0 * static_cast<double>(2 * (n_max + 1) - 1) < q2) ++n_max;
  const std::int64_t m_max = (n_max - 1) / 3;

  // Representations of m = gamma^2 + delta^2, bucketed by m.
  const auto r_m = static_cast<std::int64_t>(std::sqrt(static_cast<double>(m_max))) + 1;
  std::vector<std::size_t> offsets(static_cast<std::size_t>(m_max) + 2, 0);
  for (std::int64_t g = -r_m; g <= r_m; ++g) {
    for (std::int64_t d = -r_m; d <= r_m; ++d) {
      const std::int64_t m = g * g + d * d;
      if (m <= m_max) ++offsets[static_cast<std::size_t>(m) + 1];
    }
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::array<std::int64_t, 2>> reps(offsets.back());
  {
    auto fill = offsets;
    for (std::int64_t g = -r_m; g <= r_m; ++g) {
      for (std::int64_t d = -r_m; d <= r_m; ++d) {
        const std::int64_t m = g * g + d * d;
        if (m <= m_max) reps[fill[static_cast<std::size_t>(m)]++] = {g, d};
      }
    }
  }

  const auto a_max = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n_max))) + 1;
  const std::size_t chunks = 64;
  std::vector<std::vector<std::pair<GroupElement, PointKey>>> parts(chunks);
  // q and -q are the same element; keep alpha > 0, or alpha = 0 and beta > 0.
  parallel_chunks(static_cast<std::size_t>(a_max + 1), chunks,
                  [&](std::size_t k, std::size_t begin, std::size_t end) {
    auto& out = parts[k];
    for (auto alpha = static_cast<std::int64_t>(begin); alpha < static_cast<std::int64_t>(end);
         ++alpha) {
      for (std::int64_t beta = -a_max; beta <= a_max; ++beta) {
        if (alpha == 0 && beta <= 0) continue;
        const std::int64_t n = alpha * alpha + beta * beta;
        if (n > n_max || n % 3 != 1) continue;
        const auto m = static_cast<std::size_t>((n - 1) / 3);
        for (std::size_t r = offsets[m]; r < offsets[m + 1]; ++r) {
          const QuaternionUnit q{alpha, beta, reps[r][0], reps[r][1]};
          out.emplace_back(octagon_matrix(q), octagon_point_key(q));
        }
      }
    }
  });

  std::vector<std::pair<GroupElement, PointKey>> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return entries_less(l.first, r.first); });
  ball.elements.reserve(all.size());
  ball.point_keys.reserve(all.size());
  for (auto& [g, key] : all) {
    ball.elements.push_back(g);
    ball.point_keys.push_back(key);
  }
  return ball;
}

BallEnumeration enumerate_generated(const LatticeSpec& spec, double Q,
                                    const GeneratedSearch& search) {
  if (spec.generators.empty()) throw std::invalid_argument("generator list is empty");
  if (!(search.margin >= 1.0)) throw std::invalid_argument("search margin must be at least 1");

  BallEnumeration ball;
  ball.Q = Q;
  warn_if_tiny(ball);

  const auto& gens = spec.generators;
  const bool exact = std::all_of(gens.begin(), gens.end(),
                                 [](const GroupElement& g) { return g.exact().has_value(); });
  const double bound = search.margin * Q;
  const double bound_sq = bound * bound;

  std::unordered_set<IntEntries, IntEntriesHash> seen_exact;
  ApproxElementSet seen_approx;
  auto insert = [&](const GroupElement& g) {
    if (exact && g.exact()) return seen_exact.insert(*g.exact()).second;
    return seen_approx.insert(g);
  };

  std::vector<GroupElement> visited{GroupElement{}};
  insert(visited.front());
  std::size_t level_begin = 0;
  while (level_begin < visited.size()) {
    const std::size_t level_end = visited.size();
    const std::size_t width = level_end - level_begin;
    const std::size_t chunks = std::min<std::size_t>(64, width);
    std::vector<std::vector<GroupElement>> candidates(chunks);
    parallel_chunks(width, chunks, [&](std::size_t k, std::size_t begin, std::size_t end) {
      for (std::size_t i = level_begin + begin; i < level_begin + end; ++i) {
        for (const auto& gen : gens) {
          GroupElement p = visited[i] * gen;
          if (norm_sq(p) < bound_sq) candidates[k].push_back(std::move(p));
        }
      }
    });
    for (auto& part : candidates) {
      for (auto& p : part) {
        if (insert(p)) visited.push_back(std::move(p));
      }
    }
    if (visited.size() > search.max_elements) {
      ball.complete = false;
      ball.warning = "element budget exhausted; enumeration is partial";
      break;
    }
    level_begin = level_end;
  }

  const double q2 = Q * Q;
  std::vector<GroupElement> inside;
  for (auto& g : visited) {
    if (norm_sq(g) < q2) inside.push_back(std::move(g));
  }
  finish(ball, std::move(inside), [exact](const GroupElement& g) {
    return exact && g.exact() ? integer_point_key(*g.exact()) : quantized_point_key(g);
  });
  return ball;
}

BallEnumeration enumerate_lattice(const LatticeSpec& spec, double Q,
                                  const GeneratedSearch& search) {
  switch (spec.kind) {
    case LatticeKind::psl2z:
      return enumerate_psl2z(Q);
    case LatticeKind::octagon:
      return enumerate_octagon(Q);
    case LatticeKind::generators:
      return enumerate_generated(spec, Q, search);
  }
  throw std::logic_error("unhandled lattice kind");
}

double count_vs_asymptotic(const BallEnumeration& ball, const LatticeSpec& spec) {
  return static_cast<double>(ball.count()) * spec.covolume / (kPi * ball.Q * ball.Q);
}

}  // namespace hypangles
