#include "skewfatou/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skewfatou {

namespace {

constexpr double kTwoPi = 6.283185307179586477;

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guard against rounding at the top edge
  return f;
}

// best rational approximation p/q with q <= max_den; returns false when
// |x - p/q| > tol for every convergent
bool rationalize(double x, long max_den, double tol, long& p, long& q) {
  double target = x;
  long p0 = 1, q0 = 0;  // p(-1)/q(-1)
  long p1 = static_cast<long>(std::floor(target)), q1 = 1;
  double rem = target - std::floor(target);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(target - static_cast<double>(p1) / q1) <= tol) {
      p = p1;
      q = q1;
      return true;
    }
    if (rem == 0.0) break;
    double inv = 1.0 / rem;
    long a = static_cast<long>(std::floor(inv));
    rem = inv - std::floor(inv);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den || q2 <= 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  if (std::abs(target - static_cast<double>(p1) / q1) <= tol) {
    p = p1;
    q = q1;
    return true;
  }
  return false;
}

}  // namespace

TorusLattice TorusLattice::from_mu(Complex mu) {
  if (!(std::abs(mu) > 1.0)) {
    throw std::invalid_argument("TorusLattice: |mu| > 1 required");
  }
  TorusLattice t;
  t.log_mu = std::log(mu);  // principal branch; any branch gives the same T
  return t;
}

std::array<double, 2> TorusLattice::coords(Complex v) const {
  // v = alpha * (2 pi i) + beta * log_mu over the reals
  double beta = v.real() / log_mu.real();
  double alpha = (v.imag() - beta * log_mu.imag()) / kTwoPi;
  return {frac(alpha), frac(beta)};
}

Complex TorusLattice::from_coords(double alpha, double beta) const {
  return Complex{0.0, kTwoPi * alpha} + beta * log_mu;
}

TorusPoint embed(const TorusLattice& lattice, Complex z) {
  if (z == Complex{0.0}) {
    throw ZeroInput("embed: log 0");
  }
  auto ab = lattice.coords(std::log(z));
  return {lattice.from_coords(ab[0], ab[1]), ab[0], ab[1]};
}

TorusPoint torus_point(const TorusLattice& lattice, double alpha, double beta) {
  double a = frac(alpha), b = frac(beta);
  return {lattice.from_coords(a, b), a, b};
}

TorusPoint torus_add(const TorusLattice& lattice, const TorusPoint& a,
                     const TorusPoint& b) {
  return torus_point(lattice, a.alpha + b.alpha, a.beta + b.beta);
}

TorusPoint torus_scale(const TorusLattice& lattice, const TorusPoint& a,
                       long s) {
  // split to keep s * alpha exact-ish for s up to ~10^9
  double ia, ib;
  double fa = std::modf(a.alpha, &ia);
  double fb = std::modf(a.beta, &ib);
  (void)ia;
  (void)ib;
  return torus_point(lattice, frac(static_cast<double>(s) * fa),
                     frac(static_cast<double>(s) * fb));
}

OrbitClosure orbit_closure(const TorusLattice& lattice, const TorusPoint& y,
                           double tol) {
  OrbitClosure out;
  const long max_den = out.max_denominator;
  long pa, qa, pb, qb;
  bool a_rat = rationalize(y.alpha, max_den, tol, pa, qa);
  bool b_rat = rationalize(y.beta, max_den, tol, pb, qb);
  if (a_rat && b_rat) {
    out.kind = OrbitClosure::Kind::Finite;
    out.order = static_cast<int>(std::lcm(qa, qb));
    return out;
  }
  // single rational relation m*alpha + n*beta = rational, primitive (m, n)
  const int bound = 64;
  for (int total = 1; total <= 2 * bound; ++total) {
    for (int m = -bound; m <= bound; ++m) {
      int n_abs = total - std::abs(m);
      if (n_abs < 0 || n_abs > bound) continue;
      for (int n : {n_abs, -n_abs}) {
        if (m == 0 && n == 0) continue;
        if (n == 0 && n_abs == 0 && m < 0) continue;  // sign dup
        if (std::gcd(std::abs(m), std::abs(n)) != 1) continue;
        double v = m * y.alpha + n * y.beta;
        long pc, qc;
        if (rationalize(v, max_den, tol * (std::abs(m) + std::abs(n)), pc,
                        qc)) {
          out.kind = OrbitClosure::Kind::LineFamily;
          out.relation = {m, n};
          // components = order of (m alpha + n beta) in R/Z
          out.line_count = static_cast<int>(qc);
          out.line_direction = lattice.from_coords(n, -static_cast<double>(m));
          return out;
        }
        if (n == 0) break;  // avoid re-testing (m, 0) twice
      }
    }
  }
  out.kind = OrbitClosure::Kind::Dense;
  return out;
}

bool RectUnion::contains(double alpha, double beta) const {
  for (const auto& r : rects) {
    if (alpha >= r[0] && alpha < r[1] && beta >= r[2] && beta < r[3]) {
      return true;
    }
  }
  return false;
}

double RectUnion::area() const {
  // coordinate compression over the alpha axis, sweep in beta per slab
  std::vector<double> xs;
  for (const auto& r : rects) {
    xs.push_back(r[0]);
    xs.push_back(r[1]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double x0 = xs[i], x1 = xs[i + 1];
    double xm = 0.5 * (x0 + x1);
    std::vector<std::pair<double, double>> spans;
    for (const auto& r : rects) {
      if (xm >= r[0] && xm < r[1]) spans.emplace_back(r[2], r[3]);
    }
    std::sort(spans.begin(), spans.end());
    double covered = 0.0, cur_lo = 0.0, cur_hi = -1.0;
    for (const auto& [lo, hi] : spans) {
      if (hi <= lo) continue;
      if (cur_hi < lo) {
        if (cur_hi > cur_lo) covered += cur_hi - cur_lo;
        cur_lo = lo;
        cur_hi = hi;
      } else {
        cur_hi = std::max(cur_hi, hi);
      }
    }
    if (cur_hi > cur_lo) covered += cur_hi - cur_lo;
    total += (x1 - x0) * covered;
  }
  return total;
}

double equidistribution_gap(const TorusLattice& lattice, const TorusPoint& y,
                            const RectUnion& O, long r, long n) {
  if (n < 1) throw std::invalid_argument("equidistribution_gap: n >= 1");
  OrbitClosure closure = orbit_closure(lattice, y);

  double measure = 0.0;
  switch (closure.kind) {
    case OrbitClosure::Kind::Dense:
      measure = O.area();  // normalized: sigma([a]) = 1 in coordinates
      break;
    case OrbitClosure::Kind::Finite: {
      int hits = 0;
      TorusPoint pt = torus_point(lattice, 0.0, 0.0);
      for (int s = 0; s < closure.order; ++s) {
        if (O.contains(pt.alpha, pt.beta)) ++hits;
        pt = torus_add(lattice, pt, y);
      }
      measure = static_cast<double>(hits) / closure.order;
      break;
    }
    case OrbitClosure::Kind::LineFamily: {
      // sample the family of circles finely; exactness is not needed at the
      // 1e-2 gap scales the diagnostics look at
      const int per_line = 1 << 17;
      const auto [m, nn] = closure.relation;
      (void)m;
      (void)nn;
      long inside = 0, totalpts = 0;
      for (int c = 0; c < closure.line_count; ++c) {
        TorusPoint base = torus_scale(lattice, y, c);
        double da = closure.line_direction == Complex{0.0}
                        ? 0.0
                        : static_cast<double>(closure.relation[1]);
        double db = -static_cast<double>(closure.relation[0]);
        double norm = std::max(std::abs(da), std::abs(db));
        da /= norm;
        db /= norm;
        for (int i = 0; i < per_line; ++i) {
          double tpar = static_cast<double>(i) / per_line;
          double a = base.alpha + tpar * da;
          double b = base.beta + tpar * db;
          a -= std::floor(a);
          b -= std::floor(b);
          if (O.contains(a, b)) ++inside;
          ++totalpts;
        }
      }
      measure = static_cast<double>(inside) / static_cast<double>(totalpts);
      break;
    }
  }
  if (measure <= 0.0) {
    throw ClosureMismatch("equidistribution_gap: O misses the orbit closure");
  }

  long hits = 0;
  for (long s = r + 1; s <= r + n; ++s) {
    TorusPoint pt = torus_scale(lattice, y, s);
    if (O.contains(pt.alpha, pt.beta)) ++hits;
  }
  return std::abs(static_cast<double>(hits) / static_cast<double>(n) - measure);
}

double TorusMask::area_fraction() const {
  std::size_t on = 0;
  for (auto c : cells) {
    if (c) ++on;
  }
  return static_cast<double>(on) / static_cast<double>(cells.size());
}

TorusMask julia_pullback_mask(const TorusLattice& lattice,
                              const CriticalBranch& branch,
                              const SkewProduct& F, const EscapeRegion& region,
                              int stage_n, int resolution, int escape_cap) {
  TorusMask mask;
  mask.resolution = resolution;
  mask.cells.assign(static_cast<std::size_t>(resolution) * resolution, 0);
  const ComplexPoly p = F.base();
  for (int ib = 0; ib < resolution; ++ib) {
    for (int ia = 0; ia < resolution; ++ia) {
      double alpha = (ia + 0.5) / resolution;
      double beta = (ib + 0.5) / resolution;
      // annulus chart: |t| in (eps/|mu|, eps], arg from alpha
      Complex t = branch.eps *
                  std::exp(lattice.from_coords(alpha, beta - 1.0));
      Complex z = phi_limit(branch, F, t, stage_n);
      if (!escape_time(p, region, z, escape_cap)) {
        mask.cells[static_cast<std::size_t>(ib) * resolution + ia] = 1;
      }
    }
  }
  return mask;
}

RectUnion pick_rectangles_avoiding(const TorusMask& mask, int count) {
  RectUnion out;
  const int res = mask.resolution;
  // greedy: largest clear axis-aligned squares on a coarse lattice
  for (int size = res / 4; size >= 2 && static_cast<int>(out.rects.size()) < count;
       size /= 2) {
    for (int ib = 0; ib + size <= res && static_cast<int>(out.rects.size()) < count;
         ib += size) {
      for (int ia = 0; ia + size <= res &&
                       static_cast<int>(out.rects.size()) < count;
           ia += size) {
        bool clear = true;
        for (int y = ib; y < ib + size && clear; ++y) {
          for (int x = ia; x < ia + size; ++x) {
            if (mask.at(x, y)) {
              clear = false;
              break;
            }
          }
        }
        bool overlaps = false;
        double a0 = static_cast<double>(ia) / res,
               a1 = static_cast<double>(ia + size) / res,
               b0 = static_cast<double>(ib) / res,
               b1 = static_cast<double>(ib + size) / res;
        for (const auto& r : out.rects) {
          if (a0 < r[1] && r[0] < a1 && b0 < r[3] && r[2] < b1) {
            overlaps = true;
            break;
          }
        }
        if (clear && !overlaps) {
          out.rects.push_back({a0, a1, b0, b1});
        }
      }
    }
  }
  return out;
}

int postcritical_entry_level(const TorusLattice& lattice,
                             const CriticalBranch& branch, const SkewProduct& F,
                             const EscapeRegion& region, const RectUnion& O,
                             int stage_n, int samples_per_axis, int cap) {
  const ComplexPoly p = F.base();
  int level = 0;
  for (int ib = 0; ib < samples_per_axis; ++ib) {
    for (int ia = 0; ia < samples_per_axis; ++ia) {
      double alpha = (ia + 0.5) / samples_per_axis;
      double beta = (ib + 0.5) / samples_per_axis;
      if (!O.contains(alpha, beta)) continue;
      Complex t = branch.eps *
                  std::exp(lattice.from_coords(alpha, beta - 1.0));
      Complex z = phi_limit(branch, F, t, stage_n);
      auto et = escape_time(p, region, z, cap);
      if (!et) return -1;
      level = std::max(level, *et);
    }
  }
  return level;
}

}  // namespace skewfatou
