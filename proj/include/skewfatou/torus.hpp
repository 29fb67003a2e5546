#pragma once

#include <array>
#include <span>
#include <vector>

#include "skewfatou/linearization.hpp"

namespace skewfatou {

/// T = C / (2 pi i Z + log mu Z), one fixed branch of log mu. The verdicts
/// below are independent of the fundamental-domain choice; the printed
/// lattice coordinates are not.
struct TorusLattice {
  Complex log_mu;

  static TorusLattice from_mu(Complex mu);

  /// Lattice coordinates (alpha, beta) in [0,1)^2 of a complex value v:
  /// v = alpha * 2 pi i + beta * log_mu modulo the lattice.
  std::array<double, 2> coords(Complex v) const;
  Complex from_coords(double alpha, double beta) const;
};

struct TorusPoint {
  Complex rep;   // representative inside the fundamental parallelogram
  double alpha;  // lattice coordinates of rep
  double beta;
};

/// Psi(z) = reduce(log z); any log branch gives the same point.
/// Throws ZeroInput for z = 0.
TorusPoint embed(const TorusLattice& lattice, Complex z);
TorusPoint torus_point(const TorusLattice& lattice, double alpha, double beta);
TorusPoint torus_add(const TorusLattice& lattice, const TorusPoint& a,
                     const TorusPoint& b);
TorusPoint torus_scale(const TorusLattice& lattice, const TorusPoint& a,
                       long s);

struct OrbitClosure {
  enum class Kind { Finite, LineFamily, Dense } kind = Kind::Dense;
  int order = 0;                // Finite: orbit size
  int line_count = 0;           // LineFamily: number of parallel circles
  Complex line_direction{};     // LineFamily: direction in C
  std::array<long, 2> relation{0, 0};  // primitive (m, n) with m a + n b rational
  long max_denominator = 1000000;
};

/// Classification of closure{s y} by simultaneous rational approximation of
/// the lattice coordinates (continued fractions, denominator cutoff 10^6,
/// tolerance 1e-10): both rational -> Finite, exactly one rational relation
/// -> LineFamily, none -> Dense.
OrbitClosure orbit_closure(const TorusLattice& lattice, const TorusPoint& y,
                           double tol = 1e-10);

/// Union of axis-aligned rectangles in lattice coordinates, each
/// {a0 <= alpha < a1, b0 <= beta < b1} inside the unit square.
struct RectUnion {
  std::vector<std::array<double, 4>> rects;  // a0, a1, b0, b1

  bool contains(double alpha, double beta) const;
  double area() const;  // union area (coordinate-compressed sweep)
};

/// | empirical frequency of {a + s y in O : r < s <= r + n} / n  -
///   sigma(O) / sigma([a]) | with a = 0, measured on the detected closure.
/// Throws ClosureMismatch when O misses the closure entirely.
double equidistribution_gap(const TorusLattice& lattice, const TorusPoint& y,
                            const RectUnion& O, long r, long n);

/// Rasterization of Psi(Phi^-1(J_p)) over the annulus
/// {eps/|mu| < |t| <= eps}: cell centers map through Phi and the escape-time
/// oracle; NotEscaped cells mark the mask.
struct TorusMask {
  int resolution = 0;
  std::vector<std::uint8_t> cells;  // row-major over (alpha, beta)

  bool at(int ia, int ib) const {
    return cells[static_cast<std::size_t>(ib) * resolution + ia] != 0;
  }
  double area_fraction() const;
};

TorusMask julia_pullback_mask(const TorusLattice& lattice,
                              const CriticalBranch& branch,
                              const SkewProduct& F, const EscapeRegion& region,
                              int stage_n, int resolution, int escape_cap = 60);

/// count axis-aligned cells-rectangles in the mask complement, greedily.
RectUnion pick_rectangles_avoiding(const TorusMask& mask, int count);

/// Smallest L with every sampled t in Psi^-1(O) inter annulus having
/// escape_time(Phi(t)) <= L; a sampled lower-bound stand-in for the
/// compactness level. Returns -1 when some sample never escapes.
int postcritical_entry_level(const TorusLattice& lattice,
                             const CriticalBranch& branch, const SkewProduct& F,
                             const EscapeRegion& region, const RectUnion& O,
                             int stage_n, int samples_per_axis, int cap);

}  // namespace skewfatou
