#pragma once

#include <optional>
#include <span>
#include <vector>

#include "skewfatou/complex_poly.hpp"

namespace skewfatou {

struct CycleRecord {
  std::vector<Complex> points;  // one period, orbit order
  Complex multiplier{};         // product of p' over the cycle
  enum class Kind { Attracting, Repelling, Indifferent } classification =
      Kind::Indifferent;

  int period() const { return static_cast<int>(points.size()); }
  bool repelling() const { return classification == Kind::Repelling; }
  bool attracting() const { return classification == Kind::Attracting; }
  /// Same cycle with the point nearest z listed first.
  CycleRecord rotated_to(Complex z) const;
};

/// Solves p^q(z) = z for q <= max_period on the iterated polynomial,
/// deduplicates sub-periods and attaches multipliers. Roots are polished by
/// orbit Newton so every record satisfies |p^period(pt) - pt| < tol.
/// The indifference margin for classification is floored at 1e-9.
std::vector<CycleRecord> find_cycles(const ComplexPoly& p, int max_period,
                                     double tol = 1e-12);

struct BasinDisk {
  Complex center;
  double radius;
};

struct CriticalRecord {
  Complex critical_point;
  enum class Verdict { FatouEscapes, PreperiodicToRepelling } verdict =
      Verdict::FatouEscapes;
  int preperiod = 0;         // r: steps until landing (or until escape)
  CycleRecord landing_cycle; // empty points = escaped to infinity
};

struct SubhypCertificate {
  std::vector<CriticalRecord> critical_records;
  std::vector<CycleRecord> cycles;  // everything found during certification

  bool all_preperiodic() const;
  /// Finite postcritical points: each certified critical orbit through its
  /// landing cycle (cycle traversed tail_periods times).
  std::vector<Complex> postcritical_points(const ComplexPoly& p,
                                           int tail_periods = 1) const;
};

/// Iterates each critical point of p up to budget steps. FatouEscapes when
/// the orbit enters {|z| > R} or a detected attracting basin disk;
/// PreperiodicToRepelling when it lands within tol of a repelling cycle and
/// shadows it for 3 more periods. Throws Undecided otherwise (indifferent
/// cycles land here by design).
SubhypCertificate certify_subhyperbolic(const ComplexPoly& p, int budget = 200,
                                        double tol = 1e-9);

struct EscapeRegion {
  double R = 0.0;
  std::vector<BasinDisk> basin_disks;
  // Skew-product data; zero when built without an F.
  double eps = 0.0;
  double M = 0.0;
  double C1 = 0.0;

  bool in_W0(Complex z) const;
  bool in_W(Complex z, Complex w) const;
  bool in_W_q(QComplex z, QComplex w) const;
  /// Distance from an interior point to the boundary of W (min over the
  /// z-part and the fiber gap eps - |w|); used for invariance margins.
  double margin_in_W(Complex z, Complex w) const;
};

/// Smallest R on a bisection grid such that |z| = r >= R sampled on
/// 4096-point circles gives |p(z)| > 2|z|, inflated by 1%. Pre: monic,
/// degree >= 2.
double escape_radius(const ComplexPoly& p);

/// W0 only (R + attracting basin disks); enough for escape_time and
/// rasterization, and defined for maps that fail certification (parabolic
/// controls included).
EscapeRegion escape_region_1d(const ComplexPoly& p,
                              std::span<const CycleRecord> cycles);

/// Full region with fiber thickness eps (shrunk until boundary sampling
/// confirms F(W) in W with margin), derivative bound M on D(0,R+1) x
/// D(0,eps) and the constant C1, halved until the near-U_m landing check
/// passes. Pre: certificate has no undecided entries (enforced upstream by
/// certify_subhyperbolic throwing).
EscapeRegion build_escape_region(const ComplexPoly& p,
                                 const SubhypCertificate& cert,
                                 const SkewProduct& F);

/// Smallest m <= cap with p^m(z) in W0, else nullopt. Membership oracle for
/// U_m (value <= m) and V_m (otherwise).
std::optional<int> escape_time(const ComplexPoly& p, const EscapeRegion& region,
                               Complex z, int cap);

}  // namespace skewfatou
