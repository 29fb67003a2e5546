#pragma once

#include <span>
#include <utility>
#include <vector>

#include "skewfatou/linearization.hpp"
#include "skewfatou/raster.hpp"

namespace skewfatou {

/// j(s): the unique integer with |mu|^-1 < |mu^j nu^s| <= 1, decided in
/// quadruple-precision logs with a tie tolerance so exact boundary cases
/// (|mu^j nu^s| = 1) resolve to the closed end.
int j_of_s(double abs_mu, double abs_nu, long s);
int j_of_s(const CriticalBranch& branch, long s);

/// m(s) = max(0, ceil(2 log s / |log alpha| - C8)). The raw quotient in the
/// source formula is negative as written; this is the sign convention that
/// makes alpha^{m(s)} summable against s^-2.
int m_of_s(double alpha, double C8, long s);

struct EscapeSchedule {
  CriticalBranch branch;
  EscapeRegion region;
  double alpha = 0.5;  // fitted fiber-area decay rate
  double C8 = 0.0;
  double C5 = 0.0, C6 = 0.0;  // measured stand-ins from Phi convergence
  int s_min = 1;              // constraint m(s) < C5 j(s) - C6 holds from here

  int j(long s) const { return j_of_s(branch, s); }
  int m(long s) const { return m_of_s(alpha, C8, s); }
};

/// Fits alpha from the measured parameter-area decay (fraction of u in
/// D(0, eps) whose orbit misses W after kj(s)+m+1 steps, fitted in m),
/// estimates C5/C6 from the stage convergence rate, then picks C8 so the
/// schedule constraint holds for all s in [s_min, 10^4].
EscapeSchedule build_schedule(const SkewProduct& F, const CriticalBranch& branch,
                              const EscapeRegion& region,
                              int samples_per_area = 256);

struct DiskSpec {
  Complex center;
  double radius;
  bool contains(Complex z) const;
};

/// Disks of the given radius around every certified postcritical point.
std::vector<DiskSpec> postcritical_neighborhood(const ComplexPoly& p,
                                                const SubhypCertificate& cert,
                                                double radius = 0.05);

bool in_disks(std::span<const DiskSpec> disks, Complex z);

struct NonEscapeCount {
  Complex w0{};
  std::vector<DiskSpec> U;
  std::vector<std::pair<int, int>> counts;  // (n, #S_n)

  int max_count() const;
};

/// #S_n = #{s <= n : some branch point over the fiber lambda^s w0 has
/// F1^{n-s}(gamma(nu^s u)) outside W0 union U}, for every n <= n_max.
/// All l branch choices of u (l-th roots of w0) aggregate into one count.
NonEscapeCount count_non_escaped(const SkewProduct& F,
                                 const CriticalBranch& branch,
                                 const EscapeSchedule& schedule, Complex w0,
                                 std::span<const DiskSpec> U, int n_max);

enum class Phase { NearPostcritical, InW, Outside };

/// Region membership of F^n(gamma(nu^s u)); postcritical proximity wins
/// when the neighborhoods overlap W.
Phase phase_classify(const SkewProduct& F, const CriticalBranch& branch,
                     const EscapeRegion& region, std::span<const DiskSpec> U,
                     int s, int n, Complex u);

/// First and last n in [0, k j(s)) classified NearPostcritical; an
/// empirical stand-in for the mid-range window constant.
std::pair<int, int> phase_window(const SkewProduct& F,
                                 const CriticalBranch& branch,
                                 const EscapeRegion& region,
                                 std::span<const DiskSpec> U, int s, Complex u);

/// a_{n,m} = F^{n+m}(x0, lambda^n w0) for 0 <= n <= n_max, -n <= m <= m_range.
/// Rows iterate from the exact power lambda^n w0; the second coordinate is
/// the multiplication chain F itself produces, so the recomputation identity
/// F(a_{n,m}) = a_{n,m+1} holds bit for bit.
class ResonantGrid {
 public:
  ResonantGrid(Complex w0, int n_max, int m_range);

  Complex w0() const { return w0_; }
  int n_max() const { return n_max_; }
  int m_range() const { return m_range_; }
  bool has(int n, int m) const;
  std::pair<Complex, Complex> at(int n, int m) const;
  /// |a_{n,m} - a_{n-1,m}| or +inf when the shallower entry is absent.
  double gap(int n, int m) const;
  /// deepest-n estimate of lim_n a_{n,m}
  Complex limit(int m) const;

  void set(int n, int m, std::pair<Complex, Complex> v);

 private:
  Complex w0_;
  int n_max_, m_range_;
  std::vector<std::pair<Complex, Complex>> cells_;
  std::size_t index(int n, int m) const;
};

/// Pre: mu * lambda = 1 within 1e-12 (NotResonant otherwise) and a
/// transverse branch (k = 1).
ResonantGrid resonant_grid(const SkewProduct& F, const CriticalBranch& branch,
                           Complex w0, int n_max, int m_range);

/// Largest delta (on a bisection grid, returned as the attained minimum
/// distance) such that no table entry with n >= N has first coordinate in
/// D(y, delta). Pre: |y| < R and y at least 1e-6 from the postcritical arc.
double avoidance_radius(const ResonantGrid& grid, const CriticalBranch& branch,
                        const SkewProduct& F, Complex y, int N);

/// Pushes a rasterized disk in the fiber {w = w0} forward and measures the
/// occupancy area of the not-yet-escaped image at every step, until more
/// than 99% of the samples entered W.
std::vector<std::pair<int, double>> fiber_disk_area_decay(
    const SkewProduct& F, const EscapeRegion& region, Complex w0, DiskSpec disk,
    int n_max, int raster_res);

}  // namespace skewfatou
