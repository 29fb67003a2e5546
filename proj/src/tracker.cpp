#include "skewfatou/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace skewfatou {

int j_of_s(double abs_mu, double abs_nu, long s) {
  if (!(abs_mu > 1.0) || !(abs_nu < 1.0) || !(abs_nu > 0.0) || s < 0) {
    throw std::invalid_argument("j_of_s: need |nu| < 1 < |mu| and s >= 0");
  }
  const __float128 L = logq(static_cast<__float128>(abs_mu));
  const __float128 ell = logq(static_cast<__float128>(abs_nu));
  // want the largest j with t(j) = j L + s ell <= 0, up to a tie tolerance
  // for moduli that land exactly on 1
  const __float128 tie = 1e-25q * (static_cast<__float128>(s) + 2.0q);
  long j = static_cast<long>(
      floorq(-static_cast<__float128>(s) * ell / L + 0.5q));
  auto t_of = [&](long jj) { return jj * L + s * ell; };
  while (t_of(j) > tie) --j;
  while (t_of(j + 1) <= tie) ++j;
  if (!(t_of(j) > -L - tie)) {
    throw Error("j_of_s: no integer satisfies the defining inequality");
  }
  return static_cast<int>(j);
}

int j_of_s(const CriticalBranch& branch, long s) {
  return j_of_s(std::abs(branch.mu), std::abs(branch.nu), s);
}

int m_of_s(double alpha, double C8, long s) {
  if (!(alpha > 0.0 && alpha < 1.0) || s < 1) {
    throw std::invalid_argument("m_of_s: need 0 < alpha < 1 and s >= 1");
  }
  double v = 2.0 * std::log(static_cast<double>(s)) / std::abs(std::log(alpha)) -
             C8;
  double c = std::ceil(v);
  return c < 0.0 ? 0 : static_cast<int>(c);
}

bool DiskSpec::contains(Complex z) const {
  return std::abs(z - center) < radius;
}

bool in_disks(std::span<const DiskSpec> disks, Complex z) {
  for (const auto& d : disks) {
    if (d.contains(z)) return true;
  }
  return false;
}

std::vector<DiskSpec> postcritical_neighborhood(const ComplexPoly& p,
                                                const SubhypCertificate& cert,
                                                double radius) {
  std::vector<DiskSpec> disks;
  for (Complex z : cert.postcritical_points(p)) {
    bool dup = false;
    for (const auto& d : disks) {
      if (std::abs(d.center - z) < 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) disks.push_back({z, radius});
  }
  return disks;
}

EscapeSchedule build_schedule(const SkewProduct& F, const CriticalBranch& branch,
                              const EscapeRegion& region,
                              int samples_per_area) {
  if (!branch.has_saddle_data || branch.k < 1) {
    throw std::invalid_argument("build_schedule: branch needs saddle data and k");
  }
  EscapeSchedule sched;
  sched.branch = branch;
  sched.region = region;

  // C5, C6 from the measured stage convergence ||Phi_j - Phi|| ~ K q^j
  // against the landing tolerance C1 M^-m.
  {
    auto samples = default_phi_samples(branch);
    std::vector<double> log_gaps;
    std::vector<double> ns;
    int n_hi = std::min(14, max_stage(branch));
    for (int n = 4; n <= n_hi; ++n) {
      auto phi = phi_stage(branch, F, n, samples);
      if (phi.cauchy_gap > 0.0) {
        ns.push_back(n);
        log_gaps.push_back(std::log(phi.cauchy_gap));
      }
    }
    double q = 1.0 / std::abs(branch.mu), K = 1.0;
    if (ns.size() >= 3) {
      double n = static_cast<double>(ns.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        sx += ns[i];
        sy += log_gaps[i];
        sxx += ns[i] * ns[i];
        sxy += ns[i] * log_gaps[i];
      }
      double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      double inter = (sy - slope * sx) / n;
      if (slope < -1e-3) q = std::exp(slope);
      // gap sums bound the distance to the limit: K = first gap / (1 - q)
      K = std::exp(inter) / std::max(1e-12, 1.0 - q);
    }
    double logM = std::log(std::max(region.M, 1.0 + 1e-9));
    sched.C5 = std::log(1.0 / q) / logM;
    sched.C6 = -std::log(std::max(region.C1, 1e-300) / K) / logM;
  }

  // alpha: pooled fit of log(area fraction outside W) against m
  {
    std::vector<double> xs, ys;
    std::vector<int> group;  // per-s intercept index
    std::vector<long> s_values{10, 16, 24, 36};
    int gi = 0;
    for (long s : s_values) {
      int j = j_of_s(branch, s);
      int m_cap = static_cast<int>(std::floor(sched.C5 * j - sched.C6)) - 1;
      m_cap = std::min(m_cap, 12);
      if (m_cap < 2) continue;
      bool used = false;
      for (int m = 0; m <= m_cap; ++m) {
        int outside = 0;
        const int steps =
            branch.k * branch.period * j + m + 1;
        for (int i = 0; i < samples_per_area; ++i) {
          // sunflower low-discrepancy points in D(0, eps)
          double rr = branch.eps * std::sqrt((i + 0.5) / samples_per_area);
          double th = 2.39996322972865332 * i;
          Complex u = rr * Complex{std::cos(th), std::sin(th)};
          Complex nu_s{1.0};
          for (long a = 0; a < s; ++a) nu_s *= branch.nu;
          Complex t = nu_s * u;
          Complex z = branch.gamma1(t);
          Complex w = branch.gamma2(t);
          auto zw = F.iterate({z, w}, steps);
          if (!region.in_W(zw.first, zw.second)) ++outside;
        }
        if (outside > 0 && outside < samples_per_area) {
          xs.push_back(m);
          ys.push_back(std::log(static_cast<double>(outside) /
                                samples_per_area));
          group.push_back(gi);
          used = true;
        }
      }
      if (used) ++gi;
    }
    double alpha = 0.5;  // fallback when every fraction saturates
    if (xs.size() >= 4 && gi >= 1) {
      // least squares with one intercept per s-group, shared slope
      double sxx = 0, sxy = 0;
      std::vector<double> gx(gi, 0), gy(gi, 0), gn(gi, 0);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        gx[group[i]] += xs[i];
        gy[group[i]] += ys[i];
        gn[group[i]] += 1;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double cx = xs[i] - gx[group[i]] / gn[group[i]];
        double cy = ys[i] - gy[group[i]] / gn[group[i]];
        sxx += cx * cx;
        sxy += cx * cy;
      }
      if (sxx > 0) {
        double slope = sxy / sxx;
        if (slope < -0.01) alpha = std::exp(slope);
      }
    }
    sched.alpha = std::clamp(alpha, 0.05, 0.95);
  }

  // s_min: first s with room for m(s) >= 0 under the constraint;
  // C8: smallest nonnegative integer making the constraint hold to 10^4
  {
    auto bound = [&](long s) {
      return sched.C5 * j_of_s(branch, s) - sched.C6;
    };
    long s_min = 1;
    while (s_min < 10000 && bound(s_min) < 1.0) ++s_min;
    sched.s_min = static_cast<int>(s_min);
    double c8 = 0.0;
    for (int pass = 0; pass < 64; ++pass) {
      bool ok = true;
      for (long s = s_min; s <= 10000; ++s) {
        if (m_of_s(sched.alpha, c8, s) >= bound(s)) {
          ok = false;
          break;
        }
      }
      if (ok) break;
      c8 += 1.0;
    }
    sched.C8 = c8;
  }
  return sched;
}

int NonEscapeCount::max_count() const {
  int m = 0;
  for (const auto& [n, c] : counts) m = std::max(m, c);
  return m;
}

NonEscapeCount count_non_escaped(const SkewProduct& F,
                                 const CriticalBranch& branch,
                                 const EscapeSchedule& schedule, Complex w0,
                                 std::span<const DiskSpec> U, int n_max) {
  if (std::abs(w0) > std::pow(branch.eps, branch.l) * (1.0 + 1e-12)) {
    throw std::invalid_argument("count_non_escaped: |w0| beyond eps^l");
  }
  // every certified postcritical point must be covered by U
  {
    const ComplexPoly p = F.base();
    Complex z = branch.x0;
    for (int j = 0; j <= branch.r + 1 && branch.has_saddle_data; ++j) {
      if (!in_disks(U, z)) {
        throw std::invalid_argument(
            "count_non_escaped: U does not cover the certified orbit");
      }
      z = p.eval(z);
    }
  }
  const EscapeRegion& region = schedule.region;

  // l-th roots of w0
  std::vector<Complex> us;
  if (w0 == Complex{0.0}) {
    us.push_back(Complex{0.0});
  } else {
    double rr = std::pow(std::abs(w0), 1.0 / branch.l);
    double base_arg = std::arg(w0) / branch.l;
    for (int j = 0; j < branch.l; ++j) {
      double th = base_arg + 2.0 * M_PI * j / branch.l;
      us.push_back(rr * Complex{std::cos(th), std::sin(th)});
    }
  }

  // member[s][t]: is F1^t(gamma(nu^s u)) inside W0 union U for every root u
  std::vector<std::vector<bool>> member(n_max + 1);
  for (int s = 0; s <= n_max; ++s) {
    member[s].assign(n_max - s + 1, true);
    for (Complex u : us) {
      Complex nu_s{1.0};
      for (int a = 0; a < s; ++a) nu_s *= branch.nu;
      Complex t = nu_s * u;
      Complex z = branch.gamma1(t);
      Complex w = branch.gamma2(t);
      for (int step = 0; step <= n_max - s; ++step) {
        if (member[s][step] && !(region.in_W0(z) || in_disks(U, z))) {
          member[s][step] = false;
        }
        if (step < n_max - s) {
          auto zw = F.apply({z, w});
          z = zw.first;
          w = zw.second;
        }
      }
    }
  }

  NonEscapeCount out;
  out.w0 = w0;
  out.U.assign(U.begin(), U.end());
  out.counts.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    int c = 0;
    for (int s = 0; s <= n; ++s) {
      if (!member[s][n - s]) ++c;
    }
    out.counts.emplace_back(n, c);
  }
  return out;
}

Phase phase_classify(const SkewProduct& F, const CriticalBranch& branch,
                     const EscapeRegion& region, std::span<const DiskSpec> U,
                     int s, int n, Complex u) {
  if (std::abs(u) > branch.eps * (1.0 + 1e-12)) {
    throw std::invalid_argument("phase_classify: |u| <= eps required");
  }
  Complex nu_s{1.0};
  for (int a = 0; a < s; ++a) nu_s *= branch.nu;
  Complex t = nu_s * u;
  auto zw = F.iterate({branch.gamma1(t), branch.gamma2(t)}, n);
  if (in_disks(U, zw.first)) return Phase::NearPostcritical;
  if (region.in_W(zw.first, zw.second) || region.in_W0(zw.first)) {
    return Phase::InW;
  }
  return Phase::Outside;
}

std::pair<int, int> phase_window(const SkewProduct& F,
                                 const CriticalBranch& branch,
                                 const EscapeRegion& region,
                                 std::span<const DiskSpec> U, int s,
                                 Complex u) {
  int first = -1, last = -1;
  int hi = branch.k * branch.period * j_of_s(branch, s);
  for (int n = 0; n < hi; ++n) {
    if (phase_classify(F, branch, region, U, s, n, u) ==
        Phase::NearPostcritical) {
      if (first < 0) first = n;
      last = n;
    }
  }
  return {first, last};
}

std::size_t ResonantGrid::index(int n, int m) const {
  return static_cast<std::size_t>(n) * (m_range_ + n_max_ + 1) +
         (m + n_max_);
}

ResonantGrid::ResonantGrid(Complex w0, int n_max, int m_range)
    : w0_(w0), n_max_(n_max), m_range_(m_range) {
  cells_.assign(static_cast<std::size_t>(n_max + 1) * (m_range + n_max + 1),
                {Complex{1e300, 0}, Complex{0, 0}});
}

bool ResonantGrid::has(int n, int m) const {
  if (n < 0 || n > n_max_ || m < -n || m > m_range_) return false;
  return cells_[index(n, m)].first.real() != 1e300;
}

std::pair<Complex, Complex> ResonantGrid::at(int n, int m) const {
  if (!has(n, m)) throw std::invalid_argument("ResonantGrid::at: missing cell");
  return cells_[index(n, m)];
}

void ResonantGrid::set(int n, int m, std::pair<Complex, Complex> v) {
  cells_[index(n, m)] = v;
}

double ResonantGrid::gap(int n, int m) const {
  if (!has(n, m) || !has(n - 1, m)) return 1e300;
  return std::abs(at(n, m).first - at(n - 1, m).first);
}

Complex ResonantGrid::limit(int m) const {
  for (int n = n_max_; n >= 0; --n) {
    if (has(n, m)) return at(n, m).first;
  }
  throw std::invalid_argument("ResonantGrid::limit: empty column");
}

ResonantGrid resonant_grid(const SkewProduct& F, const CriticalBranch& branch,
                           Complex w0, int n_max, int m_range) {
  if (!branch.has_saddle_data) {
    throw std::invalid_argument("resonant_grid: branch needs saddle data");
  }
  if (std::abs(branch.mu * F.lambda - Complex{1.0}) > 1e-12) {
    throw NotResonant("resonant_grid: mu * lambda != 1");
  }
  if (branch.k != 1) {
    throw std::invalid_argument("resonant_grid: transverse branch (k = 1) required");
  }
  ResonantGrid grid(w0, n_max, m_range);
  for (int n = 0; n <= n_max; ++n) {
    // start fiber lambda^n w0, by power arithmetic; the row then evolves
    // under F only, which is what makes F(a_{n,m}) = a_{n,m+1} exact
    Complex w = std::pow(F.lambda, static_cast<double>(n)) * w0;
    std::pair<Complex, Complex> zw{branch.x0, w};
    for (int step = 0; step <= n + m_range; ++step) {
      int m = step - n;
      if (m >= -n && m <= m_range) grid.set(n, m, zw);
      zw = F.apply(zw);
    }
  }
  return grid;
}

double avoidance_radius(const ResonantGrid& grid, const CriticalBranch& branch,
                        const SkewProduct& F, Complex y, int N) {
  const ComplexPoly p = F.base();
  // postcritical arc x0 .. x_r
  Complex z = branch.x0;
  for (int j = 0; j <= branch.r; ++j) {
    if (std::abs(z - y) < 1e-6) {
      throw std::invalid_argument(
          "avoidance_radius: y on the postcritical arc");
    }
    z = p.eval(z);
  }
  double best = 1e300;
  for (int n = N; n <= grid.n_max(); ++n) {
    for (int m = -n; m <= grid.m_range(); ++m) {
      if (!grid.has(n, m)) continue;
      best = std::min(best, std::abs(grid.at(n, m).first - y));
    }
  }
  return best == 1e300 ? 0.0 : best;
}

std::vector<std::pair<int, double>> fiber_disk_area_decay(
    const SkewProduct& F, const EscapeRegion& region, Complex w0, DiskSpec disk,
    int n_max, int raster_res) {
  if (std::abs(disk.center) + disk.radius > region.R) {
    throw std::invalid_argument("fiber_disk_area_decay: disk outside D(0,R)");
  }
  std::vector<std::pair<Complex, Complex>> pts;
  for (int iy = 0; iy < raster_res; ++iy) {
    for (int ix = 0; ix < raster_res; ++ix) {
      Complex z{disk.center.real() +
                    disk.radius * (2.0 * (ix + 0.5) / raster_res - 1.0),
                disk.center.imag() +
                    disk.radius * (2.0 * (iy + 0.5) / raster_res - 1.0)};
      if (std::abs(z - disk.center) <= disk.radius) {
        pts.emplace_back(z, w0);
      }
    }
  }
  const double cell = disk.radius / 256.0;
  std::vector<std::pair<int, double>> areas;
  std::vector<bool> escaped(pts.size(), false);
  for (int n = 0; n <= n_max; ++n) {
    std::size_t alive = 0;
    std::unordered_set<long long> occupied;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!escaped[i] && region.in_W(pts[i].first, pts[i].second)) {
        escaped[i] = true;
      }
      if (escaped[i]) continue;
      ++alive;
      long long gx = static_cast<long long>(
          std::floor(pts[i].first.real() / cell));
      long long gy = static_cast<long long>(
          std::floor(pts[i].first.imag() / cell));
      occupied.insert((gx << 24) ^ (gy & 0xFFFFFF));
    }
    areas.emplace_back(n, static_cast<double>(occupied.size()) * cell * cell);
    if (alive < pts.size() / 100 + 1) break;
    for (auto& zw : pts) zw = F.apply(zw);
  }
  return areas;
}

}  // namespace skewfatou
