#include "skewfatou/dynamics1d.hpp"

#include <algorithm>
#include <cmath>

#include "skewfatou/rng.hpp"

namespace skewfatou {

namespace {

constexpr int kCircleSamples = 4096;

double circle_min_excess(const ComplexPoly& p, double r) {
  double m = 1e300;
  for (int k = 0; k < kCircleSamples; ++k) {
    double th = 2.0 * M_PI * k / kCircleSamples;
    Complex z = r * Complex{std::cos(th), std::sin(th)};
    m = std::min(m, std::abs(p.eval(z)) - 2.0 * r);
  }
  return m;
}

// r^d - sum |a_i| r^i - 2r > 0 and increasing at r: certifies the condition
// on [r, infinity) for a monic polynomial.
bool tail_dominates(const std::vector<double>& abs_coeffs, double r) {
  const int d = static_cast<int>(abs_coeffs.size()) - 1;
  double g = std::pow(r, d) - 2.0 * r;
  double dg = d * std::pow(r, d - 1) - 2.0;
  for (int i = 0; i < d; ++i) {
    g -= abs_coeffs[i] * std::pow(r, i);
    if (i >= 1) dg -= i * abs_coeffs[i] * std::pow(r, i - 1);
  }
  return g > 0.0 && dg > 0.0;
}

Complex polish_periodic(const ComplexPoly& p, const ComplexPoly& dp, Complex z,
                        int q) {
  for (int it = 0; it < 16; ++it) {
    Complex val = z;
    Complex deriv{1.0};
    for (int j = 0; j < q; ++j) {
      deriv *= dp.eval(val);
      val = p.eval(val);
    }
    Complex g = val - z;
    if (std::abs(g) < 1e-15 * (1.0 + std::abs(z))) break;
    Complex dg = deriv - Complex{1.0};
    if (std::abs(dg) < 1e-300) break;
    z -= g / dg;
  }
  return z;
}

int certify_max_period(int degree) {
  // keep the iterated polynomial's degree near 300 so Aberth stays sane
  int q = 1;
  double deg = degree;
  while (q < 8 && deg * degree <= 320.0) {
    deg *= degree;
    ++q;
  }
  return q;
}

}  // namespace

CycleRecord CycleRecord::rotated_to(Complex z) const {
  CycleRecord out = *this;
  if (points.empty()) return out;
  std::size_t best = 0;
  double bd = 1e300;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = std::abs(points[i] - z);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  std::rotate(out.points.begin(), out.points.begin() + best, out.points.end());
  return out;
}

double escape_radius(const ComplexPoly& p) {
  if (p.degree() < 2) {
    throw std::invalid_argument("escape_radius: degree >= 2 required");
  }
  if (!p.is_monic()) {
    throw std::invalid_argument("escape_radius: monic polynomial required");
  }
  std::vector<double> abs_coeffs(p.coeffs().size());
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    abs_coeffs[i] = std::abs(p.coeff(static_cast<int>(i)));
  }

  double r_hi = 2.0;
  for (std::size_t i = 0; i + 1 < abs_coeffs.size(); ++i) r_hi += abs_coeffs[i];
  while (!(tail_dominates(abs_coeffs, r_hi) &&
           circle_min_excess(p, r_hi) > 0.0)) {
    r_hi *= 2.0;
    if (r_hi > 1e12) throw NonConvergence("escape_radius: no upper bound");
  }

  // holds(r): condition verified on a geometric ladder of circles [r, r_hi],
  // with the analytic tail covering everything beyond r_hi.
  auto holds = [&](double r) {
    const int ladder = 33;
    for (int k = 0; k < ladder; ++k) {
      double rr = r * std::pow(r_hi / r, static_cast<double>(k) / (ladder - 1));
      if (circle_min_excess(p, rr) <= 0.0) return false;
    }
    return true;
  };

  double lo = 1e-3, hi = r_hi;
  if (holds(lo)) return lo * 1.01;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi * 1.01;
}

std::vector<CycleRecord> find_cycles(const ComplexPoly& p, int max_period,
                                     double tol) {
  if (max_period < 1 || max_period > 8) {
    throw std::invalid_argument("find_cycles: max_period must be in [1, 8]");
  }
  const ComplexPoly dp = p.derivative();
  const double margin = std::max(tol, 1e-9);
  std::vector<CycleRecord> records;

  auto known = [&](Complex z) {
    for (const auto& rec : records) {
      for (Complex pt : rec.points) {
        if (std::abs(pt - z) < 1e-7 * (1.0 + std::abs(z))) return true;
      }
    }
    return false;
  };

  ComplexPoly iter = p;
  for (int q = 1; q <= max_period; ++q) {
    if (q > 1) iter = p.compose(iter);
    if (!iter.all_finite()) {
      throw NonConvergence("find_cycles: iterated coefficients overflow at period " +
                           std::to_string(q));
    }
    ComplexPoly g = iter - ComplexPoly::monomial(Complex{1.0}, 1);
    std::vector<Complex> candidates;
    try {
      candidates = roots(g, tol);
    } catch (const NonConvergence&) {
      throw NonConvergence("find_cycles: root finding failed at period " +
                           std::to_string(q));
    }
    for (Complex z0 : candidates) {
      Complex z = polish_periodic(p, dp, z0, q);
      if (known(z)) continue;

      std::vector<Complex> orbit(q);
      Complex v = z;
      for (int j = 0; j < q; ++j) {
        orbit[j] = v;
        v = p.eval(v);
      }
      double scale = 1.0 + std::abs(z);
      if (std::abs(v - z) > std::max(tol * 100.0, 1e-10) * scale) {
        continue;  // spurious root of the composed polynomial
      }
      // minimal period must be q itself; shorter periods were recorded earlier
      bool minimal = true;
      for (int d = 1; d < q; ++d) {
        if (q % d != 0) continue;
        if (std::abs(orbit[d] - orbit[0]) < 1e-8 * scale) {
          minimal = false;
          break;
        }
      }
      if (!minimal) continue;

      CycleRecord rec;
      rec.points = orbit;
      Complex mult{1.0};
      for (Complex pt : orbit) mult *= dp.eval(pt);
      rec.multiplier = mult;
      double am = std::abs(mult);
      rec.classification = am > 1.0 + margin ? CycleRecord::Kind::Repelling
                           : am < 1.0 - margin
                               ? CycleRecord::Kind::Attracting
                               : CycleRecord::Kind::Indifferent;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

namespace {

// Per-point basin radii. A common radius fails superattracting cycles whose
// intermediate points are locally expanding, so each point gets the radius
// the invariance check asks for.
std::vector<BasinDisk> basin_disks_for(const ComplexPoly& p,
                                       const CycleRecord& cycle) {
  const int q = cycle.period();
  const int samples = 128;
  auto image_radius = [&](Complex c, double rho, Complex target) {
    double m = 0;
    for (int k = 0; k < samples; ++k) {
      double th = 2.0 * M_PI * k / samples;
      Complex z = c + rho * Complex{std::cos(th), std::sin(th)};
      m = std::max(m, std::abs(p.eval(z) - target));
    }
    return 1.05 * m;  // sampling slack
  };

  auto try_seed = [&](double rho, std::vector<double>& out) {
    std::vector<double> r(q, rho);
    for (int sweep = 0; sweep < 12; ++sweep) {
      for (int j = 0; j < q; ++j) {
        Complex next = cycle.points[(j + 1) % q];
        double img = image_radius(cycle.points[j], r[j], next);
        r[(j + 1) % q] = std::min(rho, std::max(1.1 * img, 1e-9));
      }
    }
    for (int j = 0; j < q; ++j) {
      Complex next = cycle.points[(j + 1) % q];
      if (image_radius(cycle.points[j], r[j], next) > 0.98 * r[(j + 1) % q]) {
        return false;
      }
    }
    out = r;
    return true;
  };

  std::vector<double> best;
  double seed = 1e-4;
  std::vector<double> r;
  while (seed <= 0.5 && try_seed(seed, r)) {
    best = r;
    seed *= 2.0;
  }
  std::vector<BasinDisk> disks;
  if (best.empty()) return disks;
  for (int j = 0; j < q; ++j) {
    disks.push_back({cycle.points[j], best[j]});
  }
  return disks;
}

}  // namespace

bool SubhypCertificate::all_preperiodic() const {
  for (const auto& rec : critical_records) {
    if (rec.verdict != CriticalRecord::Verdict::PreperiodicToRepelling) {
      return false;
    }
  }
  return true;
}

std::vector<Complex> SubhypCertificate::postcritical_points(
    const ComplexPoly& p, int tail_periods) const {
  std::vector<Complex> pts;
  for (const auto& rec : critical_records) {
    Complex z = rec.critical_point;
    int steps = rec.preperiod +
                tail_periods * std::max(1, rec.landing_cycle.period());
    for (int j = 0; j <= steps; ++j) {
      pts.push_back(z);
      z = p.eval(z);
    }
    for (Complex c : rec.landing_cycle.points) pts.push_back(c);
  }
  return pts;
}

SubhypCertificate certify_subhyperbolic(const ComplexPoly& p, int budget,
                                        double tol) {
  if (p.degree() < 2) {
    throw std::invalid_argument("certify_subhyperbolic: degree >= 2 required");
  }
  const double R = escape_radius(p);
  SubhypCertificate cert;
  cert.cycles = find_cycles(p, certify_max_period(p.degree()), 1e-12);

  std::vector<std::pair<const CycleRecord*, std::vector<BasinDisk>>> basins;
  for (const auto& cyc : cert.cycles) {
    if (cyc.attracting()) basins.emplace_back(&cyc, basin_disks_for(p, cyc));
  }

  const ComplexPoly dp = p.derivative();
  auto crit_clusters = cluster_points(roots(dp, 1e-12), 1e-6);

  const double shadow_tol = std::sqrt(tol);
  for (const auto& [x0, mult] : crit_clusters) {
    (void)mult;
    CriticalRecord rec;
    rec.critical_point = x0;
    bool decided = false;
    Complex z = x0;
    for (int t = 0; t <= budget && !decided; ++t) {
      if (std::abs(z) > R) {
        rec.verdict = CriticalRecord::Verdict::FatouEscapes;
        rec.preperiod = t;
        decided = true;
        break;
      }
      for (const auto& [cyc, disks] : basins) {
        for (const auto& d : disks) {
          if (std::abs(z - d.center) < d.radius) {
            rec.verdict = CriticalRecord::Verdict::FatouEscapes;
            rec.preperiod = t;
            rec.landing_cycle = *cyc;
            decided = true;
            break;
          }
        }
        if (decided) break;
      }
      if (decided) break;
      for (const auto& cyc : cert.cycles) {
        if (!cyc.repelling()) continue;
        for (std::size_t j = 0; j < cyc.points.size(); ++j) {
          if (std::abs(z - cyc.points[j]) >= tol) continue;
          // shadow the cycle for 3 more periods before accepting
          bool shadows = true;
          Complex v = z;
          const int period = cyc.period();
          for (int s = 1; s <= 3 * period && shadows; ++s) {
            v = p.eval(v);
            Complex want = cyc.points[(j + s) % period];
            if (std::abs(v - want) > shadow_tol * (1.0 + std::abs(want))) {
              shadows = false;
            }
          }
          if (shadows) {
            rec.verdict = CriticalRecord::Verdict::PreperiodicToRepelling;
            rec.preperiod = t;
            rec.landing_cycle = cyc.rotated_to(z);
            decided = true;
            break;
          }
        }
        if (decided) break;
      }
      if (decided) break;
      z = p.eval(z);
    }
    if (!decided) {
      throw Undecided("critical point " + format_complex(x0) +
                      " undecided after " + std::to_string(budget) + " steps");
    }
    cert.critical_records.push_back(std::move(rec));
  }
  return cert;
}

bool EscapeRegion::in_W0(Complex z) const {
  if (std::abs(z) > R) return true;
  for (const auto& d : basin_disks) {
    if (std::abs(z - d.center) < d.radius) return true;
  }
  return false;
}

bool EscapeRegion::in_W(Complex z, Complex w) const {
  return eps > 0.0 && std::abs(w) < eps && in_W0(z);
}

bool EscapeRegion::in_W_q(QComplex z, QComplex w) const {
  if (!(eps > 0.0) || !(qabs_d(w) < eps)) return false;
  return in_W0(z.to_double());
}

double EscapeRegion::margin_in_W(Complex z, Complex w) const {
  double wm = eps - std::abs(w);
  double zm = std::abs(z) - R;  // positive when in the escape part
  for (const auto& d : basin_disks) {
    zm = std::max(zm, d.radius - std::abs(z - d.center));
  }
  return std::min(zm, wm);
}

EscapeRegion escape_region_1d(const ComplexPoly& p,
                              std::span<const CycleRecord> cycles) {
  EscapeRegion region;
  region.R = escape_radius(p);
  for (const auto& cyc : cycles) {
    if (!cyc.attracting()) continue;
    auto disks = basin_disks_for(p, cyc);
    region.basin_disks.insert(region.basin_disks.end(), disks.begin(),
                              disks.end());
  }
  return region;
}

namespace {

double operator_norm_df(const SkewProduct& F, Complex z, Complex w) {
  Complex fz = F.f.dz().eval(z, w);  // note: rebuilt per call below, hoisted by caller
  Complex fw = F.f.dw().eval(z, w);
  double a = std::norm(fz), b = std::norm(fw), l = std::norm(F.lambda);
  double s = a + b + l;
  double disc = std::sqrt(std::max(0.0, s * s - 4.0 * a * l));
  return std::sqrt(0.5 * (s + disc));
}

}  // namespace

EscapeRegion build_escape_region(const ComplexPoly& p,
                                 const SubhypCertificate& cert,
                                 const SkewProduct& F) {
  F.validate();
  EscapeRegion region = escape_region_1d(p, cert.cycles);
  const double R = region.R;
  const int d = F.f.z_degree();

  // shrink eps until boundary sampling confirms F(W) strictly inside W
  double eps = 0.25;
  const CoeffFamily fam = F.f;
  bool ok = false;
  double w_margin_scale = 1.0 - std::abs(F.lambda);
  while (eps >= 1e-8) {
    ok = true;
    // (a) escape part: |f(z,w)| > R for |z| in [R, r_hi], certified beyond
    // r_hi by coefficient domination against the w-sup'd coefficients.
    std::vector<double> sup(d + 1, 0.0);
    for (int i = 0; i < d; ++i) sup[i] = fam.sup_coeff_abs(i, eps);
    sup[d] = 1.0;
    double r_hi = 3.0;
    for (int i = 0; i < d; ++i) r_hi += sup[i];
    auto tail_ok = [&](double r) {
      double g = std::pow(r, d) - R;
      double dg = d * std::pow(r, d - 1);
      for (int i = 0; i < d; ++i) {
        g -= sup[i] * std::pow(r, i);
        if (i >= 1) dg -= i * sup[i] * std::pow(r, i - 1);
      }
      return g > 0.0 && dg > 0.0;
    };
    while (!tail_ok(r_hi)) r_hi *= 2.0;
    for (int k = 0; k < 17 && ok; ++k) {
      double r = R * std::pow(r_hi / R, k / 16.0);
      for (int a = 0; a < 256 && ok; ++a) {
        double th = 2.0 * M_PI * a / 256;
        Complex z = r * Complex{std::cos(th), std::sin(th)};
        for (int b = 0; b < 16 && ok; ++b) {
          double ph = 2.0 * M_PI * b / 16;
          Complex w = eps * Complex{std::cos(ph), std::sin(ph)};
          if (!region.in_W0(fam.eval(z, w))) ok = false;
        }
      }
    }
    // (b) basin part: each disk boundary times the w-circle maps into W0
    for (const auto& disk : region.basin_disks) {
      if (!ok) break;
      for (int a = 0; a < 128 && ok; ++a) {
        double th = 2.0 * M_PI * a / 128;
        Complex z = disk.center +
                    disk.radius * Complex{std::cos(th), std::sin(th)};
        for (int b = 0; b < 16 && ok; ++b) {
          double ph = 2.0 * M_PI * b / 16;
          Complex w = eps * Complex{std::cos(ph), std::sin(ph)};
          if (!region.in_W0(fam.eval(z, w))) ok = false;
        }
      }
    }
    if (ok) break;
    eps *= 0.5;
  }
  if (!ok) {
    throw NoAttractingMargin("no eps >= 1e-8 makes F(W) invariant");
  }
  region.eps = eps;

  // derivative bound on D(0, R+1) x D(0, eps)
  const CoeffFamily fdz = fam.dz();
  const CoeffFamily fdw = fam.dw();
  double M = 0.0;
  for (int ir = 0; ir <= 24; ++ir) {
    double r = (R + 1.0) * ir / 24.0;
    for (int a = 0; a < 48; ++a) {
      double th = 2.0 * M_PI * a / 48;
      Complex z = r * Complex{std::cos(th), std::sin(th)};
      for (int iw = 0; iw <= 4; ++iw) {
        double rw = eps * iw / 4.0;
        for (int b = 0; b < 8; ++b) {
          double ph = 2.0 * M_PI * b / 8;
          Complex w = rw * Complex{std::cos(ph), std::sin(ph)};
          Complex fz = fdz.eval(z, w);
          Complex fw = fdw.eval(z, w);
          double aa = std::norm(fz), bb = std::norm(fw),
                 ll = std::norm(F.lambda);
          double s = aa + bb + ll;
          double disc = std::sqrt(std::max(0.0, s * s - 4.0 * aa * ll));
          M = std::max(M, std::sqrt(0.5 * (s + disc)));
        }
      }
    }
  }
  region.M = 1.05 * M;

  // sampled invariance margin: how deep F pushes boundary points into W
  double margin = eps * w_margin_scale;
  for (int a = 0; a < 256; ++a) {
    double th = 2.0 * M_PI * a / 256;
    Complex z = R * Complex{std::cos(th), std::sin(th)};
    Complex w = eps * Complex{std::cos(th * 3.0), std::sin(th * 3.0)};
    auto [z1, w1] = F.apply({z, w});
    margin = std::min(margin, region.margin_in_W(z1, w1));
  }
  for (const auto& disk : region.basin_disks) {
    for (int a = 0; a < 128; ++a) {
      double th = 2.0 * M_PI * a / 128;
      Complex z =
          disk.center + disk.radius * Complex{std::cos(th), std::sin(th)};
      Complex w = eps * Complex{std::cos(th * 3.0), std::sin(th * 3.0)};
      auto [z1, w1] = F.apply({z, w});
      margin = std::min(margin, region.margin_in_W(z1, w1));
    }
  }
  if (!(margin > 0.0)) {
    throw NoAttractingMargin("sampled invariance margin not positive");
  }
  double C1 = margin / (region.M + 1.0);

  // Halve C1 until points within C1*M^-m of sampled U_m land in W after
  // m+1 steps. Constructive stand-in for the existence constant.
  Rng rng(0x5eedULL, "lemma-c1");
  auto lemma_holds = [&](double c1) {
    for (int m = 0; m <= 10; ++m) {
      int found = 0, tries = 0;
      while (found < 40 && tries < 4000) {
        ++tries;
        Complex z0 = rng.uniform_in_disk(R);
        auto et = escape_time(p, region, z0, m);
        if (!et) continue;
        ++found;
        for (int rep = 0; rep < 3; ++rep) {
          double g[4] = {rng.gauss(), rng.gauss(), rng.gauss(), rng.gauss()};
          double nrm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] +
                                 g[3] * g[3]);
          double rad = c1 * std::pow(region.M, -m) *
                       std::pow(rng.uniform(), 0.25) / std::max(nrm, 1e-12);
          Complex dz{g[0] * rad, g[1] * rad};
          Complex dw{g[2] * rad, g[3] * rad};
          auto zw = F.iterate({z0 + dz, dw}, m + 1);
          if (!region.in_W(zw.first, zw.second)) return false;
        }
      }
    }
    return true;
  };
  int halvings = 0;
  while (!lemma_holds(C1)) {
    C1 *= 0.5;
    if (++halvings > 48) {
      throw NoAttractingMargin("C1 halved out of range");
    }
  }
  region.C1 = C1;
  return region;
}

std::optional<int> escape_time(const ComplexPoly& p, const EscapeRegion& region,
                               Complex z, int cap) {
  for (int m = 0; m <= cap; ++m) {
    if (region.in_W0(z)) return m;
    z = p.eval(z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      // overflowed to infinity: it certainly escaped at this step
      return m + 1 <= cap ? std::optional<int>(m + 1) : std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace skewfatou
