#include "skewfatou/linearization.hpp"

#include <algorithm>
#include <cmath>

namespace skewfatou {

namespace {

// Truncated power series without constant term: coeffs[j] multiplies h^(j+1).
using Series = std::vector<Complex>;

Series series_mul(const Series& a, const Series& b, int order) {
  Series out(order, Complex{0.0});
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (a[i] == Complex{0.0}) continue;
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      int deg = (i + 1) + (j + 1);
      if (deg > order) break;
      out[deg - 1] += a[i] * b[j];
    }
  }
  return out;
}

// outer(inner(h)), both without constant term
Series series_compose(const Series& outer, const Series& inner, int order) {
  Series out(order, Complex{0.0});
  Series power = inner;  // inner^k
  for (int k = 1; k <= order; ++k) {
    if (k <= static_cast<int>(outer.size()) && outer[k - 1] != Complex{0.0}) {
      for (int j = 0; j < order; ++j) out[j] += outer[k - 1] * power[j];
    }
    if (k < order) power = series_mul(power, inner, order);
  }
  return out;
}

// Taylor series of p at c with the constant term dropped (the cycle points
// are polished, the residue is ~1e-15 and harmless at the chart's scale).
Series local_series(const ComplexPoly& p, Complex c, int order) {
  ComplexPoly sh = p.shifted(c);
  Series s(order, Complex{0.0});
  for (int j = 1; j <= std::min(order, sh.degree()); ++j) {
    s[j - 1] = sh.coeff(j);
  }
  return s;
}

}  // namespace

Complex KoenigsChart::psi(Complex z) const {
  Complex h = z - fixed_point;
  Complex acc{0.0};
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    acc = (acc + coeffs[k]) * h;
  }
  return acc;
}

KoenigsChart koenigs(const ComplexPoly& p, const CycleRecord& cycle,
                     int order) {
  if (!cycle.repelling()) {
    throw std::invalid_argument("koenigs: repelling cycle required");
  }
  if (order < 2 || order > 40) {
    throw std::invalid_argument("koenigs: order must be in [2, 40]");
  }
  const int q = cycle.period();
  const Complex x_r = cycle.points[0];

  // return map around points[0] in local coordinates
  Series G = local_series(p, cycle.points[0], order);
  for (int j = 1; j < q; ++j) {
    Series next = local_series(p, cycle.points[j], order);
    G = series_compose(next, G, order);
  }
  const Complex mu = G[0];

  // psi(G(h)) = mu psi(h), psi(h) = h + b_2 h^2 + ...
  std::vector<Series> gpow(order + 1);
  gpow[1] = G;
  for (int k = 2; k <= order; ++k) gpow[k] = series_mul(gpow[k - 1], G, order);

  std::vector<Complex> b(order + 1, Complex{0.0});
  b[1] = Complex{1.0};
  for (int n = 2; n <= order; ++n) {
    Complex rhs = gpow[1][n - 1];  // g_n * b_1
    for (int k = 2; k < n; ++k) {
      rhs += b[k] * gpow[k][n - 1];
    }
    Complex denom = mu - std::pow(mu, n);
    if (std::abs(denom) < 1e-12) {
      throw ResonanceBreakdown("koenigs: mu^" + std::to_string(n) +
                               " - mu vanishes");
    }
    b[n] = rhs / denom;
  }

  KoenigsChart chart;
  chart.fixed_point = x_r;
  chart.mu = mu;
  chart.period = q;
  chart.coeffs.assign(b.begin() + 1, b.end());

  double rho = 0.0;
  for (int k = std::max(2, order / 2); k <= order; ++k) {
    double a = std::abs(b[k]);
    if (a > 0.0) rho = std::max(rho, std::pow(a, 1.0 / k));
  }
  double radius = rho > 0.0 ? 0.4 / (rho * std::max(1.0, std::abs(mu))) : 1.0;
  radius = std::min(radius, 1.0);

  // shrink until the functional-equation residual clears 1e-8 on the
  // half-radius disk (return map evaluated by orbit, not by the series)
  auto residual_on_half_disk = [&](double rad) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      double rr = rad * 0.5 * (0.15 + 0.85 * ((i % 10) + 1) / 10.0);
      double th = 2.0 * M_PI * i / 100.0 + 0.37;
      Complex z = x_r + rr * Complex{std::cos(th), std::sin(th)};
      Complex gz = z;
      for (int j = 0; j < q; ++j) gz = p.eval(gz);
      worst = std::max(worst, std::abs(chart.psi(gz) - mu * chart.psi(z)));
    }
    return worst;
  };
  int halvings = 0;
  while (residual_on_half_disk(radius) > 1e-8) {
    radius *= 0.5;
    if (++halvings > 40) {
      throw NonConvergence("koenigs: residual does not settle");
    }
  }
  chart.radius = radius;
  return chart;
}

namespace detail {

struct BranchData {
  enum class Mode { LinearFiber, Continued } mode = Mode::LinearFiber;
  CoeffFamily dz;  // fiber derivative family, z-degree d-1
  int l = 1;
  Complex x0{};
  double eps_w = 0.0;
  double w_floor = 1e-8;
  Complex anchor_root{};

  Complex nearest_root(Complex w, Complex prev) const {
    auto rts = roots(dz.eval_fiber(w), 1e-12);
    Complex best = rts[0];
    double bd = std::abs(rts[0] - prev);
    for (Complex r : rts) {
      double d = std::abs(r - prev);
      if (d < bd) {
        bd = d;
        best = r;
      }
    }
    return best;
  }

  Complex continue_to(Complex t) const {
    const double phi = std::arg(t);
    const double target_angle = l * phi;
    Complex cur = anchor_root;
    const int arc_steps =
        std::max(1, static_cast<int>(std::ceil(std::abs(target_angle) / 0.1)));
    for (int s = 1; s <= arc_steps; ++s) {
      double ang = target_angle * s / arc_steps;
      cur = nearest_root(eps_w * Complex{std::cos(ang), std::sin(ang)}, cur);
    }
    const double wr_target =
        std::max(std::pow(std::abs(t), l), w_floor);
    double wr = eps_w;
    const Complex dir{std::cos(target_angle), std::sin(target_angle)};
    while (wr > wr_target * (1.0 + 1e-12)) {
      wr = std::max(wr * 0.8, wr_target);
      cur = nearest_root(wr * dir, cur);
    }
    return cur;
  }
};

}  // namespace detail

Complex BranchEvaluator::operator()(Complex t) const {
  const auto& d = *data_;
  if (t == Complex{0.0}) return d.x0;
  if (d.mode == detail::BranchData::Mode::LinearFiber) {
    Complex w{1.0};
    for (int i = 0; i < d.l; ++i) w *= t;
    return -d.dz.coeff_polys[0].eval(w) / d.dz.coeff_polys[1].eval(w);
  }
  return d.continue_to(t);
}

QComplex BranchEvaluator::eval_q(QComplex t) const {
  const auto& d = *data_;
  if (t.re == 0 && t.im == 0) return QComplex{d.x0};
  if (d.mode == detail::BranchData::Mode::LinearFiber) {
    QComplex w = qpow_int(t, d.l);
    return -(d.dz.coeff_polys[0].eval_q(w)) / d.dz.coeff_polys[1].eval_q(w);
  }
  return QComplex{d.continue_to(t.to_double())};
}

bool BranchEvaluator::quad_exact() const {
  return data_ && data_->mode == detail::BranchData::Mode::LinearFiber;
}

Complex CriticalBranch::gamma2(Complex t) const {
  Complex w{1.0};
  for (int i = 0; i < l; ++i) w *= t;
  return w;
}

CriticalBranch detect_branch(const SkewProduct& F, const SubhypCertificate& cert,
                             int which_critical, double eps_w,
                             int nu_branch_index) {
  F.validate();
  if (which_critical < 0 ||
      which_critical >= static_cast<int>(cert.critical_records.size())) {
    throw std::invalid_argument("detect_branch: bad critical index");
  }
  const auto& rec = cert.critical_records[which_critical];
  const Complex x0 = rec.critical_point;

  auto data = std::make_shared<detail::BranchData>();
  data->dz = F.f.dz();
  data->x0 = x0;
  data->eps_w = eps_w;

  const int fiber_degree = data->dz.z_degree();
  if (fiber_degree < 1) {
    throw Error("detect_branch: fiber derivative is constant");
  }

  if (fiber_degree == 1) {
    data->mode = detail::BranchData::Mode::LinearFiber;
    data->l = 1;
  } else {
    // monodromy of the fiber critical points around |w| = eps_w
    data->mode = detail::BranchData::Mode::Continued;
    const int steps = 256;
    auto fiber_roots = [&](Complex w) {
      return roots(data->dz.eval_fiber(w), 1e-12);
    };
    auto check_separation = [&](const std::vector<Complex>& rts) {
      for (std::size_t i = 0; i < rts.size(); ++i) {
        for (std::size_t j = i + 1; j < rts.size(); ++j) {
          if (std::abs(rts[i] - rts[j]) < 1e-6) {
            throw BranchCollision(
                "critical branches within 1e-6 on the |w| = eps circle");
          }
        }
      }
    };
    std::vector<Complex> start = fiber_roots(Complex{eps_w});
    std::sort(start.begin(), start.end(), [](Complex a, Complex b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    check_separation(start);
    std::vector<Complex> tracked = start;
    for (int k = 1; k <= steps; ++k) {
      double th = 2.0 * M_PI * k / steps;
      auto rts = fiber_roots(eps_w * Complex{std::cos(th), std::sin(th)});
      check_separation(rts);
      std::vector<bool> used(rts.size(), false);
      for (auto& cur : tracked) {
        int best = -1;
        double bd = 1e300;
        for (std::size_t j = 0; j < rts.size(); ++j) {
          if (used[j]) continue;
          double d = std::abs(rts[j] - cur);
          if (d < bd) {
            bd = d;
            best = static_cast<int>(j);
          }
        }
        used[best] = true;
        cur = rts[best];
      }
    }
    // permutation start[i] -> start[perm[i]] after one loop
    std::vector<int> perm(start.size());
    for (std::size_t i = 0; i < start.size(); ++i) {
      int best = 0;
      double bd = 1e300;
      for (std::size_t j = 0; j < start.size(); ++j) {
        double d = std::abs(tracked[i] - start[j]);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(j);
        }
      }
      perm[i] = best;
    }
    // which sheets descend to the chosen critical point
    auto descend_limit = [&](Complex from) {
      Complex cur = from;
      double wr = eps_w;
      while (wr > data->w_floor) {
        wr = std::max(wr * 0.8, data->w_floor);
        cur = data->nearest_root(Complex{wr}, cur);
      }
      return cur;
    };
    int anchor = -1;
    for (std::size_t i = 0; i < start.size(); ++i) {
      Complex limit = descend_limit(start[i]);
      int nearest_rec = 0;
      double bd = 1e300;
      for (std::size_t r = 0; r < cert.critical_records.size(); ++r) {
        double d = std::abs(limit - cert.critical_records[r].critical_point);
        if (d < bd) {
          bd = d;
          nearest_rec = static_cast<int>(r);
        }
      }
      if (nearest_rec == which_critical) {
        anchor = static_cast<int>(i);
        break;  // start[] is lexicographic, first hit is canonical
      }
    }
    if (anchor < 0) {
      throw Error("detect_branch: no sheet descends to the critical point");
    }
    int l = 1;
    for (int i = perm[anchor]; i != anchor; i = perm[i]) ++l;
    data->l = l;
    data->anchor_root = start[anchor];
  }

  CriticalBranch branch;
  branch.l = data->l;
  branch.x0 = x0;
  branch.eps = std::pow(eps_w, 1.0 / data->l);
  branch.gamma1 = BranchEvaluator(data);
  branch.escape_R = escape_radius(F.base());

  if (nu_branch_index < 0 || nu_branch_index >= data->l) {
    throw std::invalid_argument("detect_branch: nu branch index out of range");
  }
  Complex log_nu = std::log(F.lambda) / static_cast<double>(data->l);
  Complex rot = std::polar(1.0, 2.0 * M_PI * nu_branch_index / data->l);
  branch.nu = std::exp(log_nu) * rot;

  if (rec.verdict == CriticalRecord::Verdict::PreperiodicToRepelling) {
    branch.has_saddle_data = true;
    branch.r = rec.preperiod;
    branch.x_r = rec.landing_cycle.points[0];
    branch.mu = rec.landing_cycle.multiplier;
    branch.period = rec.landing_cycle.period();
  }
  return branch;
}

int max_stage(const CriticalBranch& branch) {
  double am = std::abs(branch.mu);
  if (!(am > 1.0)) return 0;
  return static_cast<int>(std::floor(std::log(branch.eps / 1e-280) /
                                     std::log(am)));
}

std::vector<Complex> default_phi_samples(const CriticalBranch& branch) {
  std::vector<Complex> out;
  out.reserve(192);
  for (double frac : {0.25, 0.5, 1.0}) {
    double r = branch.eps * frac;
    for (int i = 0; i < 64; ++i) {
      double th = 2.0 * M_PI * i / 64.0;
      out.push_back(r * Complex{std::cos(th), std::sin(th)});
    }
  }
  return out;
}

namespace {

std::vector<QComplex> stage_values(const CriticalBranch& branch,
                                   const SkewProduct& F, int n, int k,
                                   std::span<const Complex> samples,
                                   std::vector<QComplex>* w_out) {
  const QComplex mu_inv = QComplex{1.0} / QComplex{branch.mu};
  const QComplex scale = qpow_int(mu_inv, n);
  const int steps = k * branch.period * n;
  const double guard = 10.0 * branch.escape_R;
  std::vector<QComplex> out;
  out.reserve(samples.size());
  if (w_out) w_out->clear();
  for (Complex t : samples) {
    QComplex tq = scale * QComplex{t};
    QComplex z = branch.gamma1.eval_q(tq);
    QComplex w = qpow_int(tq, branch.l);
    for (int s = 0; s < steps; ++s) {
      auto zw = F.apply_q({z, w});
      z = zw.first;
      w = zw.second;
      if (qabs_d(z) > guard) {
        throw OverflowEscape("phi stage orbit left |z| <= 10R at step " +
                             std::to_string(s + 1) + " of stage " +
                             std::to_string(n));
      }
    }
    out.push_back(z);
    if (w_out) w_out->push_back(w);
  }
  return out;
}

}  // namespace

PhiApprox phi_stage(const CriticalBranch& branch, const SkewProduct& F, int n,
                    std::span<const Complex> samples, int k_override) {
  if (!branch.has_saddle_data) {
    throw std::invalid_argument("phi_stage: branch has no saddle data");
  }
  const int k = k_override > 0 ? k_override : branch.k;
  if (k < 1) {
    throw std::invalid_argument("phi_stage: order k not detected yet");
  }
  if (n < 0 || n > max_stage(branch)) {
    throw std::invalid_argument("phi_stage: stage outside the underflow guard");
  }
  for (Complex t : samples) {
    if (std::abs(t) > branch.eps * (1.0 + 1e-12)) {
      throw std::invalid_argument("phi_stage: |t| <= eps required");
    }
  }
  PhiApprox phi;
  phi.n = n;
  phi.k = k;
  phi.samples.assign(samples.begin(), samples.end());
  phi.qvalues = stage_values(branch, F, n, k, samples, &phi.qw);
  phi.values.resize(phi.qvalues.size());
  for (std::size_t i = 0; i < phi.qvalues.size(); ++i) {
    phi.values[i] = phi.qvalues[i].to_double();
  }
  if (n >= 1) {
    auto prev = stage_values(branch, F, n - 1, k, samples, nullptr);
    double gap = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      gap = std::max(gap, qabs_d(phi.qvalues[i] - prev[i]));
    }
    phi.cauchy_gap = gap;
  }
  return phi;
}

double fit_vanishing_order(std::span<const Complex> ts,
                           std::span<const Complex> values,
                           Complex value_at_0) {
  // group by radius, average log |delta| per circle
  std::vector<std::pair<double, std::pair<double, int>>> groups;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double r = std::abs(ts[i]);
    double d = std::abs(values[i] - value_at_0);
    if (r <= 0.0 || d <= 0.0) continue;
    bool found = false;
    for (auto& g : groups) {
      if (std::abs(g.first - r) < 1e-9 * (1.0 + r)) {
        g.second.first += std::log(d);
        g.second.second += 1;
        found = true;
        break;
      }
    }
    if (!found) groups.push_back({r, {std::log(d), 1}});
  }
  if (groups.size() < 2) {
    throw std::invalid_argument("fit_vanishing_order: need two radii");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& g : groups) {
    double x = std::log(g.first);
    double y = g.second.first / g.second.second;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(groups.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int detect_order_k(const CriticalBranch& branch, const SkewProduct& F,
                   std::span<const int> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("detect_order_k: no candidates");
  }
  for (int k : candidates) {
    if (k < 1) throw std::invalid_argument("detect_order_k: candidates >= 1");
  }
  std::vector<int> ks(candidates.begin(), candidates.end());
  std::sort(ks.begin(), ks.end());

  // two inner circles, 32 points each: enough for gap statistics and the
  // slope confirmation without burning continuation time
  std::vector<Complex> samples;
  for (double frac : {0.25, 0.5}) {
    double r = branch.eps * frac;
    for (int i = 0; i < 32; ++i) {
      double th = 2.0 * M_PI * i / 32.0;
      samples.push_back(r * Complex{std::cos(th), std::sin(th)});
    }
  }

  const int n_hi = std::min(16, max_stage(branch));
  bool any_nonconstant = false;
  for (int k : ks) {
    std::vector<double> gaps;
    PhiApprox last;
    bool diverged = false;
    try {
      for (int n = 2; n <= n_hi; ++n) {
        last = phi_stage(branch, F, n, samples, k);
        gaps.push_back(last.cauchy_gap);
      }
    } catch (const OverflowEscape&) {
      diverged = true;
    }
    if (diverged) continue;

    double spread = 0.0;
    QComplex at0 = stage_values(branch, F, last.n, k,
                                std::vector<Complex>{Complex{0.0}}, nullptr)[0];
    for (const auto& qv : last.qvalues) {
      spread = std::max(spread, qabs_d(qv - at0));
    }
    if (spread < 1e-10) continue;  // constant limit: under-shot order
    any_nonconstant = true;

    // Cauchy: mean ratio over the last 5 stages below 0.99
    if (gaps.size() < 6) continue;
    double ratio_sum = 0.0;
    int ratio_n = 0;
    for (std::size_t i = gaps.size() - 5; i < gaps.size(); ++i) {
      if (gaps[i - 1] > 0.0) {
        ratio_sum += gaps[i] / gaps[i - 1];
        ++ratio_n;
      }
    }
    bool cauchy = ratio_n > 0 && ratio_sum / ratio_n < 0.99 &&
                  gaps.back() < gaps.front();
    if (cauchy) return k;
  }
  if (!any_nonconstant) {
    throw StableManifoldBranch(
        "stage maps are constant for every candidate order");
  }
  throw NonConvergence("detect_order_k: no candidate is Cauchy");
}

double functional_equation_residual(const PhiApprox& phi,
                                    const CriticalBranch& branch,
                                    const SkewProduct& F) {
  std::vector<Complex> scaled(phi.samples.size());
  for (std::size_t i = 0; i < phi.samples.size(); ++i) {
    scaled[i] = branch.mu * phi.samples[i];
  }
  // Phi_n(mu t) = F^{kqn}(gamma(mu^{-(n-1)} t)): the gamma argument shrinks,
  // so scaled samples never leave the branch domain internally.
  auto fresh = stage_values(branch, F, phi.n, phi.k, scaled, nullptr);
  const int steps = phi.k * branch.period;
  double worst = 0.0;
  for (std::size_t i = 0; i < phi.qvalues.size(); ++i) {
    QComplex z = phi.qvalues[i];
    QComplex w = phi.qw[i];
    for (int s = 0; s < steps; ++s) {
      auto zw = F.apply_q({z, w});
      z = zw.first;
      w = zw.second;
    }
    worst = std::max(worst, qabs_d(z - fresh[i]));
  }
  return worst;
}

Complex phi_limit(const CriticalBranch& branch, const SkewProduct& F, Complex t,
                  int n_stage) {
  int n = n_stage > 0 ? n_stage : std::min(40, max_stage(branch));
  auto vals = stage_values(branch, F, n, std::max(1, branch.k),
                           std::vector<Complex>{t}, nullptr);
  return vals[0].to_double();
}

}  // namespace skewfatou
