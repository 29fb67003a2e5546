#include "skewfatou/complex_poly.hpp"

#include <algorithm>
#include <cmath>

namespace skewfatou {

namespace {

void trim(std::vector<Complex>& c) {
  while (c.size() > 1 && c.back() == Complex{0.0}) c.pop_back();
  if (c.empty()) c.push_back(Complex{0.0});
}

}  // namespace

ComplexPoly::ComplexPoly(std::vector<Complex> coeffs)
    : coeffs_(std::move(coeffs)) {
  trim(coeffs_);
}

ComplexPoly ComplexPoly::constant(Complex c) { return ComplexPoly({c}); }

ComplexPoly ComplexPoly::monomial(Complex c, int power) {
  std::vector<Complex> v(static_cast<std::size_t>(power) + 1, Complex{0.0});
  v[power] = c;
  return ComplexPoly(std::move(v));
}

ComplexPoly ComplexPoly::from_roots(std::span<const Complex> roots) {
  ComplexPoly p = constant(Complex{1.0});
  for (Complex r : roots) {
    p = p * ComplexPoly({-r, Complex{1.0}});
  }
  return p;
}

bool ComplexPoly::is_zero() const {
  return coeffs_.size() == 1 && coeffs_[0] == Complex{0.0};
}

bool ComplexPoly::is_monic(double tol) const {
  return std::abs(coeffs_.back() - Complex{1.0}) <= tol;
}

Complex ComplexPoly::eval(Complex z) const {
  Complex acc = coeffs_.back();
  for (int i = static_cast<int>(coeffs_.size()) - 2; i >= 0; --i) {
    acc = acc * z + coeffs_[i];
  }
  return acc;
}

QComplex ComplexPoly::eval_q(QComplex z) const {
  QComplex acc{coeffs_.back()};
  for (int i = static_cast<int>(coeffs_.size()) - 2; i >= 0; --i) {
    acc = acc * z + QComplex{coeffs_[i]};
  }
  return acc;
}

ComplexPoly ComplexPoly::derivative() const {
  if (coeffs_.size() == 1) return constant(Complex{0.0});
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    d[i - 1] = coeffs_[i] * static_cast<double>(i);
  }
  return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::operator+(const ComplexPoly& o) const {
  std::vector<Complex> out(std::max(coeffs_.size(), o.coeffs_.size()),
                           Complex{0.0});
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) out[i] += o.coeffs_[i];
  return ComplexPoly(std::move(out));
}

ComplexPoly ComplexPoly::operator-(const ComplexPoly& o) const {
  std::vector<Complex> out(std::max(coeffs_.size(), o.coeffs_.size()),
                           Complex{0.0});
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) out[i] -= o.coeffs_[i];
  return ComplexPoly(std::move(out));
}

ComplexPoly ComplexPoly::operator*(const ComplexPoly& o) const {
  if (is_zero() || o.is_zero()) return constant(Complex{0.0});
  std::vector<Complex> out(coeffs_.size() + o.coeffs_.size() - 1,
                           Complex{0.0});
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) {
      out[i + j] += coeffs_[i] * o.coeffs_[j];
    }
  }
  return ComplexPoly(std::move(out));
}

ComplexPoly ComplexPoly::scaled(Complex s) const {
  std::vector<Complex> out = coeffs_;
  for (auto& c : out) c *= s;
  return ComplexPoly(std::move(out));
}

ComplexPoly ComplexPoly::compose(const ComplexPoly& inner) const {
  ComplexPoly acc = constant(coeffs_.back());
  for (int i = static_cast<int>(coeffs_.size()) - 2; i >= 0; --i) {
    acc = acc * inner + constant(coeffs_[i]);
  }
  return acc;
}

ComplexPoly ComplexPoly::shifted(Complex c) const {
  // Horner-style Taylor shift in place.
  std::vector<Complex> b = coeffs_;
  const int n = static_cast<int>(b.size());
  for (int i = 0; i < n - 1; ++i) {
    for (int j = n - 2; j >= i; --j) {
      b[j] += c * b[j + 1];
    }
  }
  return ComplexPoly(std::move(b));
}

double ComplexPoly::max_coeff_abs() const {
  double m = 0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool ComplexPoly::all_finite() const {
  for (const auto& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

std::vector<std::pair<Complex, int>> cluster_points(
    std::span<const Complex> pts, double radius) {
  std::vector<Complex> sorted(pts.begin(), pts.end());
  std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<std::pair<Complex, int>> out;
  std::vector<bool> used(sorted.size(), false);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (used[i]) continue;
    Complex sum = sorted[i];
    int count = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(sorted[j] - sum / static_cast<double>(count)) <= radius) {
        sum += sorted[j];
        ++count;
        used[j] = true;
      }
    }
    out.emplace_back(sum / static_cast<double>(count), count);
  }
  return out;
}

std::vector<Complex> roots(const ComplexPoly& p, const RootOptions& opt) {
  if (p.degree() < 1) {
    throw std::invalid_argument("roots: degree >= 1 required");
  }
  std::vector<Complex> c = p.coeffs();
  const Complex lead = c.back();
  if (lead == Complex{0.0}) {
    throw std::invalid_argument("roots: zero leading coefficient");
  }
  for (auto& x : c) x /= lead;
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) return {-c[0]};

  const ComplexPoly q{std::vector<Complex>(c)};
  const ComplexPoly dq = q.derivative();

  double rad = 0.0;
  for (int i = 0; i < n; ++i) rad = std::max(rad, std::abs(c[i]));
  rad += 1.0;
  // Equally spaced start points rotated by a fixed irrational angle so
  // symmetric inputs do not trap the iteration on an invariant ray.
  const double rot = 0.6180339887498949;
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * M_PI * i / n + rot;
    z[i] = rad * Complex{std::cos(th), std::sin(th)};
  }

  const double log_tol = std::log(opt.tol);
  auto residual_ok = [&](Complex zi) {
    double a = std::abs(q.eval(zi));
    if (a == 0.0) return true;
    // log-scale test: tol * (1+|z|)^n can overflow for large degree
    return std::log(a) < log_tol + n * std::log1p(std::abs(zi));
  };

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    bool all_ok = true;
    for (int i = 0; i < n && all_ok; ++i) all_ok = residual_ok(z[i]);
    if (all_ok) {
      auto clusters = cluster_points(z, opt.cluster_factor * opt.tol);
      std::vector<Complex> out;
      out.reserve(n);
      for (const auto& [centroid, count] : clusters) {
        for (int k = 0; k < count; ++k) out.push_back(centroid);
      }
      return out;
    }
    for (int i = 0; i < n; ++i) {
      Complex pz = q.eval(z[i]);
      if (pz == Complex{0.0}) continue;
      Complex dpz = dq.eval(z[i]);
      if (std::abs(dpz) < 1e-300) {
        z[i] += 1e-8 * (1.0 + std::abs(z[i]));
        continue;
      }
      Complex w = pz / dpz;
      Complex s{0.0};
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Complex d = z[i] - z[j];
        if (std::abs(d) < 1e-300) {
          d = Complex{1e-300, 0.0};
        }
        s += Complex{1.0} / d;
      }
      Complex denom = Complex{1.0} - w * s;
      Complex step = std::abs(denom) < 1e-300 ? w : w / denom;
      z[i] -= step;
    }
  }
  throw NonConvergence("roots: Aberth iteration cap reached (degree " +
                       std::to_string(n) + ")");
}

std::vector<Complex> roots(const ComplexPoly& p, double tol) {
  RootOptions opt;
  opt.tol = tol;
  return roots(p, opt);
}

void CoeffFamily::validate() const {
  if (z_degree() < 2) {
    throw Error("map must have z-degree >= 2");
  }
  const ComplexPoly& top = coeff_polys.back();
  if (top.degree() != 0 || std::abs(top.coeff(0) - Complex{1.0}) > 1e-12) {
    throw Error("map must be monic in z");
  }
}

ComplexPoly CoeffFamily::eval_fiber(Complex w) const {
  std::vector<Complex> c(coeff_polys.size());
  for (std::size_t i = 0; i < coeff_polys.size(); ++i) {
    c[i] = coeff_polys[i].eval(w);
  }
  return ComplexPoly(std::move(c));
}

Complex CoeffFamily::eval(Complex z, Complex w) const {
  return eval_fiber(w).eval(z);
}

QComplex CoeffFamily::eval_q(QComplex z, QComplex w) const {
  QComplex acc = coeff_polys.back().eval_q(w);
  for (int i = static_cast<int>(coeff_polys.size()) - 2; i >= 0; --i) {
    acc = acc * z + coeff_polys[i].eval_q(w);
  }
  return acc;
}

CoeffFamily CoeffFamily::dz() const {
  CoeffFamily out;
  if (coeff_polys.size() <= 1) {
    out.coeff_polys.push_back(ComplexPoly::constant(Complex{0.0}));
    return out;
  }
  out.coeff_polys.resize(coeff_polys.size() - 1);
  for (std::size_t i = 1; i < coeff_polys.size(); ++i) {
    out.coeff_polys[i - 1] = coeff_polys[i].scaled(static_cast<double>(i));
  }
  return out;
}

CoeffFamily CoeffFamily::dw() const {
  CoeffFamily out;
  out.coeff_polys.resize(coeff_polys.size());
  for (std::size_t i = 0; i < coeff_polys.size(); ++i) {
    out.coeff_polys[i] = coeff_polys[i].derivative();
  }
  return out;
}

double CoeffFamily::sup_coeff_abs(int i, double w_radius) const {
  const ComplexPoly& a = coeff_polys[i];
  double m = 0;
  const int samples = 64;
  for (int k = 0; k < samples; ++k) {
    double th = 2.0 * M_PI * k / samples;
    m = std::max(m, std::abs(a.eval(w_radius * Complex{std::cos(th),
                                                       std::sin(th)})));
  }
  return 1.05 * m;
}

void SkewProduct::validate() const {
  f.validate();
  double l = std::abs(lambda);
  if (!(l > 0.0 && l < 1.0)) {
    throw Error("skew product needs 0 < |lambda| < 1");
  }
}

std::pair<Complex, Complex> SkewProduct::apply(
    std::pair<Complex, Complex> zw) const {
  return {f.eval(zw.first, zw.second), lambda * zw.second};
}

std::pair<QComplex, QComplex> SkewProduct::apply_q(
    std::pair<QComplex, QComplex> zw) const {
  return {f.eval_q(zw.first, zw.second), QComplex{lambda} * zw.second};
}

std::pair<Complex, Complex> SkewProduct::iterate(std::pair<Complex, Complex> zw,
                                                 int n) const {
  for (int i = 0; i < n; ++i) zw = apply(zw);
  return zw;
}

}  // namespace skewfatou
