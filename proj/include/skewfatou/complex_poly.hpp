#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skewfatou/errors.hpp"
#include "skewfatou/qcomplex.hpp"

namespace skewfatou {

using Complex = std::complex<double>;

/// Dense univariate polynomial over C, coefficients lowest degree first.
/// Trailing zeros are trimmed on construction; the zero polynomial is {0}.
class ComplexPoly {
 public:
  ComplexPoly() : coeffs_{Complex{0.0}} {}
  explicit ComplexPoly(std::vector<Complex> coeffs);

  static ComplexPoly constant(Complex c);
  static ComplexPoly monomial(Complex c, int power);
  static ComplexPoly from_roots(std::span<const Complex> roots);  // monic

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const;
  bool is_monic(double tol = 1e-12) const;
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  Complex coeff(int i) const {
    return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[i]
                                                          : Complex{0.0};
  }

  Complex eval(Complex z) const;  // Horner
  QComplex eval_q(QComplex z) const;
  ComplexPoly derivative() const;

  ComplexPoly operator+(const ComplexPoly& o) const;
  ComplexPoly operator-(const ComplexPoly& o) const;
  ComplexPoly operator*(const ComplexPoly& o) const;
  ComplexPoly scaled(Complex s) const;
  ComplexPoly compose(const ComplexPoly& inner) const;  // this(inner(z))
  ComplexPoly shifted(Complex c) const;                 // this(z + c)

  double max_coeff_abs() const;
  bool all_finite() const;

 private:
  std::vector<Complex> coeffs_;
};

struct RootOptions {
  double tol = 1e-12;
  int max_iter = 500;
  double cluster_factor = 100.0;  // merge roots closer than factor * tol
};

/// All degree-many roots with multiplicity (Aberth-Ehrlich simultaneous
/// iteration, deterministic initial configuration). Each returned root r
/// satisfies |p(r)| < tol * (1 + |r|)^degree. Throws NonConvergence past the
/// iteration cap and std::invalid_argument for degree < 1.
std::vector<Complex> roots(const ComplexPoly& p, const RootOptions& opt);
std::vector<Complex> roots(const ComplexPoly& p, double tol = 1e-12);

/// Greedy geometric clustering; returns (centroid, count) pairs.
std::vector<std::pair<Complex, int>> cluster_points(
    std::span<const Complex> pts, double radius);

/// Monic-in-z family f(z,w) = z^d + a_{d-1}(w) z^{d-1} + ... + a_0(w).
/// coeff_polys[i] is the w-polynomial multiplying z^i.
struct CoeffFamily {
  std::vector<ComplexPoly> coeff_polys;

  int z_degree() const { return static_cast<int>(coeff_polys.size()) - 1; }
  void validate() const;  // monic in z, z-degree >= 2

  ComplexPoly eval_fiber(Complex w) const;
  /// Exactly eval_fiber(w).eval(z): the invariant fiber w = 0 iterates
  /// bit-identically whether stepped in one or two variables.
  Complex eval(Complex z, Complex w) const;
  QComplex eval_q(QComplex z, QComplex w) const;

  CoeffFamily dz() const;  // partial in z; not monic
  CoeffFamily dw() const;  // partial in w

  /// Sampled sup of |coeff_polys[i]| on |w| = radius, inflated 5%.
  double sup_coeff_abs(int i, double w_radius) const;
};

/// F(z,w) = (f(z,w), lambda*w) with 0 < |lambda| < 1.
struct SkewProduct {
  CoeffFamily f;
  Complex lambda;

  void validate() const;
  std::pair<Complex, Complex> apply(std::pair<Complex, Complex> zw) const;
  std::pair<QComplex, QComplex> apply_q(std::pair<QComplex, QComplex> zw) const;
  std::pair<Complex, Complex> iterate(std::pair<Complex, Complex> zw,
                                      int n) const;
  ComplexPoly base() const { return f.eval_fiber(Complex{0.0}); }
};

/// Parses "z^2 - 2 + (1+0.5i)*w" style maps: sums of c*z^j*w^k terms with
/// complex literals a+bi (parenthesized when they carry a sign). '*' is
/// optional between factors. Throws ParseError carrying the offending
/// position. The result must be monic in z with z-degree >= 2.
CoeffFamily parse_map(const std::string& text);

/// "0.25", "1+0.5i", "-2i", "i", "(1-0.5i)" forms.
Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

}  // namespace skewfatou
