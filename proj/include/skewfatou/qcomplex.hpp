#pragma once

#include <complex>
#include <quadmath.h>

namespace skewfatou {

// Minimal complex arithmetic over __float128.
//
// Orbit segments that pass near a saddle amplify roundoff by |mu|^n, so a
// stage-25 linearization orbit loses ~15 digits on the way out. The 113-bit
// mantissa keeps the Cauchy gaps of Phi_n above the noise floor through the
// stages the diagnostics look at; plain doubles drown them near n = 12.
struct QComplex {
  __float128 re = 0;
  __float128 im = 0;

  QComplex() = default;
  QComplex(__float128 r, __float128 i) : re(r), im(i) {}
  QComplex(double r) : re(r), im(0) {}  // NOLINT: implicit widening intended
  QComplex(const std::complex<double>& z) : re(z.real()), im(z.imag()) {}

  std::complex<double> to_double() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

inline QComplex operator+(QComplex a, QComplex b) { return {a.re + b.re, a.im + b.im}; }
inline QComplex operator-(QComplex a, QComplex b) { return {a.re - b.re, a.im - b.im}; }
inline QComplex operator-(QComplex a) { return {-a.re, -a.im}; }
inline QComplex operator*(QComplex a, QComplex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline QComplex operator/(QComplex a, QComplex b) {
  __float128 d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline QComplex& operator+=(QComplex& a, QComplex b) { a = a + b; return a; }
inline QComplex& operator*=(QComplex& a, QComplex b) { a = a * b; return a; }

inline __float128 qabs(QComplex a) { return sqrtq(a.re * a.re + a.im * a.im); }
inline double qabs_d(QComplex a) { return static_cast<double>(qabs(a)); }

inline QComplex qpow_int(QComplex base, int e) {
  QComplex r{1.0};
  QComplex b = base;
  int n = e;
  while (n > 0) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

}  // namespace skewfatou
