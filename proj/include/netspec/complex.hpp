#pragma once

#include <cmath>
#include <vector>

namespace netspec {

/// Complex number as an explicit (re, im) pair.
struct Complex {
  double re = 0.0;
  double im = 0.0;

  constexpr Complex() = default;
  constexpr Complex(double r, double i = 0.0) : re(r), im(i) {}

  constexpr Complex conj() const { return {re, -im}; }
  double abs() const { return std::hypot(re, im); }
  constexpr double norm() const { return re * re + im * im; }
  bool finite() const { return std::isfinite(re) && std::isfinite(im); }

  constexpr Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  constexpr Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  constexpr Complex& operator*=(const Complex& o) {
    const double r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Complex& operator/=(const Complex& o);

  friend constexpr Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend constexpr Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend constexpr Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend constexpr Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend constexpr bool operator==(const Complex&, const Complex&) = default;
};

// Smith's algorithm; avoids overflow in |b|^2.
inline Complex& Complex::operator/=(const Complex& o) {
  if (std::abs(o.re) >= std::abs(o.im)) {
    const double r = o.im / o.re;
    const double d = o.re + o.im * r;
    const double nr = (re + im * r) / d;
    im = (im - re * r) / d;
    re = nr;
  } else {
    const double r = o.re / o.im;
    const double d = o.re * r + o.im;
    const double nr = (re * r + im) / d;
    im = (im * r - re) / d;
    re = nr;
  }
  return *this;
}

inline double distance(const Complex& a, const Complex& b) { return (a - b).abs(); }

using ComplexVector = std::vector<Complex>;

}  // namespace netspec
