#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace superosc {

/// A complex number held as log-modulus and unit phase, so values far
/// outside the double range (e^{±10^5}) can still be added and compared.
struct LogComplex {
  double log_abs = -std::numeric_limits<double>::infinity();
  std::complex<double> unit{1.0, 0.0};

  static LogComplex from(std::complex<double> v) {
    const double a = std::abs(v);
    if (a == 0.0) return {};
    return {std::log(a), v / a};
  }

  bool is_zero() const { return log_abs == -std::numeric_limits<double>::infinity(); }

  /// Value times e^{-shift}; underflows to zero quietly.
  std::complex<double> scaled(double shift) const {
    if (is_zero()) return {0.0, 0.0};
    return unit * std::exp(log_abs - shift);
  }

  std::complex<double> value() const { return scaled(0.0); }
};

inline LogComplex operator*(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return {a.log_abs + b.log_abs, a.unit * b.unit};
}

inline LogComplex operator+(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double m = std::max(a.log_abs, b.log_abs);
  return LogComplex::from(a.scaled(m) + b.scaled(m)) * LogComplex{m, {1.0, 0.0}};
}

/// A non-negative real quantity stored as mantissa·e^{log_scale}.
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
  double log() const { return std::log(mantissa) + log_scale; }
  double log10() const { return log() / std::log(10.0); }
};

/// a + b for reals of very different magnitude; the small addend may vanish
/// below the big one's precision, which is the honest outcome.
inline Scaled add(const Scaled& a, double b) {
  return {a.mantissa + b * std::exp(-a.log_scale), a.log_scale};
}

}  // namespace superosc
