#pragma once

#include <cmath>
#include <limits>
#include <numbers>

// Bessel functions of order zero, templated on the real type.
//
// J0 is split three ways: power series for small arguments (no
// cancellation below 2), Miller's backward recurrence normalized by
// J0 + 2*sum(J_2k) = 1 in the middle band, and the Hankel expansion once its
// smallest term (~e^{-2x}) is below working precision.  I0 is only needed in
// the exponential-growth region and is returned as a logarithm.

namespace superosc::special {

template <typename Real>
struct LogReal {
  Real log_abs;
  int sign;
};

namespace detail {

template <typename Real>
Real j0_series(Real x) {
  const Real q = -x * x / Real(4);
  Real term = 1;
  Real sum = 1;
  for (int k = 1; k < 200; ++k) {
    term *= q / Real(k * k);
    sum += term;
    if (std::abs(term) < std::numeric_limits<Real>::epsilon() * std::abs(sum)) break;
  }
  return sum;
}

template <typename Real>
Real j0_miller(Real x) {
  const int start = 2 * (static_cast<int>(x + 40) / 2);
  Real above = 0;
  Real current = 1;
  Real norm = 0;
  Real j0 = 0;
  for (int n = start; n >= 1; --n) {
    const Real below = Real(2 * n) / x * current - above;
    above = current;
    current = below;  // J_{n-1}
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2 * current;
    if (std::abs(current) > Real(1e200)) {
      above *= Real(1e-200);
      current *= Real(1e-200);
      norm *= Real(1e-200);
    }
  }
  j0 = current;
  norm += j0;
  return j0 / norm;
}

template <typename Real>
void hankel_pq(Real x, Real& p, Real& q) {
  // Magnitudes t_k = prod_j (2j-1)^2 / (j 8x); for order zero
  // P = sum_even (-1)^{k/2} t_k and Q = sum_odd (-1)^{(k+1)/2} t_k.
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real term = 1;
  p = 1;
  q = 0;
  for (int k = 1; k < 200; ++k) {
    const Real odd = Real(2 * k - 1);
    const Real next = term * odd * odd / (Real(k) * Real(8) * x);
    if (next > term) break;  // asymptotic series started to diverge
    term = next;
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0) ? term : -term;
    } else {
      q += (((k + 1) / 2) % 2 == 0) ? term : -term;
    }
    if (term < eps) break;
  }
}

}  // namespace detail

/// Bessel function of the first kind, order zero.
template <typename Real>
Real bessel_j0(Real x) {
  x = std::abs(x);
  if (x <= Real(2)) return detail::j0_series(x);
  if (x < Real(25)) return detail::j0_miller(x);
  Real p, q;
  detail::hankel_pq(x, p, q);
  const Real c = std::cos(x);
  const Real s = std::sin(x);
  const Real root_half = std::numbers::sqrt2_v<Real> / 2;
  const Real cos_chi = (c + s) * root_half;  // cos(x - π/4)
  const Real sin_chi = (s - c) * root_half;  // sin(x - π/4)
  return std::sqrt(Real(2) / (std::numbers::pi_v<Real> * x)) * (p * cos_chi - q * sin_chi);
}

/// log I0(x); I0 is positive, so only the magnitude is returned.
template <typename Real>
Real log_bessel_i0(Real x) {
  x = std::abs(x);
  const Real eps = std::numeric_limits<Real>::epsilon();
  if (x <= Real(30)) {
    const Real q = x * x / Real(4);
    Real term = 1;
    Real sum = 1;
    for (int k = 1; k < 500; ++k) {
      term *= q / Real(k * k);
      sum += term;
      if (term < eps * sum) break;
    }
    return std::log(sum);
  }
  Real term = 1;
  Real sum = 1;
  Real previous = std::numeric_limits<Real>::infinity();
  for (int k = 1; k < 200; ++k) {
    const Real odd = Real(2 * k - 1);
    term *= odd * odd / (Real(k) * Real(8) * x);
    if (term > previous) break;
    previous = term;
    sum += term;
    if (term < eps * sum) break;
  }
  return x - Real(0.5) * std::log(Real(2) * std::numbers::pi_v<Real> * x) + std::log(sum);
}

template <typename Real>
LogReal<Real> log_bessel_j0(Real x) {
  const Real v = bessel_j0(x);
  return {std::log(std::abs(v)), v < 0 ? -1 : 1};
}

}  // namespace superosc::special
