#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

namespace superosc::quadrature {

template <typename Value>
struct Estimate {
  Value value{};
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kronrod_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478196, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 5> gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <typename Value, typename F>
Estimate<Value> gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Value kronrod = kronrod_weights[10] * f(center);
  Value gauss{};
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kronrod_nodes[i];
    const Value pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half), 1};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G10/K21) on [a, b].  Bisects the interval
/// with the largest error estimate until the summed estimate is below
/// `abs_tol` or `max_intervals` is reached; the caller decides what to do
/// with an unconverged estimate.
template <typename Value, typename F>
Estimate<Value> integrate(F&& f, double a, double b, double abs_tol, int max_intervals = 2000,
                          int initial_pieces = 8) {
  struct Piece {
    double a, b;
    Estimate<Value> est;
    bool operator<(const Piece& o) const { return est.error < o.est.error; }
  };
  std::priority_queue<Piece> heap;
  Value total{};
  double error = 0.0;
  const double width = (b - a) / initial_pieces;
  for (int i = 0; i < initial_pieces; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == initial_pieces) ? b : lo + width;
    auto est = detail::gk21<Value>(f, lo, hi);
    total += est.value;
    error += est.error;
    heap.push({lo, hi, est});
  }
  int count = initial_pieces;
  while (error > abs_tol && count < max_intervals) {
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk21<Value>(f, worst.a, mid);
    auto right = detail::gk21<Value>(f, mid, worst.b);
    total += left.value + right.value - worst.est.value;
    error += left.error + right.error - worst.est.error;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
    ++count;
  }
  // Re-sum to shed the drift of the running updates.
  Value sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().est.value;
    err += heap.top().est.error;
    heap.pop();
  }
  return {sum, err, count};
}

/// Composite Simpson on a uniform grid of `values` (odd count, spacing h).
template <typename Derived>
auto simpson(const Derived& values, double h) {
  using Value = std::decay_t<decltype(values[0])>;
  const auto n = static_cast<long>(values.size());
  Value s = values[0] + values[n - 1];
  for (long i = 1; i < n - 1; ++i) s += (i % 2 ? 4.0 : 2.0) * values[i];
  return s * (h / 3.0);
}

}  // namespace superosc::quadrature
