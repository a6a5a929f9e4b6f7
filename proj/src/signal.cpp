#include "superosc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "superosc/quadrature.hpp"
#include "superosc/special_functions.hpp"

namespace superosc {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// D √π / (√2 δ)
double closed_form_prefactor(const SuperoscParams& p) {
  return p.amplitude * std::sqrt(0.5 * kPi * p.inv_delta_sq);
}

}  // namespace

double phase_lock_target(int phase_int, PhaseBranch branch) {
  switch (branch) {
    case PhaseBranch::quarter:
      return 2.0 * kPi * phase_int + 0.25 * kPi;
    case PhaseBranch::three_quarter:
      return 2.0 * kPi * phase_int + 0.75 * kPi;
    case PhaseBranch::none:
      break;
  }
  throw DomainError("phase_lock_target: no phase branch selected");
}

SuperoscParams SuperoscParams::with_delta(double delta, double boost, double extent,
                                          double amplitude, double band_limit) {
  SuperoscParams p;
  p.amplitude = amplitude;
  p.inv_delta_sq = 1.0 / (delta * delta);
  p.boost = boost;
  p.band_limit = band_limit;
  p.extent = extent;
  p.validate();
  return p;
}

SuperoscParams SuperoscParams::phase_locked(int phase_int, PhaseBranch branch, double boost,
                                            double extent, double amplitude, double band_limit) {
  SuperoscParams p;
  p.amplitude = amplitude;
  p.inv_delta_sq = phase_lock_target(phase_int, branch);
  p.boost = boost;
  p.band_limit = band_limit;
  p.phase_int = phase_int;
  p.lock = branch;
  p.extent = extent;
  p.validate();
  return p;
}

double SuperoscParams::window_criterion() const {
  return extent * band_limit * std::cosh(boost) / inv_delta_sq;
}

double SuperoscParams::superosc_wavenumber() const {
  return 0.5 * band_limit * (1.0 + branch_sign * std::cosh(boost));
}

double SuperoscParams::growth_exponent() const { return std::sinh(boost) * inv_delta_sq; }

double SuperoscParams::peak_location() const {
  return 2.0 * std::cosh(boost) * inv_delta_sq / band_limit;
}

double SuperoscParams::peak_log_magnitude() const {
  return std::log(std::abs(amplitude) / (2.0 * std::sqrt(std::sinh(boost)))) + growth_exponent();
}

void SuperoscParams::validate() const {
  if (!(inv_delta_sq > 1.0) || !std::isfinite(inv_delta_sq))
    throw DomainError("SuperoscParams: delta must lie in (0, 1)");
  if (!(boost >= 0.0) || !std::isfinite(boost))
    throw DomainError("SuperoscParams: boost A must be >= 0");
  if (!(band_limit > 0.0)) throw DomainError("SuperoscParams: band limit k0 must be > 0");
  if (!(extent > 0.0)) throw DomainError("SuperoscParams: extent z_c must be > 0");
  if (branch_sign != 1 && branch_sign != -1)
    throw DomainError("SuperoscParams: branch sign must be +1 or -1");
  if (!std::isfinite(amplitude)) throw DomainError("SuperoscParams: amplitude must be finite");
  if (window_criterion() > window_tolerance)
    throw DomainError("SuperoscParams: delta^2 z_c k0 cosh(A) = " +
                      std::to_string(window_criterion()) + " exceeds " +
                      std::to_string(window_tolerance));
  if (lock != PhaseBranch::none) {
    if (phase_int <= 0) throw PhaseLockViolation("SuperoscParams: phase integer must be > 0");
    const double target = phase_lock_target(phase_int, lock);
    if (std::abs(inv_delta_sq - target) > 1e-12 * std::max(1.0, target))
      throw PhaseLockViolation("SuperoscParams: delta^-2 is not phase locked");
  }
}

double radicand(const SuperoscParams& p, double z) {
  const double u = z * p.band_limit / p.inv_delta_sq;  // δ² z k0
  return 1.0 - u * std::cosh(p.boost) + 0.25 * u * u;
}

IntegralValue synth_integral(const SuperoscParams& p, double z, double relative_target) {
  p.validate();
  if (p.growth_exponent() > 600.0)
    throw OverflowRegime("synth_integral: sinh(A)/delta^2 > 600 is outside double range");
  if (p.amplitude == 0.0) return {{0.0, 0.0}, 0.0};

  // The integrand is entire and 2π-periodic in α, so the path α = β + iσ
  // gives the same integral.  Along it |integrand| = exp(c(σ) sin β); σ is
  // picked to zero c where possible (minimize it in the growth region).
  const double a = p.boost;
  const double s = p.inv_delta_sq;
  const double half_zk = 0.5 * z * p.band_limit;
  const double q = half_zk / s;  // z k0 δ² / 2
  const double ea = std::exp(a);
  const double clamp = a + 4.0;
  double sigma;
  const double num = ea - q;
  const double den = 1.0 / ea - q;
  if (num == 0.0) {
    sigma = -clamp;
  } else if (den == 0.0) {
    sigma = clamp;
  } else {
    sigma = std::clamp(0.5 * std::log(std::abs(num / den)), -clamp, clamp);
  }
  const double c = std::sinh(a - sigma) * s + half_zk * std::sinh(sigma);
  const double shift = std::abs(c);

  auto integrand = [&](double beta) {
    const std::complex<double> alpha{beta, sigma};
    const std::complex<double> exponent = kI * half_zk * (1.0 + std::cos(alpha)) -
                                          kI * s * std::cos(alpha - kI * a) - shift;
    return std::exp(exponent);
  };
  // Scaled integrand has modulus <= 1, so 2π bounds the scaled integral.
  const double scale_bound = 2.0 * kPi;
  const auto est = quadrature::integrate<std::complex<double>>(
      integrand, 0.0, 2.0 * kPi, 1e-3 * relative_target * scale_bound, 20000, 16);
  if (est.error > relative_target * scale_bound)
    throw QuadratureNoConvergence("synth_integral: error estimate above target", est.error);

  const double prefactor =
      p.amplitude * std::sqrt(s) / (2.0 * std::sqrt(2.0 * kPi)) * std::exp(shift);
  return {prefactor * est.value, prefactor * est.error};
}

LogComplex synth_bessel_log(const SuperoscParams& p, double z) {
  p.validate();
  if (p.amplitude == 0.0) return {};
  const double r = radicand(p, z);
  const LogComplex carrier{0.0, std::polar(1.0, 0.5 * z * p.band_limit)};
  const double pref = closed_form_prefactor(p);
  LogComplex bessel;
  if (r >= 0.0) {
    bessel = LogComplex::from(pref * special::bessel_j0(std::sqrt(r) * p.inv_delta_sq));
  } else {
    bessel = {std::log(std::abs(pref)) +
                  special::log_bessel_i0(std::sqrt(-r) * p.inv_delta_sq),
              {pref < 0 ? -1.0 : 1.0, 0.0}};
  }
  return bessel * carrier;
}

std::complex<double> synth_bessel(const SuperoscParams& p, double z) {
  const double r = radicand(p, z);
  if (r < 0.0 && std::sqrt(-r) * p.inv_delta_sq > 700.0)
    throw OverflowRegime("synth_bessel: I0 argument beyond double range; use synth_bessel_log");
  return synth_bessel_log(p, z).value();
}

std::complex<double> synth_asymptotic(const SuperoscParams& p, double z) {
  p.validate();
  if (!(z < 0.0)) throw DomainError("synth_asymptotic: requires z < 0");
  if (p.delta() > 0.2) throw DomainError("synth_asymptotic: requires delta <= 0.2");
  const double r = radicand(p, z);
  const double x = std::sqrt(r) * p.inv_delta_sq;
  return p.amplitude * std::pow(r, -0.25) * std::polar(1.0, 0.5 * z * p.band_limit) *
         std::cos(x - 0.25 * kPi);
}

std::complex<double> synth_reduced(const SuperoscParams& p, double z) {
  const double phase = p.inv_delta_sq - 0.5 * z * p.band_limit * std::cosh(p.boost) - 0.25 * kPi;
  return p.amplitude * std::polar(1.0, 0.5 * z * p.band_limit) * std::cos(phase);
}

PairSynthesizer::PairSynthesizer(SuperoscParams quarter, SuperoscParams three_quarter, int branch)
    : quarter_(quarter), three_quarter_(three_quarter), branch_(branch) {
  if (branch != 1 && branch != -1) throw DomainError("combine_pair: branch must be +1 or -1");
  if (quarter_.lock != PhaseBranch::quarter || three_quarter_.lock != PhaseBranch::three_quarter)
    throw PhaseLockViolation("combine_pair: need a quarter and a three-quarter locked copy");
  if (quarter_.phase_int != three_quarter_.phase_int)
    throw PhaseLockViolation("combine_pair: copies use different phase integers");
  if (std::abs(quarter_.amplitude) != std::abs(three_quarter_.amplitude) ||
      quarter_.boost != three_quarter_.boost || quarter_.band_limit != three_quarter_.band_limit)
    throw PhaseLockViolation("combine_pair: copies must share |D|, A and k0");
  quarter_.branch_sign = branch;
  three_quarter_.branch_sign = branch;
  quarter_.validate();
  three_quarter_.validate();
}

double PairSynthesizer::wavenumber() const { return quarter_.superosc_wavenumber(); }

LogComplex PairSynthesizer::log_value(double z) const {
  const LogComplex rotate{0.0, {0.0, static_cast<double>(branch_)}};
  return synth_bessel_log(quarter_, z) + rotate * synth_bessel_log(three_quarter_, z);
}

LogComplex PairSynthesizer::log_imag(double z) const {
  const LogComplex v = log_value(z);
  return LogComplex::from(v.unit.imag()) * LogComplex{v.log_abs, {1.0, 0.0}};
}

std::complex<double> PairSynthesizer::operator()(double z) const { return log_value(z).value(); }

PairSynthesizer combine_pair(const SuperoscParams& p1, const SuperoscParams& p2, int branch) {
  return PairSynthesizer(p1, p2, branch);
}

PairSynthesizer phase_locked_pair(int phase_int, double boost, double extent, int branch,
                                  double amplitude, double band_limit) {
  return PairSynthesizer(
      SuperoscParams::phase_locked(phase_int, PhaseBranch::quarter, boost, extent, amplitude,
                                   band_limit),
      SuperoscParams::phase_locked(phase_int, PhaseBranch::three_quarter, boost, extent,
                                   amplitude, band_limit),
      branch);
}

UniformGrid UniformGrid::from_range(double z_min, double z_max, Eigen::Index n) {
  if (n < 2 || !(z_max > z_min)) throw DomainError("UniformGrid: need n >= 2 and z_max > z_min");
  return {z_min, (z_max - z_min) / static_cast<double>(n - 1), n};
}

UniformGrid UniformGrid::box(double z_min, double length, double k_max) {
  if (!(length > 0.0) || !(k_max > 0.0)) throw DomainError("UniformGrid::box: bad length/k_max");
  const double needed = length * 4.0 * k_max / kPi;
  Eigen::Index n = 2;
  while (static_cast<double>(n) < needed) n *= 2;
  return {z_min, length / static_cast<double>(n), n};
}

std::string to_string(SynthesisRoute route) {
  switch (route) {
    case SynthesisRoute::integral: return "integral";
    case SynthesisRoute::bessel: return "bessel";
    case SynthesisRoute::asymptotic: return "asymptotic";
    case SynthesisRoute::combined: return "combined";
    case SynthesisRoute::windowed: return "windowed";
  }
  return "unknown";
}

std::complex<double> SampledSignal::physical(Eigen::Index i) const { return at(i).value(); }

LogComplex SampledSignal::at(Eigen::Index i) const {
  if (!logs.empty()) return logs[static_cast<std::size_t>(i)];
  return LogComplex::from(values[i]) * LogComplex{log_scale, {1.0, 0.0}};
}

void SampledSignal::check_invariants() const {
  if (grid.n < 2 || values.size() != grid.n) throw DomainError("SampledSignal: bad sample count");
  if (max_wavenumber > 0.0 && grid.dz > kPi / (4.0 * max_wavenumber) * (1.0 + 1e-12))
    throw DomainError("SampledSignal: fewer than 8 samples per fastest oscillation");
  if (!values.allFinite()) throw DomainError("SampledSignal: non-finite sample");
}

SampledSignal sample(const LogSynth& f, const UniformGrid& grid, SynthesisRoute route,
                     bool real_valued, double max_wavenumber, const WindowSpec& window) {
  std::vector<LogComplex> logs(static_cast<std::size_t>(grid.n));
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const double z = grid.z(i);
    LogComplex v = f(z);
    if (!window.is_identity()) v.log_abs += window.log_h(z);
    if (std::isnan(v.log_abs) || v.log_abs == std::numeric_limits<double>::infinity())
      throw DomainError("sample: non-finite value at z = " + std::to_string(z));
    top = std::max(top, v.log_abs);
    logs[static_cast<std::size_t>(i)] = v;
  }
  if (!std::isfinite(top)) top = 0.0;  // identically zero signal
  SampledSignal s;
  s.grid = grid;
  s.values.resize(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    LogComplex& l = logs[static_cast<std::size_t>(i)];
    if (real_valued) l = LogComplex::from(l.unit.real()) * LogComplex{l.log_abs, {1.0, 0.0}};
    s.values[i] = l.scaled(top);
  }
  s.logs = std::move(logs);
  s.log_scale = top;
  s.route = window.is_identity() ? route : SynthesisRoute::windowed;
  s.real_valued = real_valued;
  s.max_wavenumber = max_wavenumber;
  s.check_invariants();
  return s;
}

SampledSignal sample_pair(const PairSynthesizer& pair, const UniformGrid& grid,
                          const WindowSpec& window) {
  const double k_max = std::max(std::abs(pair.wavenumber()), pair.quarter().band_limit);
  return sample([&](double z) { return pair.log_value(z); }, grid, SynthesisRoute::combined,
                false, k_max, window);
}

SampledSignal make_real_superosc(const PairSynthesizer& pair, double target_wavenumber,
                                 const UniformGrid& grid, const WindowSpec& window) {
  if (pair.branch() != 1)
    throw DomainError("make_real_superosc: branch -1 does not oscillate at k0(1+cosh A)/2");
  const double k = pair.wavenumber();
  if (std::abs(target_wavenumber - k) > 1e-9 * k)
    throw DomainError("make_real_superosc: target wavenumber inconsistent with A");
  return sample([&](double z) { return pair.log_imag(z); }, grid, SynthesisRoute::combined, true,
                k, window);
}

SampledSignal apply_window(const SampledSignal& s, const WindowSpec& w) {
  if (w.is_identity()) return s;
  const UniformGrid& g = s.grid;
  return sample(
      [&](double z) {
        const auto i = static_cast<Eigen::Index>(std::llround((z - g.z_min) / g.dz));
        return s.at(i);
      },
      g, s.route, s.real_valued, s.max_wavenumber, w);
}

Support find_support(const LogSynth& f, const WindowSpec& window, double lo, double hi,
                     double log_drop, Eigen::Index coarse) {
  const double step = (hi - lo) / static_cast<double>(coarse - 1);
  std::vector<double> logs(static_cast<std::size_t>(coarse));
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < coarse; ++i) {
    const double z = lo + static_cast<double>(i) * step;
    const double v = f(z).log_abs + window.log_h(z);
    logs[static_cast<std::size_t>(i)] = v;
    top = std::max(top, v);
  }
  Eigen::Index first = coarse - 1;
  Eigen::Index last = 0;
  for (Eigen::Index i = 0; i < coarse; ++i) {
    if (logs[static_cast<std::size_t>(i)] >= top - log_drop) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  first = std::max<Eigen::Index>(first - 2, 0);
  last = std::min<Eigen::Index>(last + 2, coarse - 1);
  return {lo + static_cast<double>(first) * step, lo + static_cast<double>(last) * step, top};
}

UniformGrid pair_box(const PairSynthesizer& pair, const WindowSpec& window, bool real_part,
                     double min_length, bool include_window, double log_drop) {
  if (window.is_identity())
    throw DomainError("pair_box: the unwindowed signal is not normalizable");
  const SuperoscParams& p = pair.three_quarter();
  const double kappa = window.half_width;
  const double upper_root = 2.0 * std::exp(p.boost) * p.inv_delta_sq / p.band_limit;
  const double reach = std::sqrt(2.0 * (60.0 + 40.0 + std::log(std::sqrt(p.inv_delta_sq)))) / kappa;
  const double lo = -(p.extent + reach);
  const double hi = 1.2 * upper_root + reach;
  const LogSynth f = real_part ? LogSynth([&](double z) { return pair.log_imag(z); })
                               : LogSynth([&](double z) { return pair.log_value(z); });
  const Support sup = find_support(f, window, lo, hi, log_drop);
  const double k_max = std::max(std::abs(pair.wavenumber()), p.band_limit);
  const double margin = std::max(p.extent, 16.0 * kPi / k_max);
  double a = include_window ? std::min(sup.lo, -p.extent - margin) : sup.lo;
  double b = include_window ? std::max(sup.hi, 0.0) : sup.hi;
  if (b - a < min_length) {
    a -= 0.5 * (min_length - (b - a));
    b = a + min_length;
  }
  return UniformGrid::box(a, b - a, k_max);
}

double instantaneous_frequency(const SampledSignal& s, double z) {
  const UniformGrid& g = s.grid;
  const auto j = static_cast<Eigen::Index>(std::llround((z - g.z_min) / g.dz));
  if (j < 1 || j > g.n - 2) throw EdgeError("instantaneous_frequency: z too close to grid edge");
  // Vanishing is judged against the signal's local scale, not the global
  // maximum, which may sit hundreds of e-folds away in the growth hump.
  constexpr Eigen::Index kNeighbourhood = 64;
  const double log_floor = std::log(1e-12);
  auto local_max = [&](Eigen::Index lo, Eigen::Index hi) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = std::max<Eigen::Index>(lo, 0); i <= std::min(hi, g.n - 1); ++i)
      m = std::max(m, s.at(i).log_abs);
    return m;
  };
  const double reference = local_max(j - kNeighbourhood, j + kNeighbourhood);
  if (!std::isfinite(reference)) throw NodeError("instantaneous_frequency: signal is zero near z");

  if (!s.real_valued) {
    if (s.at(j).log_abs - reference <= log_floor)
      throw NodeError("instantaneous_frequency: signal vanishes at z");
    auto step_phase = [&](Eigen::Index i) {
      const LogComplex a = s.at(i);
      const LogComplex b = s.at(i + 1);
      return std::arg(b.unit * std::conj(a.unit));
    };
    return (step_phase(j) + step_phase(j - 1)) / (2.0 * g.dz);
  }

  // Crossing positions by linear interpolation; exact zeros count once.
  auto crossing = [&](Eigen::Index i) -> std::optional<double> {
    const LogComplex la = s.at(i);
    const LogComplex lb = s.at(i + 1);
    const double shift = std::max(la.log_abs, lb.log_abs);
    const double a = la.scaled(shift).real();
    const double b = lb.scaled(shift).real();
    if (a == 0.0) return g.z(i);
    if ((a < 0.0) != (b < 0.0) && b != 0.0) return g.z(i) + g.dz * a / (a - b);
    return std::nullopt;
  };
  constexpr int kIntervals = 6;
  std::vector<double> left, right;
  for (Eigen::Index i = j - 1; i >= 0 && static_cast<int>(left.size()) <= kIntervals; --i)
    if (auto c = crossing(i); c && *c < z) left.push_back(*c);
  for (Eigen::Index i = j - 1; i < g.n - 1 && static_cast<int>(right.size()) <= kIntervals; ++i)
    if (auto c = crossing(i); c && *c >= z) right.push_back(*c);
  std::vector<double> all(left.rbegin(), left.rend());
  all.insert(all.end(), right.begin(), right.end());
  if (static_cast<int>(all.size()) < kIntervals + 1)
    throw EdgeError("instantaneous_frequency: not enough zero crossings around z");
  std::size_t best = 0;
  double best_reach = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start + kIntervals < all.size(); ++start) {
    const double reach =
        std::max(std::abs(all[start] - z), std::abs(all[start + kIntervals] - z));
    if (reach < best_reach) {
      best_reach = reach;
      best = start;
    }
  }
  const double first = all[best];
  const double last = all[best + kIntervals];
  const auto i0 = static_cast<Eigen::Index>(std::floor((first - g.z_min) / g.dz));
  const auto i1 = static_cast<Eigen::Index>(std::ceil((last - g.z_min) / g.dz));
  if (local_max(i0, i1) - reference <= log_floor)
    throw NodeError("instantaneous_frequency: signal vanishes near z");
  return kPi * kIntervals / (last - first);
}

double mean_frequency(const SampledSignal& s, double z_lo, double z_hi) {
  const UniformGrid& g = s.grid;
  const auto i0 = static_cast<Eigen::Index>(std::ceil((z_lo - g.z_min) / g.dz - 1e-9));
  const auto i1 = static_cast<Eigen::Index>(std::floor((z_hi - g.z_min) / g.dz + 1e-9));
  if (!(z_hi > z_lo) || i0 < 0 || i1 > g.n - 1 || i1 - i0 < 2)
    throw EdgeError("mean_frequency: interval not inside the grid");
  if (!s.real_valued) {
    double phase = 0.0;
    for (Eigen::Index i = i0; i < i1; ++i) {
      const LogComplex a = s.at(i);
      const LogComplex b = s.at(i + 1);
      if (a.is_zero() || b.is_zero()) throw NodeError("mean_frequency: signal vanishes in the interval");
      phase += std::arg(b.unit * std::conj(a.unit));
    }
    return phase / (g.z(i1) - g.z(i0));
  }
  std::vector<double> crossings;
  for (Eigen::Index i = i0; i < i1; ++i) {
    const LogComplex la = s.at(i);
    const LogComplex lb = s.at(i + 1);
    const double shift = std::max(la.log_abs, lb.log_abs);
    const double a = la.scaled(shift).real();
    const double b = lb.scaled(shift).real();
    if (a == 0.0) crossings.push_back(g.z(i));
    else if ((a < 0.0) != (b < 0.0) && b != 0.0) crossings.push_back(g.z(i) + g.dz * a / (a - b));
  }
  if (crossings.size() < 3) throw EdgeError("mean_frequency: fewer than 3 zero crossings");
  return kPi * static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

GrowthPeak locate_growth_peak(const SuperoscParams& p) {
  p.validate();
  const double hi = 2.0 * p.peak_location();
  auto log_abs = [&](double z) { return synth_bessel_log(p, z).log_abs; };
  constexpr int kScan = 4000;
  double best_z = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < kScan; ++i) {
    const double z = hi * i / kScan;
    if (const double v = log_abs(z); v > best) {
      best = v;
      best_z = z;
    }
  }
  // Golden-section refinement; |F| has no oscillation inside the growth region.
  double a = best_z - hi / kScan;
  double b = best_z + hi / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (log_abs(c) > log_abs(d)) b = d; else a = c;
  }
  const double z = 0.5 * (a + b);
  return {z, log_abs(z)};
}

Scaled SpectralDensity::energy() const {
  return {values.squaredNorm() * dk / (2.0 * kPi), 2.0 * log_scale};
}

double SpectralDensity::fraction_outside(double lo, double hi) const {
  double outside = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double e = std::norm(values[i]);
    total += e;
    const double kk = k(i);
    if (kk < lo || kk > hi) outside += e;
  }
  return total == 0.0 ? 0.0 : outside / total;
}

SpectralDensity spectrum(const SampledSignal& s, double band_limit, double boundary_tolerance) {
  s.check_invariants();
  const Eigen::Index n = s.grid.n;
  if (s.route == SynthesisRoute::windowed) {
    const double edge = std::max(std::abs(s.values[0]), std::abs(s.values[n - 1]));
    if (edge > boundary_tolerance * s.max_abs())
      throw TruncationError("spectrum: boundary samples are " + std::to_string(edge / s.max_abs()) +
                            " of the maximum; enlarge the grid");
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd in = s.values;
  Eigen::VectorXcd out(n);
  fft.fwd(out, in);

  SpectralDensity d;
  d.dk = 2.0 * kPi / s.grid.period();
  const Eigen::Index half = n / 2;
  d.k_min = -static_cast<double>(half) * d.dk;
  d.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index bin = (i - half + n) % n;
    const double kk = d.k(i);
    d.values[i] = s.grid.dz * std::polar(1.0, -kk * s.grid.z_min) * out[bin];
  }
  d.log_scale = s.log_scale;
  d.band_lo = 0.0;
  d.band_hi = band_limit;
  return d;
}

}  // namespace superosc
