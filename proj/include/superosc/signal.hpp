#pragma once

// Superoscillatory band-limited waveforms: the three synthesis routes of the
// single-copy function, the phase-locked two-copy combination, windowing,
// sampling, spectra and local-frequency measurement.
//
// Working units: hbar = c = 1, lengths in units of 1/k0 unless k0 is set.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "superosc/errors.hpp"
#include "superosc/scaled.hpp"

namespace superosc {

inline constexpr double kPi = std::numbers::pi;

enum class PhaseBranch { none, quarter, three_quarter };

/// Knobs of the analytic family F(z; D, δ, A, k0).  δ is stored through
/// δ⁻² because the phase lock is a condition on δ⁻².
struct SuperoscParams {
  double amplitude = 1.0;     // D
  double inv_delta_sq = 4.0;  // δ⁻²
  double boost = 0.0;         // A
  double band_limit = 1.0;    // k0
  int phase_int = 0;          // m of δ⁻² = 2πm + π/4 (or 3π/4)
  PhaseBranch lock = PhaseBranch::none;
  int branch_sign = +1;
  double extent = 0.1;  // z_c
  double window_tolerance = 0.1;

  static SuperoscParams with_delta(double delta, double boost, double extent,
                                   double amplitude = 1.0, double band_limit = 1.0);
  static SuperoscParams phase_locked(int phase_int, PhaseBranch branch, double boost,
                                     double extent, double amplitude = 1.0,
                                     double band_limit = 1.0);

  double delta() const { return 1.0 / std::sqrt(inv_delta_sq); }
  /// δ² z_c k0 cosh A; must stay below window_tolerance.
  double window_criterion() const;
  /// ½ k0 (1 ± cosh A), the in-window wavenumber of the combined pair.
  double superosc_wavenumber() const;
  /// sinh A / δ², the log of the growth-peak scale.
  double growth_exponent() const;
  double peak_location() const;
  /// log of D / (2√sinh A) · e^{sinh A / δ²}.
  double peak_log_magnitude() const;
  /// Throws DomainError / PhaseLockViolation on an inadmissible set.
  void validate() const;
};

double phase_lock_target(int phase_int, PhaseBranch branch);

/// 1 − δ² z k0 cosh A + ¼ δ⁴ z² k0²
double radicand(const SuperoscParams& p, double z);

struct IntegralValue {
  std::complex<double> value;
  double error = 0.0;
};

/// Direct quadrature of the defining α-integral.
IntegralValue synth_integral(const SuperoscParams& p, double z, double relative_target = 1e-10);

/// Closed form D√π/(√2 δ) e^{izk0/2} J0(√R / δ²) (I0 when R < 0).
std::complex<double> synth_bessel(const SuperoscParams& p, double z);
LogComplex synth_bessel_log(const SuperoscParams& p, double z);

/// Large-argument form D R^{-1/4} e^{izk0/2} cos(√R/δ² − π/4); z < 0, δ ≤ 0.2.
std::complex<double> synth_asymptotic(const SuperoscParams& p, double z);

/// Window-interior reduction D e^{izk0/2} cos(1/δ² − ½ z k0 cosh A − π/4).
std::complex<double> synth_reduced(const SuperoscParams& p, double z);

/// F1(z) + i·branch·F2(z) for a phase-locked quarter / three-quarter pair.
class PairSynthesizer {
 public:
  PairSynthesizer(SuperoscParams quarter, SuperoscParams three_quarter, int branch);

  std::complex<double> operator()(double z) const;
  LogComplex log_value(double z) const;
  /// Im of the pair; equals D sin(k′ z) in the window for branch +1.
  LogComplex log_imag(double z) const;

  int branch() const { return branch_; }
  const SuperoscParams& quarter() const { return quarter_; }
  const SuperoscParams& three_quarter() const { return three_quarter_; }
  double wavenumber() const;
  double extent() const { return quarter_.extent; }

 private:
  SuperoscParams quarter_;
  SuperoscParams three_quarter_;
  int branch_;
};

PairSynthesizer combine_pair(const SuperoscParams& p1, const SuperoscParams& p2, int branch);
PairSynthesizer phase_locked_pair(int phase_int, double boost, double extent, int branch = +1,
                                  double amplitude = 1.0, double band_limit = 1.0);

/// Gaussian spatial window h(z) = exp(−κ² z² / 2); κ = 0 is h ≡ 1.
struct WindowSpec {
  double half_width = 0.0;  // κ

  static WindowSpec none() { return {}; }
  static WindowSpec gaussian(double kappa) { return {kappa}; }
  bool is_identity() const { return half_width == 0.0; }
  double log_h(double z) const { return -0.5 * half_width * half_width * z * z; }
  double operator()(double z) const { return std::exp(log_h(z)); }
};

struct UniformGrid {
  double z_min = 0.0;
  double dz = 1.0;
  Eigen::Index n = 2;

  static UniformGrid from_range(double z_min, double z_max, Eigen::Index n);
  /// Power-of-two grid of period `length` starting at z_min, fine enough for k_max.
  static UniformGrid box(double z_min, double length, double k_max);
  double z(Eigen::Index i) const { return z_min + static_cast<double>(i) * dz; }
  double z_max() const { return z(n - 1); }
  double period() const { return static_cast<double>(n) * dz; }
};

enum class SynthesisRoute { integral, bessel, asymptotic, combined, windowed };
std::string to_string(SynthesisRoute route);

/// Samples of a (possibly complex) signal.  Physical value at i is
/// values[i] · e^{log_scale}.  When the samples span more than the double
/// range, `logs` keeps every sample exactly and `values` holds the ones
/// within range of the largest.
struct SampledSignal {
  UniformGrid grid;
  Eigen::VectorXcd values;
  double log_scale = 0.0;
  std::vector<LogComplex> logs;
  SynthesisRoute route = SynthesisRoute::bessel;
  bool real_valued = false;
  double max_wavenumber = 0.0;  // fastest expected local oscillation

  std::complex<double> physical(Eigen::Index i) const;
  LogComplex at(Eigen::Index i) const;
  double max_abs() const { return values.cwiseAbs().maxCoeff(); }
  /// Throws DomainError on n < 2, under-resolution, or non-finite samples.
  void check_invariants() const;
};

using LogSynth = std::function<LogComplex(double)>;

/// Evaluates f·h in log space and rescales so the largest stored |value| is 1.
SampledSignal sample(const LogSynth& f, const UniformGrid& grid, SynthesisRoute route,
                     bool real_valued, double max_wavenumber,
                     const WindowSpec& window = WindowSpec::none());

SampledSignal sample_pair(const PairSynthesizer& pair, const UniformGrid& grid,
                          const WindowSpec& window = WindowSpec::none());

/// Real field Im(F1 + iF2) sampled on `grid`; the target wavenumber must be
/// the pair's ½k0(1 + cosh A).
SampledSignal make_real_superosc(const PairSynthesizer& pair, double target_wavenumber,
                                 const UniformGrid& grid,
                                 const WindowSpec& window = WindowSpec::none());

SampledSignal apply_window(const SampledSignal& s, const WindowSpec& w);

/// Smallest span around the windowed signal where log|f h| stays within
/// `log_drop` of its maximum.  Scans a coarse grid over [lo, hi].
struct Support {
  double lo;
  double hi;
  double log_max;
};
Support find_support(const LogSynth& f, const WindowSpec& window, double lo, double hi,
                     double log_drop = 40.0, Eigen::Index coarse = 40000);

/// Power-of-two box grid that holds the windowed pair (or its real part),
/// growth hump included.  The period is exactly min_length when the support
/// fits; without include_window only the dominant support is kept.
UniformGrid pair_box(const PairSynthesizer& pair, const WindowSpec& window, bool real_part,
                     double min_length = 0.0, bool include_window = true,
                     double log_drop = 40.0);

/// Local wavenumber at z: phase slope for complex signals, crossing spacing
/// over the nearest 6 crossing intervals for real ones.
double instantaneous_frequency(const SampledSignal& s, double z);

/// Mean local wavenumber over [z_lo, z_hi]: unwrapped phase advance per unit
/// length for complex signals, crossing count per unit length for real ones.
double mean_frequency(const SampledSignal& s, double z_lo, double z_hi);

struct SpectralDensity {
  double k_min = 0.0;
  double dk = 1.0;
  Eigen::VectorXcd values;  // F̃(k) · e^{-log_scale}
  double log_scale = 0.0;
  double band_lo = 0.0;
  double band_hi = 1.0;
  double leakage_tolerance = 1e-4;

  double k(Eigen::Index i) const { return k_min + static_cast<double>(i) * dk; }
  /// Σ|F̃|² Δk / 2π as mantissa · e^{log_scale}.
  Scaled energy() const;
  double fraction_outside(double lo, double hi) const;
  /// Energy fraction outside [band_lo − κ, band_hi + κ].
  double leakage(double kappa) const { return fraction_outside(band_lo - kappa, band_hi + kappa); }
};

/// Continuous-transform approximation Δz · DFT, with Δk = 2π/(N Δz).
SpectralDensity spectrum(const SampledSignal& s, double band_limit,
                         double boundary_tolerance = 1e-6);

struct GrowthPeak {
  double location;
  double log_magnitude;
};
/// argmax |synth_bessel| over (0, 4 cosh A /(δ² k0)).
GrowthPeak locate_growth_peak(const SuperoscParams& p);

}  // namespace superosc
