#pragma once

// First-order excitation of a two-level particle at z0 by a passing real
// field F(z − ct), with c = 1:  P(t) = g² |∫₀ᵗ F(z0 − t′) e^{iΩt′} dt′|².

#include <Eigen/Dense>

#include <vector>

#include "superosc/signal.hpp"

namespace superosc {

struct TwoLevelParticle {
  double gap = 2.0;       // Ω
  double coupling = 1.0;  // g = e/(2mc)
  double position = 0.0;  // z0

  void validate() const;
};

inline constexpr double kBreakdownThreshold = 0.1;

/// Natural cubic spline through uniformly spaced samples.
class CubicSpline {
 public:
  CubicSpline(double x0, double h, Eigen::VectorXd y);
  double operator()(double x) const;
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + h_ * static_cast<double>(y_.size() - 1); }

 private:
  double x0_;
  double h_;
  Eigen::VectorXd y_;
  Eigen::VectorXd m_;  // second derivatives
};

struct Probability {
  double value = 0.0;
  bool breakdown = false;  // P above the first-order threshold
};

/// Composite Simpson over [0, t] with ≥ 16 points per period of
/// Ω + k_max, on a cubic spline of the real samples.
Probability transition_probability(const SampledSignal& s, const TwoLevelParticle& particle,
                                   double t);

struct ProbabilityCurve {
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  std::vector<bool> breakdown;
  double gap = 0.0;
  double coupling = 1.0;

  bool any_breakdown() const;
};

ProbabilityCurve probability_curve(const SampledSignal& s, const TwoLevelParticle& particle,
                                   const Eigen::VectorXd& times);

/// g² amplitude² t² / 4, the resonant result for F = amplitude·sin(Ωz).
double monochromatic_reference(double coupling, double amplitude, double t);

/// Least-squares a in F ≈ a·sin(k z) over [z_lo, z_hi].
double fit_window_amplitude(const SampledSignal& s, double wavenumber, double z_lo, double z_hi);

struct ExponentFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual_rms = 0.0;
  Eigen::Index points = 0;
};

/// Least-squares line through (log t, log P) for curve points in [t_lo, t_hi].
ExponentFit fit_exponent(const ProbabilityCurve& curve, double t_lo, double t_hi);

struct DetuningScan {
  double matched_gap = 0.0;
  double t = 0.0;
  std::vector<double> gaps;
  std::vector<Probability> probabilities;
  Probability matched;

  /// P(matched) / max P over probes at least matched/10 away.
  double selectivity() const;
};

/// P at t for the matched particle and for each probe gap; t must stay
/// inside the superoscillatory window (t ≤ extent).
DetuningScan detuning_scan(const SampledSignal& s, const TwoLevelParticle& matched,
                           const std::vector<double>& probe_gaps, double t, double extent);

}  // namespace superosc
