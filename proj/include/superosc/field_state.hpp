#pragma once

// Coherent-state description of a real band-limited field: Fourier series
// coefficients, per-mode amplitudes on k > 0, the reconstructed <B_x>, the
// two-point function and the pre-interaction energy.  Units hbar = c = 1.

#include <Eigen/Dense>

#include <complex>

#include "superosc/scaled.hpp"
#include "superosc/signal.hpp"

namespace superosc {

/// Modes k_n = n·2π/L for n = 1 .. floor(k_max L / 2π).
struct ModeGrid {
  double length = 1e4;       // L = V^{1/3}
  double k_max = 1.1;        // highest populated mode
  double uv_cutoff = 50.0;   // k_uv, vacuum term only

  double dk() const { return 2.0 * kPi / length; }
  Eigen::Index count() const;
  double k(Eigen::Index n) const { return static_cast<double>(n + 1) * dk(); }
  void validate() const;
};

struct FourierCoeffs {
  ModeGrid grid;
  Eigen::VectorXd a;  // cosine channel, times e^{log_scale}
  Eigen::VectorXd b;  // sine channel
  double log_scale = 0.0;

  /// Σ A_n cos(k_n z) + B_n sin(k_n z), times e^{-log_scale}.
  double resum(double z) const;
};

/// A_n = (2/L)∫F cos(k_n z) dz, B_n = (2/L)∫F sin(k_n z) dz on the sample
/// grid.  The grid must be periodic with period L, so the rectangle rule is
/// the trapezoid rule and is evaluated by FFT.
FourierCoeffs fourier_coeffs(const SampledSignal& s, const ModeGrid& grid);

struct CoherentAmplitudes {
  ModeGrid grid;
  Eigen::VectorXcd alpha;     // α_k · e^{-log_scale}
  Eigen::VectorXcd spectral;  // F̃(k_n) · e^{-log_scale}
  double log_scale = 0.0;
  bool classical = false;

  Eigen::Index size() const { return alpha.size(); }
  double omega(Eigen::Index n) const { return grid.k(n); }
  /// <n_k> = |α_k|² as mantissa · e^{2 log_scale}.
  Scaled occupation(Eigen::Index n) const { return {std::norm(alpha[n]), 2.0 * log_scale}; }
  /// log of min |α_k| over modes carrying ≥ 10⁻³ of the peak |F̃|.
  double log_min_alpha() const;
  static CoherentAmplitudes vacuum(const ModeGrid& grid);
};

/// α_k = i √(L / (2π ω_k)) F̃(k).  The spectrum must sit on the mode lattice
/// (Δk = 2π/L) and hold its energy inside |k| ≤ k_max.
CoherentAmplitudes amplitudes_from_spectrum(const SpectralDensity& spec, const ModeGrid& grid);

/// Σ_k √(8π ω_k / L³)(Re α_k sin(kz − ωt) + Im α_k cos(kz − ωt)) · e^{-k²σ²/2},
/// times e^{-log_scale}; σ is the optional particle smear.
double expectation_B_scaled(const CoherentAmplitudes& ca, double z, double t, double smear = 0.0);
double expectation_B(const CoherentAmplitudes& ca, double z, double t, double smear = 0.0);
/// Same sum at z_j = z0 + j·dz, j < n, sharing one phase recurrence.
Eigen::VectorXd expectation_B_scaled(const CoherentAmplitudes& ca, double z0, double dz,
                                     Eigen::Index n, double t, double smear = 0.0);

struct TwoPoint {
  double product = 0.0;  // F(z0 − t′) F(z0 − t″) · e^{-log_scale}
  double log_scale = 0.0;
  std::complex<double> vacuum;  // (1/L²)∫₀^{k_uv} ω e^{iω(t″ − t′)} dω

  std::complex<double> value() const { return product * std::exp(log_scale) + vacuum; }
};

/// (1/L²) ∫₀^{ω_uv} ω e^{iωτ} dω in closed form.
std::complex<double> vacuum_two_point(double length, double uv_cutoff, double tau);

TwoPoint two_point_function(const CoherentAmplitudes& ca, double z0, double t1, double t2);

struct EnergyBefore {
  Scaled spectral;  // (L²/4π²) Σ |F̃|² Δk over k > 0
  Scaled modes;     // Σ ω_k <n_k>
  double relative_gap() const;
};

EnergyBefore energy_before(const CoherentAmplitudes& ca);

/// (L²/4π) ∫ F² dz on the samples; equals the spectral form when F̃ has no
/// weight at k = 0.
Scaled energy_from_samples(const SampledSignal& s, double length);

}  // namespace superosc
