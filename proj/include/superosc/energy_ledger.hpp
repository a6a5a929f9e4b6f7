#pragma once

// Energy bookkeeping after a detected excitation: <E_a> = I1 + I2 + I3 and
// the balance <E_a> = <E_b> − E with E = Ω (hbar = 1).

#include "superosc/dynamics.hpp"
#include "superosc/field_state.hpp"

namespace superosc {

/// I1 is <E_b> itself: delegates to energy_before(ca).spectral.
Scaled compute_I1(const CoherentAmplitudes& ca);

/// I2 / E from the trig double integral over the trig denominator, both in
/// closed form; a function of θ = Ωt only.  Requires Ωt ≥ 4π.
double compute_I2(double gap, double t);

/// (1/L²) ∫₀^{k_uv} ω² · 4 sin²((Ω+ω)t/2)/(Ω+ω)² dk / denominator, with
/// denominator = |∫₀ᵗ F(z0 − t′) e^{iΩt′} dt′|².
double compute_I3(const ModeGrid& grid, double gap, double t, double denominator);

struct EnergyReport {
  Scaled energy_before;  // <E_b>
  Scaled i1;
  double i2 = 0.0;
  double i3 = 0.0;
  Scaled energy_after;  // I1 + I2 + I3
  double gap = 0.0;     // E
  double residual = 0.0;
  double i3_double_cutoff = 0.0;
  double denominator = 0.0;
  double probability = 0.0;  // P(t) at the report's coupling
  double length = 0.0;
  double t = 0.0;
  double uv_cutoff = 0.0;
  bool beyond_window = false;
  bool vacuous_conditioning = false;
  bool breakdown = false;
};

class BalanceViolation : public Error {
 public:
  BalanceViolation(const std::string& what, EnergyReport report)
      : Error(what), report_(report) {}
  const EnergyReport& report() const noexcept { return report_; }

 private:
  EnergyReport report_;
};

inline constexpr double kBalanceTolerance = 0.05;

/// Builds the report for a particle that detected the field `ca` after time
/// t; `local_field` is the real field near the detector, used for the
/// excitation denominator.  Throws BalanceViolation when |r| > tolerance.
EnergyReport energy_balance(const CoherentAmplitudes& ca, const SampledSignal& local_field,
                            const TwoLevelParticle& particle, double t, double extent,
                            double tolerance = kBalanceTolerance);

}  // namespace superosc
