#include "superosc/energy_ledger.hpp"

#include <cmath>

#include "superosc/quadrature.hpp"

namespace superosc {

Scaled compute_I1(const CoherentAmplitudes& ca) { return energy_before(ca).spectral; }

double compute_I2(double gap, double t) {
  const double theta = gap * t;
  if (!(theta >= 4.0 * kPi)) throw DomainError("compute_I2: need Ωt >= 4π");
  // ∫cos², ∫sin², ∫sin·cos over [0, t], each times Ω.
  const double c = 0.5 * theta + 0.25 * std::sin(2.0 * theta);
  const double s = 0.5 * theta - 0.25 * std::sin(2.0 * theta);
  const double x = 0.5 * std::sin(theta) * std::sin(theta);
  const double numerator = c * s - x * x;
  const double denominator = x * x + s * s;
  if (std::abs(denominator) < 1e-12) throw DegenerateDenominator("compute_I2: zero denominator");
  return -numerator / denominator;
}

double compute_I3(const ModeGrid& grid, double gap, double t, double denominator) {
  if (!(grid.uv_cutoff > 0.0) || !std::isfinite(grid.uv_cutoff))
    throw CutoffMissing("compute_I3: UV cutoff must be set");
  if (!(grid.length > 0.0)) throw DomainError("compute_I3: L must be > 0");
  if (!(denominator > 1e-300)) throw DegenerateDenominator("compute_I3: zero denominator");
  if (!(t > 0.0)) throw DomainError("compute_I3: t must be > 0");
  auto integrand = [&](double k) {
    const double u = gap + k;
    const double s = std::sin(0.5 * u * t);
    return k * k * 4.0 * s * s / (u * u);
  };
  const double k_uv = grid.uv_cutoff;
  const int pieces = static_cast<int>(std::ceil(k_uv * t / (2.0 * kPi))) + 8;
  const auto est = quadrature::integrate<double>(integrand, 0.0, k_uv, 1e-12 * k_uv, 4 * pieces,
                                                 pieces);
  return est.value / (grid.length * grid.length) / denominator;
}

EnergyReport energy_balance(const CoherentAmplitudes& ca, const SampledSignal& local_field,
                            const TwoLevelParticle& particle, double t, double extent,
                            double tolerance) {
  particle.validate();
  if (!(particle.gap * t >= 40.0 * kPi - 1e-9))
    throw DomainError("energy_balance: need Ωt >= 40π");
  EnergyReport r;
  r.gap = particle.gap;
  r.t = t;
  r.length = ca.grid.length;
  r.uv_cutoff = ca.grid.uv_cutoff;
  r.beyond_window = t > extent;

  r.energy_before = energy_before(ca).spectral;
  r.i1 = compute_I1(ca);
  r.i2 = compute_I2(particle.gap, t) * particle.gap;

  TwoLevelParticle bare = particle;
  bare.coupling = 1.0;
  r.denominator = transition_probability(local_field, bare, t).value;
  const Probability p = transition_probability(local_field, particle, t);
  r.probability = p.value;
  r.breakdown = p.breakdown;
  if (r.denominator > 1e-300) {
    r.i3 = compute_I3(ca.grid, particle.gap, t, r.denominator);
    ModeGrid doubled = ca.grid;
    doubled.uv_cutoff *= 2.0;
    r.i3_double_cutoff = compute_I3(doubled, particle.gap, t, r.denominator);
  } else {
    r.vacuous_conditioning = true;
  }

  r.energy_after = add(r.i1, r.i2 + r.i3);
  // I1 − E_b is taken on the shared mantissa so the huge common part cancels exactly.
  const double gap_mantissa = r.i1.mantissa - r.energy_before.mantissa;
  const double structural = gap_mantissa == 0.0 ? 0.0 : gap_mantissa * std::exp(r.i1.log_scale);
  r.residual = (structural + r.i2 + r.i3 + r.gap) / r.gap;
  if (!std::isfinite(r.residual)) throw BalanceViolation("energy_balance: residual not finite", r);
  if (!r.vacuous_conditioning && std::abs(r.residual) > tolerance)
    throw BalanceViolation("energy_balance: |r| = " + std::to_string(std::abs(r.residual)) +
                               " exceeds " + std::to_string(tolerance),
                           r);
  return r;
}

}  // namespace superosc
