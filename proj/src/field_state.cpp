#include "superosc/field_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace superosc {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_lattice(double dk, const ModeGrid& grid) {
  if (std::abs(dk - grid.dk()) > 1e-9 * grid.dk())
    throw DomainError("field-state: sample period differs from the mode box L = " +
                      std::to_string(grid.length));
}

Eigen::Index zero_bin(const SpectralDensity& spec) {
  return static_cast<Eigen::Index>(std::llround(-spec.k_min / spec.dk));
}

}  // namespace

Eigen::Index ModeGrid::count() const {
  return static_cast<Eigen::Index>(std::floor(k_max / dk() + 1e-9));
}

void ModeGrid::validate() const {
  if (!(length > 0.0)) throw DomainError("ModeGrid: L must be > 0");
  if (!(k_max > 0.0)) throw DomainError("ModeGrid: k_max must be > 0");
  if (!(uv_cutoff >= k_max)) throw DomainError("ModeGrid: k_uv must be >= k_max");
  if (count() < 1) throw DomainError("ModeGrid: no mode below k_max");
}

double FourierCoeffs::resum(double z) const {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    const double kz = grid.k(n) * z;
    sum += a[n] * std::cos(kz) + b[n] * std::sin(kz);
  }
  return sum;
}

FourierCoeffs fourier_coeffs(const SampledSignal& s, const ModeGrid& grid) {
  grid.validate();
  if (!s.real_valued) throw DomainError("fourier_coeffs: signal must be real");
  const SpectralDensity spec = spectrum(s, grid.k_max);
  check_lattice(spec.dk, grid);
  const Eigen::Index zero = zero_bin(spec);
  const Eigen::Index count = grid.count();
  if (zero + count >= spec.values.size())
    throw GridUnderresolved("fourier_coeffs: sample grid too coarse for k_max");
  FourierCoeffs c;
  c.grid = grid;
  c.a.resize(count);
  c.b.resize(count);
  const double scale = 2.0 / grid.length;
  for (Eigen::Index n = 0; n < count; ++n) {
    const std::complex<double> f = spec.values[zero + n + 1];
    c.a[n] = scale * f.real();
    c.b[n] = -scale * f.imag();
  }
  c.log_scale = spec.log_scale;
  return c;
}

double CoherentAmplitudes::log_min_alpha() const {
  if (spectral.size() == 0) return -std::numeric_limits<double>::infinity();
  const double peak = spectral.cwiseAbs().maxCoeff();
  if (peak == 0.0) return -std::numeric_limits<double>::infinity();
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < alpha.size(); ++n)
    if (std::abs(spectral[n]) >= 1e-3 * peak) lowest = std::min(lowest, std::abs(alpha[n]));
  return std::log(lowest) + log_scale;
}

CoherentAmplitudes CoherentAmplitudes::vacuum(const ModeGrid& grid) {
  grid.validate();
  CoherentAmplitudes ca;
  ca.grid = grid;
  ca.alpha = Eigen::VectorXcd::Zero(grid.count());
  ca.spectral = Eigen::VectorXcd::Zero(grid.count());
  return ca;
}

CoherentAmplitudes amplitudes_from_spectrum(const SpectralDensity& spec, const ModeGrid& grid) {
  grid.validate();
  check_lattice(spec.dk, grid);
  const double outside = spec.fraction_outside(-grid.k_max, grid.k_max);
  if (outside > spec.leakage_tolerance)
    throw DomainError("amplitudes_from_spectrum: " + std::to_string(outside) +
                      " of the spectral energy lies beyond k_max");
  const Eigen::Index zero = zero_bin(spec);
  const Eigen::Index count = grid.count();
  if (zero + count >= spec.values.size())
    throw GridUnderresolved("amplitudes_from_spectrum: spectrum does not reach k_max");

  CoherentAmplitudes ca;
  ca.grid = grid;
  ca.alpha.resize(count);
  ca.spectral = spec.values.segment(zero + 1, count);
  ca.log_scale = spec.log_scale;
  for (Eigen::Index n = 0; n < count; ++n)
    ca.alpha[n] = kI * std::sqrt(grid.length / (2.0 * kPi * ca.omega(n))) * ca.spectral[n];

  const double total = ca.alpha.squaredNorm();
  if (total > 0.0 && std::norm(ca.alpha[0]) > 1e-2 * total)
    throw InfraredError("amplitudes_from_spectrum: lowest mode holds " +
                        std::to_string(std::norm(ca.alpha[0]) / total) + " of all quanta");
  ca.classical = ca.log_min_alpha() >= std::log(10.0);
  return ca;
}

double expectation_B_scaled(const CoherentAmplitudes& ca, double z, double t, double smear) {
  return expectation_B_scaled(ca, z, 1.0, 1, t, smear)[0];
}

double expectation_B(const CoherentAmplitudes& ca, double z, double t, double smear) {
  return expectation_B_scaled(ca, z, t, smear) * std::exp(ca.log_scale);
}

Eigen::VectorXd expectation_B_scaled(const CoherentAmplitudes& ca, double z0, double dz,
                                     Eigen::Index n, double t, double smear) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double volume = std::pow(ca.grid.length, 3);
  for (Eigen::Index m = 0; m < ca.size(); ++m) {
    const std::complex<double> a = ca.alpha[m];
    if (a == 0.0) continue;
    const double k = ca.grid.k(m);
    const double w = ca.omega(m);
    const double weight = std::sqrt(8.0 * kPi * w / volume) * std::exp(-0.5 * k * k * smear * smear);
    const std::complex<double> step = std::polar(1.0, k * dz);
    std::complex<double> phase;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j % 64 == 0) phase = std::polar(1.0, k * (z0 + static_cast<double>(j) * dz) - w * t);
      out[j] += weight * (a.real() * phase.imag() + a.imag() * phase.real());
      phase *= step;
    }
  }
  return out;
}

std::complex<double> vacuum_two_point(double length, double uv_cutoff, double tau) {
  if (!(uv_cutoff > 0.0)) throw CutoffMissing("two_point_function: UV cutoff must be set");
  const double w = uv_cutoff;
  const double x = w * tau;
  std::complex<double> integral;
  if (std::abs(x) < 0.5) {
    // Σ (iτ)^n W^{n+2} / (n! (n+2))
    std::complex<double> power{1.0, 0.0};
    double factorial = 1.0;
    for (int n = 0; n < 30; ++n) {
      if (n > 0) {
        power *= kI * x;
        factorial *= n;
      }
      integral += power / (factorial * (n + 2));
    }
    integral *= w * w;
  } else {
    integral = std::exp(kI * x) * (w / (kI * tau) + 1.0 / (tau * tau)) - 1.0 / (tau * tau);
  }
  return integral / (length * length);
}

TwoPoint two_point_function(const CoherentAmplitudes& ca, double z0, double t1, double t2) {
  TwoPoint tp;
  tp.product = expectation_B_scaled(ca, z0, t1) * expectation_B_scaled(ca, z0, t2);
  tp.log_scale = 2.0 * ca.log_scale;
  tp.vacuum = vacuum_two_point(ca.grid.length, ca.grid.uv_cutoff, t2 - t1);
  return tp;
}

double EnergyBefore::relative_gap() const {
  if (spectral.mantissa == 0.0 && modes.mantissa == 0.0) return 0.0;
  const double m = modes.mantissa * std::exp(modes.log_scale - spectral.log_scale);
  return std::abs(spectral.mantissa - m) / std::max(std::abs(spectral.mantissa), std::abs(m));
}

EnergyBefore energy_before(const CoherentAmplitudes& ca) {
  const double l = ca.grid.length;
  EnergyBefore e;
  e.spectral = {l * l / (4.0 * kPi * kPi) * ca.spectral.squaredNorm() * ca.grid.dk(),
                2.0 * ca.log_scale};
  double modes = 0.0;
  for (Eigen::Index n = 0; n < ca.size(); ++n) modes += ca.omega(n) * std::norm(ca.alpha[n]);
  e.modes = {modes, 2.0 * ca.log_scale};
  return e;
}

Scaled energy_from_samples(const SampledSignal& s, double length) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) sum += std::norm(s.values[i]);
  return {length * length / (4.0 * kPi) * sum * s.grid.dz, 2.0 * s.log_scale};
}

}  // namespace superosc
