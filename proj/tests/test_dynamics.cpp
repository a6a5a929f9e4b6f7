#include <doctest.h>

#include <cmath>

#include "superosc/dynamics.hpp"
#include "superosc/errors.hpp"

using namespace superosc;

namespace {

SampledSignal cosine(double amplitude, double k, double lo, double hi, double dz) {
  const auto n = static_cast<Eigen::Index>(std::ceil((hi - lo) / dz)) + 1;
  const auto g = UniformGrid::from_range(lo, hi, n);
  return sample([=](double z) { return LogComplex::from(amplitude * std::cos(k * z)); }, g,
                SynthesisRoute::bessel, true, k);
}

// g²a²|∫₀ᵗ cos(Ωt′) e^{iΩt′} dt′|² for a resonant cosine.
double resonant(double g, double a, double omega, double t) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> v = 0.5 * t + (std::exp(2.0 * i * omega * t) - 1.0) / (4.0 * i * omega);
  return g * g * a * a * std::norm(v);
}

}  // namespace

TEST_CASE("cubic spline") {
  Eigen::VectorXd y(41);
  for (int i = 0; i < 41; ++i) y[i] = 3.0 - 0.5 * (0.25 * i);
  const CubicSpline line(0.0, 0.25, y);
  CHECK(line(3.3) == doctest::Approx(3.0 - 0.5 * 3.3).epsilon(1e-14));
  for (int i = 0; i < 41; ++i) y[i] = std::sin(0.25 * i);
  const CubicSpline s(0.0, 0.25, y);
  CHECK(std::abs(s(4.1) - std::sin(4.1)) < 1e-4);
  CHECK(s.x_max() == doctest::Approx(10.0));
}

TEST_CASE("transition probability of a resonant cosine") {
  const double omega = 2.0;
  const auto s = cosine(0.7, omega, -60.0, 1.0, kPi / 64.0);
  TwoLevelParticle p;
  p.gap = omega;
  p.coupling = 0.01;
  for (double t : {3.0, 17.0, 55.0}) {
    const Probability pr = transition_probability(s, p, t);
    CHECK(pr.value == doctest::Approx(resonant(0.01, 0.7, omega, t)).epsilon(1e-6));
    CHECK_FALSE(pr.breakdown);
  }
  p.coupling = 1.0;
  CHECK(transition_probability(s, p, 55.0).breakdown);
}

TEST_CASE("transition probability preconditions") {
  const auto s = cosine(1.0, 2.0, -10.0, 1.0, kPi / 64.0);
  TwoLevelParticle p;
  CHECK_THROWS_AS(transition_probability(s, p, 50.0), DomainError);
  auto coarse = cosine(1.0, 2.0, -10.0, 1.0, kPi / 16.0);
  coarse.max_wavenumber = 10.0;
  CHECK_THROWS_AS(transition_probability(coarse, p, 5.0), GridUnderresolved);
  p.gap = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("monochromatic reference and fits") {
  CHECK(monochromatic_reference(0.1, 2.0, 3.0) == doctest::Approx(0.01 * 4.0 * 9.0 / 4.0));
  const auto g = UniformGrid::from_range(-40.0, 1.0, 2051);
  const auto s = sample([](double z) { return LogComplex::from(0.37 * std::sin(1.5 * z)); }, g,
                        SynthesisRoute::bessel, true, 1.5);
  CHECK(fit_window_amplitude(s, 1.5, -30.0, 0.0) == doctest::Approx(0.37).epsilon(1e-6));

  ProbabilityCurve c;
  c.times.resize(20);
  c.values.resize(20);
  c.breakdown.assign(20, false);
  for (int i = 0; i < 20; ++i) {
    c.times[i] = 1.0 + i;
    c.values[i] = 0.3 * std::pow(c.times[i], 2.0);
  }
  const ExponentFit f = fit_exponent(c, 1.0, 20.0);
  CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.log_prefactor == doctest::Approx(std::log(0.3)).epsilon(1e-12));
  CHECK(f.residual_rms < 1e-12);
  CHECK_THROWS_AS(fit_exponent(c, 1.0, 5.0), InsufficientData);
}

TEST_CASE("detuning selects the resonance") {
  const double omega = 2.0;
  const auto s = cosine(1.0, omega, -60.0, 1.0, kPi / 64.0);
  TwoLevelParticle p;
  p.gap = omega;
  p.coupling = 1e-3;
  const DetuningScan scan = detuning_scan(s, p, {1.6, 2.4}, 50.0, 55.0);
  CHECK(scan.matched.value == doctest::Approx(resonant(1e-3, 1.0, omega, 50.0)).epsilon(1e-6));
  CHECK(scan.selectivity() > 100.0);
  CHECK_THROWS_AS(detuning_scan(s, p, {1.6}, 50.0, 10.0), DomainError);
}
