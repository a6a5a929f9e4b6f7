#include <doctest.h>

#include <cmath>

#include "superosc/energy_ledger.hpp"
#include "superosc/errors.hpp"
#include "superosc/quadrature.hpp"

using namespace superosc;

namespace {

double i2_by_quadrature(double omega, double t) {
  auto q = [&](auto f) { return omega * quadrature::integrate<double>(f, 0.0, t, 1e-13, 4000, 64).value; };
  const double c = q([&](double x) { return std::pow(std::cos(omega * x), 2); });
  const double s = q([&](double x) { return std::pow(std::sin(omega * x), 2); });
  const double x = q([&](double x) { return std::sin(omega * x) * std::cos(omega * x); });
  return -(c * s - x * x) / (x * x + s * s);
}

}  // namespace

TEST_CASE("I2 closed form against quadrature") {
  for (double theta : {40 * kPi, 50 * kPi, 41.3 * kPi, 100 * kPi, 12.7}) {
    const double t = theta / 2.0;
    CHECK(compute_I2(2.0, t) == doctest::Approx(i2_by_quadrature(2.0, t)).epsilon(1e-9));
  }
  CHECK(compute_I2(2.0, 25 * kPi) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_THROWS_AS(compute_I2(2.0, 1.0), DomainError);
}

TEST_CASE("I3 against brute-force quadrature and its L scaling") {
  ModeGrid m;
  m.length = 100.0;
  m.uv_cutoff = 5.0;
  const double omega = 2.0;
  const double t = 20.0;
  const int n = 400000;
  const double h = m.uv_cutoff / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double k = i * h;
    const double u = omega + k;
    const double v = k * k * 4.0 * std::pow(std::sin(0.5 * u * t), 2) / (u * u);
    sum += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * v;
  }
  const double ref = sum * h / 3.0 / (m.length * m.length) / 0.5;
  CHECK(compute_I3(m, omega, t, 0.5) == doctest::Approx(ref).epsilon(1e-9));
  ModeGrid big = m;
  big.length *= 10.0;
  CHECK(compute_I3(big, omega, t, 0.5) / compute_I3(m, omega, t, 0.5) == doctest::Approx(0.01).epsilon(1e-14));
  m.uv_cutoff = 0.0;
  CHECK_THROWS_AS(compute_I3(m, omega, t, 0.5), CutoffMissing);
  m.uv_cutoff = 5.0;
  CHECK_THROWS_AS(compute_I3(m, omega, t, 0.0), DegenerateDenominator);
}

TEST_CASE("energy balance for a small windowed pair") {
  const auto pair = phase_locked_pair(40, std::acosh(3.0), 3.0);
  const auto w = WindowSpec::gaussian(0.005);
  const auto box = pair_box(pair, w, true, 1e4);
  ModeGrid m;
  m.length = box.period();
  m.k_max = 1.0 + 12 * 0.005;
  const auto field = make_real_superosc(pair, 2.0, box, w);
  const auto ca = amplitudes_from_spectrum(spectrum(field, 1.0), m);
  CHECK(compute_I1(ca).log() == doctest::Approx(energy_before(ca).spectral.log()));

  const double t = 50 * kPi / 2.0;
  const auto local = make_real_superosc(pair, 2.0, UniformGrid::from_range(-t - 20.0, 5.0, 8001), w);
  TwoLevelParticle p;
  p.coupling = 1e-3;
  const EnergyReport r = energy_balance(ca, local, p, t, 3.0);
  CHECK(r.i2 / r.gap == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(r.residual) <= 0.05);
  CHECK(r.beyond_window);
  CHECK(r.residual == doctest::Approx((r.i2 + r.i3 + r.gap) / r.gap).epsilon(1e-12));
  CHECK_THROWS_AS(energy_balance(ca, local, p, 10.0, 3.0), DomainError);
  CHECK_THROWS_AS(energy_balance(ca, local, p, t, 3.0, 0.0), BalanceViolation);
}
