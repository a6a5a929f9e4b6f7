#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

#include "superosc/errors.hpp"
#include "superosc/quadrature.hpp"
#include "superosc/signal.hpp"
#include "superosc/special_functions.hpp"

using namespace superosc;

namespace {

SampledSignal sampled(std::function<std::complex<double>(double)> f, const UniformGrid& g,
                      bool real, double k_max) {
  return sample([f](double z) { return LogComplex::from(f(z)); }, g, SynthesisRoute::bessel, real,
                k_max);
}

}  // namespace

TEST_CASE("J0 against boost") {
  for (double x = 0.0; x <= 120.0; x += 0.173) {
    const double ref = boost::math::cyl_bessel_j(0, x);
    CHECK(std::abs(special::bessel_j0(x) - ref) <= 2e-14 * std::max(1.0, std::abs(ref) * 10));
  }
}

TEST_CASE("log I0 against boost") {
  for (double x = 0.0; x <= 600.0; x += 1.37) {
    const double ref = std::log(boost::math::cyl_bessel_i(0, x));
    CHECK(special::log_bessel_i0(x) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("quadrature") {
  const auto est = quadrature::integrate<double>([](double x) { return std::sin(x); }, 0.0, kPi, 1e-13);
  CHECK(est.value == doctest::Approx(2.0).epsilon(1e-13));
  Eigen::VectorXd y(11);
  for (int i = 0; i < 11; ++i) y[i] = 0.1 * i * 0.1 * i;
  CHECK(quadrature::simpson(y, 0.1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("log-scaled arithmetic") {
  const LogComplex a{800.0, {0.0, 1.0}};
  const LogComplex b{-790.0, {0.0, 1.0}};
  const std::complex<double> v = (a * b).value();
  CHECK(v.real() == doctest::Approx(-std::exp(10.0)));
  CHECK(std::abs(v.imag()) < 1e-9);
  const Scaled s{2.0, 1000.0};
  CHECK(s.log() == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(LogComplex::from({0.0, 0.0}).is_zero());
}

TEST_CASE("parameters") {
  CHECK(phase_lock_target(40, PhaseBranch::quarter) == doctest::Approx(2 * kPi * 40 + kPi / 4));
  CHECK(phase_lock_target(40, PhaseBranch::three_quarter) ==
        doctest::Approx(2 * kPi * 40 + 3 * kPi / 4));
  const auto p = SuperoscParams::with_delta(0.5, std::acosh(3.0), 0.01);
  CHECK(p.superosc_wavenumber() == doctest::Approx(2.0));
  CHECK(p.peak_location() == doctest::Approx(2.0 * 3.0 / 0.25));
  CHECK(SuperoscParams::with_delta(0.5, 0.0, 0.01).superosc_wavenumber() == doctest::Approx(1.0));
  CHECK_THROWS_AS(SuperoscParams::with_delta(0.5, 1.0, 100.0).validate(), DomainError);
  CHECK_THROWS_AS(SuperoscParams::with_delta(1.5, 1.0, 0.01).validate(), DomainError);
  CHECK_THROWS_AS(SuperoscParams::with_delta(0.5, -1.0, 0.01).validate(), DomainError);
}

TEST_CASE("integral and Bessel routes agree") {
  for (double delta : {0.3, 0.55}) {
    for (double a : {0.0, 0.8}) {
      const auto p = SuperoscParams::with_delta(delta, a, 1e-4);
      for (double z : {-17.0, -4.3, -0.2, 0.0}) {
        const auto b = synth_bessel(p, z);
        CHECK(std::abs(synth_integral(p, z).value - b) <= 1e-8 * std::abs(b));
      }
    }
  }
}

TEST_CASE("log route matches direct route where both are finite") {
  const auto p = SuperoscParams::with_delta(0.4, 1.2, 0.01);
  for (double z : {-30.0, -1.0, 0.0, 5.0, 20.0}) {
    const auto direct = synth_bessel(p, z);
    CHECK(std::abs(synth_bessel_log(p, z).value() - direct) <= 1e-12 * std::abs(direct));
  }
}

TEST_CASE("asymptotic route in the small-delta regime") {
  const auto p = SuperoscParams::with_delta(0.1, 1.0, 0.01);
  const auto b = synth_bessel(p, -1.0);
  CHECK(std::abs(synth_asymptotic(p, -1.0) - b) <= 1e-3 * std::abs(b));
}

TEST_CASE("growth peak") {
  const auto p = SuperoscParams::with_delta(0.3, 1.0, 0.01);
  const GrowthPeak g = locate_growth_peak(p);
  CHECK(std::abs(g.location / p.peak_location() - 1.0) <= 0.05);
  CHECK(std::abs(std::exp(g.log_magnitude - p.peak_log_magnitude()) - 1.0) <= 0.2);
}

TEST_CASE("direct route refuses overflow") {
  const auto p = SuperoscParams::with_delta(0.05, 2.0, 1e-4);
  CHECK_THROWS_AS(synth_bessel(p, p.peak_location()), OverflowRegime);
  CHECK(std::isfinite(synth_bessel_log(p, p.peak_location()).log_abs));
}

TEST_CASE("phase-locked pair") {
  const auto pair = phase_locked_pair(40, std::acosh(3.0), 3.0);
  CHECK(pair.wavenumber() == doctest::Approx(2.0).epsilon(1e-9));
  const auto v = pair(-1.0);
  const auto q = synth_bessel(pair.quarter(), -1.0);
  const auto t = synth_bessel(pair.three_quarter(), -1.0);
  CHECK(std::abs(v - (q + std::complex<double>(0.0, 1.0) * t)) <= 1e-12 * std::abs(v));
  CHECK_THROWS_AS(combine_pair(pair.quarter(), pair.quarter(), 1), PhaseLockViolation);
}

TEST_CASE("grids") {
  const auto g = UniformGrid::from_range(-1.0, 1.0, 5);
  CHECK(g.dz == doctest::Approx(0.5));
  CHECK(g.z_max() == doctest::Approx(1.0));
  const auto b = UniformGrid::box(-10.0, 100.0, 2.0);
  CHECK(b.period() == doctest::Approx(100.0));
  CHECK((b.n & (b.n - 1)) == 0);
  CHECK(b.dz <= kPi / 8.0 + 1e-12);
}

TEST_CASE("instantaneous frequency") {
  const auto g = UniformGrid::from_range(-50.0, 50.0, 4001);
  const auto c = sampled([](double z) { return std::exp(std::complex<double>(0.0, 3.0 * z)); }, g,
                         false, 3.0);
  CHECK(instantaneous_frequency(c, 1.3) == doctest::Approx(3.0).epsilon(1e-4));
  const auto r = sampled([](double z) { return std::complex<double>(std::cos(2.0 * z + 0.3), 0.0); },
                         g, true, 2.0);
  CHECK(instantaneous_frequency(r, -7.1) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_THROWS_AS(instantaneous_frequency(r, 50.0), EdgeError);
  CHECK(mean_frequency(c, -20.0, 20.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(mean_frequency(r, -20.0, 20.0) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK_THROWS_AS(mean_frequency(c, -60.0, 0.0), EdgeError);
  const auto zero = sampled([](double) { return std::complex<double>(0.0, 0.0); }, g, false, 1.0);
  CHECK_THROWS_AS(instantaneous_frequency(zero, 0.0), NodeError);
}

TEST_CASE("spectrum of a Gaussian") {
  const auto g = UniformGrid::box(-40.0, 80.0, 4.0);
  const auto s = sampled([](double z) { return std::complex<double>(std::exp(-0.5 * z * z), 0.0); },
                         g, true, 4.0);
  const SpectralDensity sp = spectrum(s, 1.0);
  for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
    const double k = sp.k(i);
    if (std::abs(k) > 5.0) continue;
    const std::complex<double> v = sp.values[i] * std::exp(sp.log_scale);
    CHECK(std::abs(v - std::sqrt(2 * kPi) * std::exp(-0.5 * k * k)) <= 1e-12);
  }
  CHECK(sp.fraction_outside(-10.0, 10.0) < 1e-20);
}

TEST_CASE("spectrum rejects a truncated windowed signal") {
  const auto g = UniformGrid::box(-5.0, 10.0, 2.0);
  auto s = sampled([](double z) { return std::complex<double>(std::cos(z), 0.0); }, g, true, 2.0);
  s.route = SynthesisRoute::windowed;
  CHECK_THROWS_AS(spectrum(s, 1.0), TruncationError);
}

TEST_CASE("windowed pair stays in band and superoscillates") {
  const auto pair = phase_locked_pair(40, std::acosh(3.0), 3.0);
  const auto w = WindowSpec::gaussian(0.005);
  const auto g = pair_box(pair, w, false);
  const auto s = sample_pair(pair, g, w);
  const auto sp = spectrum(s, 1.0);
  CHECK(sp.leakage(w.half_width) <= 1e-4);
  CHECK(instantaneous_frequency(s, -1.5) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(mean_frequency(s, -3.0, 0.0) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("real superoscillation needs the +1 branch and matching target") {
  const auto pair = phase_locked_pair(40, std::acosh(3.0), 3.0, -1);
  const auto g = UniformGrid::from_range(-4.0, 1.0, 200);
  CHECK_THROWS_AS(make_real_superosc(pair, 2.0, g), DomainError);
  const auto good = phase_locked_pair(40, std::acosh(3.0), 3.0);
  CHECK_THROWS_AS(make_real_superosc(good, 2.5, g), DomainError);
}
