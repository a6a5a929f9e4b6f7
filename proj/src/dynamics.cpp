#include "superosc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "superosc/quadrature.hpp"

namespace superosc {

void TwoLevelParticle::validate() const {
  if (!(gap > 0.0) || !std::isfinite(gap)) throw DomainError("TwoLevelParticle: gap must be > 0");
  if (!std::isfinite(coupling)) throw DomainError("TwoLevelParticle: coupling must be finite");
  if (!std::isfinite(position)) throw DomainError("TwoLevelParticle: position must be finite");
}

CubicSpline::CubicSpline(double x0, double h, Eigen::VectorXd y)
    : x0_(x0), h_(h), y_(std::move(y)) {
  const Eigen::Index n = y_.size();
  if (n < 3) throw InsufficientData("CubicSpline: need at least 3 samples");
  m_ = Eigen::VectorXd::Zero(n);
  // Tridiagonal (1, 4, 1) system for the interior second derivatives.
  Eigen::VectorXd c(n);
  Eigen::VectorXd d(n);
  c[0] = 0.0;
  d[0] = 0.0;
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h * h);
    const double denom = 4.0 - c[i - 1];
    c[i] = 1.0 / denom;
    d[i] = (rhs - d[i - 1]) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
}

double CubicSpline::operator()(double x) const {
  const double u = (x - x0_) / h_;
  auto i = static_cast<Eigen::Index>(std::floor(u));
  i = std::clamp<Eigen::Index>(i, 0, y_.size() - 2);
  const double a = static_cast<double>(i + 1) - u;
  const double b = 1.0 - a;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h_ * h_ / 6.0;
}

namespace {

CubicSpline spline_of(const SampledSignal& s) {
  if (!s.real_valued) throw DomainError("transition_probability: field samples must be real");
  if (s.max_wavenumber > 0.0 && s.grid.dz > kPi / (4.0 * s.max_wavenumber) * (1.0 + 1e-12))
    throw GridUnderresolved("transition_probability: fewer than 8 samples per oscillation");
  return CubicSpline(s.grid.z_min, s.grid.dz, s.values.real());
}

std::complex<double> time_integral(const CubicSpline& f, double k_max,
                                   const TwoLevelParticle& particle, double t) {
  if (t == 0.0) return {0.0, 0.0};
  const double z0 = particle.position;
  if (z0 - t < f.x_min() - 1e-9 || z0 > f.x_max() + 1e-9)
    throw DomainError("transition_probability: samples do not cover [z0 - t, z0]");
  const double fastest = particle.gap + k_max;
  auto intervals = static_cast<Eigen::Index>(std::ceil(16.0 * fastest * t / (2.0 * kPi)));
  intervals = std::max<Eigen::Index>(intervals + intervals % 2, 16);
  const double h = t / static_cast<double>(intervals);
  Eigen::VectorXcd values(intervals + 1);
  for (Eigen::Index j = 0; j <= intervals; ++j) {
    const double tp = static_cast<double>(j) * h;
    values[j] = f(z0 - tp) * std::polar(1.0, particle.gap * tp);
  }
  return quadrature::simpson(values, h);
}

}  // namespace

Probability transition_probability(const SampledSignal& s, const TwoLevelParticle& particle,
                                   double t) {
  particle.validate();
  if (!(t >= 0.0)) throw DomainError("transition_probability: t must be >= 0");
  const CubicSpline f = spline_of(s);
  const std::complex<double> integral = time_integral(f, s.max_wavenumber, particle, t);
  Probability p;
  p.value = particle.coupling * particle.coupling * std::norm(integral) *
            std::exp(2.0 * s.log_scale);
  p.breakdown = p.value > kBreakdownThreshold;
  return p;
}

bool ProbabilityCurve::any_breakdown() const {
  return std::find(breakdown.begin(), breakdown.end(), true) != breakdown.end();
}

ProbabilityCurve probability_curve(const SampledSignal& s, const TwoLevelParticle& particle,
                                   const Eigen::VectorXd& times) {
  particle.validate();
  const CubicSpline f = spline_of(s);
  ProbabilityCurve curve;
  curve.times = times;
  curve.values.resize(times.size());
  curve.gap = particle.gap;
  curve.coupling = particle.coupling;
  const double scale = particle.coupling * particle.coupling * std::exp(2.0 * s.log_scale);
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw DomainError("probability_curve: times must be >= 0");
    curve.values[i] = scale * std::norm(time_integral(f, s.max_wavenumber, particle, times[i]));
    curve.breakdown.push_back(curve.values[i] > kBreakdownThreshold);
  }
  return curve;
}

double monochromatic_reference(double coupling, double amplitude, double t) {
  if (!(t >= 0.0)) throw DomainError("monochromatic_reference: t must be >= 0");
  return coupling * coupling * amplitude * amplitude * t * t / 4.0;
}

double fit_window_amplitude(const SampledSignal& s, double wavenumber, double z_lo, double z_hi) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < s.grid.n; ++i) {
    const double z = s.grid.z(i);
    if (z < z_lo || z > z_hi) continue;
    const double basis = std::sin(wavenumber * z);
    num += s.values[i].real() * basis;
    den += basis * basis;
  }
  if (den == 0.0) throw InsufficientData("fit_window_amplitude: no samples in the window");
  return num / den * std::exp(s.log_scale);
}

ExponentFit fit_exponent(const ProbabilityCurve& curve, double t_lo, double t_hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (Eigen::Index i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(curve.values[i] > 0.0) || !(t > 0.0))
      throw InsufficientData("fit_exponent: non-positive point in the fit window");
    xs.push_back(std::log(t));
    ys.push_back(std::log(curve.values[i]));
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (n < 10) throw InsufficientData("fit_exponent: need at least 10 points, got " + std::to_string(n));
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = xs[static_cast<std::size_t>(i)];
    rhs[i] = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d beta = design.householderQr().solve(rhs);
  ExponentFit fit;
  fit.log_prefactor = beta[0];
  fit.exponent = beta[1];
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = n;
  fit.residual_rms = std::sqrt((design * beta - rhs).squaredNorm() / static_cast<double>(n));
  return fit;
}

double DetuningScan::selectivity() const {
  double worst = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (std::abs(gaps[i] - matched_gap) < matched_gap / 10.0) continue;
    worst = std::max(worst, probabilities[i].value);
    any = true;
  }
  if (!any) throw InsufficientData("selectivity: no probe at least 10% away from the match");
  if (worst == 0.0) return std::numeric_limits<double>::infinity();
  return matched.value / worst;
}

DetuningScan detuning_scan(const SampledSignal& s, const TwoLevelParticle& matched,
                           const std::vector<double>& probe_gaps, double t, double extent) {
  if (t > extent) throw DomainError("detuning_scan: t exceeds the superoscillatory window");
  DetuningScan scan;
  scan.matched_gap = matched.gap;
  scan.t = t;
  scan.matched = transition_probability(s, matched, t);
  for (double gap : probe_gaps) {
    TwoLevelParticle probe = matched;
    probe.gap = gap;
    scan.gaps.push_back(gap);
    scan.probabilities.push_back(transition_probability(s, probe, t));
  }
  return scan;
}

}  // namespace superosc
