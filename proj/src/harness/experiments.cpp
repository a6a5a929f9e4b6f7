#include "superosc/harness/experiments.hpp"

#include <boost/algorithm/string.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "superosc/dynamics.hpp"
#include "superosc/energy_ledger.hpp"
#include "superosc/field_state.hpp"
#include "superosc/harness/output.hpp"

#ifndef SUPEROSC_VERSION
#define SUPEROSC_VERSION "0.0.0"
#endif

namespace superosc::harness {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string tool_version() { return SUPEROSC_VERSION; }

json RunRecord::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["config"] = config;
  j["payload"] = payload;
  j["warnings"] = warnings;
  j["files"] = files;
  return j;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "signal.amplitude", "signal.band_limit", "signal.delta",      "signal.phase_int",
    "signal.boost",     "signal.cosh_boost", "signal.extent",     "signal.branch",
    "signal.window_tolerance", "signal.route", "window.kappa",    "grid.z_min",
    "grid.z_max",       "grid.n",            "modes.length",      "modes.k_max",
    "modes.k_uv",       "particle.gap",      "particle.coupling", "particle.position",
    "particle.probes",  "time.t_min",        "time.t_max",        "time.points",
    "time.omega_t_over_pi", "time.ladder_over_pi", "time.long_t1", "time.long_t2",
    "freq.points",      "freq.field",        "freq.far_field",    "output.dir",
    "run.seed",         "sweep.experiment",  "vary.*"};

json scaled_json(const Scaled& s) {
  return {{"mantissa", s.mantissa}, {"log_scale", s.log_scale}, {"log10", s.log10()}};
}

/// Signal block of the config, resolved to core parameter objects.
struct Setup {
  double band_limit = 1.0;
  double boost = 0.0;
  double extent = 0.0;
  std::optional<SuperoscParams> single;
  std::optional<PairSynthesizer> pair;
  WindowSpec window;

  // The copy whose δ sets the window criterion (largest δ).
  const SuperoscParams& params() const { return pair ? pair->quarter() : *single; }
  // The copy whose growth region reaches furthest.
  const SuperoscParams& widest() const { return pair ? pair->three_quarter() : *single; }
  double wavenumber() const { return pair ? pair->wavenumber() : single->superosc_wavenumber(); }
  double k_fast() const { return std::max(std::abs(wavenumber()), band_limit); }
  double upper_root() const {
    return 2.0 * std::exp(boost) * widest().inv_delta_sq / band_limit;
  }
  LogSynth field(bool real_part) const {
    if (pair) {
      const PairSynthesizer p = *pair;
      if (real_part) return [p](double z) { return p.log_imag(z); };
      return [p](double z) { return p.log_value(z); };
    }
    const SuperoscParams p = *single;
    if (real_part)
      return [p](double z) {
        const LogComplex v = synth_bessel_log(p, z);
        return LogComplex::from(v.unit.real()) * LogComplex{v.log_abs, {1.0, 0.0}};
      };
    return [p](double z) { return synth_bessel_log(p, z); };
  }
};

Setup make_setup(const Config& cfg, double default_kappa) {
  Setup s;
  s.band_limit = cfg.number("signal.band_limit", 1.0);
  if (!(s.band_limit > 0.0)) cfg.fail("signal.band_limit", "must be > 0");
  if (cfg.has("signal.boost") && cfg.has("signal.cosh_boost"))
    cfg.fail("signal.cosh_boost", "give either boost or cosh_boost, not both");
  if (cfg.has("signal.cosh_boost")) {
    const double c = cfg.number("signal.cosh_boost");
    if (!(c >= 1.0)) cfg.fail("signal.cosh_boost", "must be >= 1");
    s.boost = std::acosh(c);
  } else {
    s.boost = cfg.number("signal.boost", std::acosh(3.0));
  }
  if (!(s.boost >= 0.0)) cfg.fail("signal.boost", "must be >= 0");
  if (cfg.has("signal.delta") && cfg.has("signal.phase_int"))
    cfg.fail("signal.phase_int", "give either delta or phase_int, not both");

  const double amplitude = cfg.number("signal.amplitude", 1.0);
  const long branch = cfg.integer("signal.branch", 1);
  if (branch != 1 && branch != -1) cfg.fail("signal.branch", "must be +1 or -1");
  const double tolerance = cfg.number("signal.window_tolerance", 0.1);

  double inv_delta_sq;
  long phase_int = 0;
  if (cfg.has("signal.delta")) {
    const double delta = cfg.number("signal.delta");
    if (!(delta > 0.0 && delta < 1.0)) cfg.fail("signal.delta", "must lie in (0, 1)");
    inv_delta_sq = 1.0 / (delta * delta);
  } else {
    phase_int = cfg.integer("signal.phase_int", 40);
    if (phase_int <= 0) cfg.fail("signal.phase_int", "must be a positive integer");
    inv_delta_sq = phase_lock_target(static_cast<int>(phase_int), PhaseBranch::quarter);
  }
  // Default z_c sits at half the admissible window criterion.
  s.extent = cfg.number("signal.extent",
                        0.5 * tolerance * inv_delta_sq / (s.band_limit * std::cosh(s.boost)));

  auto finish = [&](SuperoscParams p) {
    p.window_tolerance = tolerance;
    p.branch_sign = static_cast<int>(branch);
    p.validate();
    return p;
  };
  if (phase_int > 0) {
    SuperoscParams q = SuperoscParams::phase_locked(static_cast<int>(phase_int), PhaseBranch::quarter,
                                                    s.boost, s.extent, amplitude, s.band_limit);
    SuperoscParams t = SuperoscParams::phase_locked(static_cast<int>(phase_int),
                                                    PhaseBranch::three_quarter, s.boost, s.extent,
                                                    amplitude, s.band_limit);
    q.window_tolerance = t.window_tolerance = tolerance;
    s.pair.emplace(q, t, static_cast<int>(branch));
  } else {
    SuperoscParams p;
    p.amplitude = amplitude;
    p.inv_delta_sq = inv_delta_sq;
    p.boost = s.boost;
    p.band_limit = s.band_limit;
    p.extent = s.extent;
    s.single = finish(p);
  }
  const double kappa = cfg.number("window.kappa", default_kappa * s.band_limit);
  if (!(kappa >= 0.0)) cfg.fail("window.kappa", "must be >= 0");
  s.window = WindowSpec::gaussian(kappa);
  return s;
}

json params_json(const Setup& s) {
  const SuperoscParams& p = s.params();
  json j = {{"amplitude", p.amplitude},
            {"band_limit", s.band_limit},
            {"boost", s.boost},
            {"cosh_boost", std::cosh(s.boost)},
            {"delta", p.delta()},
            {"inv_delta_sq", p.inv_delta_sq},
            {"extent", s.extent},
            {"window_criterion", p.window_criterion()},
            {"superosc_wavenumber", s.wavenumber()},
            {"kappa", s.window.half_width}};
  if (s.pair) {
    j["phase_int"] = s.pair->quarter().phase_int;
    j["branch"] = s.pair->branch();
    j["inv_delta_sq_three_quarter"] = s.pair->three_quarter().inv_delta_sq;
  }
  return j;
}

const PairSynthesizer& require_pair(const Config& cfg, const Setup& s, const std::string& what) {
  if (!s.pair) cfg.fail("signal.phase_int", what + " needs a phase-locked pair (set phase_int)");
  return *s.pair;
}

UniformGrid local_grid(double lo, double hi, double k_fast) {
  const double dz = kPi / (16.0 * k_fast);
  const auto n = static_cast<Eigen::Index>(std::ceil((hi - lo) / dz)) + 1;
  return UniformGrid::from_range(lo, hi, n);
}

double resolve_gap(const Config& cfg, const Setup& s) {
  const std::string raw = cfg.text("particle.gap", "matched");
  if (raw == "matched") return s.wavenumber();
  const double gap = cfg.number("particle.gap");
  if (!(gap > 0.0)) cfg.fail("particle.gap", "must be > 0 or 'matched'");
  return gap;
}

TwoLevelParticle make_particle(const Config& cfg, const Setup& s) {
  TwoLevelParticle p;
  p.gap = resolve_gap(cfg, s);
  p.coupling = cfg.number("particle.coupling", 1.0);
  p.position = cfg.number("particle.position", 0.0);
  p.validate();
  return p;
}

std::string region_of(double z, double extent, double upper_root) {
  if (z >= -extent && z <= 0.0) return "superoscillatory";
  if (z > 0.0 && z <= upper_root) return "growth";
  return "far_field";
}

struct Context {
  const Config& cfg;
  const RunOptions& options;
  RunRecord& record;

  fs::path file(const std::string& name) const {
    record.files.push_back(name);
    return options.out_dir / name;
  }
};

// ---------------------------------------------------------------- synth

void run_synth(Context& c) {
  const Config& cfg = c.cfg;
  const Setup s = make_setup(cfg, 0.0);
  const std::string route = cfg.text("signal.route", s.pair ? "pair" : "bessel");
  const SuperoscParams& p = s.params();
  const double z_plus = s.upper_root();
  const double z_min = cfg.number("grid.z_min", -std::max(2.0 * s.extent, 0.5 * z_plus));
  const double z_max = cfg.number("grid.z_max", 1.5 * z_plus);
  if (!(z_max > z_min)) cfg.fail("grid.z_max", "must exceed grid.z_min");
  const double dz = kPi / (8.0 * s.k_fast());
  const long n = cfg.integer("grid.n", static_cast<long>(std::ceil((z_max - z_min) / dz)) + 1);
  if (n < 2 || n > (1L << 24)) cfg.fail("grid.n", "must lie in [2, 2^24]");
  const UniformGrid grid = UniformGrid::from_range(z_min, z_max, n);

  LogSynth f;
  SynthesisRoute tag;
  std::complex<double> reference_zero;
  if (route == "pair") {
    const PairSynthesizer& pair = require_pair(cfg, s, "route 'pair'");
    f = s.field(false);
    tag = SynthesisRoute::combined;
    reference_zero = synth_bessel(pair.quarter(), 0.0) +
                     std::complex<double>(0.0, pair.branch()) * synth_bessel(pair.three_quarter(), 0.0);
  } else {
    reference_zero = synth_bessel(p, 0.0);
    if (route == "bessel") {
      f = [p](double z) { return synth_bessel_log(p, z); };
      tag = SynthesisRoute::bessel;
    } else if (route == "integral") {
      f = [p](double z) { return LogComplex::from(synth_integral(p, z).value); };
      tag = SynthesisRoute::integral;
    } else if (route == "asymptotic") {
      f = [p](double z) { return LogComplex::from(synth_asymptotic(p, z)); };
      tag = SynthesisRoute::asymptotic;
    } else {
      cfg.fail("signal.route", "expected pair, bessel, integral or asymptotic");
    }
  }
  auto signal = std::make_shared<SampledSignal>(
      sample(f, grid, tag, false, s.k_fast(), s.window));
  const std::complex<double> at_zero = f(0.0).value() * std::exp(s.window.log_h(0.0));

  const GrowthPeak peak = locate_growth_peak(s.widest());
  Eigen::Index argmax = -1;
  double best = -std::numeric_limits<double>::infinity();
  json counts = {{"superoscillatory", 0}, {"growth", 0}, {"far_field", 0}};
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const double z = grid.z(i);
    const std::string region = region_of(z, s.extent, z_plus);
    counts[region] = counts[region].get<long>() + 1;
    const double la = signal->at(i).log_abs;
    if (region == "growth" && la > best) {
      best = la;
      argmax = i;
    }
  }

  json payload;
  payload["route"] = route;
  payload["params"] = params_json(s);
  payload["grid"] = {{"z_min", grid.z_min}, {"z_max", grid.z_max()}, {"n", grid.n}, {"dz", grid.dz}};
  payload["log_scale"] = signal->log_scale;
  payload["value_at_zero"] = {{"re", at_zero.real()}, {"im", at_zero.imag()}};
  payload["bessel_at_zero"] = {{"re", reference_zero.real()}, {"im", reference_zero.imag()}};
  payload["zero_relative_difference"] =
      std::abs(at_zero - reference_zero * std::exp(s.window.log_h(0.0))) /
      std::max(std::abs(reference_zero), 1e-300);
  payload["growth_peak"] = {{"predicted_location", s.widest().peak_location()},
                            {"located", peak.location},
                            {"predicted_log_magnitude", s.widest().peak_log_magnitude()},
                            {"located_log_magnitude", peak.log_magnitude},
                            {"sampled_argmax", argmax >= 0 ? json(grid.z(argmax)) : json()}};
  payload["regions"] = {{"window", {-s.extent, 0.0}},
                        {"growth", {0.0, z_plus}},
                        {"counts", counts}};
  if (!s.window.is_identity()) {
    const double edge = std::max(signal->at(0).log_abs, signal->at(grid.n - 1).log_abs);
    payload["tail_ratio"] = std::exp(edge - signal->log_scale);
  }
  c.record.payload = payload;
  c.record.signal = signal;

  if (c.options.write_files) {
    CsvWriter csv(c.file("synth.csv"), {"z", "re", "im", "abs"});
    for (Eigen::Index i = 0; i < grid.n; ++i) {
      const std::complex<double> v = signal->values[i];
      csv.row({grid.z(i), v.real(), v.imag(), std::abs(v)});
    }
    emit_figure_data(c.record, c.options.out_dir);
    c.record.files.push_back("figure.csv");
  }
}

// ---------------------------------------------------------------- spectrum

void run_spectrum(Context& c) {
  const Config& cfg = c.cfg;
  const Setup s = make_setup(cfg, 0.005);
  const PairSynthesizer& pair = require_pair(cfg, s, "spectrum");
  if (s.window.is_identity()) cfg.fail("window.kappa", "spectrum needs a window (kappa > 0)");
  const UniformGrid grid = pair_box(pair, s.window, false);
  const SampledSignal sig = sample_pair(pair, grid, s.window);
  const SpectralDensity spec = spectrum(sig, s.band_limit);
  const double kappa = s.window.half_width;
  const double leakage = spec.leakage(kappa);

  const double parseval = spec.values.squaredNorm() * spec.dk / (2.0 * kPi) /
                              (sig.values.squaredNorm() * grid.dz) - 1.0;
  const double target = pair.wavenumber();
  const double measured = mean_frequency(sig, -s.extent, 0.0);
  const double mid = instantaneous_frequency(sig, -0.5 * s.extent);
  double worst = 0.0;
  for (int j = 0; j <= 20; ++j) {
    const double z = -s.extent * (0.1 + 0.8 * j / 20.0);
    worst = std::max(worst, std::abs(instantaneous_frequency(sig, z) / target - 1.0));
  }
  const bool confined = leakage <= spec.leakage_tolerance;
  const bool superoscillates = std::abs(measured / target - 1.0) <= 0.01;

  json payload;
  payload["params"] = params_json(s);
  payload["grid"] = {{"z_min", grid.z_min}, {"n", grid.n}, {"dz", grid.dz}, {"period", grid.period()}};
  payload["k_min"] = spec.k_min;
  payload["dk"] = spec.dk;
  payload["band"] = {spec.band_lo, spec.band_hi};
  payload["leakage"] = leakage;
  payload["leakage_tolerance"] = spec.leakage_tolerance;
  payload["parseval_relative"] = parseval;
  payload["energy"] = scaled_json(spec.energy());
  payload["certificate"] = {{"target_wavenumber", target},
                            {"window_frequency", measured},
                            {"relative_error", measured / target - 1.0},
                            {"measured_at_mid_window", mid},
                            {"max_relative_error_middle_80", worst},
                            {"confined", confined},
                            {"superoscillates", superoscillates},
                            {"pass", confined && superoscillates}};
  c.record.payload = payload;
  if (!confined) c.record.warnings.push_back("spectral leakage above tolerance");

  if (c.options.write_files) {
    CsvWriter csv(c.file("spectrum.csv"), {"k", "re", "im", "abs"});
    for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
      const double k = spec.k(i);
      if (k < -2.0 * s.band_limit || k > 3.0 * s.band_limit) continue;
      const std::complex<double> v = spec.values[i];
      csv.row({k, v.real(), v.imag(), std::abs(v)});
    }
  }
}

// ---------------------------------------------------------------- freq-map

void run_freq_map(Context& c) {
  const Config& cfg = c.cfg;
  const Setup s = make_setup(cfg, 0.005);
  const std::string field = cfg.text("freq.field", "complex");
  if (field != "complex" && field != "real") cfg.fail("freq.field", "expected complex or real");
  const bool real = field == "real";
  if (real && s.pair && s.pair->branch() != 1)
    cfg.fail("signal.branch", "the real field needs branch +1");
  const long points = cfg.integer("freq.points", 41);
  if (points < 1) cfg.fail("freq.points", "must be >= 1");

  const double margin = 32.0 * kPi / s.k_fast();
  const UniformGrid grid = local_grid(-s.extent - margin, margin, s.k_fast());
  const SampledSignal sig = sample(s.field(real), grid, SynthesisRoute::combined, real,
                                   s.k_fast(), s.window);
  const double target = s.wavenumber();

  std::vector<double> zs;
  std::vector<std::optional<double>> freqs;
  double worst = 0.0;
  double sum = 0.0;
  int measured = 0;
  for (long j = 0; j < points; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(points);
    const double z = -s.extent * (1.0 - u);
    zs.push_back(z);
    try {
      const double k = instantaneous_frequency(sig, z);
      freqs.emplace_back(k);
      sum += k;
      ++measured;
      if (u >= 0.1 && u <= 0.9) worst = std::max(worst, std::abs(k / target - 1.0));
    } catch (const NodeError& e) {
      freqs.emplace_back();
      c.record.warnings.push_back(std::string("z = ") + format_number(z) + ": " + e.what());
    } catch (const EdgeError& e) {
      freqs.emplace_back();
      c.record.warnings.push_back(std::string("z = ") + format_number(z) + ": " + e.what());
    }
  }

  json payload;
  payload["params"] = params_json(s);
  payload["field"] = field;
  payload["target_wavenumber"] = target;
  payload["points"] = points;
  payload["measured"] = measured;
  payload["mean_frequency"] = measured ? json(sum / measured) : json();
  payload["max_relative_error_middle_80"] = worst;
  json samples = json::array();
  for (std::size_t i = 0; i < zs.size(); ++i)
    samples.push_back({{"z", zs[i]}, {"k", freqs[i] ? json(*freqs[i]) : json()}});
  payload["samples"] = samples;

  if (cfg.flag("freq.far_field", s.boost > 0.0)) {
    // Far field behind the window: the unwindowed real field oscillates at about k0.
    const double z_far = -100.0 * std::cosh(s.boost) * s.params().inv_delta_sq / s.band_limit;
    const double span = 40.0 * kPi / s.band_limit;
    const UniformGrid far = local_grid(z_far - span, z_far + span, s.k_fast());
    SampledSignal far_sig = sample(s.field(true), far, SynthesisRoute::combined, true, s.k_fast());
    // Crossings of the oscillating part; the far field rides on a slowly varying offset.
    far_sig.logs.clear();
    far_sig.values.array() -= far_sig.values.mean();
    const double k = instantaneous_frequency(far_sig, z_far);
    payload["far_field"] = {{"z", z_far}, {"frequency", k}, {"ratio_to_band_limit", k / s.band_limit}};
  }
  c.record.payload = payload;

  if (c.options.write_files) {
    CsvWriter csv(c.file("freq_map.csv"), {"z", "frequency", "target"});
    for (std::size_t i = 0; i < zs.size(); ++i)
      csv.row({zs[i], freqs[i] ? *freqs[i] : std::numeric_limits<double>::quiet_NaN(), target});
  }
}

// ---------------------------------------------------------------- transition

void run_transition(Context& c) {
  const Config& cfg = c.cfg;
  const Setup s = make_setup(cfg, 0.005);
  const PairSynthesizer& pair = require_pair(cfg, s, "transition");
  const TwoLevelParticle particle = make_particle(cfg, s);
  const double period = 2.0 * kPi / particle.gap;
  const double t_min = cfg.number("time.t_min", 5.0 * period);
  const double t_max = cfg.number("time.t_max", s.extent);
  if (!(t_min > 0.0 && t_max > t_min)) cfg.fail("time.t_max", "need 0 < t_min < t_max");
  const long points = cfg.integer("time.points", 60);
  if (points < 2) cfg.fail("time.points", "must be >= 2");
  const std::optional<double> long_t1 = cfg.maybe_number("time.long_t1");
  const std::optional<double> long_t2 = cfg.maybe_number("time.long_t2");
  if (long_t1.has_value() != long_t2.has_value())
    cfg.fail("time.long_t2", "long_t1 and long_t2 go together");

  double reach = t_max;
  if (long_t2) reach = std::max({reach, *long_t1, *long_t2});
  const double margin = 32.0 * kPi / s.k_fast();
  const UniformGrid grid =
      local_grid(particle.position - reach - margin, particle.position + margin, s.k_fast());
  const SampledSignal sig = make_real_superosc(pair, pair.wavenumber(), grid, s.window);

  Eigen::VectorXd times(points);
  for (long i = 0; i < points; ++i)
    times[i] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / static_cast<double>(points - 1));
  const ProbabilityCurve curve = probability_curve(sig, particle, times);
  const ExponentFit fit = fit_exponent(curve, t_min, t_max);
  const double amplitude =
      fit_window_amplitude(sig, pair.wavenumber(), particle.position - s.extent, particle.position);

  const double mono_lo = 10.0 * period;
  double worst = 0.0;
  Eigen::VectorXd reference(points);
  for (long i = 0; i < points; ++i) {
    reference[i] = monochromatic_reference(particle.coupling, amplitude, times[i]);
    if (times[i] >= mono_lo && times[i] <= s.extent)
      worst = std::max(worst, std::abs(curve.values[i] / reference[i] - 1.0));
  }

  json payload;
  payload["params"] = params_json(s);
  payload["gap"] = particle.gap;
  payload["matched"] = std::abs(particle.gap - s.wavenumber()) <= 1e-12 * s.wavenumber();
  payload["coupling"] = particle.coupling;
  payload["position"] = particle.position;
  payload["window_amplitude"] = amplitude;
  payload["fit"] = {{"exponent", fit.exponent},
                    {"log_prefactor", fit.log_prefactor},
                    {"residual_rms", fit.residual_rms},
                    {"t_lo", fit.t_lo},
                    {"t_hi", fit.t_hi},
                    {"points", fit.points}};
  payload["monochromatic"] = {{"max_relative_deviation", worst}, {"t_lo", mono_lo}, {"t_hi", s.extent}};
  payload["breakdown"] = curve.any_breakdown();
  if (long_t1) {
    const double p1 = transition_probability(sig, particle, *long_t1).value;
    const double p2 = transition_probability(sig, particle, *long_t2).value;
    payload["long_time"] = {{"t1", *long_t1}, {"t2", *long_t2}, {"p1", p1}, {"p2", p2}, {"ratio", p2 / p1}};
  }
  c.record.payload = payload;
  if (curve.any_breakdown())
    c.record.warnings.push_back("P(t) above 0.1: first-order result not trusted");

  if (c.options.write_files) {
    CsvWriter csv(c.file("transition.csv"), {"t", "probability", "reference", "ratio", "breakdown"});
    for (long i = 0; i < points; ++i)
      csv.row({times[i], curve.values[i], reference[i], curve.values[i] / reference[i],
               static_cast<long>(curve.breakdown[static_cast<std::size_t>(i)])});
  }
}

// ---------------------------------------------------------------- detune

void run_detune(Context& c) {
  const Config& cfg = c.cfg;
  const Setup s = make_setup(cfg, 0.005);
  const PairSynthesizer& pair = require_pair(cfg, s, "detune");
  const TwoLevelParticle particle = make_particle(cfg, s);
  std::vector<double> probes = {1.2, 1.6, 2.4, 3.2};
  if (cfg.has("particle.probes")) probes = cfg.numbers("particle.probes");
  for (double& g : probes) {
    if (!(g > 0.0)) cfg.fail("particle.probes", "probe gaps must be > 0");
    g *= s.band_limit;
  }
  const double t = cfg.has("time.t_max")
                       ? cfg.number("time.t_max")
                       : cfg.number("time.omega_t_over_pi", 100.0) * kPi / particle.gap;
  const double margin = 32.0 * kPi / s.k_fast();
  const UniformGrid grid =
      local_grid(particle.position - t - margin, particle.position + margin, s.k_fast());
  const SampledSignal sig = make_real_superosc(pair, pair.wavenumber(), grid, s.window);
  const DetuningScan scan = detuning_scan(sig, particle, probes, t, s.extent);

  json probe_json = json::array();
  for (std::size_t i = 0; i < scan.gaps.size(); ++i) {
    const Probability& p = scan.probabilities[i];
    probe_json.push_back({{"gap", scan.gaps[i]},
                          {"probability", p.value},
                          {"matched_over_probe", p.value > 0.0 ? json(scan.matched.value / p.value) : json()},
                          {"breakdown", p.breakdown}});
  }
  json payload;
  payload["params"] = params_json(s);
  payload["t"] = t;
  payload["omega_t"] = particle.gap * t;
  payload["matched"] = {{"gap", particle.gap}, {"probability", scan.matched.value}, {"breakdown", scan.matched.breakdown}};
  payload["probes"] = probe_json;
  payload["selectivity"] = scan.selectivity();
  c.record.payload = payload;
  if (scan.matched.breakdown) c.record.warnings.push_back("matched P above 0.1: first-order result not trusted");

  if (c.options.write_files) {
    CsvWriter csv(c.file("detune.csv"), {"gap", "probability", "matched_over_probe"});
    for (std::size_t i = 0; i < scan.gaps.size(); ++i) {
      const double p = scan.probabilities[i].value;
      csv.row({scan.gaps[i], p, scan.matched.value / p});
    }
  }
}

// ---------------------------------------------------------------- energy

json report_json(const EnergyReport& r) {
  return {{"omega_t", r.gap * r.t},
          {"t", r.t},
          {"gap", r.gap},
          {"energy_before", scaled_json(r.energy_before)},
          {"i1", scaled_json(r.i1)},
          {"i2", r.i2},
          {"i2_over_gap", r.i2 / r.gap},
          {"i3", r.i3},
          {"i3_over_gap", r.i3 / r.gap},
          {"i3_double_cutoff", r.i3_double_cutoff},
          {"energy_after", scaled_json(r.energy_after)},
          {"residual", r.residual},
          {"denominator", r.denominator},
          {"probability", r.probability},
          {"length", r.length},
          {"uv_cutoff", r.uv_cutoff},
          {"beyond_window", r.beyond_window},
          {"vacuous_conditioning", r.vacuous_conditioning},
          {"breakdown", r.breakdown}};
}

void run_energy(Context& c) {
  const Config& cfg = c.cfg;
  const Setup s = make_setup(cfg, 0.005);
  const PairSynthesizer& pair = require_pair(cfg, s, "energy");
  const TwoLevelParticle particle = make_particle(cfg, s);
  if (s.window.is_identity()) cfg.fail("window.kappa", "energy needs a window (kappa > 0)");
  const double length = cfg.number("modes.length", 1e4 / s.band_limit);
  if (!(length > 0.0)) cfg.fail("modes.length", "must be > 0");

  // Hump box of period L: tighten the support cut until it fits.
  UniformGrid box;
  for (double drop : {40.0, 30.0, 25.0, 20.0}) {
    box = pair_box(pair, s.window, true, length, false, drop);
    if (std::abs(box.period() - length) <= 1e-9 * length) break;
  }
  if (std::abs(box.period() - length) > 1e-9 * length)
    c.record.warnings.push_back("mode box enlarged to L = " + format_number(box.period()) +
                                " to hold the windowed field");
  ModeGrid modes;
  modes.length = box.period();
  modes.k_max = cfg.number("modes.k_max", s.band_limit + 12.0 * s.window.half_width);
  modes.uv_cutoff = cfg.number("modes.k_uv", 50.0 * s.band_limit);
  modes.validate();

  const SampledSignal field = make_real_superosc(pair, pair.wavenumber(), box, s.window);
  const CoherentAmplitudes ca = amplitudes_from_spectrum(spectrum(field, s.band_limit), modes);
  const EnergyBefore eb = energy_before(ca);

  const double headline = cfg.number("time.omega_t_over_pi", 100.0);
  std::vector<double> ladder = {40.0, 100.0, 400.0};
  if (cfg.has("time.ladder_over_pi")) ladder = cfg.numbers("time.ladder_over_pi");
  double reach = headline;
  for (double v : ladder) reach = std::max(reach, v);
  reach *= kPi / particle.gap;
  const double margin = 32.0 * kPi / s.k_fast();
  const UniformGrid near = local_grid(particle.position - reach - margin, particle.position + margin,
                                      s.k_fast());
  const SampledSignal local = make_real_superosc(pair, pair.wavenumber(), near, s.window);

  const double inf = std::numeric_limits<double>::infinity();
  const EnergyReport main =
      energy_balance(ca, local, particle, headline * kPi / particle.gap, s.extent, inf);
  std::vector<EnergyReport> reports;
  for (double v : ladder)
    reports.push_back(energy_balance(ca, local, particle, v * kPi / particle.gap, s.extent, inf));
  bool non_increasing = true;
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (std::abs(reports[i].residual) > std::abs(reports[i - 1].residual)) non_increasing = false;

  ModeGrid wide = modes;
  wide.length *= 10.0;
  const double i3_wide = main.vacuous_conditioning
                             ? 0.0
                             : compute_I3(wide, particle.gap, main.t, main.denominator);

  json ladder_json = json::array();
  for (const auto& r : reports) ladder_json.push_back(report_json(r));
  json payload;
  payload["params"] = params_json(s);
  payload["box"] = {{"z_min", box.z_min}, {"n", box.n}, {"dz", box.dz}, {"period", box.period()}};
  payload["modes"] = {{"length", modes.length}, {"k_max", modes.k_max}, {"k_uv", modes.uv_cutoff},
                      {"count", modes.count()}};
  payload["energy_before"] = scaled_json(eb.spectral);
  payload["energy_before_modes"] = scaled_json(eb.modes);
  payload["energy_before_relative_gap"] = eb.relative_gap();
  payload["classical"] = ca.classical;
  payload["log_min_alpha"] = ca.log_min_alpha();
  payload["coupling"] = particle.coupling;
  payload["report"] = report_json(main);
  payload["ladder_over_pi"] = ladder;
  payload["ladder"] = ladder_json;
  payload["ladder_non_increasing"] = non_increasing;
  payload["i3_length_scaling"] = {{"factor", 10.0},
                                  {"i3_at_10L", i3_wide},
                                  {"ratio", main.i3 != 0.0 ? json(i3_wide / main.i3) : json()}};
  c.record.payload = payload;

  std::vector<const EnergyReport*> all = {&main};
  for (const auto& r : reports) all.push_back(&r);
  for (const EnergyReport* r : all) {
    const std::string at = "Omega t = " + format_number(r->gap * r->t);
    if (r->beyond_window) c.record.warnings.push_back(at + ": t beyond the superoscillatory window");
    if (r->breakdown) c.record.warnings.push_back(at + ": P above 0.1, first-order result not trusted");
    if (r->vacuous_conditioning) c.record.warnings.push_back(at + ": zero excitation, I3 undefined");
  }
  if (main.i3 != 0.0)
    c.record.warnings.push_back("cutoff sensitivity: I3(2 k_uv) / I3(k_uv) = " +
                                format_number(main.i3_double_cutoff / main.i3));

  if (c.options.write_files) {
    CsvWriter csv(c.file("energy_ladder.csv"),
                  {"omega_t_over_pi", "t", "i2_over_gap", "i3_over_gap", "residual", "beyond_window"});
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const EnergyReport& r = reports[i];
      csv.row({ladder[i], r.t, r.i2 / r.gap, r.i3 / r.gap, r.residual, static_cast<long>(r.beyond_window)});
    }
  }

  for (const EnergyReport* r : all)
    if (!r->vacuous_conditioning && std::abs(r->residual) > kBalanceTolerance)
      throw BalanceViolation("energy: |r| = " + format_number(std::abs(r->residual)) +
                                 " at Omega t = " + format_number(r->gap * r->t),
                             *r);
}

// ---------------------------------------------------------------- sweep

void run_sweep(Context& c) {
  const Config& cfg = c.cfg;
  const std::string experiment = cfg.text("sweep.experiment");
  if (experiment == "sweep" ||
      std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    cfg.fail("sweep.experiment", "expected one of synth, spectrum, freq-map, transition, detune, energy");

  std::vector<std::string> keys;
  std::vector<std::vector<double>> ranges;
  for (const auto& [key, value] : cfg.entries("vary")) {
    if (key.find('.') == std::string::npos || key.rfind("vary.", 0) == 0 || key.rfind("sweep.", 0) == 0)
      cfg.fail("vary." + key, "expected section.key of a varied field");
    if (!kKnownKeys.count(key)) cfg.fail("vary." + key, "unknown field '" + key + "'");
    try {
      ranges.push_back(parse_range(value));
    } catch (const std::invalid_argument& e) {
      cfg.fail("vary." + key, e.what());
    }
    keys.push_back(key);
  }
  std::size_t total = keys.empty() ? 0 : 1;
  for (const auto& r : ranges) total *= r.size();

  // Cartesian order: the first [vary] entry is the outermost loop.
  auto point_of = [&](std::size_t index) {
    std::vector<double> values(keys.size());
    for (std::size_t d = keys.size(); d-- > 0;) {
      values[d] = ranges[d][index % ranges[d].size()];
      index /= ranges[d].size();
    }
    return values;
  };

  std::vector<std::optional<json>> results(total);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::vector<double> values = point_of(i);
      Config point = cfg;
      json point_json = json::object();
      for (std::size_t d = 0; d < keys.size(); ++d) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", values[d]);
        point.set(keys[d], buf);
        point_json[keys[d]] = values[d];
      }
      json line = {{"index", i}, {"point", point_json}};
      RunOptions opts = c.options;
      opts.write_files = false;
      try {
        const RunRecord r = run_experiment(experiment, point, opts);
        line["status"] = "ok";
        line["config_hash"] = r.config_hash;
        line["payload"] = r.payload;
        line["warnings"] = r.warnings;
      } catch (const std::exception& e) {
        line["status"] = "error";
        line["error"] = e.what();
        line["exit_code"] = exit_code_for(e);
      }
      {
        std::lock_guard lock(mutex);
        results[i] = std::move(line);
      }
      ready.notify_all();
    }
  };
  const int jobs = std::max(1, std::min<int>(c.options.jobs, static_cast<int>(std::max<std::size_t>(total, 1))));
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);

  std::optional<std::ofstream> out;
  if (c.options.write_files) {
    const fs::path path = c.file("sweep.jsonl");
    fs::create_directories(c.options.out_dir);
    out.emplace(path);
    if (!*out) throw std::runtime_error("cannot write " + path.string());
  }
  std::size_t failures = 0;
  for (std::size_t i = 0; i < total; ++i) {
    json line;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return results[i].has_value(); });
      line = std::move(*results[i]);
      results[i].reset();
    }
    if (line["status"] != "ok") ++failures;
    if (out) *out << line.dump() << '\n' << std::flush;
  }
  for (auto& t : pool) t.join();

  c.record.payload = {{"experiment", experiment},
                      {"keys", keys},
                      {"points", total},
                      {"failures", failures}};
  if (failures) c.record.warnings.push_back(std::to_string(failures) + " sweep point(s) failed");
}

}  // namespace

std::vector<double> parse_range(const std::string& raw) {
  const std::string spec = boost::algorithm::trim_copy(raw);
  std::vector<std::string> parts;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    const std::string t = boost::algorithm::trim_copy(s);
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v))
      throw std::invalid_argument("bad number '" + t + "' in range '" + spec + "'");
    return v;
  };
  std::string body = spec;
  std::string kind = "list";
  if (const auto colon = spec.find(':'); colon != std::string::npos) {
    kind = spec.substr(0, colon);
    body = spec.substr(colon + 1);
  }
  std::vector<double> out;
  if (kind == "list") {
    boost::algorithm::split(parts, body, boost::algorithm::is_any_of(","));
    for (const auto& p : parts)
      if (!boost::algorithm::trim_copy(p).empty()) out.push_back(number(p));
    return out;
  }
  if (kind != "lin" && kind != "log")
    throw std::invalid_argument("range kind must be list, lin or log in '" + spec + "'");
  boost::algorithm::split(parts, body, boost::algorithm::is_any_of(":"));
  if (parts.size() != 3) throw std::invalid_argument("expected " + kind + ":start:stop:count in '" + spec + "'");
  const double a = number(parts[0]);
  const double b = number(parts[1]);
  const double n = number(parts[2]);
  if (n < 0 || n != std::floor(n)) throw std::invalid_argument("count must be a non-negative integer in '" + spec + "'");
  if (kind == "log" && !(a > 0.0 && b > 0.0)) throw std::invalid_argument("log range needs positive ends in '" + spec + "'");
  const auto count = static_cast<long>(n);
  for (long i = 0; i < count; ++i) {
    const double u = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(kind == "lin" ? a + (b - a) * u : a * std::pow(b / a, u));
  }
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e))
    return 2;
  return 3;
}

fs::path emit_figure_data(const RunRecord& record, const fs::path& dir) {
  if (record.experiment != "synth" || !record.signal || !record.payload.contains("regions"))
    throw MissingPayload("emit_figure_data: record has no synth payload");
  const SampledSignal& s = *record.signal;
  const double extent = -record.payload["regions"]["window"][0].get<double>();
  const double upper = record.payload["regions"]["growth"][1].get<double>();
  const fs::path path = dir / "figure.csv";
  CsvWriter csv(path, {"z", "re", "im", "abs", "log_abs", "region"});
  for (Eigen::Index i = 0; i < s.grid.n; ++i) {
    const double z = s.grid.z(i);
    const std::complex<double> v = s.values[i];
    csv.row({z, v.real(), v.imag(), std::abs(v), s.at(i).log_abs, region_of(z, extent, upper)});
  }
  return path;
}

RunRecord run_experiment(const std::string& experiment, const Config& config,
                         const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  config.require_known(kKnownKeys);
  RunRecord record;
  record.experiment = experiment;
  record.config_hash = config.hash();
  record.tool_version = tool_version();
  record.config = config.canonical();
  Context c{config, options, record};

  static const std::map<std::string, std::function<void(Context&)>> runners = {
      {"synth", run_synth},   {"spectrum", run_spectrum}, {"freq-map", run_freq_map},
      {"transition", run_transition}, {"detune", run_detune}, {"energy", run_energy},
      {"sweep", run_sweep}};
  const auto it = runners.find(experiment);
  if (it == runners.end()) throw ConfigError("unknown experiment '" + experiment + "'", "experiment");

  std::exception_ptr deferred;
  try {
    it->second(c);
  } catch (const BalanceViolation&) {
    // The failing report is still worth writing out.
    deferred = std::current_exception();
  }
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.write_files) {
    record.files.insert(record.files.begin(), experiment + ".json");
    write_json(options.out_dir / (experiment + ".json"), record.to_json());
  }
  if (deferred) std::rethrow_exception(deferred);
  return record;
}

}  // namespace superosc::harness
