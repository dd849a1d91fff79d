#include "samp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/LU>

namespace samp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kZ95 = 1.96;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double wrap_angle(double w) {
  w = std::remainder(w, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

struct MethodOutcome {
  Index order = 0;
  ComponentScore score;
  double seconds = 0.0;
  bool failed = false;
};

struct TrialOutcome {
  std::vector<MethodOutcome> methods;
  std::vector<ModeFeature> features;
};

class TrialRunner {
 public:
  TrialRunner(const ExperimentConfig& config, const SignalSpec& spec, double penalty_scale)
      : config_(config), spec_(spec), penalty_scale_(penalty_scale) {}

  TrialOutcome run(const TimeSeries& y, bool keep_features) const {
    TrialOutcome out;
    out.methods.resize(config_.methods.size());
    std::optional<RVector> ite_terms;
    double ite_seconds = 0.0;

    for (std::size_t k = 0; k < config_.methods.size(); ++k) {
      const std::string& name = config_.methods[k];
      MethodOutcome& m = out.methods[k];
      const auto start = Clock::now();
      try {
        ParameterEstimates est;
        if (name == "SAMP") {
          SampAnalysis a = samp_analyze(y, config_.samp);
          if (keep_features) out.features = a.detection.features;
          est = std::move(a.estimates);
        } else if (name == "AIC" || name == "BIC") {
          est = run_ite(y, name == "AIC" ? InformationCriterion::AIC : InformationCriterion::BIC, ite_terms,
                        ite_seconds);
        } else {
          est = classical_pipeline(y, config_.classical, *parse_classical_detector(name));
        }
        m.order = est.order;
        m.score = match_and_score(est, spec_, penalty_scale_);
      } catch (const std::exception&) {
        m.failed = true;
        m.order = -1;
        m.score = match_and_score(ParameterEstimates{}, spec_, penalty_scale_);
      }
      m.seconds = seconds_since(start);
      if (name == "AIC" || name == "BIC") m.seconds += ite_seconds;
    }
    return out;
  }

 private:
  // AIC and BIC share the per-order fits; the first caller pays for them and
  // both report that cost.
  ParameterEstimates run_ite(const TimeSeries& y, InformationCriterion criterion, std::optional<RVector>& terms,
                             double& terms_seconds) const {
    const Index l = config_.classical.pencil_parameter.value_or(default_pencil_parameter(y.size()));
    const HankelPair pair = build_hankel(y, l);
    const SvdFactors svd = svd_y0(pair);
    if (!terms) {
      const auto start = Clock::now();
      const Index m_max = std::min(config_.classical.ite_max_order.value_or(l), svd.rank);
      terms = ite_fit_terms(y, l, m_max);
      terms_seconds = seconds_since(start);
    }
    Index order = ite_select(*terms, y.size(), criterion);
    while (order > 0 && !(svd.sigma[order - 1] > 0.0)) --order;
    return classical_fit(y, pair, svd, order);
  }

  const ExperimentConfig& config_;
  const SignalSpec& spec_;
  double penalty_scale_;
};

std::vector<TrialOutcome> run_trials(const ExperimentConfig& config, const SignalSpec& spec, const NoiseModel& noise,
                                     double penalty_scale, std::size_t sweep_index) {
  const TimeSeries clean = synthesize(spec);
  const TrialRunner runner(config, spec, penalty_scale);
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int t = next++; t < config.trials; t = next++) {
      const TimeSeries y = apply_noise(clean, noise, trial_seed(config.seed, sweep_index, t));
      outcomes[static_cast<std::size_t>(t)] = runner.run(y, config.dump_features && t == 0);
    }
  };

  const int threads = std::max(1, std::min(config.threads, config.trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return outcomes;
}

PointMetrics aggregate(const std::vector<TrialOutcome>& outcomes, std::size_t method, Index truth) {
  const Index m = truth;
  const int n = static_cast<int>(outcomes.size());
  PointMetrics p;
  p.trials = n;
  RVector sum_e = RVector::Zero(m), sum_e2 = RVector::Zero(m);
  RVector sum_s = RVector::Zero(m), sum_s2 = RVector::Zero(m);
  int hits = 0;
  double seconds = 0.0;
  for (const auto& o : outcomes) {
    const MethodOutcome& r = o.methods[method];
    if (r.failed) ++p.failures;
    if (r.order == truth) ++hits;
    seconds += r.seconds;
    sum_e += r.score.error;
    sum_e2 += r.score.error.cwiseAbs2();
    sum_s += r.score.squared;
    sum_s2 += r.score.squared.cwiseAbs2();
  }
  const double dn = static_cast<double>(n);
  p.p_d = hits / dn;
  p.p_d_ci = kZ95 * std::sqrt(p.p_d * (1.0 - p.p_d) / dn);
  p.mean_seconds = seconds / dn;
  p.bias = sum_e / dn;
  p.rmse.resize(m);
  p.bias_ci.resize(m);
  p.rmse_ci.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double var_e = std::max(0.0, sum_e2[i] / dn - p.bias[i] * p.bias[i]);
    p.bias_ci[i] = kZ95 * std::sqrt(var_e / dn);
    const double mse = sum_s[i] / dn;
    p.rmse[i] = std::sqrt(mse);
    const double var_s = std::max(0.0, sum_s2[i] / dn - mse * mse);
    p.rmse_ci[i] = p.rmse[i] > 0.0 ? kZ95 * std::sqrt(var_s / dn) / (2.0 * p.rmse[i]) : 0.0;
  }
  return p;
}

// Amplitude of the eigenvalue nearest to each true pole, without reuse.
CVector pick_nearest(const CVector& eigenvalues, const CVector& amplitudes, const CVector& poles) {
  CVector chosen(poles.size());
  std::vector<bool> used(static_cast<std::size_t>(eigenvalues.size()), false);
  for (Index i = 0; i < poles.size(); ++i) {
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < eigenvalues.size(); ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double d = std::abs(eigenvalues[k] - poles[i]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chosen[i] = amplitudes[best];
  }
  return chosen;
}

}  // namespace

void Scenario::validate() const {
  require(components == 2 || components == 4, "scenario supports 2 or 4 components");
  require(samples > 2 * components, "scenario needs N > 2M");
  if (separation) require(*separation > 0.0, "separation must be positive");
}

SignalSpec scenario_spec(const Scenario& scenario, SweepKind kind, double x) {
  Scenario s = scenario;
  if (kind == SweepKind::Samples) {
    require(x >= 1.0 && std::floor(x) == x, "sample sweep values must be whole numbers");
    s.samples = static_cast<Index>(x);
  }
  if (kind == SweepKind::Separation) s.separation = x;
  s.validate();

  const double sep = s.separation.value_or(kTwoPi / static_cast<double>(s.samples));
  const double a1 = s.damped ? 0.03 : 0.0;
  const double a2 = s.damped ? 0.05 : 0.0;
  SignalSpec spec;
  spec.sample_count = s.samples;
  spec.components.push_back({Complex(1.0, 0.0), a1, wrap_angle(s.theta1)});
  spec.components.push_back({Complex(1.0, 0.0), a2, wrap_angle(s.theta1 + sep)});
  if (s.components == 4) {
    spec.components.push_back({Complex(1.0, 0.0), a1, wrap_angle(-s.theta1)});
    spec.components.push_back({Complex(1.0, 0.0), a2, wrap_angle(-(s.theta1 + sep))});
  }
  spec.validate();
  return spec;
}

double scenario_variance(const Scenario& scenario, SweepKind kind, double x) {
  const SignalSpec spec = scenario_spec(scenario, kind, x);
  return noise_variance_for_snr(spec, kind == SweepKind::SnrDb ? x : scenario.snr_db);
}

double PenaltyConfig::scale_for(Index current_n) const {
  if (fixed_scale) {
    require(*fixed_scale > 0.0, "penalty scale must be positive");
    return *fixed_scale;
  }
  return static_cast<double>(current_n);
}

std::vector<std::string> known_methods() { return {"SAMP", "GAP", "SDD", "EFF", "AIC", "BIC"}; }

bool is_known_method(const std::string& name) {
  const auto all = known_methods();
  return std::find(all.begin(), all.end(), name) != all.end();
}

void ExperimentConfig::validate() const {
  scenario.validate();
  require(!sweep.grid.empty(), "sweep grid must be non-empty");
  for (std::size_t i = 1; i < sweep.grid.size(); ++i)
    require(sweep.grid[i] > sweep.grid[i - 1], "sweep grid must be strictly increasing");
  require(trials >= 1, "trials must be >= 1");
  require(threads >= 1, "threads must be >= 1");
  require(!methods.empty(), "at least one method is required");
  for (const auto& m : methods) require(is_known_method(m), "unknown method '" + m + "'");
  NoiseModel probe = noise;
  probe.variance = 1.0;
  probe.validate();
  samp.grid.validate();
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t sweep_index, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(sweep_index), static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

double PointMetrics::average_rmse() const {
  if (rmse.size() == 0) return 0.0;
  return std::sqrt(rmse.cwiseAbs2().mean());
}

std::size_t MetricSeries::method_index(const std::string& name) const {
  for (std::size_t k = 0; k < methods.size(); ++k)
    if (methods[k] == name) return k;
  throw InvalidArgument("method '" + name + "' not in this series");
}

MetricSeries run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  MetricSeries series;
  series.label = config.label;
  series.x = config.sweep.grid;
  series.methods = config.methods;
  series.points.assign(config.methods.size(), {});

  for (std::size_t s = 0; s < series.x.size(); ++s) {
    const double x = series.x[s];
    const SignalSpec spec = scenario_spec(config.scenario, config.sweep.kind, x);
    NoiseModel noise = config.noise;
    noise.variance = scenario_variance(config.scenario, config.sweep.kind, x);
    const double scale = config.penalty.scale_for(spec.sample_count);

    const auto outcomes = run_trials(config, spec, noise, scale, s);
    for (std::size_t k = 0; k < config.methods.size(); ++k)
      series.points[k].push_back(aggregate(outcomes, k, spec.order()));
    series.crb.push_back(crb_frequencies(spec, noise.variance));
    if (config.dump_features)
      for (const auto& f : outcomes.front().features) series.features.push_back({x, f});
  }

  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    std::vector<double> pd;
    for (const auto& p : series.points[k]) pd.push_back(p.p_d);
    series.auc.push_back(series.x.size() >= 2 ? auc(series.x, pd) : std::numeric_limits<double>::quiet_NaN());
  }
  return series;
}

double detection_probability(const std::vector<Index>& orders, Index truth) {
  require(!orders.empty(), "detection probability needs at least one trial");
  const auto hits = std::count(orders.begin(), orders.end(), truth);
  return static_cast<double>(hits) / static_cast<double>(orders.size());
}

double auc(const std::vector<double>& x, const std::vector<double>& pd) {
  require(x.size() >= 2, "AUC needs at least two points");
  require(x.size() == pd.size(), "AUC needs one p_d per x");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    require(x[i] > x[i - 1], "AUC needs strictly increasing x");
    area += 0.5 * (pd[i] + pd[i - 1]) * (x[i] - x[i - 1]);
  }
  return area / (x.back() - x.front());
}

ComponentScore match_and_score(const ParameterEstimates& estimates, const SignalSpec& truth, double penalty_scale) {
  const Index m = truth.order();
  ComponentScore s;
  s.error = RVector::Zero(m);
  s.squared = RVector::Zero(m);
  if (estimates.order != m) {
    const double charge = kTwoPi / penalty_scale;
    s.error.setConstant(charge);
    s.squared.setConstant(charge * charge);
    return s;
  }
  s.order_matched = true;

  const CVector poles = truth.poles();
  CVector est(m);
  for (Index k = 0; k < m; ++k) est[k] = std::exp(Complex(-estimates.dampings[k], estimates.frequencies[k]));

  // Greedy: repeatedly take the closest remaining (truth, estimate) pair.
  std::vector<bool> truth_used(static_cast<std::size_t>(m), false), est_used(static_cast<std::size_t>(m), false);
  for (Index round = 0; round < m; ++round) {
    Index bi = -1, bk = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (truth_used[static_cast<std::size_t>(i)]) continue;
      for (Index k = 0; k < m; ++k) {
        if (est_used[static_cast<std::size_t>(k)]) continue;
        const double d = std::abs(poles[i] - est[k]);
        if (d < best) {
          best = d;
          bi = i;
          bk = k;
        }
      }
    }
    truth_used[static_cast<std::size_t>(bi)] = true;
    est_used[static_cast<std::size_t>(bk)] = true;
    const double e = wrap_angle(estimates.frequencies[bk] - truth.components[static_cast<std::size_t>(bi)].frequency);
    s.error[bi] = e;
    s.squared[bi] = e * e;
  }
  return s;
}

CMatrix signal_jacobian(const SignalSpec& spec, bool include_damping) {
  const Index n = spec.sample_count;
  const Index per = include_damping ? 4 : 3;
  CMatrix j(n, per * spec.order());
  for (Index i = 0; i < spec.order(); ++i) {
    const auto& c = spec.components[static_cast<std::size_t>(i)];
    const double mag = std::abs(c.amplitude);
    const Complex phase = mag > 0.0 ? c.amplitude / mag : Complex(1.0, 0.0);
    for (Index k = 0; k < n; ++k) {
      const double nk = static_cast<double>(k);
      const Complex zk = std::exp(Complex(-c.damping, c.frequency) * nk);
      Index col = per * i;
      j(k, col++) = phase * zk;                              // d/d|b|
      j(k, col++) = Complex(0.0, 1.0) * c.amplitude * zk;    // d/dphi
      if (include_damping) j(k, col++) = -nk * c.amplitude * zk;  // d/dalpha
      j(k, col) = Complex(0.0, nk) * c.amplitude * zk;        // d/dtheta
    }
  }
  return j;
}

RVector crb_frequencies(const SignalSpec& spec, double variance) {
  spec.validate();
  require(variance > 0.0, "CRB needs a positive noise variance");
  bool damped = false;
  for (const auto& c : spec.components) damped = damped || c.damping != 0.0;
  const Index per = damped ? 4 : 3;

  const CMatrix j = signal_jacobian(spec, damped);
  const Eigen::MatrixXd fim = (2.0 / variance) * (j.adjoint() * j).real();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fim);
  if (!lu.isInvertible() || lu.rcond() < 1e-15) throw NumericalError("Fisher information matrix is singular");
  const Eigen::MatrixXd inv = lu.inverse();

  RVector out(spec.order());
  for (Index i = 0; i < spec.order(); ++i) out[i] = inv(per * i + per - 1, per * i + per - 1);
  return out;
}

std::vector<TimingRow> time_methods(const Scenario& scenario, const std::vector<Index>& sample_grid,
                                    const std::vector<std::string>& methods, int repeats, std::uint64_t seed) {
  require(repeats >= 1, "timing needs at least one repeat");
  std::vector<TimingRow> rows;
  ExperimentConfig probe;
  probe.methods = methods;
  probe.scenario = scenario;
  probe.sweep = {SweepKind::Samples, {static_cast<double>(sample_grid.empty() ? 71 : sample_grid.front())}};
  probe.validate();

  for (std::size_t s = 0; s < sample_grid.size(); ++s) {
    const double x = static_cast<double>(sample_grid[s]);
    const SignalSpec spec = scenario_spec(scenario, SweepKind::Samples, x);
    NoiseModel noise;
    noise.variance = scenario_variance(scenario, SweepKind::Samples, x);
    const TimeSeries y = apply_noise(synthesize(spec), noise, trial_seed(seed, s, 0));

    for (const auto& name : methods) {
      ExperimentConfig one = probe;
      one.methods = {name};
      const TrialRunner runner(one, spec, static_cast<double>(spec.sample_count));
      runner.run(y, false);  // warm-up
      std::vector<double> times;
      for (int r = 0; r < repeats; ++r) times.push_back(runner.run(y, false).methods.front().seconds);
      rows.push_back({spec.sample_count, name, median(times)});
    }
  }
  return rows;
}

std::vector<AmplitudeStudyRow> amplitude_study(const AmplitudeStudyConfig& config) {
  require(config.trials >= 1 && config.timing_repeats >= 1, "amplitude study needs trials and repeats");
  std::vector<AmplitudeStudyRow> rows;
  for (std::size_t s = 0; s < config.sample_grid.size(); ++s) {
    const double x = static_cast<double>(config.sample_grid[s]);
    const SignalSpec spec = scenario_spec(config.scenario, SweepKind::Samples, x);
    NoiseModel noise;
    noise.variance = scenario_variance(config.scenario, SweepKind::Samples, x);
    const TimeSeries clean = synthesize(spec);
    const CVector poles = spec.poles();
    const CVector truth = spec.amplitudes();
    const Index l = default_pencil_parameter(spec.sample_count);

    double se_modes = 0.0, se_ls = 0.0;
    std::vector<double> t_modes, t_ls;
    for (int t = 0; t < config.trials; ++t) {
      const TimeSeries y = apply_noise(clean, noise, trial_seed(config.seed, s, t));
      const HankelPair pair = build_hankel(y, l);
      const SvdFactors svd = svd_y0(pair);
      const PencilDecomposition d = decompose(pair, svd, svd.rank);
      const bool timed = t < config.timing_repeats;

      auto start = Clock::now();
      const CVector b_modes = amplitudes_from_modes(d);
      if (timed) t_modes.push_back(seconds_since(start));

      start = Clock::now();
      const CVector b_ls = amplitudes_least_squares(y, d.eigenvalues).amplitudes;
      if (timed) t_ls.push_back(seconds_since(start));

      se_modes += (pick_nearest(d.eigenvalues, b_modes, poles) - truth).squaredNorm();
      se_ls += (pick_nearest(d.eigenvalues, b_ls, poles) - truth).squaredNorm();
    }
    const double denom = static_cast<double>(config.trials) * static_cast<double>(truth.size());
    rows.push_back({spec.sample_count, "modes", std::sqrt(se_modes / denom), median(t_modes)});
    rows.push_back({spec.sample_count, "least-squares", std::sqrt(se_ls / denom), median(t_ls)});
  }
  return rows;
}

}  // namespace samp
