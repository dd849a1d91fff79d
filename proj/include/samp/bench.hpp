#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "samp/estimate.hpp"
#include "samp/signal_model.hpp"

namespace samp {

/// Clustered test signal: M = 2 puts theta1 and theta1 + separation; M = 4
/// adds the mirrored pair -theta1, -theta1 - separation. Damped scenarios
/// alternate 0.03 and 0.05 nepers/sample. All amplitudes are 1.
struct Scenario {
  int components = 2;
  bool damped = false;
  Index samples = 71;
  double snr_db = 10.0;
  /// Frequency spacing; the Rayleigh limit 2 pi / N when unset.
  std::optional<double> separation;
  double theta1 = 2.0;

  void validate() const;
};

enum class SweepKind { SnrDb, Samples, Separation };

struct Sweep {
  SweepKind kind = SweepKind::SnrDb;
  std::vector<double> grid;
};

/// Spec and noise variance at one sweep value.
SignalSpec scenario_spec(const Scenario& scenario, SweepKind kind, double x);
double scenario_variance(const Scenario& scenario, SweepKind kind, double x);

/// Squared-error charge for a trial whose order is wrong: (2 pi / s)^2 per
/// component, where s is the current N unless a fixed scale is given.
struct PenaltyConfig {
  std::optional<double> fixed_scale;
  double scale_for(Index current_n) const;
};

struct ExperimentConfig {
  std::string label = "experiment";
  Scenario scenario;
  Sweep sweep;
  int trials = 500;
  std::vector<std::string> methods{"SAMP", "GAP", "SDD", "EFF", "AIC", "BIC"};
  NoiseModel noise;  // variance is overwritten at every sweep point
  std::uint64_t seed = 1;
  PenaltyConfig penalty;
  SampConfig samp;
  ClassicalConfig classical;
  int threads = 1;
  /// Also write SAMP mode features of trial 0 at every sweep point.
  bool dump_features = false;

  void validate() const;
};

std::vector<std::string> known_methods();
bool is_known_method(const std::string& name);

/// Seed for one trial, mixed from (base, sweep index, trial index) so the
/// result does not depend on scheduling.
std::uint64_t trial_seed(std::uint64_t base, std::size_t sweep_index, int trial);

struct PointMetrics {
  double p_d = 0.0;
  double p_d_ci = 0.0;
  RVector bias;  // per true component
  RVector bias_ci;
  RVector rmse;
  RVector rmse_ci;
  double mean_seconds = 0.0;
  int trials = 0;
  int failures = 0;

  double average_rmse() const;
};

struct FeatureDumpRow {
  double x = 0.0;
  ModeFeature feature;
};

struct MetricSeries {
  std::string label;
  std::vector<double> x;
  std::vector<std::string> methods;
  std::vector<std::vector<PointMetrics>> points;  // [method][sweep index]
  std::vector<double> auc;                        // per method; NaN for non-SNR sweeps with < 2 points
  std::vector<RVector> crb;                       // per sweep point, per component
  std::vector<FeatureDumpRow> features;

  std::size_t method_index(const std::string& name) const;
};

MetricSeries run_monte_carlo(const ExperimentConfig& config);

double detection_probability(const std::vector<Index>& orders, Index truth);

/// Trapezoidal area under pd(x), divided by the x range.
double auc(const std::vector<double>& x, const std::vector<double>& pd);

struct ComponentScore {
  bool order_matched = false;
  RVector error;    // signed frequency error per true component (wrapped)
  RVector squared;  // squared error or the mismatch penalty
};

/// Greedy nearest-pole matching when the order is right; otherwise every
/// component is charged the penalty.
ComponentScore match_and_score(const ParameterEstimates& estimates, const SignalSpec& truth, double penalty_scale);

/// Frequency CRB per component. Damping parameters are included unless all
/// true dampings are zero.
RVector crb_frequencies(const SignalSpec& spec, double variance);

/// Jacobian of x(n) with respect to (|b|, phase, [damping,] frequency) per
/// component, columns grouped by component.
CMatrix signal_jacobian(const SignalSpec& spec, bool include_damping);

struct TimingRow {
  Index samples = 0;
  std::string method;
  double seconds = 0.0;  // median per invocation
};

/// Median wall time of each full pipeline per N, warm-up excluded.
std::vector<TimingRow> time_methods(const Scenario& scenario, const std::vector<Index>& sample_grid,
                                    const std::vector<std::string>& methods, int repeats, std::uint64_t seed);

struct AmplitudeStudyRow {
  Index samples = 0;
  std::string method;  // "modes" or "least-squares"
  double rmse = 0.0;
  double seconds = 0.0;  // median per call, decomposition excluded
};

struct AmplitudeStudyConfig {
  Scenario scenario{4, false, 600, 10.0, std::nullopt, 2.0};
  std::vector<Index> sample_grid{100, 200, 400, 600};
  int trials = 20;
  int timing_repeats = 5;
  std::uint64_t seed = 1;
};

/// Mode-based versus least-squares amplitudes at full rank r = L. Errors are
/// measured on the eigenvalues nearest to the true poles.
std::vector<AmplitudeStudyRow> amplitude_study(const AmplitudeStudyConfig& config);

}  // namespace samp
