#pragma once

#include <optional>
#include <string>
#include <vector>

#include "samp/detect.hpp"
#include "samp/pencil.hpp"
#include "samp/signal_model.hpp"

namespace samp {

struct PoleParameters {
  RVector frequencies;  // arg(lambda), in (-pi, pi]
  RVector dampings;     // -log|lambda|
};

struct ParameterEstimates {
  RVector frequencies;
  RVector dampings;
  CVector amplitudes;
  Index order = 0;
  std::vector<Index> mode_indices;
  /// Normalized SAMP feature per selected component (NaN for classical runs).
  std::vector<double> features;
};

struct LeastSquaresAmplitudes {
  CVector amplitudes;
  double condition = 1.0;
  bool ill_conditioned() const { return condition > 1e12; }
};

PoleParameters poles_to_params(const CVector& eigenvalues);

/// b = V^+ y with V the N x M Vandermonde of the given poles. The
/// pseudo-inverse drops singular values below 1e-12 sigma_max.
LeastSquaresAmplitudes amplitudes_least_squares(const TimeSeries& y, const CVector& eigenvalues);

/// First row of the left modes times the first column of the right modes.
CVector amplitudes_from_modes(const PencilDecomposition& decomp);

ParameterEstimates select_components(const PoleParameters& params, const CVector& amplitudes,
                                     const DetectionResult& detection);

enum class WeakTruncation { EffectiveRank, None, Half };

struct SampConfig {
  std::optional<Index> pencil_parameter;
  WeakTruncation truncation = WeakTruncation::EffectiveRank;
  GridConfig grid;
  /// Threshold constant for every mode; defaults to 10 sqrt(N-L).
  std::optional<double> threshold_constant;
  /// Optional per-mode override, indexed by mode (descending |lambda|).
  std::vector<double> per_mode_constants;
};

/// Everything the SAMP pipeline computed for one signal.
struct SampAnalysis {
  Index pencil_parameter = 0;
  RVector singular_values;
  Index truncation_rank = 0;
  PencilDecomposition decomposition;
  PoleParameters all_params;
  CVector all_amplitudes;
  DetectionResult detection;
  ParameterEstimates estimates;
};

SampAnalysis samp_analyze(const TimeSeries& y, const SampConfig& config = {});

ParameterEstimates samp_pipeline(const TimeSeries& y, const SampConfig& config = {});

enum class ClassicalDetector { SDD, GAP, EFF, AIC, BIC };

struct ClassicalConfig {
  std::optional<Index> pencil_parameter;
  double sdd_digits = 3.0;
  /// Largest order tried by AIC/BIC; defaults to L.
  std::optional<Index> ite_max_order;
};

ParameterEstimates classical_pipeline(const TimeSeries& y, const ClassicalConfig& config, ClassicalDetector detector);

/// Classical estimation at a fixed order: truncate, decompose, poles and
/// least-squares amplitudes. Shared by the classical pipeline and ITE.
ParameterEstimates classical_fit(const TimeSeries& y, const HankelPair& pair, const SvdFactors& svd, Index order);

std::string to_string(ClassicalDetector detector);
std::optional<ClassicalDetector> parse_classical_detector(const std::string& name);

}  // namespace samp
