#include "samp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

namespace samp {

PoleParameters poles_to_params(const CVector& eigenvalues) {
  PoleParameters out{RVector(eigenvalues.size()), RVector(eigenvalues.size())};
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const Complex z = eigenvalues[i];
    require(z != Complex(0.0, 0.0), "cannot map a zero eigenvalue to (frequency, damping)");
    double theta = std::arg(z);
    if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
    out.frequencies[i] = theta;
    out.dampings[i] = -std::log(std::abs(z));
  }
  return out;
}

LeastSquaresAmplitudes amplitudes_least_squares(const TimeSeries& y, const CVector& eigenvalues) {
  const Index n = y.size();
  const Index m = eigenvalues.size();
  require(m <= n, "more poles than samples");
  LeastSquaresAmplitudes out{CVector::Zero(m), 1.0};
  if (m == 0) return out;

  CMatrix vandermonde(n, m);
  for (Index i = 0; i < m; ++i) {
    Complex p(1.0, 0.0);
    for (Index k = 0; k < n; ++k) {
      vandermonde(k, i) = p;
      p *= eigenvalues[i];
    }
  }
  Eigen::BDCSVD<CMatrix> svd(vandermonde, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD of the Vandermonde matrix did not converge");
  const RVector& s = svd.singularValues();
  const double cutoff = 1e-12 * s[0];
  out.condition = s[m - 1] > 0.0 ? s[0] / s[m - 1] : std::numeric_limits<double>::infinity();

  const CVector uty = svd.matrixU().adjoint() * y.samples;
  CVector scaled = CVector::Zero(m);
  for (Index k = 0; k < m; ++k)
    if (s[k] > cutoff) scaled[k] = uty[k] / s[k];
  out.amplitudes = svd.matrixV() * scaled;
  return out;
}

CVector amplitudes_from_modes(const PencilDecomposition& decomp) {
  return decomp.left_modes.row(0).transpose().cwiseProduct(decomp.right_modes.col(0));
}

ParameterEstimates select_components(const PoleParameters& params, const CVector& amplitudes,
                                     const DetectionResult& detection) {
  ParameterEstimates out;
  const Index m = static_cast<Index>(detection.selected.size());
  out.order = m;
  out.frequencies.resize(m);
  out.dampings.resize(m);
  out.amplitudes.resize(m);
  for (Index k = 0; k < m; ++k) {
    const Index i = detection.selected[static_cast<std::size_t>(k)];
    require(i >= 0 && i < params.frequencies.size() && i < amplitudes.size(), "selected index out of range");
    out.frequencies[k] = params.frequencies[i];
    out.dampings[k] = params.dampings[i];
    out.amplitudes[k] = amplitudes[i];
    out.mode_indices.push_back(i);
    out.features.push_back(static_cast<std::size_t>(i) < detection.features.size()
                               ? detection.features[static_cast<std::size_t>(i)].normalized
                               : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

namespace {

Index resolve_pencil_parameter(const TimeSeries& y, const std::optional<Index>& requested) {
  require(y.size() >= 8, "signal too short for the pencil pipelines (need N >= 8)");
  const Index l = requested ? *requested : default_pencil_parameter(y.size());
  require(l >= 1 && l <= y.size() - 1, "pencil parameter must satisfy 1 <= L <= N-1");
  return l;
}

ParameterEstimates empty_estimates() {
  ParameterEstimates out;
  out.frequencies.resize(0);
  out.dampings.resize(0);
  out.amplitudes.resize(0);
  return out;
}

}  // namespace

SampAnalysis samp_analyze(const TimeSeries& y, const SampConfig& config) {
  SampAnalysis a;
  a.pencil_parameter = resolve_pencil_parameter(y, config.pencil_parameter);
  const HankelPair pair = build_hankel(y, a.pencil_parameter);
  const SvdFactors svd = svd_y0(pair);
  a.singular_values = svd.sigma;

  Index r = svd.rank;
  if (svd.sigma.sum() <= 0.0) {
    r = 0;
  } else {
    switch (config.truncation) {
      case WeakTruncation::EffectiveRank: r = detect_effective_rank(svd.sigma); break;
      case WeakTruncation::None: r = svd.rank; break;
      case WeakTruncation::Half: r = svd.rank - a.pencil_parameter / 2; break;
    }
    // Never keep exactly-zero singular values.
    while (r > 0 && !(svd.sigma[r - 1] > 0.0)) --r;
  }
  a.truncation_rank = std::clamp<Index>(r, 0, svd.rank);
  if (a.truncation_rank == 0) {
    a.estimates = empty_estimates();
    return a;
  }

  a.decomposition = decompose(pair, svd, a.truncation_rank);
  a.all_amplitudes = amplitudes_from_modes(a.decomposition);

  const Index len = pair.rows();
  const double c_default = config.threshold_constant ? *config.threshold_constant : default_threshold_constant(len);
  RVector c = RVector::Constant(a.truncation_rank, c_default);
  for (Index i = 0; i < a.truncation_rank && i < static_cast<Index>(config.per_mode_constants.size()); ++i)
    c[i] = config.per_mode_constants[static_cast<std::size_t>(i)];

  a.detection = detect_samp(a.decomposition, a.all_amplitudes, config.grid, c);

  // Zero eigenvalues cannot be mapped to (frequency, damping); they carry a
  // zero feature and are never selected, so give them a neutral placeholder.
  CVector safe = a.decomposition.eigenvalues;
  for (Index i = 0; i < safe.size(); ++i)
    if (safe[i] == Complex(0.0, 0.0)) safe[i] = Complex(std::numeric_limits<double>::min(), 0.0);
  a.all_params = poles_to_params(safe);
  a.estimates = select_components(a.all_params, a.all_amplitudes, a.detection);
  return a;
}

ParameterEstimates samp_pipeline(const TimeSeries& y, const SampConfig& config) {
  return samp_analyze(y, config).estimates;
}

ParameterEstimates classical_fit(const TimeSeries& y, const HankelPair& pair, const SvdFactors& svd, Index order) {
  if (order == 0) return empty_estimates();
  const PencilDecomposition d = decompose(pair, svd, order);
  const PoleParameters params = poles_to_params(d.eigenvalues);
  ParameterEstimates out;
  out.order = order;
  out.frequencies = params.frequencies;
  out.dampings = params.dampings;
  out.amplitudes = amplitudes_least_squares(y, d.eigenvalues).amplitudes;
  for (Index i = 0; i < order; ++i) {
    out.mode_indices.push_back(i);
    out.features.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

ParameterEstimates classical_pipeline(const TimeSeries& y, const ClassicalConfig& config, ClassicalDetector detector) {
  const Index l = resolve_pencil_parameter(y, config.pencil_parameter);
  const HankelPair pair = build_hankel(y, l);
  const SvdFactors svd = svd_y0(pair);
  if (!(svd.sigma[0] > 0.0)) return empty_estimates();

  Index order = 0;
  switch (detector) {
    case ClassicalDetector::SDD: order = detect_sdd(svd.sigma, config.sdd_digits); break;
    case ClassicalDetector::GAP: order = detect_gap(svd.sigma); break;
    case ClassicalDetector::EFF: order = detect_effective_rank(svd.sigma); break;
    case ClassicalDetector::AIC:
    case ClassicalDetector::BIC: {
      const Index m_max = std::min(config.ite_max_order.value_or(l), svd.rank);
      order = detect_ite(y, l, m_max,
                         detector == ClassicalDetector::AIC ? InformationCriterion::AIC : InformationCriterion::BIC);
      break;
    }
  }
  while (order > 0 && !(svd.sigma[order - 1] > 0.0)) --order;
  return classical_fit(y, pair, svd, order);
}

std::string to_string(ClassicalDetector detector) {
  switch (detector) {
    case ClassicalDetector::SDD: return "SDD";
    case ClassicalDetector::GAP: return "GAP";
    case ClassicalDetector::EFF: return "EFF";
    case ClassicalDetector::AIC: return "AIC";
    case ClassicalDetector::BIC: return "BIC";
  }
  return "?";
}

std::optional<ClassicalDetector> parse_classical_detector(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (auto d : {ClassicalDetector::SDD, ClassicalDetector::GAP, ClassicalDetector::EFF, ClassicalDetector::AIC,
                 ClassicalDetector::BIC})
    if (to_string(d) == upper) return d;
  return std::nullopt;
}

}  // namespace samp
