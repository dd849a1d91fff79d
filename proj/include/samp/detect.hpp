#pragma once

#include <vector>

#include "samp/pencil.hpp"
#include "samp/types.hpp"

namespace samp {

/// Search domain for the similarity maximization over z != 0.
///
/// Every radius is swept on the unit-circle frequency grid through a
/// zero-padded FFT of the radius-weighted mode, whose length is
/// freq_oversample * (N-L) rounded up to a power of two.
struct GridConfig {
  int freq_oversample = 8;
  std::vector<double> radius_grid = default_radii();
  bool refine = true;

  /// 15 log-spaced radii in [exp(-0.15), 1].
  static std::vector<double> default_radii();
  void validate() const;
  Index fft_size(Index mode_length) const;
};

struct ModeFeature {
  Index index = 0;
  Complex maximizer{1.0, 0.0};
  double raw = 0.0;
  double concentration = 1.0;
  double normalized = 0.0;
  double threshold = 0.0;
  bool is_signal = false;
};

struct DetectionResult {
  std::vector<ModeFeature> features;
  std::vector<Index> selected;  // zero-based mode indices, ascending
  Index order = 0;
};

struct SimilarityPeak {
  Complex z_star{1.0, 0.0};
  double value = 0.0;
};

/// Vandermonde test vector [1, z, ..., z^(len-1)].
CVector test_vector(Complex z, Index len);

/// |a(z)^H mode|^2 / (|a(z)|^2 |mode|^2), in [0, 1].
double similarity(const CVector& mode, Complex z);

SimilarityPeak maximize_similarity(const CVector& mode, const GridConfig& grid);

/// d_i = sum_m |lambda_m / lambda_i|^2. Eigenvalues with
/// |lambda| < 1e-12 max|lambda| get +infinity.
RVector concentration_weights(const CVector& eigenvalues);

/// Raw similarity peak, concentration weight and the max-normalized feature
/// for every retained mode. Thresholds are left at zero.
std::vector<ModeFeature> samp_features(const PencilDecomposition& decomp, const GridConfig& grid);

/// ((1-t)/(1+t))^2 with t = c / (|amp| * |a(eigenvalue)|).
double practical_threshold(Complex amp_est, Complex eigenvalue, double c, Index len);

/// ((1-isr)/(1+isr))^2.
double theoretical_threshold(double isr);

/// Default tuning constant c = 10 sqrt(N-L).
double default_threshold_constant(Index mode_length);

/// Selects mode i when practical_threshold(amps[i], lambda_i, c[i]) <= eps_i.
/// `c` holds one value per mode or a single value applied to all modes.
DetectionResult detect_samp(const PencilDecomposition& decomp, const CVector& amps, const GridConfig& grid,
                            const RVector& c);

/// Count of singular values with sigma_i / sigma_1 >= 10^-p.
Index detect_sdd(const RVector& sigma, double p);

/// 1-based argmax of sigma_i / sigma_{i+1}; ties go to the smallest index.
/// Values under sigma_1 * eps * size count as that floor.
Index detect_gap(const RVector& sigma);

/// round(exp(entropy of sigma / sum(sigma))).
Index detect_effective_rank(const RVector& sigma);

enum class InformationCriterion { AIC, BIC };

/// Coupled detection: classical pencil fit at every order 1..m_max, scored
/// by N ln(residual variance) plus 2 nu (AIC) or nu ln N (BIC), nu = 4k+1.
Index detect_ite(const TimeSeries& y, Index l, Index m_max, InformationCriterion criterion);

/// Score vector used by detect_ite (entry k-1 belongs to order k).
RVector ite_scores(const TimeSeries& y, Index l, Index m_max, InformationCriterion criterion);

/// N ln(residual variance) for orders 1..m_max. AIC and BIC differ only in
/// the penalty added to these terms, so callers running both fit once. The
/// residual variance is floored at 1e-24 |y|^2 / N.
RVector ite_fit_terms(const TimeSeries& y, Index l, Index m_max);

RVector ite_scores_from_terms(const RVector& terms, Index n, InformationCriterion criterion);

/// argmin of the scores, as a 1-based order.
Index ite_select(const RVector& terms, Index n, InformationCriterion criterion);

}  // namespace samp
