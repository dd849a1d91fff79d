#include "samp/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

namespace samp {
namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double w) {
  w = std::remainder(w, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

// Similarity at z = exp(log_radius + j*omega) without forming a(z).
double similarity_polar(const CVector& mode, double mode_norm2, double log_radius, double omega) {
  const Complex step = std::exp(Complex(log_radius, -omega));  // conj(z)
  Complex power(1.0, 0.0);
  Complex acc(0.0, 0.0);
  double a_norm2 = 0.0;
  for (Index n = 0; n < mode.size(); ++n) {
    acc += power * mode[n];
    a_norm2 += std::norm(power);
    power *= step;
  }
  const double value = std::norm(acc) / (a_norm2 * mode_norm2);
  return std::clamp(value, 0.0, 1.0);
}

// Vertex offset of the parabola through (-1, lo), (0, mid), (1, hi).
double parabolic_offset(double lo, double mid, double hi) {
  const double denom = lo - 2.0 * mid + hi;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (lo - hi) / denom, -1.0, 1.0);
}

}  // namespace

std::vector<double> GridConfig::default_radii() {
  std::vector<double> radii(15);
  for (std::size_t k = 0; k < radii.size(); ++k) radii[k] = std::exp(-0.15 + 0.15 * static_cast<double>(k) / 14.0);
  return radii;
}

void GridConfig::validate() const {
  require(freq_oversample >= 1, "frequency oversampling must be >= 1");
  require(!radius_grid.empty(), "radius grid must be non-empty");
  for (double r : radius_grid) require(r > 0.0 && r <= 1.05, "radius grid values must lie in (0, 1.05]");
}

Index GridConfig::fft_size(Index mode_length) const {
  Index n = 1;
  while (n < static_cast<Index>(freq_oversample) * mode_length) n <<= 1;
  return n;
}

CVector test_vector(Complex z, Index len) {
  require(z != Complex(0.0, 0.0), "test vector needs z != 0");
  require(len >= 1, "test vector length must be >= 1");
  CVector a(len);
  Complex p(1.0, 0.0);
  for (Index n = 0; n < len; ++n) {
    a[n] = p;
    p *= z;
  }
  return a;
}

double similarity(const CVector& mode, Complex z) {
  const double mode_norm2 = mode.squaredNorm();
  require(mode_norm2 > 0.0, "similarity needs a nonzero mode");
  const CVector a = test_vector(z, mode.size());
  const double value = std::norm(a.dot(mode)) / (a.squaredNorm() * mode_norm2);
  return std::clamp(value, 0.0, 1.0);
}

SimilarityPeak maximize_similarity(const CVector& mode, const GridConfig& grid) {
  grid.validate();
  const double mode_norm2 = mode.squaredNorm();
  require(mode_norm2 > 0.0, "similarity needs a nonzero mode");

  const Index len = mode.size();
  const Index nfft = grid.fft_size(len);
  thread_local Eigen::FFT<double> fft;
  std::vector<Complex> buffer(static_cast<std::size_t>(nfft));
  std::vector<Complex> spectrum;

  double best = -1.0;
  std::size_t best_radius = 0;
  Index best_bin = 0;
  std::vector<double> best_row;  // spectrum values around the argmax for refinement
  std::vector<double> values(static_cast<std::size_t>(nfft));

  for (std::size_t ri = 0; ri < grid.radius_grid.size(); ++ri) {
    const double rho = grid.radius_grid[ri];
    std::fill(buffer.begin(), buffer.end(), Complex(0.0, 0.0));
    double weight = 1.0;
    double a_norm2 = 0.0;
    for (Index n = 0; n < len; ++n) {
      buffer[static_cast<std::size_t>(n)] = weight * mode[n];
      a_norm2 += weight * weight;
      weight *= rho;
    }
    fft.fwd(spectrum, buffer);
    const double scale = 1.0 / (a_norm2 * mode_norm2);
    for (Index k = 0; k < nfft; ++k) {
      const double v = std::norm(spectrum[static_cast<std::size_t>(k)]) * scale;
      values[static_cast<std::size_t>(k)] = v;
      if (v > best) {
        best = v;
        best_radius = ri;
        best_bin = k;
      }
    }
  }

  const double bin_width = 2.0 * kPi / static_cast<double>(nfft);
  double log_radius = std::log(grid.radius_grid[best_radius]);
  double omega = bin_width * static_cast<double>(best_bin);
  best = std::min(best, 1.0);

  if (grid.refine) {
    double step_w = bin_width;
    double step_r = 0.0;
    if (grid.radius_grid.size() > 1) {
      double spacing = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < grid.radius_grid.size(); ++i)
        spacing = std::min(spacing, std::abs(std::log(grid.radius_grid[i] / grid.radius_grid[i - 1])));
      step_r = spacing;
    }
    for (int iter = 0; iter < 6; ++iter) {
      const double lo = similarity_polar(mode, mode_norm2, log_radius, omega - step_w);
      const double hi = similarity_polar(mode, mode_norm2, log_radius, omega + step_w);
      const double cand_w = omega + parabolic_offset(lo, best, hi) * step_w;
      const double v_w = similarity_polar(mode, mode_norm2, log_radius, cand_w);
      if (v_w > best) {
        best = v_w;
        omega = cand_w;
      }
      if (step_r > 0.0) {
        const double rlo = similarity_polar(mode, mode_norm2, log_radius - step_r, omega);
        const double rhi = similarity_polar(mode, mode_norm2, log_radius + step_r, omega);
        const double cand_r = log_radius + parabolic_offset(rlo, best, rhi) * step_r;
        // Keep the refined radius inside the configured domain.
        const double max_log = std::log(*std::max_element(grid.radius_grid.begin(), grid.radius_grid.end()));
        const double min_log = std::log(*std::min_element(grid.radius_grid.begin(), grid.radius_grid.end()));
        const double clamped = std::clamp(cand_r, min_log, max_log);
        const double v_r = similarity_polar(mode, mode_norm2, clamped, omega);
        if (v_r > best) {
          best = v_r;
          log_radius = clamped;
        }
      }
      step_w *= 0.5;
      step_r *= 0.5;
    }
  }

  return {std::exp(Complex(log_radius, wrap_angle(omega))), best};
}

RVector concentration_weights(const CVector& eigenvalues) {
  const Index r = eigenvalues.size();
  RVector d(r);
  if (r == 0) return d;
  const RVector mags = eigenvalues.cwiseAbs();
  const double max_mag = mags.maxCoeff();
  double retained_power = 0.0;
  for (Index m = 0; m < r; ++m)
    if (mags[m] >= 1e-12 * max_mag && mags[m] > 0.0) retained_power += mags[m] * mags[m];
  for (Index i = 0; i < r; ++i) {
    if (mags[i] < 1e-12 * max_mag || mags[i] == 0.0) {
      d[i] = std::numeric_limits<double>::infinity();
    } else {
      d[i] = retained_power / (mags[i] * mags[i]);
    }
  }
  return d;
}

std::vector<ModeFeature> samp_features(const PencilDecomposition& decomp, const GridConfig& grid) {
  const Index r = decomp.rank;
  const RVector d = concentration_weights(decomp.eigenvalues);
  std::vector<ModeFeature> features(static_cast<std::size_t>(r));
  double max_eps = 0.0;
  for (Index i = 0; i < r; ++i) {
    ModeFeature& f = features[static_cast<std::size_t>(i)];
    f.index = i;
    f.concentration = d[i];
    const CVector mode = decomp.left_modes.col(i);
    if (mode.squaredNorm() > 0.0) {
      const SimilarityPeak peak = maximize_similarity(mode, grid);
      f.maximizer = peak.z_star;
      f.raw = peak.value;
    }
    f.normalized = std::isfinite(d[i]) ? f.raw / d[i] : 0.0;
    max_eps = std::max(max_eps, f.normalized);
  }
  if (max_eps > 0.0)
    for (auto& f : features) f.normalized = std::clamp(f.normalized / max_eps, 0.0, 1.0);
  return features;
}

double practical_threshold(Complex amp_est, Complex eigenvalue, double c, Index len) {
  const double amp = std::abs(amp_est);
  const double a_norm = test_vector(eigenvalue, len).norm();
  // A vanishing amplitude drives t to infinity, where the threshold tends to 1.
  if (!(amp > 0.0) || !(a_norm > 0.0) || !std::isfinite(a_norm)) return 1.0;
  const double t = std::abs(c) / (amp * a_norm);
  return theoretical_threshold(t);
}

double theoretical_threshold(double isr) {
  require(isr >= 0.0, "interference-to-signal ratio must be non-negative");
  if (!std::isfinite(isr)) return 1.0;
  const double ratio = (1.0 - isr) / (1.0 + isr);
  return std::clamp(ratio * ratio, 0.0, 1.0);
}

double default_threshold_constant(Index mode_length) { return 10.0 * std::sqrt(static_cast<double>(mode_length)); }

DetectionResult detect_samp(const PencilDecomposition& decomp, const CVector& amps, const GridConfig& grid,
                            const RVector& c) {
  const Index r = decomp.rank;
  require(amps.size() == r, "amplitude vector must be index-aligned with the modes");
  require(c.size() == r || c.size() == 1, "threshold constants must be one per mode or a single value");
  const Index len = decomp.left_modes.rows();

  DetectionResult result;
  result.features = samp_features(decomp, grid);
  for (Index i = 0; i < r; ++i) {
    ModeFeature& f = result.features[static_cast<std::size_t>(i)];
    const double ci = c.size() == 1 ? c[0] : c[i];
    f.threshold = practical_threshold(amps[i], decomp.eigenvalues[i], ci, len);
    f.is_signal = f.threshold <= f.normalized;
    if (f.is_signal) result.selected.push_back(i);
  }
  result.order = static_cast<Index>(result.selected.size());
  return result;
}

Index detect_sdd(const RVector& sigma, double p) {
  require(sigma.size() >= 1 && sigma[0] > 0.0, "SDD needs a nonempty, positive-led singular value vector");
  const double floor = sigma[0] * std::pow(10.0, -p);
  Index count = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] >= floor) count = i + 1;
  return count;
}

Index detect_gap(const RVector& sigma) {
  require(sigma.size() >= 2, "GAP needs at least two singular values");
  // Values below the rounding level of sigma_1 are treated as equal, so a
  // noiseless tail cannot produce a spurious largest ratio.
  const double floor = std::max(sigma[0] * std::numeric_limits<double>::epsilon() * static_cast<double>(sigma.size()),
                                std::numeric_limits<double>::min());
  Index best = 1;
  double best_ratio = -1.0;
  for (Index i = 0; i + 1 < sigma.size(); ++i) {
    const double num = std::max(sigma[i], floor);
    const double den = std::max(sigma[i + 1], floor);
    const double ratio = num / den;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i + 1;
    }
  }
  return best;
}

Index detect_effective_rank(const RVector& sigma) {
  require(sigma.size() >= 1 && (sigma.array() >= 0.0).all(), "effective rank needs non-negative singular values");
  const double total = sigma.sum();
  require(total > 0.0, "effective rank of an all-zero spectrum is undefined");
  double entropy = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) {
    const double p = sigma[i] / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return static_cast<Index>(std::lround(std::exp(entropy)));
}

RVector ite_fit_terms(const TimeSeries& y, Index l, Index m_max) {
  require(m_max >= 1 && m_max <= l, "ITE needs 1 <= m_max <= L");
  const HankelPair pair = build_hankel(y, l);
  const SvdFactors svd = svd_y0(pair);
  require(m_max <= svd.rank, "ITE order exceeds the rank of Y0");
  const Index n = y.size();

  // Residuals below 1e-12 of the signal RMS are rounding noise; flooring
  // them keeps a noiseless fit from rewarding orders above the true one.
  const double floor = std::max(1e-24 * y.samples.squaredNorm() / static_cast<double>(n), 1e-300);
  RVector terms(m_max);
  for (Index k = 1; k <= m_max; ++k) {
    double residual = floor;
    if (svd.sigma[k - 1] > 0.0) {
      // Same fit as classical_fit; a pivoted QR gives the least-squares
      // residual without the SVD pseudo-inverse.
      const PencilDecomposition d = decompose(pair, svd, k);
      CMatrix vandermonde(n, k);
      for (Index i = 0; i < k; ++i) vandermonde.col(i) = test_vector(d.eigenvalues[i], n);
      const Eigen::ColPivHouseholderQR<CMatrix> qr(vandermonde);
      const CVector b = qr.solve(y.samples);
      residual = std::max((y.samples - vandermonde * b).squaredNorm() / static_cast<double>(n), floor);
    }
    terms[k - 1] = static_cast<double>(n) * std::log(residual);
  }
  return terms;
}

RVector ite_scores_from_terms(const RVector& terms, Index n, InformationCriterion criterion) {
  RVector scores(terms.size());
  for (Index k = 1; k <= terms.size(); ++k) {
    const double nu = 4.0 * static_cast<double>(k) + 1.0;
    const double penalty = criterion == InformationCriterion::AIC ? 2.0 * nu : nu * std::log(static_cast<double>(n));
    scores[k - 1] = terms[k - 1] + penalty;
  }
  return scores;
}

Index ite_select(const RVector& terms, Index n, InformationCriterion criterion) {
  const RVector scores = ite_scores_from_terms(terms, n, criterion);
  Index best = 0;
  for (Index k = 1; k < scores.size(); ++k)
    if (scores[k] < scores[best]) best = k;
  return best + 1;
}

RVector ite_scores(const TimeSeries& y, Index l, Index m_max, InformationCriterion criterion) {
  return ite_scores_from_terms(ite_fit_terms(y, l, m_max), y.size(), criterion);
}

Index detect_ite(const TimeSeries& y, Index l, Index m_max, InformationCriterion criterion) {
  return ite_select(ite_fit_terms(y, l, m_max), y.size(), criterion);
}

}  // namespace samp
