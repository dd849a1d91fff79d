#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "samp/types.hpp"

namespace samp {

/// One term b * exp((-damping + j*frequency) * n) of the signal model.
struct ExponentialComponent {
  Complex amplitude{1.0, 0.0};
  double damping = 0.0;    // nepers/sample, >= 0
  double frequency = 0.0;  // rad/sample

  Complex pole() const { return std::exp(Complex(-damping, frequency)); }
};

struct SignalSpec {
  std::vector<ExponentialComponent> components;
  Index sample_count = 0;

  Index order() const { return static_cast<Index>(components.size()); }
  CVector poles() const;
  CVector amplitudes() const;

  /// Throws InvalidArgument unless M >= 1, N > 2M, damping >= 0 and the
  /// poles are pairwise distinct.
  void validate() const;
};

enum class NoiseKind { ComplexGaussian, BiNormal };

struct NoiseModel {
  NoiseKind kind = NoiseKind::ComplexGaussian;
  double variance = 1.0;
  double binormal_threshold = 0.85;   // probability of the narrow component
  double binormal_scale_ratio = 3.0;  // sigma_wide / sigma_narrow

  void validate() const;
};

struct TimeSeries {
  CVector samples;

  Index size() const { return samples.size(); }
  Complex operator[](Index n) const { return samples[n]; }
};

/// Seeded sampler of i.i.d. noise values for a NoiseModel.
///
/// ComplexGaussian draws two independent real normals scaled by
/// sigma/sqrt(2). BiNormal first draws p ~ U(0,1); p < r selects the narrow
/// zero-mean circular Gaussian, otherwise the wide one. The two scales keep
/// the ratio binormal_scale_ratio and are chosen so the mixture variance is
/// exactly `variance`.
class NoiseSampler {
 public:
  NoiseSampler(const NoiseModel& model, std::uint64_t seed);

  Complex next();
  bool last_was_wide() const { return last_wide_; }

  double narrow_sigma() const { return sigma_narrow_; }
  double wide_sigma() const { return sigma_wide_; }

 private:
  NoiseModel model_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  double sigma_narrow_ = 0.0;
  double sigma_wide_ = 0.0;
  bool last_wide_ = false;
};

TimeSeries synthesize(const SignalSpec& spec);

/// Noise-only series of length n.
TimeSeries draw_noise(Index n, const NoiseModel& model, std::uint64_t seed);

TimeSeries apply_noise(const TimeSeries& x, const NoiseModel& model, std::uint64_t seed);

/// Noise variance giving the requested total SNR, sum_i |b_i|^2 / sigma^2.
double noise_variance_for_snr(const SignalSpec& spec, double snr_db);

double component_snr(const ExponentialComponent& component, double variance);

}  // namespace samp
