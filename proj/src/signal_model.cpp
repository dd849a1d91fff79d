#include "samp/signal_model.hpp"

#include <cmath>

namespace samp {

CVector SignalSpec::poles() const {
  CVector z(order());
  for (Index i = 0; i < order(); ++i) z[i] = components[i].pole();
  return z;
}

CVector SignalSpec::amplitudes() const {
  CVector b(order());
  for (Index i = 0; i < order(); ++i) b[i] = components[i].amplitude;
  return b;
}

void SignalSpec::validate() const {
  const Index m = order();
  require(m >= 1, "signal spec needs at least one component");
  require(sample_count > 2 * m, "signal spec needs N > 2M samples");
  for (const auto& c : components) {
    require(c.damping >= 0.0, "damping must be non-negative");
    require(std::isfinite(c.frequency) && std::isfinite(c.damping), "component parameters must be finite");
  }
  const CVector z = poles();
  for (Index i = 0; i < m; ++i)
    for (Index k = i + 1; k < m; ++k)
      require(std::abs(z[i] - z[k]) > 1e-12, "signal poles must be pairwise distinct");
}

void NoiseModel::validate() const {
  require(variance > 0.0 && std::isfinite(variance), "noise variance must be positive");
  if (kind == NoiseKind::BiNormal) {
    require(binormal_threshold > 0.0 && binormal_threshold < 1.0, "binormal threshold must lie in (0,1)");
    require(binormal_scale_ratio > 0.0, "binormal scale ratio must be positive");
  }
}

NoiseSampler::NoiseSampler(const NoiseModel& model, std::uint64_t seed) : model_(model), engine_(seed) {
  model_.validate();
  if (model_.kind == NoiseKind::ComplexGaussian) {
    sigma_narrow_ = sigma_wide_ = std::sqrt(model_.variance);
  } else {
    const double r = model_.binormal_threshold;
    const double k2 = model_.binormal_scale_ratio * model_.binormal_scale_ratio;
    sigma_narrow_ = std::sqrt(model_.variance / (r + (1.0 - r) * k2));
    sigma_wide_ = model_.binormal_scale_ratio * sigma_narrow_;
  }
}

Complex NoiseSampler::next() {
  double sigma = sigma_narrow_;
  last_wide_ = false;
  if (model_.kind == NoiseKind::BiNormal) {
    const double p = uniform_(engine_);
    if (p >= model_.binormal_threshold) {
      sigma = sigma_wide_;
      last_wide_ = true;
    }
  }
  const double scale = sigma / std::sqrt(2.0);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {scale * re, scale * im};
}

TimeSeries synthesize(const SignalSpec& spec) {
  spec.validate();
  TimeSeries out{CVector::Zero(spec.sample_count)};
  for (const auto& c : spec.components) {
    const Complex s(-c.damping, c.frequency);
    for (Index n = 0; n < spec.sample_count; ++n) out.samples[n] += c.amplitude * std::exp(s * static_cast<double>(n));
  }
  return out;
}

TimeSeries draw_noise(Index n, const NoiseModel& model, std::uint64_t seed) {
  require(n >= 0, "noise length must be non-negative");
  NoiseSampler sampler(model, seed);
  TimeSeries out{CVector(n)};
  for (Index i = 0; i < n; ++i) out.samples[i] = sampler.next();
  return out;
}

TimeSeries apply_noise(const TimeSeries& x, const NoiseModel& model, std::uint64_t seed) {
  TimeSeries w = draw_noise(x.size(), model, seed);
  w.samples += x.samples;
  return w;
}

double noise_variance_for_snr(const SignalSpec& spec, double snr_db) {
  require(spec.order() >= 1, "SNR needs at least one component");
  double power = 0.0;
  for (const auto& c : spec.components) power += std::norm(c.amplitude);
  return power / std::pow(10.0, snr_db / 10.0);
}

double component_snr(const ExponentialComponent& component, double variance) {
  require(variance > 0.0, "noise variance must be positive");
  return std::norm(component.amplitude) / variance;
}

}  // namespace samp
