#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "samp/signal_model.hpp"

namespace samp {
namespace {

constexpr double kPi = std::numbers::pi;

SignalSpec single(Complex b, double alpha, double theta, Index n) { return {{{b, alpha, theta}}, n}; }

TEST(Synthesize, ConstantPole) {
  const TimeSeries y = synthesize(single(1.0, 0.0, 0.0, 4));
  ASSERT_EQ(y.size(), 4);
  for (Index n = 0; n < 4; ++n) EXPECT_NEAR(std::abs(y[n] - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Synthesize, AlternatingSign) {
  const TimeSeries y = synthesize(single({0.0, 2.0}, 0.0, kPi, 3));
  const Complex expected[] = {{0.0, 2.0}, {0.0, -2.0}, {0.0, 2.0}};
  for (Index n = 0; n < 3; ++n) EXPECT_NEAR(std::abs(y[n] - expected[n]), 0.0, 1e-14);
}

TEST(Synthesize, MatchesTermByTermPowers) {
  const double theta2 = 2.0 + 2.0 * kPi / 71.0;
  const SignalSpec spec{{{1.0, 0.03, 2.0}, {1.0, 0.05, theta2}}, 71};
  const TimeSeries y = synthesize(spec);
  // Oracle: accumulate z^n by repeated multiplication from polar parts.
  const double alphas[] = {0.03, 0.05};
  const double thetas[] = {2.0, theta2};
  for (Index n = 0; n < 71; ++n) {
    Complex sum(0.0, 0.0);
    for (int i = 0; i < 2; ++i) sum += std::polar(std::pow(std::exp(-alphas[i]), static_cast<double>(n)), thetas[i] * n);
    EXPECT_NEAR(std::abs(y[n] - sum), 0.0, 1e-12) << "n=" << n;
  }
}

TEST(SignalSpecValidate, RejectsBadSpecs) {
  EXPECT_THROW(synthesize(SignalSpec{{}, 10}), InvalidArgument);
  EXPECT_THROW(synthesize(single(1.0, -0.1, 1.0, 10)), InvalidArgument);
  EXPECT_THROW(synthesize(single(1.0, 0.0, 1.0, 2)), InvalidArgument);
  EXPECT_THROW(synthesize(SignalSpec{{{1.0, 0.0, 1.0}, {2.0, 0.0, 1.0}}, 10}), InvalidArgument);
}

TEST(ApplyNoise, TinyVarianceLeavesSignal) {
  const TimeSeries x = synthesize(single(1.0, 0.0, 0.7, 32));
  NoiseModel m;
  m.variance = 1e-300;
  const TimeSeries y = apply_noise(x, m, 5);
  EXPECT_LT((y.samples - x.samples).norm(), 1e-140);
}

TEST(ApplyNoise, SameSeedSameOutput) {
  const TimeSeries x = synthesize(single(1.0, 0.0, 0.7, 64));
  for (NoiseKind kind : {NoiseKind::ComplexGaussian, NoiseKind::BiNormal}) {
    NoiseModel m;
    m.kind = kind;
    const TimeSeries a = apply_noise(x, m, 42);
    const TimeSeries b = apply_noise(x, m, 42);
    const TimeSeries c = apply_noise(x, m, 43);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, c.samples);
  }
}

TEST(ApplyNoise, ComplexGaussianIsCircularWithUnitPower) {
  NoiseModel m;
  const TimeSeries w = draw_noise(1'000'000, m, 11);
  Complex power(0.0, 0.0);
  Complex pseudo(0.0, 0.0);
  for (Index n = 0; n < w.size(); ++n) {
    power += w[n] * std::conj(w[n]);
    pseudo += w[n] * w[n];
  }
  power /= static_cast<double>(w.size());
  pseudo /= static_cast<double>(w.size());
  EXPECT_NEAR(power.real(), 1.0, 0.01);
  EXPECT_NEAR(std::abs(pseudo), 0.0, 0.01);
}

TEST(ApplyNoise, BiNormalKeepsVarianceAndMixture) {
  NoiseModel m;
  m.kind = NoiseKind::BiNormal;
  m.variance = 2.0;
  NoiseSampler s(m, 3);
  EXPECT_NEAR(s.wide_sigma() / s.narrow_sigma(), 3.0, 1e-12);
  // r s1^2 + (1 - r) (3 s1)^2 = variance
  EXPECT_NEAR(0.85 * s.narrow_sigma() * s.narrow_sigma() + 0.15 * s.wide_sigma() * s.wide_sigma(), 2.0, 1e-12);

  const int count = 1'000'000;
  double power = 0.0;
  int wide = 0;
  for (int k = 0; k < count; ++k) {
    power += std::norm(s.next());
    wide += s.last_was_wide() ? 1 : 0;
  }
  EXPECT_NEAR(power / count, 2.0, 0.02);
  EXPECT_NEAR(static_cast<double>(wide) / count, 0.15, 0.002);
}

TEST(NoiseModelValidate, RejectsBadParameters) {
  NoiseModel m;
  m.variance = 0.0;
  EXPECT_THROW(m.validate(), InvalidArgument);
  m.variance = 1.0;
  m.kind = NoiseKind::BiNormal;
  m.binormal_threshold = 1.0;
  EXPECT_THROW(m.validate(), InvalidArgument);
}

TEST(NoiseVarianceForSnr, Examples) {
  const SignalSpec two{{{1.0, 0.0, 1.0}, {1.0, 0.0, 2.0}}, 20};
  EXPECT_NEAR(noise_variance_for_snr(two, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(noise_variance_for_snr(single(1.0, 0.0, 1.0, 20), 10.0), 0.1, 1e-15);
  SignalSpec four{{{1.0, 0.0, 1.0}, {1.0, 0.0, 2.0}, {1.0, 0.0, -1.0}, {1.0, 0.0, -2.0}}, 20};
  EXPECT_NEAR(noise_variance_for_snr(four, 8.0), 4.0 / std::pow(10.0, 0.8), 1e-15);
  EXPECT_NEAR(noise_variance_for_snr(four, 8.0), 0.6340, 5e-5);
}

TEST(ComponentSnr, Examples) {
  EXPECT_DOUBLE_EQ(component_snr({1.0, 0.0, 0.0}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(component_snr({2.0, 0.0, 0.0}, 1.0), 4.0);
  EXPECT_NEAR(component_snr({1.0, 0.0, 0.0}, 0.6340), 1.5773, 1e-4);
  EXPECT_THROW(component_snr({1.0, 0.0, 0.0}, 0.0), InvalidArgument);
}

}  // namespace
}  // namespace samp
