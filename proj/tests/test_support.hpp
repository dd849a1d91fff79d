#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "samp/signal_model.hpp"

namespace samp::testing {

/// Random well-posed specs: M in [1, max_order], poles at least `min_gap`
/// apart, N in [n_min, n_max], dampings up to `max_damping`.
struct SpecGenerator {
  std::mt19937_64 rng;
  int max_order = 4;
  Index n_min = 40;
  Index n_max = 120;
  double min_gap = 0.05;
  double max_damping = 0.05;

  explicit SpecGenerator(std::uint64_t seed) : rng(seed) {}

  SignalSpec next() {
    std::uniform_int_distribution<int> order(1, max_order);
    std::uniform_int_distribution<Index> length(n_min, n_max);
    std::uniform_real_distribution<double> freq(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> damp(0.0, max_damping);
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);

    SignalSpec spec;
    spec.sample_count = length(rng);
    const int m = order(rng);
    while (static_cast<int>(spec.components.size()) < m) {
      ExponentialComponent c{std::polar(mag(rng), phase(rng)), damp(rng), freq(rng)};
      const bool clear = std::all_of(spec.components.begin(), spec.components.end(),
                                     [&](const ExponentialComponent& o) { return std::abs(o.pole() - c.pole()) >= min_gap; });
      if (clear) spec.components.push_back(c);
    }
    return spec;
  }
};

/// Max over true poles of the distance to the nearest estimate, using each
/// estimate at most once.
inline double matched_pole_error(const CVector& truth, const CVector& est) {
  std::vector<bool> used(static_cast<std::size_t>(est.size()), false);
  double worst = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    Index best = -1;
    double best_d = INFINITY;
    for (Index k = 0; k < est.size(); ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double d = std::abs(truth[i] - est[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (best < 0) return INFINITY;
    used[static_cast<std::size_t>(best)] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

inline Index nearest(const CVector& values, Complex target) {
  Index best = 0;
  for (Index k = 1; k < values.size(); ++k)
    if (std::abs(values[k] - target) < std::abs(values[best] - target)) best = k;
  return best;
}

inline SignalSpec rayleigh_pair(bool damped, Index n = 71) {
  const double theta2 = 2.0 + 2.0 * std::numbers::pi / static_cast<double>(n);
  return {{{1.0, damped ? 0.03 : 0.0, 2.0}, {1.0, damped ? 0.05 : 0.0, theta2}}, n};
}

}  // namespace samp::testing
