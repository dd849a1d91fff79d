#pragma once

#include <optional>
#include <string>
#include <vector>

#include "samp/bench.hpp"

namespace samp {

enum class PresetKind { MonteCarlo, Timing, Amplitudes };

struct TimingPlan {
  Scenario scenario;
  std::vector<Index> sample_grid;
  std::vector<std::string> methods;
  int repeats = 5;
  std::uint64_t seed = 1;
};

/// Named, ready-to-run experiment bundle. Monte-Carlo presets may hold
/// several runs (e.g. damped and undamped) written side by side.
struct Preset {
  std::string name;
  std::string description;
  PresetKind kind = PresetKind::MonteCarlo;
  std::vector<ExperimentConfig> runs;
  TimingPlan timing;
  AmplitudeStudyConfig amplitudes;
};

std::vector<Preset> all_presets();
std::optional<Preset> find_preset(const std::string& name);
std::vector<std::string> preset_names();

/// -10, -8, ..., 20 dB.
std::vector<double> default_snr_grid();

}  // namespace samp
