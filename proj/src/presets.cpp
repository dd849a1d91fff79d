#include "samp/presets.hpp"

#include <numbers>

namespace samp {
namespace {

ExperimentConfig snr_run(const std::string& label, int m, bool damped, NoiseKind noise) {
  ExperimentConfig c;
  c.label = label;
  c.scenario.components = m;
  c.scenario.damped = damped;
  c.sweep = {SweepKind::SnrDb, default_snr_grid()};
  c.noise.kind = noise;
  return c;
}

std::string damping_tag(bool damped) { return damped ? "damped" : "undamped"; }

}  // namespace

std::vector<double> default_snr_grid() {
  std::vector<double> g;
  for (int s = -10; s <= 20; s += 2) g.push_back(static_cast<double>(s));
  return g;
}

std::vector<Preset> all_presets() {
  std::vector<Preset> out;

  const struct {
    const char* name;
    int m;
    bool damped;
  } snr_figs[] = {{"fig3a", 2, false}, {"fig3b", 2, true}, {"fig3c", 4, false}, {"fig3d", 4, true}};
  for (const auto& f : snr_figs) {
    Preset p;
    p.name = f.name;
    p.description = "p_d versus SNR, M=" + std::to_string(f.m) + " " + damping_tag(f.damped) + ", N=71";
    p.runs.push_back(snr_run("M" + std::to_string(f.m) + "-" + damping_tag(f.damped), f.m, f.damped,
                             NoiseKind::ComplexGaussian));
    out.push_back(std::move(p));
  }

  {
    Preset p;
    p.name = "fig4";
    p.description = "p_d versus N at 8 dB, M=2 undamped and damped, Rayleigh spacing";
    for (bool damped : {false, true}) {
      ExperimentConfig c;
      c.label = "M2-" + damping_tag(damped);
      c.scenario.damped = damped;
      c.scenario.snr_db = 8.0;
      c.sweep.kind = SweepKind::Samples;
      for (int n = 20; n <= 150; n += 10) c.sweep.grid.push_back(n);
      p.runs.push_back(c);
    }
    out.push_back(std::move(p));
  }

  {
    Preset p;
    p.name = "fig5";
    p.description = "p_d versus frequency spacing at 10 dB, M=2, N=71";
    const double rayleigh = 2.0 * std::numbers::pi / 71.0;
    for (bool damped : {false, true}) {
      ExperimentConfig c;
      c.label = "M2-" + damping_tag(damped);
      c.scenario.damped = damped;
      c.scenario.snr_db = 10.0;
      c.sweep.kind = SweepKind::Separation;
      for (int k = 1; k <= 8; ++k) c.sweep.grid.push_back(0.25 * k * rayleigh);
      p.runs.push_back(c);
    }
    out.push_back(std::move(p));
  }

  {
    Preset p;
    p.name = "fig6";
    p.description = "frequency bias and RMSE versus SNR with the CRB, M=2, N=71";
    for (bool damped : {false, true})
      p.runs.push_back(snr_run("M2-" + damping_tag(damped), 2, damped, NoiseKind::ComplexGaussian));
    out.push_back(std::move(p));
  }

  {
    Preset p;
    p.name = "table1";
    p.description = "AUC of p_d over -10..20 dB, M=2, normal and bi-normal noise";
    for (bool damped : {false, true})
      for (NoiseKind k : {NoiseKind::ComplexGaussian, NoiseKind::BiNormal})
        p.runs.push_back(snr_run(damping_tag(damped) + "-" + (k == NoiseKind::BiNormal ? "binormal" : "normal"), 2,
                                 damped, k));
    out.push_back(std::move(p));
  }

  {
    Preset p;
    p.name = "fig7-timing";
    p.description = "median run time per method versus N at 10 dB, M=2 undamped";
    p.kind = PresetKind::Timing;
    p.timing.scenario.snr_db = 10.0;
    p.timing.sample_grid = {50, 100, 150, 200, 250, 300};
    p.timing.methods = known_methods();
    out.push_back(std::move(p));
  }

  {
    Preset p;
    p.name = "fig8-amps";
    p.description = "mode-based versus least-squares amplitudes at r=L, M=4, 10 dB";
    p.kind = PresetKind::Amplitudes;
    out.push_back(std::move(p));
  }
  return out;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (auto& p : all_presets())
    if (p.name == name) return p;
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : all_presets()) names.push_back(p.name);
  return names;
}

}  // namespace samp
