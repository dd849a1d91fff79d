#include "samp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "samp/config.hpp"
#include "samp/csv_io.hpp"
#include "samp/presets.hpp"

namespace samp {
namespace {

struct AnalyzeArgs {
  std::string input;
  std::string output_dir = ".";
  std::string detector = "samp";
  std::string config_path;
  std::vector<std::string> overrides;
};

struct SimulateArgs {
  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string methods;
  std::optional<int> threads;
  std::string output_dir;
  bool dump_features = false;
  bool runtime = false;
};

struct BenchAmpsArgs {
  std::vector<Index> grid{100, 200, 400, 600};
  int trials = 20;
  int repeats = 5;
  double snr_db = 10.0;
  std::uint64_t seed = 1;
  std::string output_dir = "results/bench-amps";
};

std::ofstream open_file(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < items.size(); ++k) s += (k ? sep : "") + items[k];
  return s;
}

std::vector<ConfigEntry> collect_entries(const std::string& config_path, const std::vector<std::string>& overrides) {
  std::vector<ConfigEntry> entries;
  if (!config_path.empty()) entries = parse_config_file(config_path);
  for (const auto& o : overrides) entries.push_back(parse_override(o));
  return entries;
}

void print_components(std::ostream& out, const ParameterEstimates& est) {
  out << "k,theta,alpha,abs_b,arg_b\n";
  for (Index k = 0; k < est.order; ++k)
    out << k + 1 << ',' << format_double(est.frequencies[k]) << ',' << format_double(est.dampings[k]) << ','
        << format_double(std::abs(est.amplitudes[k])) << ',' << format_double(std::arg(est.amplitudes[k])) << '\n';
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
  ExperimentConfig cfg;
  apply_config(cfg, collect_entries(args.config_path, args.overrides));
  const TimeSeries y = read_signal_csv(std::filesystem::path(args.input));
  const std::filesystem::path dir(args.output_dir);
  std::filesystem::create_directories(dir);

  std::string lowered = args.detector;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });

  ParameterEstimates est;
  std::string detector_name;
  Index pencil = 0;
  if (lowered == "samp") {
    require(y.size() >= 8, "SAMP needs at least 8 samples");
    const SampAnalysis a = samp_analyze(y, cfg.samp);
    est = a.estimates;
    pencil = a.pencil_parameter;
    detector_name = "SAMP";
    auto features = open_file(dir / "features.csv");
    write_features_csv(features, a.detection.features);
  } else {
    const auto det = parse_classical_detector(lowered);
    if (!det) throw InvalidArgument("unknown detector '" + args.detector + "' (samp, sdd, gap, eff, aic, bic)");
    est = classical_pipeline(y, cfg.classical, *det);
    pencil = cfg.classical.pencil_parameter.value_or(default_pencil_parameter(y.size()));
    detector_name = to_string(*det);
  }

  auto estimates = open_file(dir / "estimates.csv");
  write_estimates_csv(estimates, est);
  auto meta = open_file(dir / "metadata.txt");
  meta << "detector=" << detector_name << "\nsamples=" << y.size() << "\npencil_parameter=" << pencil
       << "\norder=" << est.order << '\n';

  out << "detector: " << detector_name << '\n' << "order: " << est.order << '\n';
  print_components(out, est);
  return kExitOk;
}

void apply_simulate_flags(ExperimentConfig& c, const SimulateArgs& args) {
  std::vector<ConfigEntry> flags;
  if (args.trials) flags.push_back({"experiment", "trials", std::to_string(*args.trials), 0});
  if (args.seed) flags.push_back({"experiment", "seed", std::to_string(*args.seed), 0});
  if (!args.methods.empty()) flags.push_back({"experiment", "methods", args.methods, 0});
  if (args.threads) flags.push_back({"experiment", "threads", std::to_string(*args.threads), 0});
  if (args.dump_features) flags.push_back({"experiment", "dump_features", "true", 0});
  apply_config(c, flags);
}

int run_series(std::vector<ExperimentConfig> runs, const SimulateArgs& args, const std::filesystem::path& dir,
               std::ostream& out, std::ostream& err, int verbosity) {
  std::vector<MetricSeries> series;
  for (auto& run : runs) {
    run.validate();
    if (verbosity > 0) err << "running " << run.label << " (" << run.trials << " trials)\n";
    series.push_back(run_monte_carlo(run));
  }
  write_metric_files(dir, series, args.runtime);
  out << "scenario,method,auc\n";
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.methods.size(); ++k)
      out << s.label << ',' << s.methods[k] << ',' << format_double(s.auc[k]) << '\n';
  out << "wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err, int verbosity) {
  if (args.preset.empty() && args.config_path.empty())
    throw InvalidArgument("simulate needs --preset or --config");

  if (!args.config_path.empty()) {
    ExperimentConfig c;
    c.sweep.grid = default_snr_grid();
    apply_config(c, collect_entries(args.config_path, args.overrides));
    apply_simulate_flags(c, args);
    const std::filesystem::path dir = args.output_dir.empty() ? "results/" + c.label : args.output_dir;
    return run_series({c}, args, dir, out, err, verbosity);
  }

  const auto preset = find_preset(args.preset);
  if (!preset)
    throw InvalidArgument("unknown preset '" + args.preset + "'; available: " + join(preset_names(), ", "));
  const std::filesystem::path dir = args.output_dir.empty() ? "results/" + preset->name : args.output_dir;

  if (preset->kind == PresetKind::MonteCarlo) {
    std::vector<ExperimentConfig> runs = preset->runs;
    const auto entries = collect_entries("", args.overrides);
    for (auto& r : runs) {
      apply_config(r, entries);
      apply_simulate_flags(r, args);
    }
    return run_series(runs, args, dir, out, err, verbosity);
  }

  const bool methods_ignored = !args.methods.empty() && preset->kind == PresetKind::Amplitudes;
  if (!args.overrides.empty() || methods_ignored || args.dump_features || args.threads)
    throw InvalidArgument("preset '" + preset->name + "' accepts only --trials, --seed, --methods and --output-dir");

  if (preset->kind == PresetKind::Timing) {
    TimingPlan plan = preset->timing;
    if (args.trials) plan.repeats = *args.trials;
    if (args.seed) plan.seed = *args.seed;
    if (!args.methods.empty()) {
      ExperimentConfig tmp;
      apply_config(tmp, {{"experiment", "methods", args.methods, 0}});
      plan.methods = tmp.methods;
    }
    require(plan.repeats >= 1, "--trials must be positive");
    const auto rows = time_methods(plan.scenario, plan.sample_grid, plan.methods, plan.repeats, plan.seed);
    auto file = open_file(dir / "timing.csv");
    write_timing_csv(file, rows);
    write_timing_csv(out, rows);
    return kExitOk;
  }

  AmplitudeStudyConfig amp = preset->amplitudes;
  if (args.trials) amp.trials = *args.trials;
  if (args.seed) amp.seed = *args.seed;
  require(amp.trials >= 1, "--trials must be positive");
  const auto rows = amplitude_study(amp);
  auto file = open_file(dir / "amplitudes.csv");
  write_amplitude_csv(file, rows);
  write_amplitude_csv(out, rows);
  return kExitOk;
}

int cmd_bench_amps(const BenchAmpsArgs& args, std::ostream& out) {
  AmplitudeStudyConfig cfg;
  cfg.sample_grid = args.grid;
  cfg.trials = args.trials;
  cfg.timing_repeats = args.repeats;
  cfg.scenario.snr_db = args.snr_db;
  cfg.seed = args.seed;
  require(cfg.trials >= 1 && cfg.timing_repeats >= 1, "--trials and --repeats must be positive");
  require(!cfg.sample_grid.empty(), "--n-grid must not be empty");
  const auto rows = amplitude_study(cfg);
  auto file = open_file(std::filesystem::path(args.output_dir) / "amplitudes.csv");
  write_amplitude_csv(file, rows);
  write_amplitude_csv(out, rows);
  return kExitOk;
}

int cmd_presets(std::ostream& out) {
  for (const auto& p : all_presets()) out << std::left << std::setw(13) << p.name << p.description << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-aware matrix pencil: model order detection and estimation of complex exponentials"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Progress messages on standard error");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Detect and estimate the components of a signal file");
  analyze->add_option("input", an.input, "Signal CSV with re,im columns")->required();
  analyze->add_option("-o,--output-dir", an.output_dir, "Directory for estimates.csv, features.csv, metadata.txt")
      ->capture_default_str();
  analyze->add_option("-d,--detector", an.detector, "samp, sdd, gap, eff, aic or bic")->capture_default_str();
  analyze->add_option("-c,--config", an.config_path, "Config file; [samp] and [classical] sections apply");
  analyze->add_option("--set", an.overrides, "Override section.key=value, repeatable");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment and write metric CSVs");
  auto* preset_opt = simulate->add_option("-p,--preset", sim.preset, "Preset name, see `samp presets`");
  auto* config_opt = simulate->add_option("-c,--config", sim.config_path, "Experiment config file");
  preset_opt->excludes(config_opt);
  simulate->add_option("--set", sim.overrides, "Override section.key=value, repeatable");
  simulate->add_option("-n,--trials", sim.trials, "Trials per sweep point (preset default 500)");
  simulate->add_option("-s,--seed", sim.seed, "Base seed (default 1)");
  simulate->add_option("-m,--methods", sim.methods, "Comma-separated subset of SAMP,GAP,SDD,EFF,AIC,BIC");
  simulate->add_option("-j,--threads", sim.threads, "Worker threads (default 1); results do not depend on it");
  simulate->add_option("-o,--output-dir", sim.output_dir, "Output directory (default results/<name>)");
  simulate->add_flag("--dump-features", sim.dump_features, "Write SAMP features of trial 0 per sweep point");
  simulate->add_flag("--runtime", sim.runtime, "Also write runtime.csv (wall times are not reproducible)");
  simulate->footer("Config keys and defaults:\n" + config_reference());

  BenchAmpsArgs amps;
  auto* bench_amps = app.add_subcommand("bench-amps", "Mode-based versus least-squares amplitudes at full rank");
  bench_amps->add_option("--n-grid", amps.grid, "Sample counts")->delimiter(',')->capture_default_str();
  bench_amps->add_option("-n,--trials", amps.trials, "Noise draws per N for the RMSE")->capture_default_str();
  bench_amps->add_option("--repeats", amps.repeats, "Timed trials per N; the median is reported")
      ->capture_default_str();
  bench_amps->add_option("--snr", amps.snr_db, "Per-component SNR in dB")->capture_default_str();
  bench_amps->add_option("-s,--seed", amps.seed, "Base seed")->capture_default_str();
  bench_amps->add_option("-o,--output-dir", amps.output_dir, "Output directory")->capture_default_str();

  auto* presets = app.add_subcommand("presets", "List the built-in experiment presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(an, out);
    if (simulate->parsed()) return cmd_simulate(sim, out, err, verbosity);
    if (bench_amps->parsed()) return cmd_bench_amps(amps, out);
    if (presets->parsed()) return cmd_presets(out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace samp
