#include "samp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "samp/csv_io.hpp"

namespace samp {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bad_value(const ConfigEntry& e, const std::string& why) {
  std::string where = e.line > 0 ? " (line " + std::to_string(e.line) + ")" : "";
  throw InvalidArgument("bad value '" + e.value + "' for " + e.qualified() + where + ": " + why);
}

double to_double(const ConfigEntry& e, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) bad_value(e, "expected a number");
  return v;
}

long long to_int(const ConfigEntry& e, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(e, "expected an integer");
  return v;
}

bool to_bool(const ConfigEntry& e) {
  const std::string t = lower(trim(e.value));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  bad_value(e, "expected true or false");
}

bool is_auto(const ConfigEntry& e) { return lower(trim(e.value)) == "auto"; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const ConfigEntry& e) {
  std::vector<double> out;
  for (const auto& s : split_list(e.value)) out.push_back(to_double(e, s));
  if (out.empty()) bad_value(e, "expected a comma-separated list");
  return out;
}

/// start:stop:step, inclusive of stop up to rounding.
std::vector<double> to_range(const ConfigEntry& e) {
  const auto a = e.value.find(':');
  const auto b = a == std::string::npos ? a : e.value.find(':', a + 1);
  if (b == std::string::npos) bad_value(e, "expected start:stop:step");
  const double start = to_double(e, e.value.substr(0, a));
  const double stop = to_double(e, e.value.substr(a + 1, b - a - 1));
  const double step = to_double(e, e.value.substr(b + 1));
  if (step <= 0.0 || stop < start) bad_value(e, "need step > 0 and stop >= start");
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 100000) bad_value(e, "too many points");
  std::vector<double> out;
  for (long long k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const ConfigEntry&)>;

struct KeySpec {
  const char* section;
  const char* key;
  const char* fallback;
  const char* doc;
  Setter set;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"experiment", "label", "experiment", "scenario column in the metric CSVs",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const std::string v = trim(e.value);
         if (v.empty() || v.find(',') != std::string::npos) bad_value(e, "label must be non-empty without commas");
         c.label = v;
       }},
      {"experiment", "trials", "500", "Monte-Carlo trials per sweep point",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const auto v = to_int(e, e.value);
         if (v < 1 || v > 100000000) bad_value(e, "must be positive");
         c.trials = static_cast<int>(v);
       }},
      {"experiment", "seed", "1", "base seed; every trial seed derives from it",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const auto v = to_int(e, e.value);
         if (v < 0) bad_value(e, "must be non-negative");
         c.seed = static_cast<std::uint64_t>(v);
       }},
      {"experiment", "threads", "1", "worker threads; results do not depend on it",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const auto v = to_int(e, e.value);
         if (v < 1 || v > 1024) bad_value(e, "must be in 1..1024");
         c.threads = static_cast<int>(v);
       }},
      {"experiment", "methods", "SAMP,GAP,SDD,EFF,AIC,BIC", "methods to run, comma-separated",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         auto m = split_list(e.value);
         for (auto& name : m) {
           std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
           if (!is_known_method(name)) bad_value(e, "unknown method '" + name + "'");
         }
         if (m.empty()) bad_value(e, "at least one method is required");
         c.methods = m;
       }},
      {"experiment", "dump_features", "false", "also write SAMP features of trial 0",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.dump_features = to_bool(e); }},

      {"scenario", "components", "2", "2 or 4 clustered components",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const auto v = to_int(e, e.value);
         if (v != 2 && v != 4) bad_value(e, "must be 2 or 4");
         c.scenario.components = static_cast<int>(v);
       }},
      {"scenario", "damped", "false", "dampings 0.03 and 0.05 when true, 0 otherwise",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.scenario.damped = to_bool(e); }},
      {"scenario", "samples", "71", "N when it is not the swept quantity",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const auto v = to_int(e, e.value);
         if (v < 8) bad_value(e, "must be at least 8");
         c.scenario.samples = static_cast<Index>(v);
       }},
      {"scenario", "snr_db", "10", "per-component SNR in dB when it is not swept",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.scenario.snr_db = to_double(e, e.value); }},
      {"scenario", "separation", "auto", "frequency spacing in rad/sample; auto means 2 pi / N",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (is_auto(e)) {
           c.scenario.separation.reset();
           return;
         }
         const double v = to_double(e, e.value);
         if (v <= 0.0) bad_value(e, "must be positive");
         c.scenario.separation = v;
       }},
      {"scenario", "theta1", "2", "frequency of the first component in rad/sample",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.scenario.theta1 = to_double(e, e.value); }},

      {"sweep", "kind", "snr", "swept quantity: snr, samples or separation",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const std::string v = lower(trim(e.value));
         if (v == "snr")
           c.sweep.kind = SweepKind::SnrDb;
         else if (v == "samples")
           c.sweep.kind = SweepKind::Samples;
         else if (v == "separation")
           c.sweep.kind = SweepKind::Separation;
         else
           bad_value(e, "expected snr, samples or separation");
       }},
      {"sweep", "grid", "-10,-8,...,20", "explicit comma-separated sweep values",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.sweep.grid = to_doubles(e); }},
      {"sweep", "range", "-10:20:2", "start:stop:step, an alternative to grid",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.sweep.grid = to_range(e); }},

      {"noise", "kind", "normal", "normal (circular complex Gaussian) or binormal",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const std::string v = lower(trim(e.value));
         if (v == "normal")
           c.noise.kind = NoiseKind::ComplexGaussian;
         else if (v == "binormal")
           c.noise.kind = NoiseKind::BiNormal;
         else
           bad_value(e, "expected normal or binormal");
       }},
      {"noise", "binormal_threshold", "0.85", "probability of the narrow bi-normal component",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.noise.binormal_threshold = to_double(e, e.value); }},
      {"noise", "binormal_scale_ratio", "3", "wide over narrow standard deviation",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.noise.binormal_scale_ratio = to_double(e, e.value); }},

      {"penalty", "scale", "auto", "s in the (2 pi / s)^2 mismatch charge; auto uses the current N",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (is_auto(e)) {
           c.penalty.fixed_scale.reset();
           return;
         }
         const double v = to_double(e, e.value);
         if (v <= 0.0) bad_value(e, "must be positive");
         c.penalty.fixed_scale = v;
       }},

      {"samp", "pencil_parameter", "auto", "L; auto means round(N/3)",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (is_auto(e)) {
           c.samp.pencil_parameter.reset();
           return;
         }
         const auto v = to_int(e, e.value);
         if (v < 1) bad_value(e, "must be positive");
         c.samp.pencil_parameter = static_cast<Index>(v);
       }},
      {"samp", "truncation", "effective-rank", "weak truncation: effective-rank, none or half",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const std::string v = lower(trim(e.value));
         if (v == "effective-rank")
           c.samp.truncation = WeakTruncation::EffectiveRank;
         else if (v == "none")
           c.samp.truncation = WeakTruncation::None;
         else if (v == "half")
           c.samp.truncation = WeakTruncation::Half;
         else
           bad_value(e, "expected effective-rank, none or half");
       }},
      {"samp", "freq_oversample", "8", "FFT length over the mode length (power of two used)",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const auto v = to_int(e, e.value);
         if (v < 1 || v > 1024) bad_value(e, "must be in 1..1024");
         c.samp.grid.freq_oversample = static_cast<int>(v);
       }},
      {"samp", "radii", "15 log-spaced in [exp(-0.15), 1]", "radius grid, comma-separated",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         auto r = to_doubles(e);
         for (double x : r)
           if (x <= 0.0) bad_value(e, "radii must be positive");
         c.samp.grid.radius_grid = r;
       }},
      {"samp", "refine", "true", "parabolic refinement of the similarity peak",
       [](ExperimentConfig& c, const ConfigEntry& e) { c.samp.grid.refine = to_bool(e); }},
      {"samp", "threshold_constant", "auto", "c for every mode; auto means 10 sqrt(N-L)",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (is_auto(e)) {
           c.samp.threshold_constant.reset();
           return;
         }
         const double v = to_double(e, e.value);
         if (v < 0.0) bad_value(e, "must be non-negative");
         c.samp.threshold_constant = v;
       }},
      {"samp", "per_mode_constants", "", "c per mode in descending |lambda| order; overrides the above",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (trim(e.value).empty()) {
           c.samp.per_mode_constants.clear();
           return;
         }
         c.samp.per_mode_constants = to_doubles(e);
       }},

      {"classical", "pencil_parameter", "auto", "L for the classical detectors; auto means round(N/3)",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (is_auto(e)) {
           c.classical.pencil_parameter.reset();
           return;
         }
         const auto v = to_int(e, e.value);
         if (v < 1) bad_value(e, "must be positive");
         c.classical.pencil_parameter = static_cast<Index>(v);
       }},
      {"classical", "sdd_digits", "3", "p in the SDD rule sigma_k / sigma_1 >= 10^-p",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         const double v = to_double(e, e.value);
         if (v <= 0.0) bad_value(e, "must be positive");
         c.classical.sdd_digits = v;
       }},
      {"classical", "ite_max_order", "auto", "largest order tried by AIC/BIC; auto means L",
       [](ExperimentConfig& c, const ConfigEntry& e) {
         if (is_auto(e)) {
           c.classical.ite_max_order.reset();
           return;
         }
         const auto v = to_int(e, e.value);
         if (v < 1) bad_value(e, "must be positive");
         c.classical.ite_max_order = static_cast<Index>(v);
       }},
  };
  return table;
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::istream& in) {
  std::vector<ConfigEntry> out;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError("unterminated section header", line);
      section = lower(trim(text.substr(1, text.size() - 2)));
      if (section.empty()) throw ParseError("empty section name", line);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line);
    if (section.empty()) throw ParseError("key outside of any [section]", line);
    ConfigEntry e{section, lower(trim(text.substr(0, eq))), trim(text.substr(eq + 1)), line};
    if (e.key.empty()) throw ParseError("empty key", line);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path.string() + "'");
  return parse_config(in);
}

ConfigEntry parse_override(const std::string& text) {
  const auto eq = text.find('=');
  const std::string lhs = eq == std::string::npos ? "" : trim(text.substr(0, eq));
  const auto dot = lhs.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot == 0 || dot + 1 == lhs.size())
    throw InvalidArgument("override '" + text + "' must look like section.key=value");
  return {lower(lhs.substr(0, dot)), lower(lhs.substr(dot + 1)), trim(text.substr(eq + 1)), 0};
}

void apply_config(ExperimentConfig& config, const std::vector<ConfigEntry>& entries) {
  const auto& table = key_table();
  for (const auto& e : entries) {
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeySpec& k) { return e.section == k.section && e.key == k.key; });
    if (it == table.end()) {
      std::string where = e.line > 0 ? " (line " + std::to_string(e.line) + ")" : "";
      throw InvalidArgument("unknown config key '" + e.qualified() + "'" + where);
    }
    it->set(config, e);
  }
}

std::string config_reference() {
  std::ostringstream out;
  std::string section;
  for (const auto& k : key_table()) {
    if (section != k.section) {
      section = k.section;
      out << "[" << section << "]\n";
    }
    out << "  " << k.key << " = " << k.fallback << "    # " << k.doc << "\n";
  }
  return out.str();
}

}  // namespace samp
