#include "samp/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

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

double parse_number(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  if (t.empty()) throw ParseError("empty field", line);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;  // from_chars rejects a leading plus
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("not a number: '" + t + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value: '" + t + "'", line);
  return v;
}

std::string fixed17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

const char* kMetricHeader = "x,method,value,ci_halfwidth,scenario,trials,failures\n";

void metric_row(std::ostream& out, double x, const std::string& method, double value, double ci,
                const std::string& scenario, int trials, int failures) {
  out << format_double(x) << ',' << method << ',' << format_double(value) << ',' << format_double(ci) << ','
      << scenario << ',' << trials << ',' << failures << '\n';
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line)
    : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

TimeSeries read_signal_csv(std::istream& in) {
  std::vector<Complex> values;
  std::string raw;
  std::size_t line = 0;
  bool seen_content = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const bool first = !seen_content;
    seen_content = true;
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
      throw ParseError("expected two comma-separated columns re,im", line);
    const std::string a = trim(text.substr(0, comma));
    const std::string b = trim(text.substr(comma + 1));
    if (first && lower(a) == "re" && lower(b) == "im") continue;
    values.emplace_back(parse_number(a, line), parse_number(b, line));
  }
  if (values.empty()) throw ParseError("signal file contains no samples", 0);
  TimeSeries y{CVector(static_cast<Index>(values.size()))};
  for (std::size_t k = 0; k < values.size(); ++k) y.samples[static_cast<Index>(k)] = values[k];
  return y;
}

TimeSeries read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return read_signal_csv(in);
}

void write_signal_csv(std::ostream& out, const TimeSeries& y) {
  out << "re,im\n";
  for (Index n = 0; n < y.size(); ++n) out << fixed17(y[n].real()) << ',' << fixed17(y[n].imag()) << '\n';
}

void write_estimates_csv(std::ostream& out, const ParameterEstimates& est) {
  out << "theta,alpha,re_b,im_b,feature,mode_index\n";
  for (Index k = 0; k < est.order; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double feature = idx < est.features.size() ? est.features[idx] : std::nan("");
    const Index mode = idx < est.mode_indices.size() ? est.mode_indices[idx] : k;
    out << fixed17(est.frequencies[k]) << ',' << fixed17(est.dampings[k]) << ',' << fixed17(est.amplitudes[k].real())
        << ',' << fixed17(est.amplitudes[k].imag()) << ',' << format_double(feature) << ',' << mode << '\n';
  }
}

void write_features_csv(std::ostream& out, const std::vector<ModeFeature>& features) {
  out << "index,re_z,im_z,raw,d,eps,threshold,is_signal\n";
  for (const auto& f : features)
    out << f.index << ',' << format_double(f.maximizer.real()) << ',' << format_double(f.maximizer.imag()) << ','
        << format_double(f.raw) << ',' << format_double(f.concentration) << ',' << format_double(f.normalized) << ','
        << format_double(f.threshold) << ',' << (f.is_signal ? 1 : 0) << '\n';
}

void write_metric_files(const std::filesystem::path& dir, const std::vector<MetricSeries>& series,
                        bool include_runtime) {
  std::filesystem::create_directories(dir);
  auto pd = open_out(dir / "pd.csv");
  auto bias = open_out(dir / "bias.csv");
  auto rmse = open_out(dir / "rmse.csv");
  auto summary = open_out(dir / "summary.csv");
  std::ofstream runtime;
  if (include_runtime) runtime = open_out(dir / "runtime.csv");
  pd << kMetricHeader;
  bias << kMetricHeader;
  rmse << kMetricHeader;
  if (include_runtime) runtime << kMetricHeader;
  summary << "scenario,method,auc\n";

  bool any_features = false;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.methods.size(); ++k) {
      const std::string& m = s.methods[k];
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const PointMetrics& p = s.points[k][i];
        metric_row(pd, s.x[i], m, p.p_d, p.p_d_ci, s.label, p.trials, p.failures);
        metric_row(bias, s.x[i], m, p.bias.mean(), p.bias_ci.mean(), s.label, p.trials, p.failures);
        metric_row(rmse, s.x[i], m, p.average_rmse(), p.rmse_ci.mean(), s.label, p.trials, p.failures);
        for (Index c = 0; c < p.bias.size(); ++c) {
          const std::string tag = m + "#" + std::to_string(c + 1);
          metric_row(bias, s.x[i], tag, p.bias[c], p.bias_ci[c], s.label, p.trials, p.failures);
          metric_row(rmse, s.x[i], tag, p.rmse[c], p.rmse_ci[c], s.label, p.trials, p.failures);
        }
        if (include_runtime) metric_row(runtime, s.x[i], m, p.mean_seconds, 0.0, s.label, p.trials, p.failures);
      }
      summary << s.label << ',' << m << ',' << format_double(s.auc[k]) << '\n';
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const RVector& crb = s.crb[i];
      metric_row(rmse, s.x[i], "CRB", std::sqrt(crb.mean()), 0.0, s.label, 0, 0);
      for (Index c = 0; c < crb.size(); ++c)
        metric_row(rmse, s.x[i], "CRB#" + std::to_string(c + 1), std::sqrt(crb[c]), 0.0, s.label, 0, 0);
    }
    any_features = any_features || !s.features.empty();
  }

  if (any_features) {
    auto dump = open_out(dir / "features_dump.csv");
    dump << "scenario,x,index,re_z,im_z,raw,d,eps,threshold,is_signal\n";
    for (const auto& s : series)
      for (const auto& row : s.features) {
        const ModeFeature& f = row.feature;
        dump << s.label << ',' << format_double(row.x) << ',' << f.index << ',' << format_double(f.maximizer.real())
             << ',' << format_double(f.maximizer.imag()) << ',' << format_double(f.raw) << ','
             << format_double(f.concentration) << ',' << format_double(f.normalized) << ','
             << format_double(f.threshold) << ',' << (f.is_signal ? 1 : 0) << '\n';
      }
  }
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "N,method,seconds\n";
  for (const auto& r : rows) out << r.samples << ',' << r.method << ',' << format_double(r.seconds) << '\n';
}

void write_amplitude_csv(std::ostream& out, const std::vector<AmplitudeStudyRow>& rows) {
  out << "N,method,rmse,seconds\n";
  for (const auto& r : rows)
    out << r.samples << ',' << r.method << ',' << format_double(r.rmse) << ',' << format_double(r.seconds) << '\n';
}

}  // namespace samp
