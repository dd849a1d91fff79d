#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "samp/bench.hpp"
#include "samp/estimate.hpp"
#include "samp/signal_model.hpp"

namespace samp {

/// Malformed input file; `line` is 1-based (0 when not line-specific).
class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& message, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// `re,im` rows with an optional `re,im` header. Blank lines are ignored.
TimeSeries read_signal_csv(std::istream& in);
TimeSeries read_signal_csv(const std::filesystem::path& path);

/// Writes the header and 17 significant digits per value.
void write_signal_csv(std::ostream& out, const TimeSeries& y);

void write_estimates_csv(std::ostream& out, const ParameterEstimates& est);

/// index, re(z*), im(z*), raw, d, eps, threshold, is_signal
void write_features_csv(std::ostream& out, const std::vector<ModeFeature>& features);

/// Metric files of one or more series, written into `dir`: pd.csv,
/// bias.csv, rmse.csv and summary.csv. Wall times are not reproducible, so
/// runtime.csv is only written on request. features_dump.csv appears when
/// any series carries SAMP features.
void write_metric_files(const std::filesystem::path& dir, const std::vector<MetricSeries>& series,
                        bool include_runtime = false);

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows);

void write_amplitude_csv(std::ostream& out, const std::vector<AmplitudeStudyRow>& rows);

}  // namespace samp
