#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "histmatch/anonymize.hpp"
#include "histmatch/events.hpp"
#include "histmatch/histogram.hpp"
#include "histmatch/matcher.hpp"

namespace histmatch::io {

/// Loaded histogram masses must sum to one within this tolerance; they are
/// renormalized on load.
inline constexpr double kLoadTolerance = 1e-6;

/// Splits one CSV line (RFC 4180 quoting) into fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// Headered CSV reader. Throws ParseError when the header lacks a required
/// column; rows are exposed by column name.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::vector<std::string> required_columns, std::string source = "<stream>");

  /// Advances to the next non-empty row; false at end of input.
  bool next();
  const std::string& field(const std::string& column) const;
  std::size_t line_number() const { return line_number_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::string> row_;
  std::size_t line_number_ = 0;
};

/// `user,timestamp,location`.
EventLog read_event_log(std::istream& in, const std::string& source = "<stream>");
EventLog read_event_log(const std::filesystem::path& path);

/// `user,timestamp,lat,lon` quantized onto a square grid. When `origin` is
/// unset the south-west corner of the data is used.
EventLog read_gps_log(std::istream& in, double cell_side_m, std::optional<GeoPoint> origin,
                      const std::string& source = "<stream>");
EventLog read_gps_log(const std::filesystem::path& path, double cell_side_m, std::optional<GeoPoint> origin);

/// `from,to`.
std::map<LocationId, LocationId> read_aggregation_table(std::istream& in, const std::string& source = "<stream>");
std::map<LocationId, LocationId> read_aggregation_table(const std::filesystem::path& path);

/// `owner,location,probability`, rows grouped by owner.
HistogramSet read_histogram_set(std::istream& in, bool labeled, const std::string& source = "<stream>");
HistogramSet read_histogram_set(const std::filesystem::path& path, bool labeled);
void write_histogram_set(std::ostream& out, const HistogramSet& set);
void write_histogram_set(const std::filesystem::path& path, const HistogramSet& set);

/// `left_owner,right_owner`.
GroundTruth read_truth(std::istream& in, const std::string& source = "<stream>");
GroundTruth read_truth(const std::filesystem::path& path);
void write_truth(std::ostream& out, const GroundTruth& truth);
void write_truth(const std::filesystem::path& path, const GroundTruth& truth);

/// `left_owner,right_owner,weight`.
void write_match_csv(std::ostream& out, const MatchResult& result, const HistogramSet& left,
                     const HistogramSet& right);
void write_match_csv(const std::filesystem::path& path, const MatchResult& result, const HistogramSet& left,
                     const HistogramSet& right);

/// Reads a match CSV back as owner pairs.
std::vector<std::pair<OwnerId, OwnerId>> read_match_pairs(std::istream& in, const std::string& source = "<stream>");
std::vector<std::pair<OwnerId, OwnerId>> read_match_pairs(const std::filesystem::path& path);

/// `{algorithm, cardinality, total_weight, runtime_ms}`.
nlohmann::json match_summary_json(const MatchResult& result);

/// `{k, g, L, clusters: [[owner, ...], ...]}`.
nlohmann::json partition_json(const ClusterPartition& partition, std::size_t k, double loss);

/// Formats a double so that it round-trips exactly.
std::string format_double(double value);

}  // namespace histmatch::io
