#include "histmatch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "histmatch/error.hpp"

namespace histmatch::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  return out;
}

[[noreturn]] void parse_error(const CsvReader& reader, const std::string& what) {
  throw Error(ErrorCode::kParseError,
              reader.source() + ":" + std::to_string(reader.line_number()) + ": " + what);
}

std::int64_t parse_timestamp(const CsvReader& reader, const std::string& text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) parse_error(reader, "bad timestamp '" + text + "'");
  if (value < 0) parse_error(reader, "negative timestamp");
  return value;
}

double parse_real(const CsvReader& reader, const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) parse_error(reader, "bad number '" + text + "'");
  return value;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

CsvReader::CsvReader(std::istream& in, std::vector<std::string> required_columns, std::string source)
    : in_(in), source_(std::move(source)) {
  std::string header;
  if (!std::getline(in_, header)) throw Error(ErrorCode::kParseError, source_ + ": missing header");
  ++line_number_;
  const auto names = split_csv_line(header);
  for (std::size_t i = 0; i < names.size(); ++i) columns_.emplace(names[i], i);
  for (const auto& col : required_columns)
    if (!columns_.contains(col)) throw Error(ErrorCode::kParseError, source_ + ": missing column '" + col + "'");
}

bool CsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.empty() || line == "\r") continue;
    row_ = split_csv_line(line);
    if (row_.size() < columns_.size()) parse_error(*this, "expected " + std::to_string(columns_.size()) + " fields");
    return true;
  }
  return false;
}

const std::string& CsvReader::field(const std::string& column) const { return row_.at(columns_.at(column)); }

EventLog read_event_log(std::istream& in, const std::string& source) {
  CsvReader reader(in, {"user", "timestamp", "location"}, source);
  EventLog log;
  while (reader.next()) {
    EventRecord r{reader.field("user"), parse_timestamp(reader, reader.field("timestamp")),
                  reader.field("location")};
    if (r.user.empty() || r.location.empty()) parse_error(reader, "empty user or location");
    log.records.push_back(std::move(r));
  }
  return log;
}

EventLog read_event_log(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_event_log(in, path.string());
}

EventLog read_gps_log(std::istream& in, double cell_side_m, std::optional<GeoPoint> origin,
                      const std::string& source) {
  struct Fix {
    OwnerId user;
    std::int64_t timestamp;
    double lat, lon;
  };
  CsvReader reader(in, {"user", "timestamp", "lat", "lon"}, source);
  std::vector<Fix> fixes;
  while (reader.next()) {
    Fix f{reader.field("user"), parse_timestamp(reader, reader.field("timestamp")),
          parse_real(reader, reader.field("lat")), parse_real(reader, reader.field("lon"))};
    if (!std::isfinite(f.lat) || !std::isfinite(f.lon))
      throw Error(ErrorCode::kInvalidCoordinate, source + ":" + std::to_string(reader.line_number()) +
                                                     ": non-finite coordinate");
    fixes.push_back(std::move(f));
  }
  GeoPoint anchor{0.0, 0.0};
  if (origin) {
    anchor = *origin;
  } else if (!fixes.empty()) {
    anchor = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& f : fixes) {
      anchor.lat = std::min(anchor.lat, f.lat);
      anchor.lon = std::min(anchor.lon, f.lon);
    }
  }
  EventLog log;
  log.records.reserve(fixes.size());
  for (auto& f : fixes)
    log.records.push_back({std::move(f.user), f.timestamp, quantize_geo(f.lat, f.lon, cell_side_m, anchor)});
  return log;
}

EventLog read_gps_log(const std::filesystem::path& path, double cell_side_m, std::optional<GeoPoint> origin) {
  auto in = open_in(path);
  return read_gps_log(in, cell_side_m, origin, path.string());
}

std::map<LocationId, LocationId> read_aggregation_table(std::istream& in, const std::string& source) {
  CsvReader reader(in, {"from", "to"}, source);
  std::map<LocationId, LocationId> table;
  while (reader.next()) {
    const auto& from = reader.field("from");
    const auto& to = reader.field("to");
    if (from.empty() || to.empty()) parse_error(reader, "empty location id");
    auto [it, inserted] = table.emplace(from, to);
    if (!inserted && it->second != to) parse_error(reader, "conflicting mapping for '" + from + "'");
  }
  return table;
}

std::map<LocationId, LocationId> read_aggregation_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_aggregation_table(in, path.string());
}

HistogramSet read_histogram_set(std::istream& in, bool labeled, const std::string& source) {
  CsvReader reader(in, {"owner", "location", "probability"}, source);
  HistogramSet set;
  set.set_labeled(labeled);
  std::set<OwnerId> finished;
  OwnerId current;
  std::vector<Histogram::Entry> entries;

  auto flush = [&] {
    if (current.empty()) return;
    try {
      set.add(current, Histogram::from_masses(std::move(entries), 0, kLoadTolerance));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, source + ": owner '" + current + "': " + e.what());
    }
    finished.insert(current);
    entries.clear();
  };

  while (reader.next()) {
    const auto& owner = reader.field("owner");
    if (owner.empty()) parse_error(reader, "empty owner");
    if (owner != current) {
      flush();
      if (finished.contains(owner)) parse_error(reader, "rows of owner '" + owner + "' are not contiguous");
      current = owner;
    }
    entries.push_back({reader.field("location"), parse_real(reader, reader.field("probability"))});
  }
  flush();
  return set;
}

HistogramSet read_histogram_set(const std::filesystem::path& path, bool labeled) {
  auto in = open_in(path);
  return read_histogram_set(in, labeled, path.string());
}

void write_histogram_set(std::ostream& out, const HistogramSet& set) {
  out << "owner,location,probability\n";
  for (const auto& item : set.items())
    for (const auto& e : item.histogram.entries())
      out << csv_escape(item.owner) << ',' << csv_escape(e.location) << ',' << format_double(e.mass) << '\n';
}

void write_histogram_set(const std::filesystem::path& path, const HistogramSet& set) {
  auto out = open_out(path);
  write_histogram_set(out, set);
}

GroundTruth read_truth(std::istream& in, const std::string& source) {
  CsvReader reader(in, {"left_owner", "right_owner"}, source);
  GroundTruth truth;
  while (reader.next()) {
    try {
      truth.add(reader.field("left_owner"), reader.field("right_owner"));
    } catch (const Error& e) {
      parse_error(reader, e.what());
    }
  }
  return truth;
}

GroundTruth read_truth(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_truth(in, path.string());
}

void write_truth(std::ostream& out, const GroundTruth& truth) {
  out << "left_owner,right_owner\n";
  for (const auto& [l, r] : truth.mapping()) out << csv_escape(l) << ',' << csv_escape(r) << '\n';
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  auto out = open_out(path);
  write_truth(out, truth);
}

void write_match_csv(std::ostream& out, const MatchResult& result, const HistogramSet& left,
                     const HistogramSet& right) {
  out << "left_owner,right_owner,weight\n";
  for (const auto& p : result.pairs)
    out << csv_escape(left.owner(p.left)) << ',' << csv_escape(right.owner(p.right)) << ','
        << format_double(p.weight) << '\n';
}

void write_match_csv(const std::filesystem::path& path, const MatchResult& result, const HistogramSet& left,
                     const HistogramSet& right) {
  auto out = open_out(path);
  write_match_csv(out, result, left, right);
}

std::vector<std::pair<OwnerId, OwnerId>> read_match_pairs(std::istream& in, const std::string& source) {
  CsvReader reader(in, {"left_owner", "right_owner"}, source);
  std::vector<std::pair<OwnerId, OwnerId>> pairs;
  while (reader.next()) pairs.emplace_back(reader.field("left_owner"), reader.field("right_owner"));
  return pairs;
}

std::vector<std::pair<OwnerId, OwnerId>> read_match_pairs(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_match_pairs(in, path.string());
}

nlohmann::json match_summary_json(const MatchResult& result) {
  return {{"algorithm", algorithm_name(result.algorithm)},
          {"cardinality", result.cardinality()},
          {"total_weight", result.total_weight},
          {"runtime_ms", result.runtime_ms}};
}

nlohmann::json partition_json(const ClusterPartition& partition, std::size_t k, double loss) {
  return {{"k", k}, {"g", partition.g()}, {"L", loss}, {"clusters", partition.clusters}};
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace histmatch::io
