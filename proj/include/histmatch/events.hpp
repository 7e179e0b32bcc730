#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "histmatch/histogram.hpp"

namespace histmatch {

struct EventRecord {
  OwnerId user;
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  LocationId location;

  bool operator==(const EventRecord&) const = default;
};

struct EventLog {
  std::vector<EventRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

inline constexpr std::int64_t kSecondsPerWeek = 7 * 24 * 3600;

/// Half-open split: [.., boundary) and [boundary, ..).
std::pair<EventLog, EventLog> split_by_period(const EventLog& log, std::int64_t boundary);

/// Users with at least one record in both logs.
std::set<OwnerId> filter_active_users(const EventLog& a, const EventLog& b);

/// Splits every user's records by active week (UTC weeks since the epoch).
/// Users with fewer than `min_active_weeks` active weeks are dropped; for the
/// rest, the first floor(w/2) active weeks go to the first log and the
/// remaining weeks to the second.
std::pair<EventLog, EventLog> split_by_active_weeks(const EventLog& log, int min_active_weeks = 2);

/// One histogram per user present in `users` (all users when empty) built from
/// the log's location strings, in owner order.
HistogramSet histograms_by_user(const EventLog& log, const std::set<OwnerId>& users = {});

/// Re-keys the histogram's mass through `mapping`; unmapped ids map to
/// themselves.
Histogram aggregate_locations(const Histogram& h, const std::map<LocationId, LocationId>& mapping);

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

/// Grid-cell key "row:col" of a point on a square grid anchored at `origin`,
/// using an equirectangular projection at the origin latitude.
/// Throws InvalidCoordinate for non-finite input and InvalidArgument for a
/// non-positive cell side.
LocationId quantize_geo(double lat, double lon, double cell_side_m, GeoPoint origin);

/// Restricts the histogram to `keep` and renormalizes. Throws
/// ZeroMassAfterSuppression when no kept location has positive mass.
Histogram suppress_and_renormalize(const Histogram& h, const std::set<LocationId>& keep);

/// The `count` most visited locations across the given sets. A location's
/// popularity is its summed mass weighted by each histogram's sample count
/// (weight 1 when unknown); ties break by location id.
std::set<LocationId> most_popular_locations(std::initializer_list<const HistogramSet*> sets,
                                            std::size_t count);

}  // namespace histmatch
