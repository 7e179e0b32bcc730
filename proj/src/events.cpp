#include "histmatch/events.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "histmatch/error.hpp"

namespace histmatch {

namespace {

constexpr double kEarthRadiusM = 6371008.8;
constexpr double kMetersPerDegree = kEarthRadiusM * std::numbers::pi / 180.0;

std::int64_t week_of(std::int64_t timestamp) {
  // floor division; timestamps are non-negative in valid logs
  return timestamp >= 0 ? timestamp / kSecondsPerWeek : -((-timestamp + kSecondsPerWeek - 1) / kSecondsPerWeek);
}

}  // namespace

std::pair<EventLog, EventLog> split_by_period(const EventLog& log, std::int64_t boundary) {
  EventLog before, after;
  for (const auto& r : log.records) (r.timestamp < boundary ? before : after).records.push_back(r);
  return {std::move(before), std::move(after)};
}

std::set<OwnerId> filter_active_users(const EventLog& a, const EventLog& b) {
  std::set<OwnerId> in_a, out;
  for (const auto& r : a.records) in_a.insert(r.user);
  for (const auto& r : b.records)
    if (in_a.contains(r.user)) out.insert(r.user);
  return out;
}

std::pair<EventLog, EventLog> split_by_active_weeks(const EventLog& log, int min_active_weeks) {
  std::map<OwnerId, std::set<std::int64_t>> weeks;
  for (const auto& r : log.records) weeks[r.user].insert(week_of(r.timestamp));

  std::map<OwnerId, std::int64_t> first_week_of_second_part;
  for (const auto& [user, active] : weeks) {
    if (static_cast<int>(active.size()) < min_active_weeks || active.size() < 2) continue;
    auto it = active.begin();
    std::advance(it, active.size() / 2);
    first_week_of_second_part.emplace(user, *it);
  }

  EventLog first, second;
  for (const auto& r : log.records) {
    auto it = first_week_of_second_part.find(r.user);
    if (it == first_week_of_second_part.end()) continue;
    (week_of(r.timestamp) < it->second ? first : second).records.push_back(r);
  }
  return {std::move(first), std::move(second)};
}

HistogramSet histograms_by_user(const EventLog& log, const std::set<OwnerId>& users) {
  std::map<OwnerId, std::unordered_map<LocationId, std::uint64_t>> counts;
  for (const auto& r : log.records) {
    if (!users.empty() && !users.contains(r.user)) continue;
    ++counts[r.user][r.location];
  }
  HistogramSet set;
  for (const auto& [user, per_location] : counts) {
    std::vector<std::pair<LocationId, std::uint64_t>> flat(per_location.begin(), per_location.end());
    set.add(user, Histogram::from_counts(flat));
  }
  return set;
}

Histogram aggregate_locations(const Histogram& h, const std::map<LocationId, LocationId>& mapping) {
  std::map<LocationId, double> merged;
  for (const auto& e : h.entries()) {
    auto it = mapping.find(e.location);
    merged[it == mapping.end() ? e.location : it->second] += e.mass;
  }
  std::vector<Histogram::Entry> entries;
  entries.reserve(merged.size());
  for (auto& [location, mass] : merged) entries.push_back({location, mass});
  return Histogram::from_masses(std::move(entries), h.sample_count());
}

LocationId quantize_geo(double lat, double lon, double cell_side_m, GeoPoint origin) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || !std::isfinite(origin.lat) ||
      !std::isfinite(origin.lon))
    throw Error(ErrorCode::kInvalidCoordinate, "non-finite coordinate");
  if (!(cell_side_m > 0.0) || !std::isfinite(cell_side_m))
    throw Error(ErrorCode::kInvalidArgument, "cell side must be positive");

  const double north_m = (lat - origin.lat) * kMetersPerDegree;
  const double east_m =
      (lon - origin.lon) * kMetersPerDegree * std::cos(origin.lat * std::numbers::pi / 180.0);
  const auto row = static_cast<long long>(std::floor(north_m / cell_side_m));
  const auto col = static_cast<long long>(std::floor(east_m / cell_side_m));
  return std::to_string(row) + ":" + std::to_string(col);
}

Histogram suppress_and_renormalize(const Histogram& h, const std::set<LocationId>& keep) {
  double kept = 0.0;
  std::vector<Histogram::Entry> entries;
  for (const auto& e : h.entries()) {
    if (!keep.contains(e.location)) continue;
    entries.push_back(e);
    kept += e.mass;
  }
  if (entries.empty() || !(kept > 0.0))
    throw Error(ErrorCode::kZeroMassAfterSuppression, "no retained mass after suppression");
  if (entries.size() == h.support_count()) return h;
  for (auto& e : entries) e.mass /= kept;
  return Histogram::from_masses(std::move(entries), h.sample_count());
}

std::set<LocationId> most_popular_locations(std::initializer_list<const HistogramSet*> sets,
                                            std::size_t count) {
  std::map<LocationId, double> popularity;
  for (const auto* set : sets)
    for (const auto& item : set->items()) {
      const double weight =
          item.histogram.sample_count() > 0 ? static_cast<double>(item.histogram.sample_count()) : 1.0;
      for (const auto& e : item.histogram.entries()) popularity[e.location] += e.mass * weight;
    }
  std::vector<std::pair<LocationId, double>> ranked(popularity.begin(), popularity.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::set<LocationId> out;
  for (std::size_t i = 0; i < ranked.size() && i < count; ++i) out.insert(ranked[i].first);
  return out;
}

}  // namespace histmatch
