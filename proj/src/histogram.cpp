#include "histmatch/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "histmatch/error.hpp"

namespace histmatch {

namespace {

bool location_less(const Histogram::Entry& a, const Histogram::Entry& b) {
  return a.location < b.location;
}

}  // namespace

Histogram Histogram::from_counts(std::span<const std::pair<LocationId, std::uint64_t>> counts) {
  std::uint64_t total = 0;
  for (const auto& [location, count] : counts) total += count;
  if (total == 0) throw Error(ErrorCode::kEmptyString, "histogram of an empty string");

  std::vector<Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [location, count] : counts) {
    if (count == 0) continue;
    if (location.empty()) throw Error(ErrorCode::kInvalidArgument, "empty location id");
    entries.push_back({location, static_cast<double>(count) / static_cast<double>(total)});
  }
  std::sort(entries.begin(), entries.end(), location_less);
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const Entry& a, const Entry& b) { return a.location == b.location; });
  if (dup != entries.end())
    throw Error(ErrorCode::kInvalidArgument, "duplicate location in counts: " + dup->location);
  return Histogram(std::move(entries), total);
}

Histogram Histogram::from_masses(std::vector<Entry> entries, std::uint64_t sample_count,
                                 double tolerance, bool renormalize) {
  double total = 0.0;
  for (const auto& e : entries) {
    if (!std::isfinite(e.mass) || e.mass < 0.0)
      throw Error(ErrorCode::kInvalidArgument, "invalid mass for location " + e.location);
    if (e.location.empty()) throw Error(ErrorCode::kInvalidArgument, "empty location id");
    total += e.mass;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kEmptyString, "histogram with zero total mass");
  if (std::abs(total - 1.0) > tolerance)
    throw Error(ErrorCode::kInvalidArgument,
                "histogram mass sums to " + std::to_string(total) + ", expected 1");

  std::erase_if(entries, [](const Entry& e) { return e.mass == 0.0; });
  std::sort(entries.begin(), entries.end(), location_less);
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const Entry& a, const Entry& b) { return a.location == b.location; });
  if (dup != entries.end())
    throw Error(ErrorCode::kInvalidArgument, "duplicate location: " + dup->location);
  if (renormalize && total != 1.0)
    for (auto& e : entries) e.mass /= total;
  return Histogram(std::move(entries), sample_count);
}

double Histogram::mass(std::string_view location) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), location,
                             [](const Entry& e, std::string_view l) { return e.location < l; });
  if (it != entries_.end() && it->location == location) return it->mass;
  return 0.0;
}

bool Histogram::contains(std::string_view location) const { return mass(location) > 0.0; }

Histogram::Histogram(std::vector<Entry> entries, std::uint64_t sample_count)
    : entries_(std::move(entries)), sample_count_(sample_count) {
  for (const auto& e : entries_) {
    total_ += e.mass;
    squared_norm_ += e.mass * e.mass;
  }
}

Histogram build_histogram(std::span<const LocationId> events) {
  if (events.empty()) throw Error(ErrorCode::kEmptyString, "cannot build a histogram of an empty string");
  std::unordered_map<LocationId, std::uint64_t> counts;
  for (const auto& e : events) ++counts[e];
  std::vector<std::pair<LocationId, std::uint64_t>> flat(counts.begin(), counts.end());
  return Histogram::from_counts(flat);
}

HistogramSet::HistogramSet(std::vector<Item> items, bool labeled) : labeled_(labeled) {
  items_.reserve(items.size());
  for (auto& item : items) add(std::move(item.owner), std::move(item.histogram));
}

void HistogramSet::add(OwnerId owner, Histogram histogram) {
  if (owner.empty()) throw Error(ErrorCode::kInvalidArgument, "empty owner id");
  auto [it, inserted] = index_.emplace(owner, items_.size());
  if (!inserted) throw Error(ErrorCode::kInvalidArgument, "duplicate owner: " + owner);
  items_.push_back({std::move(owner), std::move(histogram)});
}

std::optional<std::size_t> HistogramSet::index_of(std::string_view owner) const {
  auto it = index_.find(owner);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Alphabet::Alphabet(std::vector<LocationId> symbols) : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
  symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
}

Alphabet Alphabet::from_sets(std::initializer_list<const HistogramSet*> sets) {
  std::vector<LocationId> symbols;
  for (const auto* set : sets)
    for (const auto& item : set->items())
      for (const auto& e : item.histogram.entries()) symbols.push_back(e.location);
  return Alphabet(std::move(symbols));
}

std::optional<std::size_t> Alphabet::index_of(std::string_view symbol) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
  if (it != symbols_.end() && *it == symbol) return static_cast<std::size_t>(it - symbols_.begin());
  return std::nullopt;
}

void GroundTruth::add(const OwnerId& unlabeled, const OwnerId& labeled) {
  if (forward_.contains(unlabeled))
    throw Error(ErrorCode::kInvalidArgument, "unlabeled owner mapped twice: " + unlabeled);
  if (backward_.contains(labeled))
    throw Error(ErrorCode::kInvalidArgument, "ground truth is not injective at " + labeled);
  forward_.emplace(unlabeled, labeled);
  backward_.emplace(labeled, unlabeled);
}

std::optional<OwnerId> GroundTruth::labeled_for(std::string_view unlabeled) const {
  auto it = forward_.find(unlabeled);
  if (it == forward_.end()) return std::nullopt;
  return it->second;
}

}  // namespace histmatch
