#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace histmatch {

/// Opaque location token: an antenna id, a website id or a grid-cell key.
using LocationId = std::string;
/// Opaque user identifier.
using OwnerId = std::string;

/// Tolerance on the total mass of every histogram produced by the library.
inline constexpr double kMassTolerance = 1e-9;

/// Sparse empirical distribution over a location alphabet.
///
/// Entries are kept sorted by location and every stored mass is strictly
/// positive; absent locations carry zero mass.
class Histogram {
 public:
  struct Entry {
    LocationId location;
    double mass;

    bool operator==(const Entry&) const = default;
  };

  /// Normalized visit counts; zero counts are dropped. Throws EmptyString if
  /// the total count is zero.
  static Histogram from_counts(std::span<const std::pair<LocationId, std::uint64_t>> counts);

  /// Validates explicit masses. Masses must be finite and non-negative with a
  /// positive total within `tolerance` of one; zero entries are dropped and
  /// duplicate locations are rejected. With `renormalize` the masses are
  /// divided by their total.
  static Histogram from_masses(std::vector<Entry> entries, std::uint64_t sample_count = 0,
                               double tolerance = kMassTolerance, bool renormalize = true);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t support_count() const { return entries_.size(); }
  /// The string length used to build the histogram, 0 when unknown.
  std::uint64_t sample_count() const { return sample_count_; }

  /// Mass of `location`, 0 when it is outside the support.
  double mass(std::string_view location) const;
  bool contains(std::string_view location) const;
  /// Sum of stored masses (1 up to rounding).
  double total_mass() const { return total_; }
  /// Sum of squared masses.
  double squared_norm() const { return squared_norm_; }

  /// Exact equality of the sparse maps; the sample count is not compared.
  bool operator==(const Histogram& other) const { return entries_ == other.entries_; }

 private:
  Histogram(std::vector<Entry> entries, std::uint64_t sample_count);

  std::vector<Entry> entries_;
  std::uint64_t sample_count_ = 0;
  double total_ = 0.0;
  double squared_norm_ = 0.0;
};

/// Empirical distribution of a location string. Throws EmptyString when the
/// sequence is empty.
Histogram build_histogram(std::span<const LocationId> events);

/// Ordered set of histograms keyed by unique owner ids.
class HistogramSet {
 public:
  struct Item {
    OwnerId owner;
    Histogram histogram;
  };

  HistogramSet() = default;
  /// Throws InvalidArgument on duplicate owners.
  HistogramSet(std::vector<Item> items, bool labeled);

  /// Throws InvalidArgument when `owner` already exists.
  void add(OwnerId owner, Histogram histogram);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool labeled() const { return labeled_; }
  void set_labeled(bool labeled) { labeled_ = labeled; }

  const Item& operator[](std::size_t i) const { return items_[i]; }
  const OwnerId& owner(std::size_t i) const { return items_[i].owner; }
  const Histogram& histogram(std::size_t i) const { return items_[i].histogram; }
  std::span<const Item> items() const { return items_; }

  std::optional<std::size_t> index_of(std::string_view owner) const;

 private:
  std::vector<Item> items_;
  std::map<OwnerId, std::size_t, std::less<>> index_;
  bool labeled_ = false;
};

/// Sorted, duplicate-free location alphabet.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<LocationId> symbols);

  /// Union of the supports of every histogram in the given sets.
  static Alphabet from_sets(std::initializer_list<const HistogramSet*> sets);

  std::size_t size() const { return symbols_.size(); }
  std::span<const LocationId> symbols() const { return symbols_; }
  std::optional<std::size_t> index_of(std::string_view symbol) const;

 private:
  std::vector<LocationId> symbols_;
};

/// Injective partial map from unlabeled owner to labeled owner.
class GroundTruth {
 public:
  /// Throws InvalidArgument when either side is already mapped.
  void add(const OwnerId& unlabeled, const OwnerId& labeled);

  std::size_t size() const { return forward_.size(); }
  bool empty() const { return forward_.empty(); }
  /// Labeled owner for `unlabeled`, if it is a common user.
  std::optional<OwnerId> labeled_for(std::string_view unlabeled) const;
  const std::map<OwnerId, OwnerId, std::less<>>& mapping() const { return forward_; }

 private:
  std::map<OwnerId, OwnerId, std::less<>> forward_;
  std::map<OwnerId, OwnerId, std::less<>> backward_;
};

}  // namespace histmatch
