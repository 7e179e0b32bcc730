#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "histmatch/accuracy.hpp"
#include "histmatch/events.hpp"
#include "histmatch/matcher.hpp"
#include "histmatch/metrics.hpp"
#include "histmatch/synth.hpp"

namespace histmatch {

enum class Scenario { kVaryN, kVaryT, kOverlap, kAggregate, kSuppress, kKAnon };

std::string_view scenario_name(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view token);

/// Real event data to run a scenario on instead of the synthetic model.
struct DataSource {
  enum class Format { kEvents, kGps };
  enum class Split { kBoundary, kActiveWeeks };

  std::filesystem::path path;
  Format format = Format::kEvents;
  double cell_side_m = 1000.0;
  std::optional<GeoPoint> origin;
  Split split = Split::kActiveWeeks;
  std::int64_t boundary = 0;
  int min_active_weeks = 2;
  std::optional<std::filesystem::path> aggregation_table;
};

/// Sentinel grid value for the k-anonymity sweep meaning "k = N".
inline constexpr std::size_t kAllUsers = 0;

struct ExperimentConfig {
  Scenario scenario = Scenario::kVaryN;
  std::vector<MetricKind> metrics{MetricKind::kProposed};
  std::size_t repetitions = 20;
  std::uint64_t seed = 1;
  bool prune = false;
  /// Matcher for every scenario except overlap, which always runs A1 and A2.
  Algorithm algorithm = Algorithm::kA1;

  /// N for vary_n, T for vary_t, r for overlap, group size for aggregate,
  /// number of kept locations for suppress, k for kanon (kAllUsers = N).
  std::vector<std::size_t> grid;

  // Synthetic population and string lengths.
  std::size_t n_users = 100;
  std::size_t alphabet_size = 200;
  double concentration = 0.1;
  std::uint64_t t_left = 500;
  std::uint64_t t_right = 500;

  // Overlap scenario: set sizes (r comes from the grid).
  std::size_t n_left = 200;
  std::size_t n_right = 200;

  std::size_t bootstrap_resamples = 1000;
  double confidence = 0.9;

  std::optional<DataSource> data;
};

/// Parses the JSON config. Throws ConfigError on unknown scenarios, metrics
/// or malformed fields.
ExperimentConfig parse_experiment_config(const nlohmann::json& json);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval of the mean.
Interval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, double confidence,
                           std::uint64_t seed);

/// One matcher run on one repetition of one grid point.
struct TrialResult {
  std::size_t grid_index = 0;
  std::size_t grid_value = 0;
  std::size_t repetition = 0;
  MetricKind metric = MetricKind::kProposed;
  Algorithm algorithm = Algorithm::kA1;
  AccuracyReport accuracy;
  std::optional<double> information_loss;
  std::optional<std::size_t> clusters;
  double generate_ms = 0.0;
  double weights_ms = 0.0;
  double match_ms = 0.0;
};

/// Aggregate over repetitions for one (grid value, metric, algorithm).
struct PointSummary {
  std::size_t grid_value = 0;
  MetricKind metric = MetricKind::kProposed;
  Algorithm algorithm = Algorithm::kA1;
  std::size_t repetitions = 0;
  Interval user_level;
  double percentage_accuracy = 0.0;
  double n_correct = 0.0;
  double matching_size = 0.0;
  std::optional<double> cluster_level;
  std::optional<double> information_loss;
  std::optional<double> clusters;
  double weights_ms = 0.0;
  double match_ms = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  std::vector<PointSummary> points;

  /// Per-repetition user-level accuracies for one point, in repetition order.
  std::vector<double> user_level_series(std::size_t grid_value, MetricKind metric, Algorithm algorithm) const;
  const PointSummary* find(std::size_t grid_value, MetricKind metric, Algorithm algorithm) const;

  nlohmann::json to_json() const;
  /// Tidy CSV, one row per point; percentages rounded to one decimal.
  void write_csv(std::ostream& out) const;
};

/// Runs every (grid point, repetition) task, in parallel when OpenMP is
/// available. Results are deterministic given the config seed.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct SetMatch {
  MatchResult result;
  double weights_ms = 0.0;
  double match_ms = 0.0;
};

/// Builds the instance and runs `algorithm` (A2 with cardinality `r`). When
/// the left set is larger the instance is built transposed for A1 and greedy;
/// pair indices always refer to (left, right).
SetMatch match_sets(const HistogramSet& left, const HistogramSet& right, MetricKind metric, bool prune,
                    Algorithm algorithm, std::size_t r = 0, Execution execution = Execution::kParallel);

}  // namespace histmatch
