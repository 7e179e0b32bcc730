#include "histmatch/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "histmatch/anonymize.hpp"
#include "histmatch/error.hpp"
#include "histmatch/io.hpp"

namespace histmatch {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed streams.
constexpr std::uint64_t kPopulationStream = 10;
constexpr std::uint64_t kPairStream = 11;
constexpr std::uint64_t kSubsampleStream = 12;
constexpr std::uint64_t kBootstrapStream = 20;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

struct TaskData {
  HistogramSet left;
  HistogramSet right;
  GroundTruth truth;
};

// Histograms of the users active in both periods, keyed identically.
struct RealPool {
  HistogramSet first;
  HistogramSet second;
};

RealPool load_pool(const DataSource& source) {
  EventLog log = source.format == DataSource::Format::kGps
                     ? io::read_gps_log(source.path, source.cell_side_m, source.origin)
                     : io::read_event_log(source.path);
  if (source.aggregation_table) {
    const auto table = io::read_aggregation_table(*source.aggregation_table);
    for (auto& record : log.records) {
      auto it = table.find(record.location);
      if (it != table.end()) record.location = it->second;
    }
  }

  auto [a, b] = source.split == DataSource::Split::kBoundary ? split_by_period(log, source.boundary)
                                                              : split_by_active_weeks(log, source.min_active_weeks);
  const auto users = filter_active_users(a, b);
  if (users.empty()) config_error(source.path.string() + ": no user is active in both periods");
  RealPool pool{histograms_by_user(a, users), histograms_by_user(b, users)};
  pool.second.set_labeled(true);
  return pool;
}

// `r` common users plus `n_left - r` / `n_right - r` users on one side only,
// drawn without replacement from the pool.
TaskData sample_real(const RealPool& pool, std::size_t n_left, std::size_t n_right, std::size_t r,
                     std::uint64_t seed) {
  const std::size_t needed = n_left + n_right - r;
  if (r > std::min(n_left, n_right) || needed > pool.first.size())
    throw Error(ErrorCode::kInvalidOverlap, "requested " + std::to_string(needed) + " users but the data has " +
                                                std::to_string(pool.first.size()));
  std::vector<std::size_t> users(pool.first.size());
  std::iota(users.begin(), users.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(users.begin(), users.end(), rng);

  std::vector<std::size_t> left_users(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(n_left));
  std::vector<std::size_t> right_users(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(r));
  right_users.insert(right_users.end(), users.begin() + static_cast<std::ptrdiff_t>(n_left),
                     users.begin() + static_cast<std::ptrdiff_t>(needed));
  std::shuffle(left_users.begin(), left_users.end(), rng);
  std::sort(right_users.begin(), right_users.end());

  const std::set<std::size_t> common(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(r));
  TaskData data;
  data.right.set_labeled(true);
  for (std::size_t pos = 0; pos < left_users.size(); ++pos) {
    const std::size_t u = left_users[pos];
    const OwnerId anon = "anon" + std::to_string(pos);
    data.left.add(anon, pool.first.histogram(u));
    if (common.contains(u)) data.truth.add(anon, pool.second.owner(u));
  }
  for (std::size_t u : right_users) data.right.add(pool.second.owner(u), pool.second.histogram(u));
  return data;
}

TaskData sample_synthetic(const ExperimentConfig& config, std::size_t population, std::uint64_t t_left,
                          std::uint64_t t_right, const OverlapSpec& overlap, std::size_t repetition) {
  PopulationSpec spec{population, config.alphabet_size, config.concentration,
                      derive_seed(config.seed, kPopulationStream, repetition)};
  const auto users = sample_population(spec);
  auto pair = generate_pair(users, t_left, t_right, overlap, derive_seed(config.seed, kPairStream, repetition));
  return {std::move(pair.unlabeled), std::move(pair.labeled), std::move(pair.truth)};
}

// Data for `n` users present on both sides.
TaskData sample_full(const ExperimentConfig& config, const RealPool* pool, std::size_t n, std::size_t repetition) {
  if (pool) return sample_real(*pool, n, n, n, derive_seed(config.seed, kSubsampleStream, repetition));
  return sample_synthetic(config, n, config.t_left, config.t_right, {n, n, n}, repetition);
}

HistogramSet map_set(const HistogramSet& set, const std::function<Histogram(const Histogram&)>& f) {
  HistogramSet out;
  out.set_labeled(set.labeled());
  for (const auto& item : set.items()) out.add(item.owner, f(item.histogram));
  return out;
}

// Merges consecutive symbols of the sorted union alphabet into groups.
void aggregate_task(TaskData& data, std::size_t group_size) {
  if (group_size <= 1) return;
  const auto alphabet = Alphabet::from_sets({&data.left, &data.right});
  std::map<LocationId, LocationId> mapping;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    mapping.emplace(alphabet.symbols()[i], "g" + std::to_string(i / group_size));
  auto f = [&](const Histogram& h) { return aggregate_locations(h, mapping); };
  data.left = map_set(data.left, f);
  data.right = map_set(data.right, f);
}

// Keeps the `keep_count` most popular locations. Users left without mass are
// dropped from their side, and from the truth.
void suppress_task(TaskData& data, std::size_t keep_count) {
  const auto keep = most_popular_locations({&data.left, &data.right}, keep_count);
  auto filter = [&](const HistogramSet& set) {
    HistogramSet out;
    out.set_labeled(set.labeled());
    for (const auto& item : set.items()) {
      try {
        out.add(item.owner, suppress_and_renormalize(item.histogram, keep));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroMassAfterSuppression) throw;
      }
    }
    return out;
  };
  HistogramSet left = filter(data.left);
  HistogramSet right = filter(data.right);
  GroundTruth truth;
  for (const auto& [l, r] : data.truth.mapping())
    if (left.index_of(l) && right.index_of(r)) truth.add(l, r);
  data = {std::move(left), std::move(right), std::move(truth)};
}

TrialResult score(const TaskData& data, const HistogramSet& left, const SetMatch& match, MetricKind metric,
                  Algorithm algorithm) {
  TrialResult t;
  t.metric = metric;
  t.algorithm = algorithm;
  t.accuracy = user_level_accuracy(match.result, left, data.right, data.truth);
  t.weights_ms = match.weights_ms;
  t.match_ms = match.match_ms;
  return t;
}

std::vector<TrialResult> run_task(const ExperimentConfig& config, const RealPool* pool, std::size_t grid_index,
                                  std::size_t repetition) {
  const std::size_t value = config.grid[grid_index];
  const auto start = Clock::now();
  TaskData data;
  switch (config.scenario) {
    case Scenario::kVaryN:
      data = sample_full(config, pool, value, repetition);
      break;
    case Scenario::kVaryT:
      if (pool) config_error("vary_t needs the synthetic generator");
      data = sample_synthetic(config, config.n_users, value, value, {config.n_users, config.n_users, config.n_users},
                              repetition);
      break;
    case Scenario::kOverlap: {
      if (value > std::min(config.n_left, config.n_right))
        throw Error(ErrorCode::kInvalidOverlap, "overlap exceeds the set sizes");
      if (pool) {
        data = sample_real(*pool, config.n_left, config.n_right, value,
                           derive_seed(config.seed, kSubsampleStream, repetition));
      } else {
        data = sample_synthetic(config, config.n_left + config.n_right - value, config.t_left, config.t_right,
                                {config.n_left, config.n_right, value}, repetition);
      }
      break;
    }
    case Scenario::kAggregate:
      data = sample_full(config, pool, config.n_users, repetition);
      aggregate_task(data, value);
      break;
    case Scenario::kSuppress:
      data = sample_full(config, pool, config.n_users, repetition);
      suppress_task(data, value);
      break;
    case Scenario::kKAnon:
      data = sample_full(config, pool, config.n_users, repetition);
      break;
  }
  const double generate_ms = elapsed_ms(start);

  std::vector<TrialResult> out;
  auto push = [&](TrialResult t) {
    t.grid_index = grid_index;
    t.grid_value = value;
    t.repetition = repetition;
    t.generate_ms = generate_ms;
    out.push_back(std::move(t));
  };

  if (data.left.empty() || data.right.empty()) {
    // Nothing left to match (e.g. every user suppressed).
    for (auto metric : config.metrics) {
      TrialResult t;
      t.metric = metric;
      t.algorithm = config.algorithm;
      t.accuracy = accuracy_from_counts(0, 0, data.truth.size());
      push(std::move(t));
    }
    return out;
  }

  if (config.scenario == Scenario::kKAnon) {
    const std::size_t k = value == kAllUsers ? data.left.size() : value;
    const auto anonymized = microaggregate(data.left, k);
    const double loss = information_loss(anonymized.partition, data.left);
    for (auto metric : config.metrics) {
      const auto match = match_sets(anonymized.released, data.right, metric, config.prune, config.algorithm, 0,
                                    Execution::kSerial);
      TrialResult t = score(data, anonymized.released, match, metric, config.algorithm);
      const auto pairs = owner_pairs(match.result, anonymized.released, data.right);
      t.accuracy.cluster_level_pct = cluster_level_accuracy(pairs, data.truth, anonymized.partition);
      t.information_loss = loss;
      t.clusters = anonymized.partition.g();
      push(std::move(t));
    }
    return out;
  }

  std::vector<std::pair<Algorithm, std::size_t>> algorithms{{config.algorithm, 0}};
  if (config.scenario == Scenario::kOverlap) {
    algorithms = {{Algorithm::kA1, 0}};
    if (value > 0) algorithms.emplace_back(Algorithm::kA2, value);
  }
  for (auto metric : config.metrics) {
    for (auto [algorithm, r] : algorithms) {
      const auto match = match_sets(data.left, data.right, metric, config.prune, algorithm, r, Execution::kSerial);
      push(score(data, data.left, match, metric, algorithm));
    }
  }
  return out;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<double> mean_opt(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return mean_of(values);
}

json number_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

json number_or_null(const std::optional<double>& value) { return value ? number_or_null(*value) : json(nullptr); }

double rounded(double pct) { return std::isfinite(pct) ? round_pct(pct) : pct; }

std::string csv_number(double value) { return std::isfinite(value) ? io::format_double(value) : std::string(); }

std::string csv_number(const std::optional<double>& value) { return value ? csv_number(*value) : std::string(); }

std::vector<std::size_t> default_grid(Scenario scenario) {
  switch (scenario) {
    case Scenario::kVaryN:
      return {10, 50, 100};
    case Scenario::kVaryT:
      return {50, 200, 800};
    case Scenario::kOverlap:
      return {50, 100, 150};
    case Scenario::kAggregate:
      return {1, 2, 4, 8};
    case Scenario::kSuppress:
      return {200, 100, 50, 10};
    case Scenario::kKAnon:
      return {1, 2, 5, 10, kAllUsers};
  }
  return {};
}

template <typename T>
T get_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      config_error("unknown field '" + key + "' in " + where);
}

DataSource parse_data_source(const json& j) {
  if (!j.is_object()) config_error("'data' must be an object");
  reject_unknown_keys(j,
                      {"path", "format", "cell_side_m", "origin", "split", "boundary", "min_active_weeks",
                       "aggregation_table"},
                      "data");
  DataSource source;
  if (!j.contains("path")) config_error("'data.path' is required");
  source.path = get_field<std::string>(j, "path", "");
  const auto format = get_field<std::string>(j, "format", "events");
  if (format == "events") {
    source.format = DataSource::Format::kEvents;
  } else if (format == "gps") {
    source.format = DataSource::Format::kGps;
  } else {
    config_error("unknown data format '" + format + "'");
  }
  source.cell_side_m = get_field<double>(j, "cell_side_m", source.cell_side_m);
  if (!(source.cell_side_m > 0.0)) config_error("'data.cell_side_m' must be positive");
  if (j.contains("origin")) {
    const auto& o = j.at("origin");
    source.origin = GeoPoint{get_field<double>(o, "lat", 0.0), get_field<double>(o, "lon", 0.0)};
  }
  const auto split = get_field<std::string>(j, "split", "active_weeks");
  if (split == "active_weeks") {
    source.split = DataSource::Split::kActiveWeeks;
  } else if (split == "boundary") {
    source.split = DataSource::Split::kBoundary;
    if (!j.contains("boundary")) config_error("'data.boundary' is required for the boundary split");
  } else {
    config_error("unknown split '" + split + "'");
  }
  source.boundary = get_field<std::int64_t>(j, "boundary", 0);
  source.min_active_weeks = get_field<int>(j, "min_active_weeks", source.min_active_weeks);
  if (source.min_active_weeks < 2) config_error("'data.min_active_weeks' must be at least 2");
  if (j.contains("aggregation_table")) source.aggregation_table = get_field<std::string>(j, "aggregation_table", "");
  return source;
}

Algorithm parse_algorithm_token(const std::string& token) {
  if (token == "a1") return Algorithm::kA1;
  if (token == "greedy") return Algorithm::kGreedy;
  if (token == "brute") return Algorithm::kBruteForce;
  config_error("unsupported algorithm '" + token + "' (expected a1, greedy or brute)");
}

}  // namespace

std::string_view scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::kVaryN:
      return "vary_n";
    case Scenario::kVaryT:
      return "vary_t";
    case Scenario::kOverlap:
      return "overlap";
    case Scenario::kAggregate:
      return "aggregate";
    case Scenario::kSuppress:
      return "suppress";
    case Scenario::kKAnon:
      return "kanon";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view token) {
  for (auto s : {Scenario::kVaryN, Scenario::kVaryT, Scenario::kOverlap, Scenario::kAggregate, Scenario::kSuppress,
                 Scenario::kKAnon})
    if (scenario_name(s) == token) return s;
  return std::nullopt;
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  reject_unknown_keys(j,
                      {"scenario", "metrics", "repetitions", "seed", "prune", "algorithm", "grid", "n_users",
                       "alphabet_size", "concentration", "t_left", "t_right", "n_left", "n_right",
                       "bootstrap_resamples", "confidence", "data"},
                      "config");
  ExperimentConfig c;
  if (!j.contains("scenario")) config_error("'scenario' is required");
  const auto tag = get_field<std::string>(j, "scenario", "");
  const auto scenario = parse_scenario(tag);
  if (!scenario) config_error("unknown scenario '" + tag + "'");
  c.scenario = *scenario;

  if (j.contains("metrics")) {
    c.metrics.clear();
    for (const auto& token : get_field<std::vector<std::string>>(j, "metrics", {})) {
      const auto metric = parse_metric(token);
      if (!metric) config_error("unknown metric '" + token + "'");
      c.metrics.push_back(*metric);
    }
    if (c.metrics.empty()) config_error("'metrics' must not be empty");
  }
  c.repetitions = get_field<std::size_t>(j, "repetitions", c.repetitions);
  if (c.repetitions < 1) config_error("'repetitions' must be at least 1");
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.prune = get_field<bool>(j, "prune", c.prune);
  if (j.contains("algorithm")) c.algorithm = parse_algorithm_token(get_field<std::string>(j, "algorithm", "a1"));

  if (j.contains("grid")) {
    const auto& grid = j.at("grid");
    if (!grid.is_array() || grid.empty()) config_error("'grid' must be a non-empty array");
    for (const auto& v : grid) {
      if (v.is_string() && v.get<std::string>() == "N" && c.scenario == Scenario::kKAnon) {
        c.grid.push_back(kAllUsers);
      } else if (v.is_number_integer() && v.get<std::int64_t>() > 0) {
        c.grid.push_back(v.get<std::size_t>());
      } else if (v.is_number_integer() && v.get<std::int64_t>() == 0 && c.scenario == Scenario::kOverlap) {
        c.grid.push_back(0);
      } else {
        config_error("bad grid value " + v.dump());
      }
    }
  } else {
    c.grid = default_grid(c.scenario);
  }

  c.n_users = get_field<std::size_t>(j, "n_users", c.n_users);
  c.alphabet_size = get_field<std::size_t>(j, "alphabet_size", c.alphabet_size);
  c.concentration = get_field<double>(j, "concentration", c.concentration);
  c.t_left = get_field<std::uint64_t>(j, "t_left", c.t_left);
  c.t_right = get_field<std::uint64_t>(j, "t_right", c.t_right);
  c.n_left = get_field<std::size_t>(j, "n_left", c.n_left);
  c.n_right = get_field<std::size_t>(j, "n_right", c.n_right);
  c.bootstrap_resamples = get_field<std::size_t>(j, "bootstrap_resamples", c.bootstrap_resamples);
  c.confidence = get_field<double>(j, "confidence", c.confidence);
  if (c.n_users == 0 || c.alphabet_size == 0 || c.t_left == 0 || c.t_right == 0 || c.n_left == 0 ||
      c.n_right == 0)
    config_error("sizes and string lengths must be positive");
  if (!(c.concentration > 0.0)) config_error("'concentration' must be positive");
  if (c.bootstrap_resamples == 0) config_error("'bootstrap_resamples' must be positive");
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) config_error("'confidence' must lie in (0, 1)");
  if (j.contains("data")) c.data = parse_data_source(j.at("data"));
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json metrics = json::array();
  for (auto m : c.metrics) metrics.push_back(metric_name(m));
  json grid = json::array();
  for (auto v : c.grid) {
    if (c.scenario == Scenario::kKAnon && v == kAllUsers) {
      grid.push_back("N");
    } else {
      grid.push_back(v);
    }
  }
  json j{{"scenario", scenario_name(c.scenario)},
         {"metrics", metrics},
         {"repetitions", c.repetitions},
         {"seed", c.seed},
         {"prune", c.prune},
         {"algorithm", algorithm_name(c.algorithm)},
         {"grid", grid},
         {"n_users", c.n_users},
         {"alphabet_size", c.alphabet_size},
         {"concentration", c.concentration},
         {"t_left", c.t_left},
         {"t_right", c.t_right},
         {"n_left", c.n_left},
         {"n_right", c.n_right},
         {"bootstrap_resamples", c.bootstrap_resamples},
         {"confidence", c.confidence}};
  if (c.data) {
    const auto& d = *c.data;
    json data{{"path", d.path.string()},
              {"format", d.format == DataSource::Format::kGps ? "gps" : "events"},
              {"cell_side_m", d.cell_side_m},
              {"split", d.split == DataSource::Split::kBoundary ? "boundary" : "active_weeks"},
              {"boundary", d.boundary},
              {"min_active_weeks", d.min_active_weeks}};
    if (d.origin) data["origin"] = {{"lat", d.origin->lat}, {"lon", d.origin->lon}};
    if (d.aggregation_table) data["aggregation_table"] = d.aggregation_table->string();
    j["data"] = data;
  }
  return j;
}

Interval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, double confidence,
                           std::uint64_t seed) {
  if (values.empty()) return {kNaN, kNaN, kNaN};
  const double n = static_cast<double>(values.size());
  Interval out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (resamples == 0) return {out.mean, out.mean, out.mean};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[pick(rng)];
    m = sum / n;
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, resamples - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  out.lo = quantile(tail);
  out.hi = quantile(1.0 - tail);
  return out;
}

SetMatch match_sets(const HistogramSet& left, const HistogramSet& right, MetricKind metric, bool prune,
                    Algorithm algorithm, std::size_t r, Execution execution) {
  const bool transpose =
      left.size() > right.size() && (algorithm == Algorithm::kA1 || algorithm == Algorithm::kGreedy);
  SetMatch out;
  auto start = Clock::now();
  const auto instance = transpose ? BipartiteInstance::build(right, left, metric, prune, execution)
                                  : BipartiteInstance::build(left, right, metric, prune, execution);
  out.weights_ms = elapsed_ms(start);

  start = Clock::now();
  switch (algorithm) {
    case Algorithm::kA1:
      out.result = match_min_weight(instance);
      break;
    case Algorithm::kA2:
      out.result = match_cardinality(instance, r);
      break;
    case Algorithm::kBruteForce:
      out.result = match_bruteforce(instance, r == 0 ? std::nullopt : std::optional<std::size_t>(r));
      break;
    case Algorithm::kGreedy:
      out.result = match_greedy(instance);
      break;
  }
  out.match_ms = elapsed_ms(start);

  if (transpose) {
    for (auto& p : out.result.pairs) std::swap(p.left, p.right);
    std::sort(out.result.pairs.begin(), out.result.pairs.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return a.left < b.left; });
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.repetitions < 1) config_error("'repetitions' must be at least 1");
  if (config.grid.empty()) config_error("empty grid");
  if (config.metrics.empty()) config_error("empty metric list");

  std::optional<RealPool> pool;
  if (config.data) pool = load_pool(*config.data);
  const RealPool* pool_ptr = pool ? &*pool : nullptr;

  const std::size_t n_tasks = config.grid.size() * config.repetitions;
  std::vector<std::vector<TrialResult>> slots(n_tasks);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(n_tasks); ++t) {
    const auto task = static_cast<std::size_t>(t);
    try {
      slots[task] = run_task(config, pool_ptr, task / config.repetitions, task % config.repetitions);
    } catch (...) {
#pragma omp critical(histmatch_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.config = config;
  for (auto& slot : slots)
    for (auto& trial : slot) report.trials.push_back(std::move(trial));

  std::vector<Algorithm> algorithms{config.algorithm};
  if (config.scenario == Scenario::kOverlap) algorithms = {Algorithm::kA1, Algorithm::kA2};

  std::size_t point_index = 0;
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    for (auto metric : config.metrics) {
      for (auto algorithm : algorithms) {
        std::vector<double> user, pct, correct, size, cluster, loss, groups, weights_ms, match_ms;
        for (const auto& t : report.trials) {
          if (t.grid_index != g || t.metric != metric || t.algorithm != algorithm) continue;
          if (t.accuracy.user_level_pct) user.push_back(*t.accuracy.user_level_pct);
          if (t.accuracy.percentage_accuracy) pct.push_back(*t.accuracy.percentage_accuracy);
          correct.push_back(static_cast<double>(t.accuracy.n_correct));
          size.push_back(static_cast<double>(t.accuracy.matching_size));
          if (t.accuracy.cluster_level_pct) cluster.push_back(*t.accuracy.cluster_level_pct);
          if (t.information_loss) loss.push_back(*t.information_loss);
          if (t.clusters) groups.push_back(static_cast<double>(*t.clusters));
          weights_ms.push_back(t.weights_ms);
          match_ms.push_back(t.match_ms);
        }
        if (correct.empty()) continue;
        PointSummary p;
        p.grid_value = config.grid[g];
        p.metric = metric;
        p.algorithm = algorithm;
        p.repetitions = correct.size();
        p.user_level = bootstrap_mean_ci(user, config.bootstrap_resamples, config.confidence,
                                         derive_seed(config.seed, kBootstrapStream, point_index++));
        p.percentage_accuracy = mean_of(pct);
        p.n_correct = mean_of(correct);
        p.matching_size = mean_of(size);
        p.cluster_level = mean_opt(cluster);
        p.information_loss = mean_opt(loss);
        p.clusters = mean_opt(groups);
        p.weights_ms = mean_of(weights_ms);
        p.match_ms = mean_of(match_ms);
        report.points.push_back(p);
      }
    }
  }
  return report;
}

std::vector<double> ExperimentReport::user_level_series(std::size_t grid_value, MetricKind metric,
                                                        Algorithm algorithm) const {
  std::vector<std::pair<std::size_t, double>> rows;
  for (const auto& t : trials)
    if (t.grid_value == grid_value && t.metric == metric && t.algorithm == algorithm && t.accuracy.user_level_pct)
      rows.emplace_back(t.repetition, *t.accuracy.user_level_pct);
  std::sort(rows.begin(), rows.end());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& [_, v] : rows) out.push_back(v);
  return out;
}

const PointSummary* ExperimentReport::find(std::size_t grid_value, MetricKind metric, Algorithm algorithm) const {
  for (const auto& p : points)
    if (p.grid_value == grid_value && p.metric == metric && p.algorithm == algorithm) return &p;
  return nullptr;
}

json ExperimentReport::to_json() const {
  auto grid_json = [&](std::size_t v) {
    return config.scenario == Scenario::kKAnon && v == kAllUsers ? json("N") : json(v);
  };
  json points_json = json::array();
  for (const auto& p : points) {
    points_json.push_back({{"grid_value", grid_json(p.grid_value)},
                           {"metric", metric_name(p.metric)},
                           {"algorithm", algorithm_name(p.algorithm)},
                           {"repetitions", p.repetitions},
                           {"user_level_pct", number_or_null(rounded(p.user_level.mean))},
                           {"user_level_ci", {number_or_null(rounded(p.user_level.lo)),
                                              number_or_null(rounded(p.user_level.hi))}},
                           {"percentage_accuracy", number_or_null(rounded(p.percentage_accuracy))},
                           {"n_correct", p.n_correct},
                           {"matching_size", p.matching_size},
                           {"cluster_level_pct",
                            p.cluster_level ? number_or_null(rounded(*p.cluster_level)) : json(nullptr)},
                           {"information_loss", number_or_null(p.information_loss)},
                           {"clusters", number_or_null(p.clusters)},
                           {"weights_ms", p.weights_ms},
                           {"match_ms", p.match_ms}});
  }
  json trials_json = json::array();
  for (const auto& t : trials) {
    trials_json.push_back({{"grid_value", grid_json(t.grid_value)},
                           {"repetition", t.repetition},
                           {"metric", metric_name(t.metric)},
                           {"algorithm", algorithm_name(t.algorithm)},
                           {"n_common", t.accuracy.n_common},
                           {"n_correct", t.accuracy.n_correct},
                           {"matching_size", t.accuracy.matching_size},
                           {"user_level_pct", number_or_null(t.accuracy.user_level_pct)},
                           {"percentage_accuracy", number_or_null(t.accuracy.percentage_accuracy)},
                           {"cluster_level_pct", number_or_null(t.accuracy.cluster_level_pct)},
                           {"information_loss", number_or_null(t.information_loss)},
                           {"runtime_ms",
                            {{"generate", t.generate_ms}, {"weights", t.weights_ms}, {"match", t.match_ms}}}});
  }
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  return {{"config", config_to_json(config)},
          {"metadata",
           {{"generator", kGeneratorName},
            {"seed", config.seed},
            {"repetitions", config.repetitions},
            {"bootstrap_resamples", config.bootstrap_resamples},
            {"confidence", config.confidence},
            {"interval", "percentile bootstrap over repetitions"},
            {"threads", threads}}},
          {"points", points_json},
          {"trials", trials_json}};
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "scenario,grid_value,metric,algorithm,repetitions,user_level_pct,ci_lo,ci_hi,percentage_accuracy,"
         "n_correct,matching_size,cluster_level_pct,information_loss,clusters,weights_ms,match_ms\n";
  for (const auto& p : points) {
    out << scenario_name(config.scenario) << ',';
    if (config.scenario == Scenario::kKAnon && p.grid_value == kAllUsers) {
      out << 'N';
    } else {
      out << p.grid_value;
    }
    out << ',' << metric_name(p.metric) << ','
        << algorithm_name(p.algorithm) << ',' << p.repetitions << ',' << csv_number(rounded(p.user_level.mean))
        << ',' << csv_number(rounded(p.user_level.lo)) << ',' << csv_number(rounded(p.user_level.hi)) << ','
        << csv_number(rounded(p.percentage_accuracy)) << ',' << csv_number(p.n_correct) << ','
        << csv_number(p.matching_size) << ','
        << (p.cluster_level ? csv_number(rounded(*p.cluster_level)) : std::string()) << ','
        << csv_number(p.information_loss) << ',' << csv_number(p.clusters) << ',' << csv_number(p.weights_ms)
        << ',' << csv_number(p.match_ms) << '\n';
  }
}

}  // namespace histmatch
