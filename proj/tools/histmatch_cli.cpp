// Command-line front end: ingest, match, anonymize, synth, experiment.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "histmatch/accuracy.hpp"
#include "histmatch/anonymize.hpp"
#include "histmatch/error.hpp"
#include "histmatch/events.hpp"
#include "histmatch/experiment.hpp"
#include "histmatch/io.hpp"
#include "histmatch/matcher.hpp"
#include "histmatch/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace histmatch;

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void emit_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
  std::string events;
  std::string gps;
  double cell_side_m = 1000.0;
  std::optional<double> origin_lat;
  std::optional<double> origin_lon;
  std::string split = "active-weeks";
  int min_active_weeks = 2;
  std::string aggregate;
  bool keep_ids = false;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void run_ingest(const IngestOptions& o) {
  if (o.events.empty() == o.gps.empty()) throw Error(ErrorCode::kInvalidArgument, "pass exactly one of --events, --gps");
  if (o.origin_lat.has_value() != o.origin_lon.has_value())
    throw Error(ErrorCode::kInvalidArgument, "--origin-lat and --origin-lon go together");

  EventLog log;
  if (!o.events.empty()) {
    log = io::read_event_log(fs::path(o.events));
  } else {
    std::optional<GeoPoint> origin;
    if (o.origin_lat) origin = GeoPoint{*o.origin_lat, *o.origin_lon};
    log = io::read_gps_log(fs::path(o.gps), o.cell_side_m, origin);
  }
  if (!o.aggregate.empty()) {
    const auto table = io::read_aggregation_table(fs::path(o.aggregate));
    for (auto& r : log.records)
      if (auto it = table.find(r.location); it != table.end()) r.location = it->second;
  }

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  json summary{{"records", log.size()}};

  if (o.split == "none") {
    auto all = histograms_by_user(log);
    io::write_histogram_set(dir / "histograms.csv", all);
    summary["users"] = all.size();
    std::cout << summary.dump(2) << '\n';
    return;
  }

  std::pair<EventLog, EventLog> parts;
  if (o.split == "active-weeks") {
    parts = split_by_active_weeks(log, o.min_active_weeks);
  } else if (o.split.starts_with("boundary:")) {
    const std::string text = o.split.substr(9);
    std::int64_t boundary = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), boundary);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw Error(ErrorCode::kInvalidArgument, "bad split boundary '" + text + "'");
    parts = split_by_period(log, boundary);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--split must be none, active-weeks or boundary:<epoch seconds>");
  }
  const auto users = filter_active_users(parts.first, parts.second);
  const auto first = histograms_by_user(parts.first, users);
  auto second = histograms_by_user(parts.second, users);
  second.set_labeled(true);

  HistogramSet left;
  GroundTruth truth;
  std::vector<std::size_t> order(first.size());
  std::iota(order.begin(), order.end(), 0);
  if (!o.keep_ids) {
    std::mt19937_64 rng(o.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& item = first[order[pos]];
    const OwnerId owner = o.keep_ids ? item.owner : "anon" + std::to_string(pos);
    left.add(owner, item.histogram);
    truth.add(owner, item.owner);
  }

  io::write_histogram_set(dir / "left.csv", left);
  io::write_histogram_set(dir / "right.csv", second);
  io::write_truth(dir / "truth.csv", truth);
  summary["users"] = users.size();
  summary["first_period_records"] = parts.first.size();
  summary["second_period_records"] = parts.second.size();
  std::cout << summary.dump(2) << '\n';
}

// ----------------------------------------------------------------- match

struct MatchOptions {
  std::string left;
  std::string right;
  std::string metric = "proposed";
  std::string algorithm = "a1";
  bool prune = false;
  std::string out = "match.csv";
  std::string summary;
  std::string truth;
};

std::pair<Algorithm, std::size_t> parse_algorithm_arg(const std::string& token) {
  if (token == "a1") return {Algorithm::kA1, 0};
  if (token == "greedy") return {Algorithm::kGreedy, 0};
  if (token == "brute") return {Algorithm::kBruteForce, 0};
  if (token.starts_with("a2:")) {
    std::size_t r = 0;
    const std::string text = token.substr(3);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), r);
    if (ec == std::errc() && ptr == text.data() + text.size()) return {Algorithm::kA2, r};
  }
  throw Error(ErrorCode::kInvalidArgument, "--algorithm must be a1, a2:<r>, greedy or brute");
}

void run_match(const MatchOptions& o) {
  const auto metric = parse_metric(o.metric);
  if (!metric) throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + o.metric + "'");
  const auto [algorithm, r] = parse_algorithm_arg(o.algorithm);
  const auto left = io::read_histogram_set(fs::path(o.left), false);
  const auto right = io::read_histogram_set(fs::path(o.right), true);

  const auto match = match_sets(left, right, *metric, o.prune, algorithm, r);
  io::write_match_csv(fs::path(o.out), match.result, left, right);

  json summary = io::match_summary_json(match.result);
  summary["metric"] = metric_name(*metric);
  summary["pruned"] = o.prune;
  summary["runtime_ms"] = {{"weights", match.weights_ms}, {"match", match.match_ms}};
  if (!o.truth.empty()) {
    const auto truth = io::read_truth(fs::path(o.truth));
    const auto report = user_level_accuracy(match.result, left, right, truth);
    auto pct = [](const std::optional<double>& v) { return v ? json(round_pct(*v)) : json(nullptr); };
    summary["accuracy"] = {{"n_common", report.n_common},
                           {"n_correct", report.n_correct},
                           {"user_level_pct", pct(report.user_level_pct)},
                           {"percentage_accuracy", pct(report.percentage_accuracy)}};
  }
  emit_json(o.summary, summary);
}

// ------------------------------------------------------------- anonymize

struct AnonymizeOptions {
  std::string input;
  std::size_t k = 2;
  std::string out = "released.csv";
  std::string partition;
};

void run_anonymize(const AnonymizeOptions& o) {
  const auto set = io::read_histogram_set(fs::path(o.input), false);
  const auto result = microaggregate(set, o.k);
  const double loss = information_loss(result.partition, set);
  io::write_histogram_set(fs::path(o.out), result.released);
  emit_json(o.partition, io::partition_json(result.partition, o.k, loss));
}

// ----------------------------------------------------------------- synth

struct SynthOptions {
  std::size_t users = 100;
  std::size_t alphabet = 200;
  double alpha = 0.1;
  std::uint64_t t_left = 500;
  std::uint64_t t_right = 500;
  std::optional<std::size_t> n_left;
  std::optional<std::size_t> n_right;
  std::optional<std::size_t> overlap;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void run_synth(const SynthOptions& o) {
  OverlapSpec overlap{o.n_left.value_or(o.users), o.n_right.value_or(o.users), 0};
  overlap.r = o.overlap.value_or(std::min(overlap.n_left, overlap.n_right));
  const PopulationSpec spec{o.users, o.alphabet, o.alpha, derive_seed(o.seed, 0, 0)};
  const auto population = sample_population(spec);
  const std::uint64_t pair_seed = derive_seed(o.seed, 1, 0);
  const auto pair = generate_pair(population, o.t_left, o.t_right, overlap, pair_seed);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  io::write_histogram_set(dir / "left.csv", pair.unlabeled);
  io::write_histogram_set(dir / "right.csv", pair.labeled);
  io::write_truth(dir / "truth.csv", pair.truth);
  const json meta{{"generator", kGeneratorName},
                  {"seed", o.seed},
                  {"population_seed", spec.seed},
                  {"pair_seed", pair_seed},
                  {"spec",
                   {{"n_users", o.users},
                    {"alphabet_size", o.alphabet},
                    {"concentration", o.alpha},
                    {"t_left", o.t_left},
                    {"t_right", o.t_right},
                    {"n_left", overlap.n_left},
                    {"n_right", overlap.n_right},
                    {"r", overlap.r}}}};
  write_json(dir / "metadata.json", meta);
  std::cout << meta.dump(2) << '\n';
}

// ------------------------------------------------------------ experiment

struct ExperimentOptions {
  std::string config;
  std::string out = "report.json";
  std::string csv;
};

void run_experiment_cmd(const ExperimentOptions& o) {
  const auto config = load_experiment_config(fs::path(o.config));
  const auto report = run_experiment(config);
  write_json(fs::path(o.out), report.to_json());
  if (!o.csv.empty()) {
    std::ofstream out(o.csv);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + o.csv + " for writing");
    report.write_csv(out);
  } else {
    report.write_csv(std::cout);
  }
}

int fail(std::string_view code, const std::string& message, int status) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Histogram matching de-anonymization toolkit"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "Event CSV to per-period histogram CSVs");
  cmd_ingest->add_option("--events", ingest.events, "user,timestamp,location CSV");
  cmd_ingest->add_option("--gps", ingest.gps, "user,timestamp,lat,lon CSV");
  cmd_ingest->add_option("--cell-side", ingest.cell_side_m, "Grid cell side in metres")->capture_default_str();
  cmd_ingest->add_option("--origin-lat", ingest.origin_lat, "Grid origin latitude");
  cmd_ingest->add_option("--origin-lon", ingest.origin_lon, "Grid origin longitude");
  cmd_ingest->add_option("--split", ingest.split, "none | active-weeks | boundary:<epoch seconds>")
      ->capture_default_str();
  cmd_ingest->add_option("--min-active-weeks", ingest.min_active_weeks)->capture_default_str();
  cmd_ingest->add_option("--aggregate", ingest.aggregate, "from,to location aggregation table");
  cmd_ingest->add_flag("--keep-ids", ingest.keep_ids, "Do not relabel the first period");
  cmd_ingest->add_option("--seed", ingest.seed, "Seed for relabelling")->capture_default_str();
  cmd_ingest->add_option("--out-dir", ingest.out_dir)->capture_default_str();

  MatchOptions match;
  auto* cmd_match = app.add_subcommand("match", "Match two histogram sets");
  cmd_match->add_option("--left", match.left, "Unlabeled histogram CSV")->required();
  cmd_match->add_option("--right", match.right, "Labeled histogram CSV")->required();
  cmd_match->add_option("--metric", match.metric, "proposed | l1 | cosine | dot")->capture_default_str();
  cmd_match->add_option("--algorithm", match.algorithm, "a1 | a2:<r> | greedy | brute")->capture_default_str();
  cmd_match->add_flag("--prune", match.prune, "Drop disjoint-support pairs (proposed metric)");
  cmd_match->add_option("--out", match.out, "Result CSV")->capture_default_str();
  cmd_match->add_option("--summary", match.summary, "Summary JSON path (default stdout)");
  cmd_match->add_option("--truth", match.truth, "Ground truth CSV to score against");

  AnonymizeOptions anon;
  auto* cmd_anon = app.add_subcommand("anonymize", "k-anonymize a histogram set by micro-aggregation");
  cmd_anon->add_option("--input", anon.input, "Histogram CSV")->required();
  cmd_anon->add_option("--k", anon.k)->required();
  cmd_anon->add_option("--out", anon.out, "Released histogram CSV")->capture_default_str();
  cmd_anon->add_option("--partition", anon.partition, "Partition JSON path (default stdout)");

  SynthOptions synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic pair of histogram sets");
  cmd_synth->add_option("--users", synth.users, "Population size")->capture_default_str();
  cmd_synth->add_option("--alphabet", synth.alphabet, "Alphabet size M")->capture_default_str();
  cmd_synth->add_option("--alpha", synth.alpha, "Dirichlet concentration")->capture_default_str();
  cmd_synth->add_option("--t-left", synth.t_left)->capture_default_str();
  cmd_synth->add_option("--t-right", synth.t_right)->capture_default_str();
  cmd_synth->add_option("--n-left", synth.n_left, "Default: --users");
  cmd_synth->add_option("--n-right", synth.n_right, "Default: --users");
  cmd_synth->add_option("--overlap", synth.overlap, "Common users r (default min(n-left, n-right))");
  cmd_synth->add_option("--seed", synth.seed)->capture_default_str();
  cmd_synth->add_option("--out-dir", synth.out_dir)->capture_default_str();

  ExperimentOptions exp;
  auto* cmd_exp = app.add_subcommand("experiment", "Run an experiment from a JSON config");
  cmd_exp->add_option("--config", exp.config)->required();
  cmd_exp->add_option("--out", exp.out, "Report JSON")->capture_default_str();
  cmd_exp->add_option("--csv", exp.csv, "Tidy CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  }

  try {
    if (cmd_ingest->parsed()) run_ingest(ingest);
    if (cmd_match->parsed()) run_match(match);
    if (cmd_anon->parsed()) run_anonymize(anon);
    if (cmd_synth->parsed()) run_synth(synth);
    if (cmd_exp->parsed()) run_experiment_cmd(exp);
  } catch (const Error& e) {
    return fail(error_code_name(e.code()), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return 0;
}
