// Acceptance checks. Prints one PASS/FAIL line per criterion; with a number
// argument only that criterion runs. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "histmatch/anonymize.hpp"
#include "histmatch/experiment.hpp"
#include "histmatch/matcher.hpp"
#include "histmatch/metrics.hpp"
#include "test_util.hpp"

namespace histmatch {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

MetricKind metric_at(std::size_t i) { return kAllMetrics[i % std::size(kAllMetrics)]; }

Outcome a1_matches_bruteforce() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const auto l = testutil::random_set(rng, n, 8, "l");
    const auto r = testutil::random_set(rng, n, 8, "r");
    const auto inst = BipartiteInstance::build(l, r, metric_at(trial / 6), false);
    const double diff = std::abs(match_min_weight(inst).total_weight - match_bruteforce(inst).total_weight);
    worst = std::max(worst, diff);
    if (diff > 1e-9) ++mismatches;
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < 60.0, "1000 instances, mismatches=" + std::to_string(mismatches) +
                                              " max|diff|=" + fmt(worst, 15) + " time=" + fmt(secs) + "s (<60s)"};
}

Outcome a2_matches_bruteforce() {
  const auto start = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> side(2, 7);
  std::size_t mismatches = 0, checks = 0;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 500; ++trial) {
    const auto l = testutil::random_set(rng, side(rng), 8, "l");
    const auto r = testutil::random_set(rng, side(rng), 8, "r");
    const auto inst = BipartiteInstance::build(l, r, metric_at(trial), false);
    for (std::size_t k = 1; k <= std::min(l.size(), r.size()); ++k) {
      const double diff = std::abs(match_cardinality(inst, k).total_weight - match_bruteforce(inst, k).total_weight);
      worst = std::max(worst, diff);
      if (diff > 1e-9) ++mismatches;
      ++checks;
    }
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < 120.0, "500 instances, " + std::to_string(checks) + " (instance, r) checks, mismatches=" +
                                               std::to_string(mismatches) + " max|diff|=" + fmt(worst, 15) +
                                               " time=" + fmt(secs) + "s (<120s)"};
}

Outcome likelihood_argmax_is_min_weight() {
  std::mt19937_64 rng(303);
  std::size_t disagreements = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto l = testutil::random_set(rng, 4, 6, "l");
    const auto r = testutil::random_set(rng, 4, 6, "r");
    const auto inst = BipartiteInstance::build(l, r, MetricKind::kProposed, false);
    std::vector<std::size_t> perm{0, 1, 2, 3}, best_ll, best_w;
    double top_ll = -INFINITY, low_w = INFINITY;
    do {
      MatchResult a;
      double w = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        a.pairs.push_back({i, perm[i], inst.weight(i, perm[i])});
        w += inst.weight(i, perm[i]);
      }
      const double ll = generalized_log_likelihood(inst, a, 100);
      if (ll > top_ll) top_ll = ll, best_ll = perm;
      if (w < low_w) low_w = w, best_w = perm;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_ll != best_w) ++disagreements;
  }
  return {disagreements == 0, "100 four-user instances, disagreements=" + std::to_string(disagreements)};
}

Outcome weight_laws() {
  constexpr double kMax = 2.0 * std::numbers::ln2;
  std::mt19937_64 rng(404);
  std::size_t out_of_range = 0, nonzero_equal = 0, bad_disjoint = 0;
  double worst_disjoint = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 19);
    const auto p = testutil::random_histogram(rng, m);
    const auto q = testutil::random_histogram(rng, m);
    const double w = weight_proposed(p, q);
    if (!(w >= 0.0 && w <= kMax)) ++out_of_range;
    if (weight_proposed(p, p) != 0.0) ++nonzero_equal;
    std::vector<Histogram::Entry> shifted;
    for (const auto& e : q.entries()) shifted.push_back({"X" + e.location, e.mass});
    const double d = std::abs(weight_proposed(p, Histogram::from_masses(shifted)) - kMax);
    worst_disjoint = std::max(worst_disjoint, d);
    if (d > 1e-12) ++bad_disjoint;
  }
  return {out_of_range + nonzero_equal + bad_disjoint == 0,
          "10000 pairs, out_of_range=" + std::to_string(out_of_range) + " nonzero_on_equal=" +
              std::to_string(nonzero_equal) + " disjoint_off=" + std::to_string(bad_disjoint) +
              " max|w-2ln2|=" + fmt(worst_disjoint, 17)};
}

ExperimentConfig synthetic(Scenario scenario, std::vector<std::size_t> grid, std::size_t repetitions) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.grid = std::move(grid);
  c.repetitions = repetitions;
  c.seed = 1;
  c.n_users = 100;
  c.alphabet_size = 200;
  c.concentration = 0.1;
  c.t_left = c.t_right = 500;
  return c;
}

Outcome metric_ordering() {
  auto c = synthetic(Scenario::kVaryN, {100}, 50);
  c.metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));
  const auto report = run_experiment(c);
  const auto proposed = report.user_level_series(100, MetricKind::kProposed, Algorithm::kA1);
  const double mean_p = report.find(100, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;
  Outcome out;
  out.detail = "N=100 M=200 alpha=0.1 T=500 reps=50 proposed=" + fmt(mean_p, 2);
  for (auto metric : {MetricKind::kL1, MetricKind::kCosine, MetricKind::kDot}) {
    const auto other = report.user_level_series(100, metric, Algorithm::kA1);
    std::vector<double> diff(proposed.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = proposed[i] - other[i];
    const auto ci = bootstrap_mean_ci(diff, 2000, 0.9, derive_seed(c.seed, 30, static_cast<std::uint64_t>(metric)));
    const double mean_o = report.find(100, metric, Algorithm::kA1)->user_level.mean;
    const bool exceeds = mean_p > mean_o;
    const bool margin = ci.lo >= 0.0;
    out.pass = out.pass && exceeds && margin;
    out.detail += std::string(" | ") + std::string(metric_name(metric)) + "=" + fmt(mean_o, 2) +
                  " exceeds=" + (exceeds ? "yes" : "no") + " margin90=[" + fmt(ci.lo, 2) + "," + fmt(ci.hi, 2) + "]";
  }
  return out;
}

Outcome trends() {
  auto n = synthetic(Scenario::kVaryN, {10, 100, 1000}, 20);
  n.t_left = n.t_right = 10;
  const auto rn = run_experiment(n);
  const double n10 = rn.find(10, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;
  const double n100 = rn.find(100, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;
  const double n1000 = rn.find(1000, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;

  const auto rt = run_experiment(synthetic(Scenario::kVaryT, {50, 500, 5000}, 20));
  const double t50 = rt.find(50, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;
  const double t500 = rt.find(500, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;
  const double t5000 = rt.find(5000, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;

  const bool decreasing = n10 > n100 && n100 > n1000;
  const bool non_decreasing = t50 <= t500 && t500 <= t5000;
  return {decreasing && non_decreasing, "N{10,100,1000} at T=10: " + fmt(n10, 2) + " > " + fmt(n100, 2) + " > " +
                                            fmt(n1000, 2) + " | T{50,500,5000} at N=100: " + fmt(t50, 2) +
                                            " <= " + fmt(t500, 2) + " <= " + fmt(t5000, 2)};
}

Outcome a2_versus_a1() {
  auto c = synthetic(Scenario::kOverlap, {150}, 20);
  c.n_left = c.n_right = 200;
  c.t_left = c.t_right = 10;
  const auto r = run_experiment(c);
  const auto* a1 = r.find(150, MetricKind::kProposed, Algorithm::kA1);
  const auto* a2 = r.find(150, MetricKind::kProposed, Algorithm::kA2);
  const bool pct = a2->percentage_accuracy >= a1->percentage_accuracy;
  const bool count = a1->n_correct >= a2->n_correct;
  return {pct && count, "N=N'=200 r=150 T=10 reps=20 percentage A2=" + fmt(a2->percentage_accuracy, 2) +
                            " >= A1=" + fmt(a1->percentage_accuracy, 2) + " | correct A1=" + fmt(a1->n_correct, 2) +
                            " >= A2=" + fmt(a2->n_correct, 2)};
}

Outcome k_anonymity() {
  std::mt19937_64 rng(808);
  bool verified = true, exact = true;
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = testutil::random_set(rng, 100, 30, "u", 0.7);
    for (std::size_t k : {1u, 2u, 5u, 10u, 100u}) {
      const auto m = microaggregate(s, k);
      verified = verified && verify_k_anonymity(m.released, k);
      const double loss = information_loss(m.partition, s);
      if (k == 1) exact = exact && loss == 0.0;
      if (k == 100) exact = exact && m.partition.g() == 1 && loss == 1.0;
    }
  }

  const auto r = run_experiment(synthetic(Scenario::kKAnon, {1, 2, 5, 10, kAllUsers}, 20));
  bool monotone = true;
  std::string series;
  double previous = INFINITY;
  for (std::size_t k : {1u, 2u, 5u, 10u, static_cast<unsigned>(kAllUsers)}) {
    const double v = r.find(k, MetricKind::kProposed, Algorithm::kA1)->user_level.mean;
    monotone = monotone && v <= previous;
    previous = v;
    series += (series.empty() ? "" : " >= ") + fmt(v, 2);
  }
  const double cluster_all = *r.find(kAllUsers, MetricKind::kProposed, Algorithm::kA1)->cluster_level;
  return {verified && exact && monotone && cluster_all == 100.0,
          std::string("verify=") + (verified ? "ok" : "fail") + " L(k=1)=0,L(N)=1 " + (exact ? "ok" : "fail") +
              " | user-level k{1,2,5,10,N}: " + series + " | cluster-level k=N: " + fmt(cluster_all, 1)};
}

Outcome performance() {
  std::mt19937_64 rng(909);
  HistogramSet left, right;
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  for (std::size_t u = 0; u < 1000; ++u) {
    const auto base = testutil::random_sparse_histogram(rng, 1000, 10);
    std::vector<Histogram::Entry> noisy;
    for (const auto& e : base.entries()) noisy.push_back({e.location, e.mass * jitter(rng)});
    double total = 0.0;
    for (const auto& e : noisy) total += e.mass;
    for (auto& e : noisy) e.mass /= total;
    left.add("a" + std::to_string(u), Histogram::from_masses(noisy));
    right.add("u" + std::to_string(u), base);
  }
  const auto start = Clock::now();
  const auto inst = BipartiteInstance::build(left, right, MetricKind::kProposed, false);
  const double weights_s = seconds_since(start);
  const auto result = match_min_weight(inst);
  const double total_s = seconds_since(start);
  std::size_t correct = 0;
  for (const auto& p : result.pairs) correct += p.left == p.right;
  return {total_s < 60.0 && result.cardinality() == 1000,
          "N=N'=1000 M=1000 support=10 weights=" + fmt(weights_s) + "s total=" + fmt(total_s) +
              "s (<60s) correct=" + std::to_string(correct) + "/1000"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"A1 equals brute force", a1_matches_bruteforce},
      {"A2 equals brute force", a2_matches_bruteforce},
      {"likelihood argmax equals min weight", likelihood_argmax_is_min_weight},
      {"weight laws", weight_laws},
      {"metric ordering", metric_ordering},
      {"trends in N and T", trends},
      {"A2 versus A1 under partial overlap", a2_versus_a1},
      {"k-anonymity", k_anonymity},
      {"performance", performance},
  };
  return all;
}

}  // namespace
}  // namespace histmatch

int main(int argc, char** argv) {
  using histmatch::criteria;
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    std::size_t n = 0;
    std::istringstream in(argv[i]);
    if (!(in >> n) || n < 1 || n > criteria().size()) {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria().size());
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    for (std::size_t n = 1; n <= criteria().size(); ++n) selected.push_back(n);

  bool all_pass = true;
  for (auto n : selected) {
    const auto& [name, check] = criteria()[n - 1];
    histmatch::Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && outcome.pass;
    std::printf("criterion %zu: %s  %s: %s\n", n, outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
