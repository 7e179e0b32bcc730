#include "histmatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "histmatch/error.hpp"

namespace histmatch {

namespace {

using Entries = std::span<const Histogram::Entry>;

// Visits the common support in location order, calling f(p_mass, q_mass).
// Walks the smaller support and probes the larger one, so the cost is
// O(min * log max) and the visiting order does not depend on which side is
// smaller.
template <typename F>
void for_each_common(const Histogram& p, const Histogram& q, F&& f) {
  const Entries pe = p.entries();
  const Entries qe = q.entries();
  const bool p_small = pe.size() <= qe.size();
  const Entries small = p_small ? pe : qe;
  const Entries large = p_small ? qe : pe;

  auto cursor = large.begin();
  for (const auto& e : small) {
    cursor = std::lower_bound(cursor, large.end(), e.location,
                              [](const Histogram::Entry& x, const LocationId& l) { return x.location < l; });
    if (cursor == large.end()) break;
    if (cursor->location != e.location) continue;
    if (p_small)
      f(e.mass, cursor->mass);
    else
      f(cursor->mass, e.mass);
  }
}

}  // namespace

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kProposed: return "proposed";
    case MetricKind::kL1: return "l1";
    case MetricKind::kCosine: return "cosine";
    case MetricKind::kDot: return "dot";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric(std::string_view token) {
  for (MetricKind kind : kAllMetrics)
    if (metric_name(kind) == token) return kind;
  return std::nullopt;
}

double metric_max(MetricKind kind) {
  switch (kind) {
    case MetricKind::kProposed: return 2.0 * std::numbers::ln2;
    case MetricKind::kL1: return 2.0;
    case MetricKind::kCosine:
    case MetricKind::kDot: return 1.0;
  }
  return 0.0;
}

double kl_divergence(const Histogram& p, const Histogram& q) {
  double sum = 0.0;
  for (const auto& e : p.entries()) {
    const double qm = q.mass(e.location);
    if (qm <= 0.0)
      throw Error(ErrorCode::kAbsoluteContinuity,
                  "KL divergence undefined: location " + e.location + " missing from q");
    sum += e.mass * std::log(e.mass / qm);
  }
  return std::max(sum, 0.0);
}

double shannon_entropy(const Histogram& p) {
  double sum = 0.0;
  for (const auto& e : p.entries()) sum -= e.mass * std::log(e.mass);
  return std::max(sum, 0.0);
}

double weight_proposed(const Histogram& p, const Histogram& q) {
  // Locations outside the common support contribute mass * ln 2; only the
  // intersection needs the full term.
  double common_p = 0.0;
  double common_q = 0.0;
  double common_terms = 0.0;
  for_each_common(p, q, [&](double a, double b) {
    const double s = a + b;
    common_p += a;
    common_q += b;
    common_terms += a * std::log(2.0 * a / s) + b * std::log(2.0 * b / s);
  });
  const double exclusive = (p.total_mass() - common_p) + (q.total_mass() - common_q);
  const double w = std::numbers::ln2 * exclusive + common_terms;
  return std::clamp(w, 0.0, 2.0 * std::numbers::ln2);
}

double weight_dot(const Histogram& p, const Histogram& q) {
  double dot = 0.0;
  for_each_common(p, q, [&](double a, double b) { dot += a * b; });
  return std::clamp(dot, 0.0, 1.0);
}

double weight_cosine(const Histogram& p, const Histogram& q) {
  double dot = 0.0;
  for_each_common(p, q, [&](double a, double b) { dot += a * b; });
  const double norms = std::sqrt(p.squared_norm() * q.squared_norm());
  return std::clamp(1.0 - dot / norms, 0.0, 1.0);
}

double weight_l1(const Histogram& p, const Histogram& q) {
  double common_p = 0.0;
  double common_q = 0.0;
  double common_terms = 0.0;
  for_each_common(p, q, [&](double a, double b) {
    common_p += a;
    common_q += b;
    common_terms += std::abs(a - b);
  });
  const double exclusive = (p.total_mass() - common_p) + (q.total_mass() - common_q);
  return std::clamp(exclusive + common_terms, 0.0, 2.0);
}

double evaluate_metric(MetricKind kind, const Histogram& p, const Histogram& q) {
  switch (kind) {
    case MetricKind::kProposed: return weight_proposed(p, q);
    case MetricKind::kL1: return weight_l1(p, q);
    case MetricKind::kCosine: return weight_cosine(p, q);
    case MetricKind::kDot: return weight_dot(p, q);
  }
  return 0.0;
}

bool supports_overlap(const Histogram& p, const Histogram& q) {
  bool any = false;
  for_each_common(p, q, [&](double, double) { any = true; });
  return any;
}

}  // namespace histmatch
