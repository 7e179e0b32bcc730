#pragma once

#include <optional>
#include <string_view>

#include "histmatch/histogram.hpp"

namespace histmatch {

/// Pairwise histogram weight. `kDot` is a similarity (larger is closer);
/// the others are distances.
enum class MetricKind { kProposed, kL1, kCosine, kDot };

inline constexpr MetricKind kAllMetrics[] = {MetricKind::kProposed, MetricKind::kL1,
                                             MetricKind::kCosine, MetricKind::kDot};

std::string_view metric_name(MetricKind kind);
/// Parses the CLI token `proposed | l1 | cosine | dot`.
std::optional<MetricKind> parse_metric(std::string_view token);

constexpr bool is_similarity(MetricKind kind) { return kind == MetricKind::kDot; }

/// Upper end of the metric's range: 2 ln 2 for the proposed weight, 2 for l1,
/// 1 for cosine and dot.
double metric_max(MetricKind kind);

/// D(p || q) in nats. Throws AbsoluteContinuity when p puts mass outside q's
/// support.
double kl_divergence(const Histogram& p, const Histogram& q);

/// H(p) in nats.
double shannon_entropy(const Histogram& p);

/// D(p || m) + D(q || m) with m the midpoint of p and q. Zero iff p == q and
/// 2 ln 2 for disjoint supports.
double weight_proposed(const Histogram& p, const Histogram& q);
double weight_cosine(const Histogram& p, const Histogram& q);
double weight_dot(const Histogram& p, const Histogram& q);
double weight_l1(const Histogram& p, const Histogram& q);

double evaluate_metric(MetricKind kind, const Histogram& p, const Histogram& q);

/// True when the supports intersect.
bool supports_overlap(const Histogram& p, const Histogram& q);

}  // namespace histmatch
