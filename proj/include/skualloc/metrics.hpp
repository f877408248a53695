#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skualloc::metrics {

/// Realized week for one (cluster, SKU): what was ordered, what had been
/// stocked, and what sold the week before.
struct WeekOutcome {
    std::string cluster_id;
    std::string sku_id;
    std::int64_t ordered_units = 0;
    std::int64_t allocated_units = 0;
    std::int64_t prev_week_sold_units = 0;

    /// Deliveries cannot exceed stock or orders.
    std::int64_t delivered_units() const { return std::min(allocated_units, ordered_units); }
};

/// Cluster-week aggregates. fi and ui are ratios of unit totals and are
/// absent (not 0) when their denominator is zero.
struct ClusterMetrics {
    std::string cluster_id;
    std::optional<double> fi;  ///< delivered_total / ordered_total
    std::optional<double> ui;  ///< predicted_total / prev_sold_total
    std::int64_t delivered_total = 0;
    std::int64_t ordered_total = 0;
    std::int64_t predicted_total = 0;
    std::int64_t prev_sold_total = 0;

    bool operator==(const ClusterMetrics&) const = default;
};

/// min(allocated, ordered) / ordered; absent when nothing was ordered.
std::optional<double> sku_fi(const WeekOutcome& outcome);

/// allocated / prev_week_sold; absent when nothing sold the week before.
std::optional<double> sku_ui(const WeekOutcome& outcome);

/// Ratio-of-sums aggregation over one cluster's outcomes (never the mean of
/// per-SKU ratios). All outcomes must share a cluster_id; an empty list
/// yields zero totals and absent metrics.
ClusterMetrics cluster_metrics(const std::vector<WeekOutcome>& outcomes);

}  // namespace skualloc::metrics
