#include "skualloc/metrics.hpp"

#include "skualloc/errors.hpp"

namespace skualloc::metrics {

std::optional<double> sku_fi(const WeekOutcome& outcome) {
    if (outcome.ordered_units <= 0) return std::nullopt;
    return static_cast<double>(outcome.delivered_units()) /
           static_cast<double>(outcome.ordered_units);
}

std::optional<double> sku_ui(const WeekOutcome& outcome) {
    if (outcome.prev_week_sold_units <= 0) return std::nullopt;
    return static_cast<double>(outcome.allocated_units) /
           static_cast<double>(outcome.prev_week_sold_units);
}

ClusterMetrics cluster_metrics(const std::vector<WeekOutcome>& outcomes) {
    ClusterMetrics result;
    if (outcomes.empty()) return result;

    result.cluster_id = outcomes.front().cluster_id;
    for (const auto& outcome : outcomes) {
        if (outcome.cluster_id != result.cluster_id) {
            throw DataError("cluster_metrics: mixed cluster ids '" + result.cluster_id +
                            "' and '" + outcome.cluster_id + "'");
        }
        result.delivered_total += outcome.delivered_units();
        result.ordered_total += outcome.ordered_units;
        result.predicted_total += outcome.allocated_units;
        result.prev_sold_total += outcome.prev_week_sold_units;
    }
    if (result.ordered_total > 0) {
        result.fi = static_cast<double>(result.delivered_total) /
                    static_cast<double>(result.ordered_total);
    }
    if (result.prev_sold_total > 0) {
        result.ui = static_cast<double>(result.predicted_total) /
                    static_cast<double>(result.prev_sold_total);
    }
    return result;
}

}  // namespace skualloc::metrics
