#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skualloc/io.hpp"
#include "skualloc/metrics.hpp"

namespace skualloc::backtest {

enum class Policy {
    kNewsboy,       ///< fit Poisson, allocate the critical-fractile quantile
    kNaiveLastWeek, ///< allocate exactly last week's sales
    kWindowMean,    ///< allocate the rounded window mean
};

std::string to_string(Policy policy);
Policy policy_from_string(const std::string& name);  // throws ConfigError

struct BacktestConfig {
    int window_weeks = 9;
    std::int64_t target_week = 0;  ///< dense week index into the sales table
    std::vector<double> r_values = {0.025, 0.05, 0.1, 0.2, 0.4};
    Policy policy = Policy::kNewsboy;
    std::uint64_t seed = 0;

    bool operator==(const BacktestConfig&) const = default;
};

/// Metrics for one cluster across the configured r sweep. per_r and
/// ineligible_per_r are parallel to config.r_values.
struct ClusterRow {
    std::string cluster_id;
    std::vector<metrics::ClusterMetrics> per_r;
    std::vector<std::int64_t> ineligible_per_r;

    bool operator==(const ClusterRow&) const = default;
};

struct BacktestResult {
    BacktestConfig config;
    std::vector<ClusterRow> rows;  ///< natural cluster order
    std::int64_t pairs_modeled = 0;
    std::int64_t pairs_skipped = 0;  ///< pairs with no positive sales in the window

    bool operator==(const BacktestResult&) const = default;
};

/// One result per policy over identical windows and target week.
struct PolicyComparison {
    std::vector<Policy> policies;
    std::vector<BacktestResult> per_policy;

    bool operator==(const PolicyComparison&) const = default;
};

/// Roll the estimation window up to target_week, allocate with the
/// configured policy, and score the realized target week per cluster and r.
/// Missing (cluster, SKU, week) rows inside the window count as zero sales;
/// pairs without any positive window sales are skipped and counted.
BacktestResult run_backtest(const std::vector<io::SalesRecord>& sales,
                            const BacktestConfig& config);

PolicyComparison run_policy_comparison(const std::vector<io::SalesRecord>& sales,
                                       const BacktestConfig& config,
                                       const std::vector<Policy>& policies);

/// Per-SKU true weekly rates are drawn from a lognormal, clipped to
/// [min_lambda, max_lambda] by resampling.
struct LambdaSampler {
    double mu = 1.0;
    double sigma = 1.0;
    double min_lambda = 0.1;
    double max_lambda = 50.0;
};

struct SyntheticWorld {
    int clusters = 12;
    int skus_per_cluster = 200;
    int weeks = 12;
    LambdaSampler lambda_sampler;
    std::uint64_t seed = 0;
};

/// Identity of the portable generator behind generate_world and
/// estimate_expected_fi, for run metadata.
std::string rng_identity();

/// Draw a true rate per (cluster, SKU), then i.i.d. Poisson weekly sales.
/// Emits one record per (cluster, SKU, week), zeros included; byte-for-byte
/// reproducible from the seed on any platform.
std::vector<io::SalesRecord> generate_world(const SyntheticWorld& world);

/// Week labels "0".."weeks-1" matching generate_world's indices.
std::vector<std::string> world_week_labels(int weeks);

struct ExpectedFi {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of E[min(q, D)/D] for D ~ Poisson(lambda), counting
/// zero demand as fully fulfilled.
ExpectedFi estimate_expected_fi(double lambda, std::int64_t q, std::int64_t samples,
                                std::uint64_t seed);

}  // namespace skualloc::backtest
