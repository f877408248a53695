#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skualloc/backtest.hpp"

namespace skualloc::report {

/// The values carried by the wide CSV layout: one row per cluster, one
/// (fi, ui) pair per r.
struct GridRow {
    std::string cluster_id;
    std::vector<std::optional<double>> fi;
    std::vector<std::optional<double>> ui;

    bool operator==(const GridRow&) const = default;
};

struct BacktestGrid {
    std::vector<double> r_values;
    std::vector<GridRow> rows;

    bool operator==(const BacktestGrid&) const = default;
};

/// Side-by-side values for several policies; fi/ui are laid out per policy,
/// then per r, matching the comparison CSV column order.
struct ComparisonGrid {
    std::vector<std::string> policies;
    std::vector<double> r_values;
    std::vector<GridRow> rows;

    bool operator==(const ComparisonGrid&) const = default;
};

BacktestGrid grid_from_result(const backtest::BacktestResult& result);
ComparisonGrid grid_from_comparison(const backtest::PolicyComparison& comparison);

// Wide CSV, full-precision decimals, empty fields for undefined metrics.
std::string render_backtest_csv(const backtest::BacktestResult& result);
BacktestGrid parse_backtest_csv(const std::string& text);

// json-lines: a config line followed by one cell object per (cluster, r);
// lossless, undefined metrics are explicit nulls.
std::string render_backtest_jsonl(const backtest::BacktestResult& result);
backtest::BacktestResult parse_backtest_jsonl(const std::string& text);

// Human-facing table: FI as whole percent, UI to two decimals.
std::string render_backtest_markdown(const backtest::BacktestResult& result);

std::string render_comparison_csv(const backtest::PolicyComparison& comparison);
ComparisonGrid parse_comparison_csv(const std::string& text);
std::string render_comparison_jsonl(const backtest::PolicyComparison& comparison);
backtest::PolicyComparison parse_comparison_jsonl(const std::string& text);
std::string render_comparison_markdown(const backtest::PolicyComparison& comparison);

}  // namespace skualloc::report
