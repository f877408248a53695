#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "skualloc/backtest.hpp"
#include "skualloc/errors.hpp"
#include "skualloc/report.hpp"

using namespace skualloc;
using namespace skualloc::backtest;
using namespace skualloc::report;

namespace {

// Two clusters, two r values, with an undefined UI cell in FDC_2.
BacktestResult fixture() {
    BacktestResult result;
    result.config.window_weeks = 9;
    result.config.target_week = 9;
    result.config.r_values = {0.025, 0.1};
    result.config.policy = Policy::kNewsboy;
    result.config.seed = 5;
    result.pairs_modeled = 3;
    result.pairs_skipped = 1;

    ClusterRow a;
    a.cluster_id = "FDC_1";
    metrics::ClusterMetrics m1;
    m1.cluster_id = "FDC_1";
    m1.fi = 0.4375;
    m1.ui = 2.0;
    m1.delivered_total = 7;
    m1.ordered_total = 16;
    m1.predicted_total = 8;
    m1.prev_sold_total = 4;
    metrics::ClusterMetrics m2 = m1;
    m2.fi = 1.0;
    m2.ui = 1.6;
    m2.predicted_total = 6;
    a.per_r = {m1, m2};
    a.ineligible_per_r = {0, 1};

    ClusterRow b;
    b.cluster_id = "FDC_2";
    metrics::ClusterMetrics m3;
    m3.cluster_id = "FDC_2";
    m3.fi = 0.0;
    m3.ui = std::nullopt;  // nothing sold the week before
    m3.ordered_total = 5;
    metrics::ClusterMetrics m4 = m3;
    b.per_r = {m3, m4};
    b.ineligible_per_r = {1, 1};

    result.rows = {a, b};
    return result;
}

BacktestResult second_policy(const BacktestResult& base, Policy policy) {
    BacktestResult other = base;
    other.config.policy = policy;
    for (auto& row : other.rows) {
        for (auto& m : row.per_r) {
            if (m.ui) m.ui = *m.ui * 0.5;
            m.predicted_total /= 2;
        }
    }
    return other;
}

}  // namespace

TEST_CASE("backtest csv renders r-tagged column pairs and empty undefined cells") {
    const auto result = fixture();
    const auto csv = render_backtest_csv(result);
    CHECK(csv.find("cluster_id,fi_r0.025,ui_r0.025,fi_r0.1,ui_r0.1\n") == 0);
    CHECK(csv.find("FDC_1,0.4375,2,1,1.6\n") != std::string::npos);
    CHECK(csv.find("FDC_2,0,,0,\n") != std::string::npos);

    const auto grid = parse_backtest_csv(csv);
    CHECK(grid == grid_from_result(result));
}

TEST_CASE("backtest jsonl round-trips the full result") {
    const auto result = fixture();
    const auto jsonl = render_backtest_jsonl(result);
    CHECK(parse_backtest_jsonl(jsonl) == result);
    CHECK(jsonl.find("\"ui\":null") != std::string::npos);
    // re-render is byte-stable
    CHECK(render_backtest_jsonl(parse_backtest_jsonl(jsonl)) == jsonl);
}

TEST_CASE("backtest markdown uses whole-percent fi and two-decimal ui") {
    const auto md = render_backtest_markdown(fixture());
    CHECK(md.find("| Region | FI (r=0.025) | UI (r=0.025) | FI (r=0.1) | UI (r=0.1) |") == 0);
    CHECK(md.find("| FDC_1 | 44% | 2.00 | 100% | 1.60 |") != std::string::npos);
    CHECK(md.find("| FDC_2 | 0% |  | 0% |  |") != std::string::npos);
}

TEST_CASE("backtest parsers reject malformed input") {
    CHECK_THROWS_AS(parse_backtest_csv(""), DataError);
    CHECK_THROWS_AS(parse_backtest_csv("bogus,header\n"), DataError);
    CHECK_THROWS_AS(parse_backtest_csv("cluster_id,fi_r0.1,ui_r0.2\nFDC_1,1,1\n"), DataError);
    CHECK_THROWS_AS(parse_backtest_csv("cluster_id,fi_r0.1,ui_r0.1\nFDC_1,1\n"), DataError);
    CHECK_THROWS_AS(parse_backtest_jsonl(""), DataError);
    CHECK_THROWS_AS(parse_backtest_jsonl("{not json"), DataError);
    CHECK_THROWS_AS(parse_backtest_jsonl("{\"type\":\"cell\"}"), DataError);
}

TEST_CASE("comparison csv includes a policy block per column group") {
    PolicyComparison comparison;
    comparison.policies = {Policy::kNewsboy, Policy::kNaiveLastWeek};
    comparison.per_policy = {fixture(), second_policy(fixture(), Policy::kNaiveLastWeek)};

    const auto csv = render_comparison_csv(comparison);
    CHECK(csv.find("cluster_id,fi_newsboy_r0.025,ui_newsboy_r0.025,fi_newsboy_r0.1,"
                   "ui_newsboy_r0.1,fi_naive_last_week_r0.025,ui_naive_last_week_r0.025,"
                   "fi_naive_last_week_r0.1,ui_naive_last_week_r0.1\n") == 0);
    const auto grid = parse_comparison_csv(csv);
    CHECK(grid == grid_from_comparison(comparison));
    CHECK(grid.policies ==
          std::vector<std::string>{"newsboy", "naive_last_week"});
}

TEST_CASE("comparison jsonl round-trips the full comparison") {
    PolicyComparison comparison;
    comparison.policies = {Policy::kNewsboy, Policy::kWindowMean};
    comparison.per_policy = {fixture(), second_policy(fixture(), Policy::kWindowMean)};
    const auto jsonl = render_comparison_jsonl(comparison);
    const auto parsed = parse_comparison_jsonl(jsonl);
    CHECK(parsed == comparison);
    CHECK(render_comparison_jsonl(parsed) == jsonl);
}

TEST_CASE("comparison markdown emits one table per r value") {
    PolicyComparison comparison;
    comparison.policies = {Policy::kNewsboy, Policy::kNaiveLastWeek};
    comparison.per_policy = {fixture(), second_policy(fixture(), Policy::kNaiveLastWeek)};
    const auto md = render_comparison_markdown(comparison);
    CHECK(md.find("**r = 0.025**") != std::string::npos);
    CHECK(md.find("**r = 0.1**") != std::string::npos);
    CHECK(md.find("| Region | FI (newsboy) | UI (newsboy) | FI (naive_last_week) | "
                  "UI (naive_last_week) |") != std::string::npos);
    CHECK(md.find("| FDC_1 | 44% | 2.00 | 44% | 1.00 |") != std::string::npos);
}

TEST_CASE("misaligned comparison results are rejected") {
    PolicyComparison comparison;
    comparison.policies = {Policy::kNewsboy, Policy::kNaiveLastWeek};
    auto broken = fixture();
    broken.rows.pop_back();
    comparison.per_policy = {fixture(), broken};
    CHECK_THROWS_AS(grid_from_comparison(comparison), DataError);
}
