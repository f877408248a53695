#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "skualloc/errors.hpp"
#include "skualloc/metrics.hpp"

using namespace skualloc;
using namespace skualloc::metrics;

namespace {

WeekOutcome outcome(std::int64_t ordered, std::int64_t allocated, std::int64_t prev,
                    const std::string& cluster = "FDC_1", const std::string& sku = "SKU_1") {
    WeekOutcome o;
    o.cluster_id = cluster;
    o.sku_id = sku;
    o.ordered_units = ordered;
    o.allocated_units = allocated;
    o.prev_week_sold_units = prev;
    return o;
}

}  // namespace

TEST_CASE("delivered units are capped by stock and orders") {
    CHECK(outcome(10, 7, 0).delivered_units() == 7);
    CHECK(outcome(7, 10, 0).delivered_units() == 7);
    CHECK(outcome(0, 3, 0).delivered_units() == 0);
}

TEST_CASE("sku fi") {
    CHECK(*sku_fi(outcome(10, 7, 0)) == doctest::Approx(0.7));
    CHECK(*sku_fi(outcome(7, 10, 0)) == 1.0);
    CHECK_FALSE(sku_fi(outcome(0, 3, 0)).has_value());
}

TEST_CASE("sku ui") {
    CHECK(*sku_ui(outcome(0, 5, 5)) == 1.0);
    CHECK(*sku_ui(outcome(0, 2, 4)) == 0.5);
    CHECK_FALSE(sku_ui(outcome(0, 2, 0)).has_value());
}

TEST_CASE("cluster metrics aggregate unit totals") {
    const std::vector<WeekOutcome> outcomes = {
        outcome(10, 7, 4),
        outcome(10, 0, 4, "FDC_1", "SKU_2"),
    };
    const auto m = cluster_metrics(outcomes);
    CHECK(m.cluster_id == "FDC_1");
    REQUIRE(m.fi.has_value());
    CHECK(*m.fi == doctest::Approx(0.35));  // (7 + 0) / (10 + 10)
    CHECK(m.delivered_total == 7);
    CHECK(m.ordered_total == 20);
    REQUIRE(m.ui.has_value());
    CHECK(*m.ui == doctest::Approx(7.0 / 8.0));
    CHECK(m.predicted_total == 7);
    CHECK(m.prev_sold_total == 8);
}

TEST_CASE("cluster ui example with allocations 5 and 3 over prev 4 and 4") {
    const std::vector<WeekOutcome> outcomes = {
        outcome(0, 5, 4),
        outcome(0, 3, 4, "FDC_1", "SKU_2"),
    };
    const auto m = cluster_metrics(outcomes);
    CHECK_FALSE(m.fi.has_value());  // nothing ordered
    CHECK(*m.ui == 1.0);            // 8 / 8
}

TEST_CASE("ratio of sums is not the mean of per-sku ratios") {
    // per-SKU ratios are 0.5 and 1.0 (mean 0.75); unit totals give 11/12
    const std::vector<WeekOutcome> outcomes = {
        outcome(2, 1, 1),
        outcome(10, 10, 1, "FDC_1", "SKU_2"),
    };
    const auto m = cluster_metrics(outcomes);
    CHECK(*m.fi == 11.0 / 12.0);
    CHECK(*m.fi != doctest::Approx(0.75));
}

TEST_CASE("empty outcome list yields zero totals and absent metrics") {
    const auto m = cluster_metrics({});
    CHECK(m.cluster_id.empty());
    CHECK_FALSE(m.fi.has_value());
    CHECK_FALSE(m.ui.has_value());
    CHECK(m.delivered_total == 0);
    CHECK(m.ordered_total == 0);
    CHECK(m.predicted_total == 0);
    CHECK(m.prev_sold_total == 0);
}

TEST_CASE("mixed cluster ids are rejected") {
    CHECK_THROWS_AS(cluster_metrics({outcome(1, 1, 1), outcome(1, 1, 1, "FDC_2")}), DataError);
}

TEST_CASE("fi stays in [0,1] and grows with allocation") {
    double prev = -1.0;
    for (std::int64_t allocated = 0; allocated <= 15; ++allocated) {
        const auto m = cluster_metrics({outcome(10, allocated, 1)});
        REQUIRE(m.fi.has_value());
        CHECK(*m.fi >= 0.0);
        CHECK(*m.fi <= 1.0);
        CHECK(*m.fi >= prev);
        prev = *m.fi;
    }
}

TEST_CASE("metrics are invariant under uniform unit scaling") {
    const std::vector<WeekOutcome> base = {
        outcome(3, 1, 2),
        outcome(5, 9, 1, "FDC_1", "SKU_2"),
        outcome(4, 0, 7, "FDC_1", "SKU_3"),
    };
    std::vector<WeekOutcome> scaled = base;
    for (auto& o : scaled) {
        o.ordered_units *= 7;
        o.allocated_units *= 7;
        o.prev_week_sold_units *= 7;
    }
    const auto m1 = cluster_metrics(base);
    const auto m2 = cluster_metrics(scaled);
    CHECK(*m1.fi == *m2.fi);
    CHECK(*m1.ui == *m2.ui);
}

TEST_CASE("undefined metrics are absent rather than zero") {
    // orders but no stock anywhere: fi defined (0), ui undefined
    const auto m = cluster_metrics({outcome(5, 0, 0)});
    REQUIRE(m.fi.has_value());
    CHECK(*m.fi == 0.0);
    CHECK_FALSE(m.ui.has_value());
}
