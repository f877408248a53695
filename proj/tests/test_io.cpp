#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "skualloc/errors.hpp"
#include "skualloc/io.hpp"

using namespace skualloc;
using namespace skualloc::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() /
               ("skualloc_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }

    static int& counter() {
        static int n = 0;
        return n;
    }

    fs::path file(const std::string& name, const std::string& content) const {
        const auto p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

const std::string kHeader = "cluster_id,sku_id,week,units\n";

}  // namespace

TEST_CASE("load_sales parses the happy path") {
    TempDir dir;
    const auto p = dir.file("sales.csv", kHeader + "FDC_1,SKU_42,2023-W10,7\n");
    const auto table = load_sales(p);
    REQUIRE(table.records.size() == 1);
    CHECK(table.records[0].cluster_id == "FDC_1");
    CHECK(table.records[0].sku_id == "SKU_42");
    CHECK(table.records[0].week == 0);
    CHECK(table.records[0].units == 7);
    REQUIRE(table.week_labels.size() == 1);
    CHECK(table.week_labels[0] == "2023-W10");
    CHECK(table.week_index("2023-W10") == 0);
    CHECK_FALSE(table.week_index("2023-W11").has_value());
}

TEST_CASE("iso weeks are densely indexed in chronological order") {
    TempDir dir;
    const auto p = dir.file("sales.csv", kHeader +
                                             "FDC_1,SKU_1,2023-W10,7\n"
                                             "FDC_1,SKU_1,2022-W52,3\n"
                                             "FDC_1,SKU_1,2023-W02,5\n");
    const auto table = load_sales(p);
    REQUIRE(table.week_labels.size() == 3);
    CHECK(table.week_labels[0] == "2022-W52");
    CHECK(table.week_labels[1] == "2023-W02");
    CHECK(table.week_labels[2] == "2023-W10");
    CHECK(table.records[0].week == 2);
    CHECK(table.records[1].week == 0);
    CHECK(table.records[2].week == 1);
}

TEST_CASE("integer weeks are canonicalized and sorted numerically") {
    TempDir dir;
    const auto p = dir.file("sales.csv", kHeader +
                                             "FDC_1,SKU_1,10,1\n"
                                             "FDC_1,SKU_1,2,1\n"
                                             "FDC_1,SKU_1,007,1\n");
    const auto table = load_sales(p);
    REQUIRE(table.week_labels.size() == 3);
    CHECK(table.week_labels[0] == "2");
    CHECK(table.week_labels[1] == "7");  // leading zeros collapse
    CHECK(table.week_labels[2] == "10");
    CHECK(table.week_index("007") == 1);
    CHECK(table.week_index("7") == 1);
}

TEST_CASE("load_sales validation errors carry line numbers") {
    TempDir dir;
    CHECK_THROWS_AS(load_sales(dir.path / "missing.csv"), DataError);
    CHECK_THROWS_AS(load_sales(dir.file("a.csv", "wrong,header\n")), DataError);
    CHECK_THROWS_AS(load_sales(dir.file("b.csv", "")), DataError);
    CHECK_THROWS_AS(load_sales(dir.file("c.csv", kHeader + "FDC_1,SKU_1,1\n")), DataError);
    CHECK_THROWS_AS(load_sales(dir.file("d.csv", kHeader + "FDC_1,SKU_1,1,-1\n")), DataError);
    CHECK_THROWS_AS(load_sales(dir.file("e.csv", kHeader + "FDC 1,SKU_1,1,1\n")), DataError);
    CHECK_THROWS_AS(load_sales(dir.file("f.csv", kHeader + "FDC_1,SKU_1,2023-W54,1\n")),
                    DataError);
    CHECK_THROWS_AS(load_sales(dir.file("g.csv", kHeader + "FDC_1,SKU_1,2023-W00,1\n")),
                    DataError);
    CHECK_THROWS_AS(load_sales(dir.file("h.csv", kHeader + "FDC_1,SKU_1,W10,1\n")), DataError);

    try {
        load_sales(dir.file("i.csv", kHeader + "FDC_1,SKU_1,1,1\nFDC_1,SKU_1,2,bad\n"));
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("mixed week label kinds are rejected") {
    TempDir dir;
    const auto p = dir.file("sales.csv", kHeader +
                                             "FDC_1,SKU_1,2023-W10,7\n"
                                             "FDC_1,SKU_1,3,7\n");
    CHECK_THROWS_AS(load_sales(p), DataError);
}

TEST_CASE("duplicate keys name both offending lines") {
    TempDir dir;
    const auto p = dir.file("sales.csv", kHeader +
                                             "FDC_1,SKU_1,1,1\n"
                                             "FDC_1,SKU_2,1,1\n"
                                             "FDC_1,SKU_1,01,2\n");
    try {
        load_sales(p);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("lines 2 and 4") != std::string::npos);
        CHECK(what.find("duplicate") != std::string::npos);
    }
}

TEST_CASE("sales csv round-trips") {
    TempDir dir;
    const std::string body = kHeader +
                             "FDC_1,SKU_1,2023-W01,4\n"
                             "FDC_1,SKU_2,2023-W02,0\n"
                             "FDC_2,SKU_1,2023-W01,9\n";
    const auto table = load_sales(dir.file("sales.csv", body));
    CHECK(render_sales_csv(table) == body);
    const auto reloaded = load_sales(dir.file("again.csv", render_sales_csv(table)));
    CHECK(reloaded == table);
}

TEST_CASE("write_file_atomic leaves no temp debris and no partial files") {
    TempDir dir;
    const auto target = dir.path / "out.csv";
    write_file_atomic(target, "hello\n");
    CHECK(slurp(target) == "hello\n");
    // overwrite in place
    write_file_atomic(target, "world\n");
    CHECK(slurp(target) == "world\n");
    std::size_t entries = 0;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        (void)entry;
        ++entries;
    }
    CHECK(entries == 1);

    // failure to create the temp file must not create the target
    const auto bad = dir.path / "no_such_dir" / "out.csv";
    CHECK_THROWS_AS(write_file_atomic(bad, "x"), DataError);
    CHECK_FALSE(fs::exists(bad));
}

TEST_CASE("recommendation decisions round-trip through csv and jsonl") {
    std::vector<alloc::AllocationDecision> decisions(2);
    decisions[0].cluster_id = "FDC_1";
    decisions[0].sku_id = "SKU_1";
    decisions[0].q_star = 15;
    decisions[0].eligible = true;
    decisions[0].fractile = 0.95;
    decisions[0].lambda_hat = 10.0 / 3.0;
    decisions[0].s = 20;
    decisions[0].r = 0.1;
    decisions[1].cluster_id = "FDC_2";
    decisions[1].sku_id = "SKU_9";
    decisions[1].q_star = 0;
    decisions[1].eligible = false;
    decisions[1].lambda_hat = 0.0;
    decisions[1].s = 0;
    decisions[1].r = 0.1;

    CHECK(parse_recommendations_csv(render_recommendations_csv(decisions)) == decisions);
    CHECK(parse_recommendations_jsonl(render_recommendations_jsonl(decisions)) == decisions);

    // absent fractile serializes as an empty csv field and a jsonl null
    const auto csv = render_recommendations_csv(decisions);
    CHECK(csv.find("FDC_2,SKU_9,0,false,0,0,,0.1") != std::string::npos);
    const auto jsonl = render_recommendations_jsonl(decisions);
    CHECK(jsonl.find("\"fractile\":null") != std::string::npos);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 0.025, 1.0 / 3.0, 1e-17, 0.30000000000000004, 123456.789,
                     0.0, -2.5}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.025) == "0.025");
}

TEST_CASE("valid_token enforces the identifier grammar") {
    CHECK(valid_token("FDC_1"));
    CHECK(valid_token("SKU-42x"));
    CHECK_FALSE(valid_token(""));
    CHECK_FALSE(valid_token("FDC 1"));
    CHECK_FALSE(valid_token("FDC,1"));
    CHECK_FALSE(valid_token("FDC!"));
}

TEST_CASE("natural_less orders embedded numbers by value") {
    CHECK(natural_less("FDC_2", "FDC_10"));
    CHECK_FALSE(natural_less("FDC_10", "FDC_2"));
    CHECK(natural_less("SKU_9", "SKU_10"));
    CHECK(natural_less("a", "b"));
    CHECK_FALSE(natural_less("FDC_2", "FDC_2"));
    CHECK(natural_less("FDC_2", "FDC_2x"));
    // strict weak ordering sanity on a small set
    const std::string items[] = {"A1", "A01", "A2", "A10", "B", "A"};
    for (const auto& x : items) {
        CHECK_FALSE(natural_less(x, x));
        for (const auto& y : items) {
            if (natural_less(x, y)) CHECK_FALSE(natural_less(y, x));
        }
    }
}
