#include "skualloc/cli.hpp"

#include <ctime>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "skualloc/allocator.hpp"
#include "skualloc/backtest.hpp"
#include "skualloc/errors.hpp"
#include "skualloc/io.hpp"
#include "skualloc/report.hpp"

namespace skualloc::cli {

namespace {

using nlohmann::json;

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

io::SalesTable load_input(const RunConfig& config) {
    if (config.input.empty()) throw ConfigError("--input is required");
    return io::load_sales(config.input);
}

enum class Format { kCsv, kMarkdown, kJsonLines };

Format parse_format(const std::string& name) {
    if (name == "csv") return Format::kCsv;
    if (name == "markdown") return Format::kMarkdown;
    if (name == "json-lines") return Format::kJsonLines;
    throw ConfigError("--format must be csv, markdown, or json-lines; got '" + name + "'");
}

std::vector<backtest::Policy> parse_policies(const std::string& list) {
    std::vector<backtest::Policy> policies;
    std::string current;
    for (char c : list + ",") {
        if (c != ',') {
            current.push_back(c);
            continue;
        }
        if (!current.empty()) policies.push_back(backtest::policy_from_string(current));
        current.clear();
    }
    if (policies.empty()) throw ConfigError("--policy must name at least one policy");
    return policies;
}

/// Body to the output file plus metadata (with the only timestamp) to a
/// .meta.json sidecar; or body to stdout and metadata to stderr when no
/// output path was given.
void emit(const RunConfig& config, const std::string& body, json metadata) {
    metadata["generated_at"] = iso_now();
    if (config.output.empty()) {
        std::cout << body;
        std::cerr << metadata.dump() << '\n';
        return;
    }
    io::write_file_atomic(config.output, body);
    io::write_file_atomic(config.output + ".meta.json", metadata.dump(2) + "\n");
}

json base_metadata(const char* command, const RunConfig& config) {
    json meta;
    meta["command"] = command;
    meta["input"] = config.input;
    meta["output"] = config.output;
    meta["format"] = config.format;
    return meta;
}

/// Dense target index. The per-command default is one past the last
/// observed week for recommendations and the last observed week for
/// backtests, which must score realized sales.
std::int64_t resolve_target(const io::SalesTable& table, const std::string& label,
                            bool one_past_end) {
    if (table.week_labels.empty()) throw DataError("input has no sales records");
    const auto last = static_cast<std::int64_t>(table.week_labels.size()) - 1;
    if (label.empty()) return one_past_end ? last + 1 : last;
    const auto idx = table.week_index(label);
    if (!idx) {
        throw DataError("target week '" + label + "' is not in the input; observed weeks run " +
                        table.week_labels.front() + " .. " + table.week_labels.back());
    }
    return *idx;
}

struct PairKey {
    std::string cluster_id;
    std::string sku_id;

    bool operator<(const PairKey& other) const {
        if (cluster_id != other.cluster_id) {
            return io::natural_less(cluster_id, other.cluster_id);
        }
        return io::natural_less(sku_id, other.sku_id);
    }
};

/// Zero-filled windows for each pair with at least one positive-unit record
/// inside [target - window_weeks, target). Pairs seen only at zero in the
/// window are counted in *skipped, matching the backtest inclusion rule.
std::vector<demand::SalesWindow> build_windows(const std::vector<io::SalesRecord>& records,
                                               std::int64_t target, int window_weeks,
                                               std::int64_t* skipped) {
    struct PairData {
        std::vector<std::int64_t> window;
        bool any_positive = false;
    };
    const std::int64_t lo = target - window_weeks;
    std::map<PairKey, PairData> pairs;
    for (const auto& rec : records) {
        if (rec.week < lo || rec.week >= target) continue;
        auto [it, inserted] = pairs.try_emplace(PairKey{rec.cluster_id, rec.sku_id});
        if (inserted) it->second.window.assign(static_cast<std::size_t>(window_weeks), 0);
        it->second.window[static_cast<std::size_t>(rec.week - lo)] = rec.units;
        if (rec.units > 0) it->second.any_positive = true;
    }

    std::vector<demand::SalesWindow> windows;
    *skipped = 0;
    for (auto& [key, data] : pairs) {
        if (!data.any_positive) {
            ++*skipped;
            continue;
        }
        demand::SalesWindow window;
        window.cluster_id = key.cluster_id;
        window.sku_id = key.sku_id;
        window.weekly_sales = std::move(data.window);
        window.target_week = target;
        windows.push_back(std::move(window));
    }
    return windows;
}

}  // namespace

int cmd_recommend(const RunConfig& config) {
    alloc::validate_r(config.r);
    if (config.window_weeks < 1) throw ConfigError("--window-weeks must be at least 1");
    const Format format = parse_format(config.format);
    const auto table = load_input(config);
    const auto target = resolve_target(table, config.target_week, /*one_past_end=*/true);
    if (target < config.window_weeks) {
        throw DataError("insufficient history: target week index " + std::to_string(target) +
                        " needs " + std::to_string(config.window_weeks) +
                        " preceding weeks but the input starts at index 0");
    }

    std::int64_t skipped = 0;
    const auto windows = build_windows(table.records, target, config.window_weeks, &skipped);
    const auto batch = alloc::allocate(windows, config.r);
    for (const auto& failure : batch.failures) {
        std::cerr << failure.cluster_id << '/' << failure.sku_id << ": " << failure.message
                  << '\n';
    }

    std::string body;
    switch (format) {
        case Format::kCsv: body = io::render_recommendations_csv(batch.decisions); break;
        case Format::kMarkdown:
            body = io::render_recommendations_markdown(batch.decisions);
            break;
        case Format::kJsonLines: body = io::render_recommendations_jsonl(batch.decisions); break;
    }

    std::int64_t ineligible = 0;
    for (const auto& decision : batch.decisions) {
        if (!decision.eligible) ++ineligible;
    }

    json meta = base_metadata("recommend", config);
    meta["r"] = config.r;
    meta["window_weeks"] = config.window_weeks;
    meta["target_week_index"] = target;
    meta["target_week_label"] = target < static_cast<std::int64_t>(table.week_labels.size())
                                    ? json(table.week_labels[static_cast<std::size_t>(target)])
                                    : json(nullptr);
    meta["week_labels"] = table.week_labels;
    meta["pairs_modeled"] = static_cast<std::int64_t>(batch.decisions.size());
    meta["pairs_skipped"] = skipped;
    meta["fit_failures"] = static_cast<std::int64_t>(batch.failures.size());
    meta["ineligible"] = ineligible;
    emit(config, body, std::move(meta));
    return 0;
}

int cmd_backtest(const RunConfig& config) {
    const Format format = parse_format(config.format);
    const auto policies = parse_policies(config.policy);
    const auto table = load_input(config);

    backtest::BacktestConfig bt;
    bt.window_weeks = config.window_weeks;
    if (!config.r_values.empty()) bt.r_values = config.r_values;
    bt.target_week = resolve_target(table, config.target_week, /*one_past_end=*/false);
    bt.seed = config.seed;

    json meta = base_metadata("backtest", config);
    meta["window_weeks"] = bt.window_weeks;
    meta["target_week_index"] = bt.target_week;
    meta["target_week_label"] = table.week_labels[static_cast<std::size_t>(bt.target_week)];
    meta["r_values"] = bt.r_values;
    meta["week_labels"] = table.week_labels;

    std::string body;
    if (policies.size() == 1) {
        bt.policy = policies.front();
        const auto result = backtest::run_backtest(table.records, bt);
        switch (format) {
            case Format::kCsv: body = report::render_backtest_csv(result); break;
            case Format::kMarkdown: body = report::render_backtest_markdown(result); break;
            case Format::kJsonLines: body = report::render_backtest_jsonl(result); break;
        }
        meta["policy"] = backtest::to_string(bt.policy);
        meta["pairs_modeled"] = result.pairs_modeled;
        meta["pairs_skipped"] = result.pairs_skipped;
    } else {
        const auto comparison = backtest::run_policy_comparison(table.records, bt, policies);
        switch (format) {
            case Format::kCsv: body = report::render_comparison_csv(comparison); break;
            case Format::kMarkdown: body = report::render_comparison_markdown(comparison); break;
            case Format::kJsonLines: body = report::render_comparison_jsonl(comparison); break;
        }
        json names = json::array();
        for (auto policy : policies) names.push_back(backtest::to_string(policy));
        meta["policies"] = std::move(names);
        meta["pairs_modeled"] = comparison.per_policy.front().pairs_modeled;
        meta["pairs_skipped"] = comparison.per_policy.front().pairs_skipped;
    }
    emit(config, body, std::move(meta));
    return 0;
}

int cmd_synth(const RunConfig& config) {
    if (config.clusters < 1) throw ConfigError("--clusters must be at least 1");
    if (config.skus_per_cluster < 1) throw ConfigError("--skus must be at least 1");
    if (config.weeks < 1) throw ConfigError("--weeks must be at least 1");

    backtest::SyntheticWorld world;
    world.clusters = config.clusters;
    world.skus_per_cluster = config.skus_per_cluster;
    world.weeks = config.weeks;
    world.seed = config.seed;

    io::SalesTable table;
    table.records = backtest::generate_world(world);
    table.week_labels = backtest::world_week_labels(config.weeks);

    json meta = base_metadata("synth", config);
    meta["clusters"] = config.clusters;
    meta["skus_per_cluster"] = config.skus_per_cluster;
    meta["weeks"] = config.weeks;
    meta["seed"] = config.seed;
    meta["rng"] = backtest::rng_identity();
    meta["records"] = static_cast<std::int64_t>(table.records.size());
    emit(config, io::render_sales_csv(table), std::move(meta));
    return 0;
}

int cmd_validate(const RunConfig& config) {
    const auto table = load_input(config);
    std::set<std::string> clusters;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& rec : table.records) {
        clusters.insert(rec.cluster_id);
        pairs.insert({rec.cluster_id, rec.sku_id});
    }
    std::cout << "ok: " << table.records.size() << " records, " << clusters.size()
              << " clusters, " << pairs.size() << " (cluster, sku) pairs, "
              << table.week_labels.size() << " weeks";
    if (!table.week_labels.empty()) {
        std::cout << " (" << table.week_labels.front() << " .. " << table.week_labels.back()
                  << ")";
    }
    std::cout << '\n';
    return 0;
}

int run_guarded(int (*command)(const RunConfig&), const RunConfig& config) {
    try {
        return command(config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace skualloc::cli
