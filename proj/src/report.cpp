#include "skualloc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "skualloc/errors.hpp"
#include "skualloc/io.hpp"

namespace skualloc::report {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == sep) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

double parse_double(const std::string& s, const std::string& what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("report: " + what + " '" + s + "' is not a number");
    }
    return value;
}

std::string optional_field(const std::optional<double>& value) {
    return value ? io::format_double(*value) : std::string{};
}

std::optional<double> parse_optional_field(const std::string& field, const std::string& what) {
    if (field.empty()) return std::nullopt;
    return parse_double(field, what);
}

std::string fi_percent(const std::optional<double>& fi) {
    if (!fi) return {};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f%%", *fi * 100.0);
    return buf;
}

std::string ui_fixed(const std::optional<double>& ui) {
    if (!ui) return {};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *ui);
    return buf;
}

json cell_to_json(const std::string& cluster_id, double r,
                  const metrics::ClusterMetrics& m, std::int64_t ineligible) {
    json cell;
    cell["type"] = "cell";
    cell["cluster_id"] = cluster_id;
    cell["r"] = r;
    cell["fi"] = m.fi ? json(*m.fi) : json(nullptr);
    cell["ui"] = m.ui ? json(*m.ui) : json(nullptr);
    cell["delivered_total"] = m.delivered_total;
    cell["ordered_total"] = m.ordered_total;
    cell["predicted_total"] = m.predicted_total;
    cell["prev_sold_total"] = m.prev_sold_total;
    cell["ineligible_skus"] = ineligible;
    return cell;
}

json config_to_json(const backtest::BacktestResult& result) {
    json line;
    line["type"] = "config";
    line["policy"] = backtest::to_string(result.config.policy);
    line["window_weeks"] = result.config.window_weeks;
    line["target_week"] = result.config.target_week;
    line["r_values"] = result.config.r_values;
    line["seed"] = result.config.seed;
    line["pairs_modeled"] = result.pairs_modeled;
    line["pairs_skipped"] = result.pairs_skipped;
    return line;
}

void config_from_json(const json& line, backtest::BacktestResult& result) {
    result.config.policy = backtest::policy_from_string(line.at("policy").get<std::string>());
    result.config.window_weeks = line.at("window_weeks").get<int>();
    result.config.target_week = line.at("target_week").get<std::int64_t>();
    result.config.r_values = line.at("r_values").get<std::vector<double>>();
    result.config.seed = line.at("seed").get<std::uint64_t>();
    result.pairs_modeled = line.at("pairs_modeled").get<std::int64_t>();
    result.pairs_skipped = line.at("pairs_skipped").get<std::int64_t>();
}

void cell_from_json(const json& cell, backtest::BacktestResult& result) {
    const auto cluster_id = cell.at("cluster_id").get<std::string>();
    if (result.rows.empty() || result.rows.back().cluster_id != cluster_id) {
        backtest::ClusterRow row;
        row.cluster_id = cluster_id;
        result.rows.push_back(std::move(row));
    }
    auto& row = result.rows.back();
    metrics::ClusterMetrics m;
    m.cluster_id = cluster_id;
    if (!cell.at("fi").is_null()) m.fi = cell.at("fi").get<double>();
    if (!cell.at("ui").is_null()) m.ui = cell.at("ui").get<double>();
    m.delivered_total = cell.at("delivered_total").get<std::int64_t>();
    m.ordered_total = cell.at("ordered_total").get<std::int64_t>();
    m.predicted_total = cell.at("predicted_total").get<std::int64_t>();
    m.prev_sold_total = cell.at("prev_sold_total").get<std::int64_t>();
    row.per_r.push_back(std::move(m));
    row.ineligible_per_r.push_back(cell.at("ineligible_skus").get<std::int64_t>());
}

}  // namespace

BacktestGrid grid_from_result(const backtest::BacktestResult& result) {
    BacktestGrid grid;
    grid.r_values = result.config.r_values;
    for (const auto& row : result.rows) {
        GridRow out;
        out.cluster_id = row.cluster_id;
        for (const auto& m : row.per_r) {
            out.fi.push_back(m.fi);
            out.ui.push_back(m.ui);
        }
        grid.rows.push_back(std::move(out));
    }
    return grid;
}

ComparisonGrid grid_from_comparison(const backtest::PolicyComparison& comparison) {
    ComparisonGrid grid;
    for (auto policy : comparison.policies) grid.policies.push_back(backtest::to_string(policy));
    if (!comparison.per_policy.empty()) {
        grid.r_values = comparison.per_policy.front().config.r_values;
        for (const auto& row : comparison.per_policy.front().rows) {
            GridRow out;
            out.cluster_id = row.cluster_id;
            grid.rows.push_back(std::move(out));
        }
    }
    for (std::size_t p = 0; p < comparison.per_policy.size(); ++p) {
        const auto& result = comparison.per_policy[p];
        if (result.rows.size() != grid.rows.size()) {
            throw DataError("comparison results are not aligned across policies");
        }
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            if (result.rows[i].cluster_id != grid.rows[i].cluster_id) {
                throw DataError("comparison results are not aligned across policies");
            }
            for (const auto& m : result.rows[i].per_r) {
                grid.rows[i].fi.push_back(m.fi);
                grid.rows[i].ui.push_back(m.ui);
            }
        }
    }
    return grid;
}

std::string render_backtest_csv(const backtest::BacktestResult& result) {
    std::string out = "cluster_id";
    for (double r : result.config.r_values) {
        const std::string tag = io::format_double(r);
        out += ",fi_r" + tag + ",ui_r" + tag;
    }
    out.push_back('\n');
    const auto grid = grid_from_result(result);
    for (const auto& row : grid.rows) {
        out += row.cluster_id;
        for (std::size_t i = 0; i < grid.r_values.size(); ++i) {
            out.push_back(',');
            out += optional_field(row.fi[i]);
            out.push_back(',');
            out += optional_field(row.ui[i]);
        }
        out.push_back('\n');
    }
    return out;
}

BacktestGrid parse_backtest_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("backtest csv: empty input");
    const auto header = split(line, ',');
    if (header.empty() || header[0] != "cluster_id" || header.size() % 2 == 0) {
        throw DataError("backtest csv: unknown header");
    }

    BacktestGrid grid;
    for (std::size_t i = 1; i < header.size(); i += 2) {
        const auto& fi_col = header[i];
        const auto& ui_col = header[i + 1];
        if (fi_col.rfind("fi_r", 0) != 0 || ui_col.rfind("ui_r", 0) != 0) {
            throw DataError("backtest csv: unexpected column pair '" + fi_col + "', '" +
                            ui_col + "'");
        }
        const double r = parse_double(fi_col.substr(4), "r");
        if (parse_double(ui_col.substr(4), "r") != r) {
            throw DataError("backtest csv: fi/ui column r mismatch");
        }
        grid.r_values.push_back(r);
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw DataError("backtest csv: row width does not match header");
        }
        GridRow row;
        row.cluster_id = fields[0];
        for (std::size_t i = 1; i < fields.size(); i += 2) {
            row.fi.push_back(parse_optional_field(fields[i], "fi"));
            row.ui.push_back(parse_optional_field(fields[i + 1], "ui"));
        }
        grid.rows.push_back(std::move(row));
    }
    return grid;
}

std::string render_backtest_jsonl(const backtest::BacktestResult& result) {
    std::string out = config_to_json(result).dump();
    out.push_back('\n');
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < result.config.r_values.size(); ++i) {
            out += cell_to_json(row.cluster_id, result.config.r_values[i], row.per_r[i],
                                row.ineligible_per_r[i])
                       .dump();
            out.push_back('\n');
        }
    }
    return out;
}

backtest::BacktestResult parse_backtest_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    backtest::BacktestResult result;
    bool have_config = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(std::string("backtest jsonl: ") + e.what());
        }
        const auto type = row.at("type").get<std::string>();
        if (type == "config") {
            config_from_json(row, result);
            have_config = true;
        } else if (type == "cell") {
            if (!have_config) throw DataError("backtest jsonl: cell before config line");
            cell_from_json(row, result);
        } else {
            throw DataError("backtest jsonl: unknown line type '" + type + "'");
        }
    }
    if (!have_config) throw DataError("backtest jsonl: missing config line");
    return result;
}

std::string render_backtest_markdown(const backtest::BacktestResult& result) {
    std::string out = "| Region |";
    std::string rule = "|---|";
    for (double r : result.config.r_values) {
        const std::string tag = io::format_double(r);
        out += " FI (r=" + tag + ") | UI (r=" + tag + ") |";
        rule += "---:|---:|";
    }
    out.push_back('\n');
    out += rule;
    out.push_back('\n');
    for (const auto& row : result.rows) {
        out += "| " + row.cluster_id + " |";
        for (const auto& m : row.per_r) {
            out += " " + fi_percent(m.fi) + " | " + ui_fixed(m.ui) + " |";
        }
        out.push_back('\n');
    }
    return out;
}

std::string render_comparison_csv(const backtest::PolicyComparison& comparison) {
    const auto grid = grid_from_comparison(comparison);
    std::string out = "cluster_id";
    for (const auto& policy : grid.policies) {
        for (double r : grid.r_values) {
            const std::string tag = io::format_double(r);
            out += ",fi_" + policy + "_r" + tag + ",ui_" + policy + "_r" + tag;
        }
    }
    out.push_back('\n');
    for (const auto& row : grid.rows) {
        out += row.cluster_id;
        for (std::size_t i = 0; i < row.fi.size(); ++i) {
            out.push_back(',');
            out += optional_field(row.fi[i]);
            out.push_back(',');
            out += optional_field(row.ui[i]);
        }
        out.push_back('\n');
    }
    return out;
}

ComparisonGrid parse_comparison_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("comparison csv: empty input");
    const auto header = split(line, ',');
    if (header.empty() || header[0] != "cluster_id" || header.size() % 2 == 0) {
        throw DataError("comparison csv: unknown header");
    }

    ComparisonGrid grid;
    for (std::size_t i = 1; i < header.size(); i += 2) {
        const auto& fi_col = header[i];
        if (fi_col.rfind("fi_", 0) != 0) {
            throw DataError("comparison csv: unexpected column '" + fi_col + "'");
        }
        const auto r_pos = fi_col.rfind("_r");
        if (r_pos == std::string::npos || r_pos <= 3) {
            throw DataError("comparison csv: unexpected column '" + fi_col + "'");
        }
        const std::string policy = fi_col.substr(3, r_pos - 3);
        const double r = parse_double(fi_col.substr(r_pos + 2), "r");
        if (grid.policies.empty() || grid.policies.back() != policy) {
            grid.policies.push_back(policy);
        }
        if (grid.policies.size() == 1) grid.r_values.push_back(r);
    }

    const std::size_t pairs = grid.policies.size() * grid.r_values.size();
    if (header.size() != 1 + 2 * pairs) {
        throw DataError("comparison csv: header is not a policy x r grid");
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw DataError("comparison csv: row width does not match header");
        }
        GridRow row;
        row.cluster_id = fields[0];
        for (std::size_t i = 1; i < fields.size(); i += 2) {
            row.fi.push_back(parse_optional_field(fields[i], "fi"));
            row.ui.push_back(parse_optional_field(fields[i + 1], "ui"));
        }
        grid.rows.push_back(std::move(row));
    }
    return grid;
}

std::string render_comparison_jsonl(const backtest::PolicyComparison& comparison) {
    std::string out;
    for (const auto& result : comparison.per_policy) {
        json line = config_to_json(result);
        out += line.dump();
        out.push_back('\n');
        for (const auto& row : result.rows) {
            for (std::size_t i = 0; i < result.config.r_values.size(); ++i) {
                json cell = cell_to_json(row.cluster_id, result.config.r_values[i],
                                         row.per_r[i], row.ineligible_per_r[i]);
                cell["policy"] = backtest::to_string(result.config.policy);
                out += cell.dump();
                out.push_back('\n');
            }
        }
    }
    return out;
}

backtest::PolicyComparison parse_comparison_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    backtest::PolicyComparison comparison;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(std::string("comparison jsonl: ") + e.what());
        }
        const auto type = row.at("type").get<std::string>();
        if (type == "config") {
            backtest::BacktestResult result;
            config_from_json(row, result);
            comparison.policies.push_back(result.config.policy);
            comparison.per_policy.push_back(std::move(result));
        } else if (type == "cell") {
            if (comparison.per_policy.empty()) {
                throw DataError("comparison jsonl: cell before config line");
            }
            cell_from_json(row, comparison.per_policy.back());
        } else {
            throw DataError("comparison jsonl: unknown line type '" + type + "'");
        }
    }
    if (comparison.per_policy.empty()) throw DataError("comparison jsonl: missing config line");
    return comparison;
}

std::string render_comparison_markdown(const backtest::PolicyComparison& comparison) {
    const auto grid = grid_from_comparison(comparison);
    std::string out;
    for (std::size_t ri = 0; ri < grid.r_values.size(); ++ri) {
        if (ri > 0) out.push_back('\n');
        out += "**r = " + io::format_double(grid.r_values[ri]) + "**\n\n";
        out += "| Region |";
        std::string rule = "|---|";
        for (const auto& policy : grid.policies) {
            out += " FI (" + policy + ") | UI (" + policy + ") |";
            rule += "---:|---:|";
        }
        out.push_back('\n');
        out += rule;
        out.push_back('\n');
        for (const auto& row : grid.rows) {
            out += "| " + row.cluster_id + " |";
            for (std::size_t p = 0; p < grid.policies.size(); ++p) {
                const std::size_t idx = p * grid.r_values.size() + ri;
                out += " " + fi_percent(row.fi[idx]) + " | " + ui_fixed(row.ui[idx]) + " |";
            }
            out.push_back('\n');
        }
    }
    return out;
}

}  // namespace skualloc::report
