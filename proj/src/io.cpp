#include "skualloc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "skualloc/errors.hpp"

namespace skualloc::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool all_digits(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_iso_week(const std::string& s) {
    // YYYY-Www with zero-padded week 01..53.
    if (s.size() != 8 || s[4] != '-' || s[5] != 'W') return false;
    for (int i : {0, 1, 2, 3, 6, 7}) {
        if (!std::isdigit(static_cast<unsigned char>(s[static_cast<std::size_t>(i)]))) {
            return false;
        }
    }
    const int week = (s[6] - '0') * 10 + (s[7] - '0');
    return week >= 1 && week <= 53;
}

std::int64_t parse_int64(const std::string& s, const std::string& what, std::size_t line_no) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        std::ostringstream msg;
        msg << "line " << line_no << ": " << what << " '" << s << "' is not an integer";
        throw DataError(msg.str());
    }
    return value;
}

double parse_finite_double(const std::string& s, const std::string& what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError(what + " '" + s + "' is not a number");
    }
    return value;
}

constexpr const char* kSalesHeader = "cluster_id,sku_id,week,units";
constexpr const char* kRecommendHeader =
    "cluster_id,sku_id,q_star,eligible,lambda_hat,s,fractile,r";

}  // namespace

bool valid_token(const std::string& token) {
    if (token.empty()) return false;
    return std::all_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

bool natural_less(const std::string& lhs, const std::string& rhs) {
    std::size_t i = 0, j = 0;
    while (i < lhs.size() && j < rhs.size()) {
        const bool ld = std::isdigit(static_cast<unsigned char>(lhs[i])) != 0;
        const bool rd = std::isdigit(static_cast<unsigned char>(rhs[j])) != 0;
        if (ld && rd) {
            std::size_t ie = i, je = j;
            while (ie < lhs.size() && std::isdigit(static_cast<unsigned char>(lhs[ie]))) ++ie;
            while (je < rhs.size() && std::isdigit(static_cast<unsigned char>(rhs[je]))) ++je;
            const std::string ln = lhs.substr(i, ie - i);
            const std::string rn = rhs.substr(j, je - j);
            // Compare digit runs by value: longer (trimmed) run is larger.
            const std::string lt = ln.substr(std::min(ln.find_first_not_of('0'), ln.size()));
            const std::string rt = rn.substr(std::min(rn.find_first_not_of('0'), rn.size()));
            if (lt.size() != rt.size()) return lt.size() < rt.size();
            if (lt != rt) return lt < rt;
            i = ie;
            j = je;
        } else {
            if (lhs[i] != rhs[j]) return lhs[i] < rhs[j];
            ++i;
            ++j;
        }
    }
    if (i == lhs.size() && j == rhs.size()) return lhs < rhs;  // tie-break on raw form
    return i == lhs.size();                                    // shorter prefix orders first
}

std::optional<std::int64_t> SalesTable::week_index(const std::string& label) const {
    for (std::size_t i = 0; i < week_labels.size(); ++i) {
        if (week_labels[i] == label) return static_cast<std::int64_t>(i);
    }
    // Integer labels are stored canonically; retry with the canonical form.
    if (all_digits(label)) {
        const std::string canonical = std::to_string(parse_int64(label, "week", 0));
        if (canonical != label) return week_index(canonical);
    }
    return std::nullopt;
}

SalesTable load_sales(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sales file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("sales file '" + path.string() + "' is empty (missing header)");
    }
    if (strip_cr(line) != kSalesHeader) {
        throw DataError("line 1: unknown header '" + strip_cr(line) + "', expected '" +
                        kSalesHeader + "'");
    }

    struct RawRow {
        std::string cluster_id, sku_id, week_label;
        std::int64_t units;
        std::size_t line_no;
    };
    std::vector<RawRow> rows;
    // key: cluster|sku|canonical week -> line it first appeared on
    std::map<std::string, std::size_t> seen;
    enum class WeekKind { kUnknown, kInteger, kIso } kind = WeekKind::kUnknown;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 4 fields (cluster_id,sku_id,week,units), got "
                << fields.size();
            throw DataError(msg.str());
        }
        for (std::size_t col = 0; col < 2; ++col) {
            if (!valid_token(fields[col])) {
                std::ostringstream msg;
                msg << "line " << line_no << ", column " << col + 1 << ": token '" << fields[col]
                    << "' must match [A-Za-z0-9_-]+";
                throw DataError(msg.str());
            }
        }

        std::string week_label = fields[2];
        WeekKind row_kind;
        if (all_digits(week_label)) {
            row_kind = WeekKind::kInteger;
            week_label = std::to_string(parse_int64(week_label, "week", line_no));
        } else if (is_iso_week(week_label)) {
            row_kind = WeekKind::kIso;
        } else {
            std::ostringstream msg;
            msg << "line " << line_no << ", column 3: week '" << week_label
                << "' is neither an ISO week (YYYY-Www) nor a non-negative integer";
            throw DataError(msg.str());
        }
        if (kind == WeekKind::kUnknown) {
            kind = row_kind;
        } else if (kind != row_kind) {
            std::ostringstream msg;
            msg << "line " << line_no << ": week '" << week_label
                << "' mixes integer and ISO week labels within one file";
            throw DataError(msg.str());
        }

        const std::int64_t units = parse_int64(fields[3], "units", line_no);
        if (units < 0) {
            std::ostringstream msg;
            msg << "line " << line_no << ", column 4: units must be non-negative, got " << units;
            throw DataError(msg.str());
        }

        const std::string key = fields[0] + "|" + fields[1] + "|" + week_label;
        const auto [it, inserted] = seen.emplace(key, line_no);
        if (!inserted) {
            std::ostringstream msg;
            msg << "duplicate key (" << fields[0] << ", " << fields[1] << ", " << week_label
                << ") on lines " << it->second << " and " << line_no;
            throw DataError(msg.str());
        }
        rows.push_back({fields[0], fields[1], week_label, units, line_no});
    }

    // Dense week index: sorted unique labels -> 0..n-1.
    std::vector<std::string> labels;
    labels.reserve(rows.size());
    for (const auto& row : rows) labels.push_back(row.week_label);
    std::sort(labels.begin(), labels.end(), [&](const std::string& a, const std::string& b) {
        if (kind == WeekKind::kInteger) return std::stoll(a) < std::stoll(b);
        return a < b;  // ISO labels are zero-padded; lexicographic is chronological
    });
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    std::map<std::string, std::int64_t> index_of;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        index_of[labels[i]] = static_cast<std::int64_t>(i);
    }

    SalesTable table;
    table.week_labels = std::move(labels);
    table.records.reserve(rows.size());
    for (const auto& row : rows) {
        table.records.push_back(
            {row.cluster_id, row.sku_id, index_of.at(row.week_label), row.units});
    }
    return table;
}

std::string render_sales_csv(const SalesTable& table) {
    std::string out = kSalesHeader;
    out.push_back('\n');
    for (const auto& record : table.records) {
        out += record.cluster_id;
        out.push_back(',');
        out += record.sku_id;
        out.push_back(',');
        out += table.week_labels.at(static_cast<std::size_t>(record.week));
        out.push_back(',');
        out += std::to_string(record.units);
        out.push_back('\n');
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto parent = path.parent_path().empty() ? "." : path.parent_path();
    const auto tmp = parent / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw DataError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw DataError("cannot rename temp file onto '" + path.string() + "'");
    }
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string render_recommendations_csv(const std::vector<alloc::AllocationDecision>& decisions) {
    std::string out = kRecommendHeader;
    out.push_back('\n');
    for (const auto& d : decisions) {
        out += d.cluster_id;
        out.push_back(',');
        out += d.sku_id;
        out.push_back(',');
        out += std::to_string(d.q_star);
        out.push_back(',');
        out += d.eligible ? "true" : "false";
        out.push_back(',');
        out += format_double(d.lambda_hat);
        out.push_back(',');
        out += std::to_string(d.s);
        out.push_back(',');
        if (d.fractile) out += format_double(*d.fractile);
        out.push_back(',');
        out += format_double(d.r);
        out.push_back('\n');
    }
    return out;
}

std::string render_recommendations_jsonl(const std::vector<alloc::AllocationDecision>& decisions) {
    std::string out;
    for (const auto& d : decisions) {
        json row;
        row["cluster_id"] = d.cluster_id;
        row["sku_id"] = d.sku_id;
        row["q_star"] = d.q_star;
        row["eligible"] = d.eligible;
        row["lambda_hat"] = d.lambda_hat;
        row["s"] = d.s;
        row["fractile"] = d.fractile ? json(*d.fractile) : json(nullptr);
        row["r"] = d.r;
        out += row.dump();
        out.push_back('\n');
    }
    return out;
}

std::string render_recommendations_markdown(
    const std::vector<alloc::AllocationDecision>& decisions) {
    std::string out = "| Cluster | SKU | q* | Eligible | lambda_hat | s | Fractile |\n";
    out += "|---|---|---:|---|---:|---:|---:|\n";
    char buf[64];
    for (const auto& d : decisions) {
        out += "| " + d.cluster_id + " | " + d.sku_id + " | " + std::to_string(d.q_star) +
               " | " + (d.eligible ? "yes" : "no") + " | ";
        std::snprintf(buf, sizeof(buf), "%.3f", d.lambda_hat);
        out += buf;
        out += " | " + std::to_string(d.s) + " | ";
        if (d.fractile) {
            std::snprintf(buf, sizeof(buf), "%.4f", *d.fractile);
            out += buf;
        }
        out += " |\n";
    }
    return out;
}

std::vector<alloc::AllocationDecision> parse_recommendations_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kRecommendHeader) {
        throw DataError("recommendations csv: unknown header");
    }
    std::vector<alloc::AllocationDecision> decisions;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 8) {
            std::ostringstream msg;
            msg << "recommendations csv line " << line_no << ": expected 8 fields, got "
                << fields.size();
            throw DataError(msg.str());
        }
        alloc::AllocationDecision d;
        d.cluster_id = fields[0];
        d.sku_id = fields[1];
        d.q_star = parse_int64(fields[2], "q_star", line_no);
        if (fields[3] != "true" && fields[3] != "false") {
            throw DataError("recommendations csv: bad eligible flag '" + fields[3] + "'");
        }
        d.eligible = fields[3] == "true";
        d.lambda_hat = parse_finite_double(fields[4], "lambda_hat");
        d.s = parse_int64(fields[5], "s", line_no);
        if (!fields[6].empty()) d.fractile = parse_finite_double(fields[6], "fractile");
        d.r = parse_finite_double(fields[7], "r");
        decisions.push_back(std::move(d));
    }
    return decisions;
}

std::vector<alloc::AllocationDecision> parse_recommendations_jsonl(const std::string& text) {
    std::vector<alloc::AllocationDecision> decisions;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(std::string("recommendations jsonl: ") + e.what());
        }
        alloc::AllocationDecision d;
        d.cluster_id = row.at("cluster_id").get<std::string>();
        d.sku_id = row.at("sku_id").get<std::string>();
        d.q_star = row.at("q_star").get<std::int64_t>();
        d.eligible = row.at("eligible").get<bool>();
        d.lambda_hat = row.at("lambda_hat").get<double>();
        d.s = row.at("s").get<std::int64_t>();
        if (!row.at("fractile").is_null()) d.fractile = row.at("fractile").get<double>();
        d.r = row.at("r").get<double>();
        decisions.push_back(std::move(d));
    }
    return decisions;
}

}  // namespace skualloc::io
