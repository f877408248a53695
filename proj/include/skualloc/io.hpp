#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skualloc/allocator.hpp"

namespace skualloc::io {

/// One (cluster, SKU, week) sales observation. week is a dense index into
/// the owning table's week_labels.
struct SalesRecord {
    std::string cluster_id;
    std::string sku_id;
    std::int64_t week = 0;
    std::int64_t units = 0;

    bool operator==(const SalesRecord&) const = default;
};

/// Loaded sales with the original week labels. Labels are either all ISO
/// weeks (YYYY-Www) or all non-negative integers; they are sorted and
/// mapped onto indices 0..n-1.
struct SalesTable {
    std::vector<SalesRecord> records;
    std::vector<std::string> week_labels;

    std::optional<std::int64_t> week_index(const std::string& label) const;

    bool operator==(const SalesTable&) const = default;
};

/// Parse and validate a sales CSV (header cluster_id,sku_id,week,units).
/// Errors carry line numbers; duplicate keys name both offending lines.
SalesTable load_sales(const std::filesystem::path& path);

std::string render_sales_csv(const SalesTable& table);

/// Write via a temp file and atomic rename; no partial output on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Recommendation reports. CSV and json-lines are lossless; markdown is for
// human eyes only.
std::string render_recommendations_csv(const std::vector<alloc::AllocationDecision>& decisions);
std::string render_recommendations_jsonl(const std::vector<alloc::AllocationDecision>& decisions);
std::string render_recommendations_markdown(
    const std::vector<alloc::AllocationDecision>& decisions);
std::vector<alloc::AllocationDecision> parse_recommendations_csv(const std::string& text);
std::vector<alloc::AllocationDecision> parse_recommendations_jsonl(const std::string& text);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Identifier grammar for cluster and SKU tokens: [A-Za-z0-9_-]+.
bool valid_token(const std::string& token);

/// Order strings with embedded numbers numerically (FDC_2 before FDC_10).
bool natural_less(const std::string& lhs, const std::string& rhs);

}  // namespace skualloc::io
