#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace skualloc::cli {

/// Options shared by all subcommands. String fields left empty mean "use
/// the per-command default"; they are validated inside each command so the
/// commands stay testable without an argv parser in front.
struct RunConfig {
    std::string input;
    std::string output;  ///< empty: body to stdout, metadata to stderr
    double r = 0.1;
    std::vector<double> r_values;  ///< empty: the default backtest sweep
    int window_weeks = 9;
    std::string target_week;  ///< week label; empty: per-command default
    std::string policy = "newsboy";  ///< comma-separated list for backtest
    std::uint64_t seed = 0;
    std::string format = "csv";  ///< csv | markdown | json-lines

    // synth world shape
    int clusters = 12;
    int skus_per_cluster = 200;
    int weeks = 12;
};

/// Fit each (cluster, SKU) window preceding the target week and write one
/// recommendation row per modeled pair.
int cmd_recommend(const RunConfig& config);

/// Roll the window up to the target week, allocate, score the realized
/// week, and write the per-cluster FI/UI grid (one grid per policy when
/// several are requested).
int cmd_backtest(const RunConfig& config);

/// Write a seeded synthetic sales CSV (always CSV regardless of format).
int cmd_synth(const RunConfig& config);

/// Parse and validate the input, print a summary, change nothing.
int cmd_validate(const RunConfig& config);

/// Run a command and map exceptions onto exit codes: ConfigError 2,
/// DataError 3, NumericError 4, anything else 1. Diagnostics go to stderr.
int run_guarded(int (*command)(const RunConfig&), const RunConfig& config);

}  // namespace skualloc::cli
