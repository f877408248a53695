#include <CLI11.hpp>

#include "skualloc/cli.hpp"

namespace {

using skualloc::cli::RunConfig;

void add_io_options(CLI::App* cmd, RunConfig& config, bool with_input) {
    if (with_input) {
        cmd->add_option("--input", config.input, "sales CSV path")
            ->envname("SKUALLOC_INPUT");
    }
    cmd->add_option("--output", config.output, "output path (stdout when omitted)")
        ->envname("SKUALLOC_OUTPUT");
    cmd->add_option("--format", config.format, "csv, markdown, or json-lines")
        ->envname("SKUALLOC_FORMAT");
}

void add_window_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--window-weeks", config.window_weeks, "estimation window length")
        ->envname("SKUALLOC_WINDOW_WEEKS");
    cmd->add_option("--target-week", config.target_week, "target week label from the input")
        ->envname("SKUALLOC_TARGET_WEEK");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SKU demand modeling, critical-fractile stock allocation, and backtesting"};
    app.require_subcommand(1);

    RunConfig config;

    auto* recommend =
        app.add_subcommand("recommend", "allocate quantities for the week after the data ends");
    add_io_options(recommend, config, /*with_input=*/true);
    add_window_options(recommend, config);
    recommend->add_option("--r", config.r, "fulfilment/utilization trade-off weight")
        ->envname("SKUALLOC_R");

    auto* backtest =
        app.add_subcommand("backtest", "score allocations against a realized week");
    add_io_options(backtest, config, /*with_input=*/true);
    add_window_options(backtest, config);
    backtest->add_option("--r-values", config.r_values, "r sweep values")
        ->delimiter(',')
        ->envname("SKUALLOC_R_VALUES");
    backtest
        ->add_option("--policy", config.policy,
                     "newsboy, naive_last_week, or window_mean; comma-separate to compare")
        ->envname("SKUALLOC_POLICY");
    backtest->add_option("--seed", config.seed, "seed echoed into run metadata")
        ->envname("SKUALLOC_SEED");

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic sales CSV");
    add_io_options(synth, config, /*with_input=*/false);
    synth->add_option("--clusters", config.clusters, "cluster count")
        ->envname("SKUALLOC_CLUSTERS");
    synth->add_option("--skus", config.skus_per_cluster, "SKUs per cluster")
        ->envname("SKUALLOC_SKUS");
    synth->add_option("--weeks", config.weeks, "weeks of history")
        ->envname("SKUALLOC_WEEKS");
    synth->add_option("--seed", config.seed, "world seed")->envname("SKUALLOC_SEED");

    auto* validate = app.add_subcommand("validate", "parse and check a sales CSV");
    validate->add_option("--input", config.input, "sales CSV path")->envname("SKUALLOC_INPUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    using skualloc::cli::run_guarded;
    if (recommend->parsed()) return run_guarded(skualloc::cli::cmd_recommend, config);
    if (backtest->parsed()) return run_guarded(skualloc::cli::cmd_backtest, config);
    if (synth->parsed()) return run_guarded(skualloc::cli::cmd_synth, config);
    if (validate->parsed()) return run_guarded(skualloc::cli::cmd_validate, config);
    return 2;
}
