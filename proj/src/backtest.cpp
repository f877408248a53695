#include "skualloc/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "skualloc/allocator.hpp"
#include "skualloc/demand.hpp"
#include "skualloc/errors.hpp"

namespace skualloc::backtest {

namespace {

// Sampling is built on raw mt19937_64 output with fixed transforms so that
// worlds regenerate bit-identically on every platform; standard-library
// distributions are not portable across implementations.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : gen_(seed) {}

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform01();   // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    // Knuth product method, chunked so exp(-chunk) never underflows.
    std::int64_t poisson(double lambda) {
        std::int64_t count = 0;
        while (lambda > 0.0) {
            const double chunk = std::min(lambda, 256.0);
            const double limit = std::exp(-chunk);
            double product = 1.0;
            std::int64_t k = -1;
            do {
                ++k;
                product *= uniform01();
            } while (product > limit);
            count += k;
            lambda -= chunk;
        }
        return count;
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 gen_;
};

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

struct PairData {
    std::vector<std::int64_t> window;
    std::int64_t target_units = 0;
    bool any_positive_in_window = false;
};

void validate_config(const BacktestConfig& config) {
    if (config.window_weeks < 1) {
        throw ConfigError("window_weeks must be >= 1, got " +
                          std::to_string(config.window_weeks));
    }
    if (config.r_values.empty()) throw ConfigError("r_values must not be empty");
    for (double r : config.r_values) alloc::validate_r(r);
}

std::int64_t policy_allocation(Policy policy, const demand::PoissonDemandModel& model,
                               std::int64_t s, double r, bool& ineligible) {
    ineligible = false;
    switch (policy) {
        case Policy::kNewsboy: {
            alloc::AllocationParams params;
            params.r = r;
            params.s = s;
            const auto decision = alloc::solve_poisson_closed_form(model, params);
            ineligible = !decision.eligible;
            return decision.q_star;
        }
        case Policy::kNaiveLastWeek:
            return s;
        case Policy::kWindowMean:
            return std::llround(model.lambda_hat);
    }
    throw ConfigError("unknown policy");
}

}  // namespace

std::string to_string(Policy policy) {
    switch (policy) {
        case Policy::kNewsboy:
            return "newsboy";
        case Policy::kNaiveLastWeek:
            return "naive_last_week";
        case Policy::kWindowMean:
            return "window_mean";
    }
    return "unknown";
}

Policy policy_from_string(const std::string& name) {
    if (name == "newsboy") return Policy::kNewsboy;
    if (name == "naive_last_week") return Policy::kNaiveLastWeek;
    if (name == "window_mean") return Policy::kWindowMean;
    throw ConfigError("unknown policy '" + name +
                      "' (expected newsboy, naive_last_week, or window_mean)");
}

BacktestResult run_backtest(const std::vector<io::SalesRecord>& sales,
                            const BacktestConfig& config) {
    validate_config(config);
    if (sales.empty()) throw DataError("run_backtest: no sales records");

    std::int64_t min_week = sales.front().week;
    std::int64_t max_week = sales.front().week;
    for (const auto& record : sales) {
        min_week = std::min(min_week, record.week);
        max_week = std::max(max_week, record.week);
    }
    const std::int64_t window_start = config.target_week - config.window_weeks;
    if (window_start < min_week || config.target_week > max_week) {
        std::ostringstream msg;
        msg << "insufficient history for target week " << config.target_week << ": need the "
            << config.window_weeks << " weeks before it plus the target week itself within ["
            << min_week << ", " << max_week << "]; earliest usable target week is "
            << min_week + config.window_weeks << ", latest is " << max_week;
        throw DataError(msg.str());
    }

    std::map<PairKey, PairData> pairs;
    for (const auto& record : sales) {
        const bool in_window =
            record.week >= window_start && record.week < config.target_week;
        const bool is_target = record.week == config.target_week;
        if (!in_window && !is_target) continue;

        auto& data = pairs[PairKey{record.cluster_id, record.sku_id}];
        if (data.window.empty()) {
            data.window.assign(static_cast<std::size_t>(config.window_weeks), 0);
        }
        if (in_window) {
            data.window[static_cast<std::size_t>(record.week - window_start)] += record.units;
            if (record.units > 0) data.any_positive_in_window = true;
        } else {
            data.target_units += record.units;
        }
    }

    BacktestResult result;
    result.config = config;

    const std::size_t n_r = config.r_values.size();
    std::string current_cluster;
    std::vector<std::vector<metrics::WeekOutcome>> outcomes_per_r(n_r);
    std::vector<std::int64_t> ineligible_per_r(n_r, 0);

    auto flush_cluster = [&]() {
        if (current_cluster.empty()) return;
        ClusterRow row;
        row.cluster_id = current_cluster;
        for (std::size_t i = 0; i < n_r; ++i) {
            row.per_r.push_back(metrics::cluster_metrics(outcomes_per_r[i]));
            row.per_r.back().cluster_id = current_cluster;
            outcomes_per_r[i].clear();
        }
        row.ineligible_per_r = ineligible_per_r;
        std::fill(ineligible_per_r.begin(), ineligible_per_r.end(), 0);
        result.rows.push_back(std::move(row));
    };

    for (const auto& [key, data] : pairs) {
        if (!data.any_positive_in_window) {
            ++result.pairs_skipped;
            continue;
        }
        if (key.cluster_id != current_cluster) {
            flush_cluster();
            current_cluster = key.cluster_id;
        }
        ++result.pairs_modeled;

        demand::SalesWindow window;
        window.cluster_id = key.cluster_id;
        window.sku_id = key.sku_id;
        window.weekly_sales = data.window;
        window.target_week = config.target_week;
        const auto model = demand::fit_poisson_mle(window);
        const std::int64_t s = window.last_week_sales();

        for (std::size_t i = 0; i < n_r; ++i) {
            bool ineligible = false;
            const std::int64_t allocated =
                policy_allocation(config.policy, model, s, config.r_values[i], ineligible);
            if (ineligible) ++ineligible_per_r[i];
            metrics::WeekOutcome outcome;
            outcome.cluster_id = key.cluster_id;
            outcome.sku_id = key.sku_id;
            outcome.ordered_units = data.target_units;
            outcome.allocated_units = allocated;
            outcome.prev_week_sold_units = s;
            outcomes_per_r[i].push_back(std::move(outcome));
        }
    }
    flush_cluster();
    return result;
}

PolicyComparison run_policy_comparison(const std::vector<io::SalesRecord>& sales,
                                       const BacktestConfig& config,
                                       const std::vector<Policy>& policies) {
    if (policies.empty()) throw ConfigError("run_policy_comparison: no policies given");
    PolicyComparison comparison;
    comparison.policies = policies;
    for (Policy policy : policies) {
        BacktestConfig per_policy = config;
        per_policy.policy = policy;
        comparison.per_policy.push_back(run_backtest(sales, per_policy));
    }
    return comparison;
}

std::string rng_identity() {
    return "mt19937_64;u01=(x>>11)*2^-53;normal=box-muller;poisson=knuth-product(chunk<=256);"
           "lambda=clip-resample(exp(mu+sigma*normal))";
}

std::vector<io::SalesRecord> generate_world(const SyntheticWorld& world) {
    if (world.clusters < 0 || world.skus_per_cluster < 0 || world.weeks < 0) {
        throw ConfigError("generate_world: counts must be non-negative");
    }
    const auto& sampler = world.lambda_sampler;
    if (!(sampler.sigma > 0.0) || !(sampler.min_lambda > 0.0) ||
        !(sampler.max_lambda >= sampler.min_lambda)) {
        throw ConfigError("generate_world: invalid lambda sampler");
    }

    PortableRng rng(world.seed);
    std::vector<io::SalesRecord> records;
    records.reserve(static_cast<std::size_t>(world.clusters) *
                    static_cast<std::size_t>(world.skus_per_cluster) *
                    static_cast<std::size_t>(world.weeks));

    for (int c = 1; c <= world.clusters; ++c) {
        const std::string cluster_id = "FDC_" + std::to_string(c);
        for (int k = 1; k <= world.skus_per_cluster; ++k) {
            const std::string sku_id = "SKU_" + std::to_string(k);
            double lambda;
            do {
                lambda = std::exp(sampler.mu + sampler.sigma * rng.normal());
            } while (lambda < sampler.min_lambda || lambda > sampler.max_lambda);
            for (int w = 0; w < world.weeks; ++w) {
                records.push_back({cluster_id, sku_id, w, rng.poisson(lambda)});
            }
        }
    }
    return records;
}

std::vector<std::string> world_week_labels(int weeks) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(std::max(weeks, 0)));
    for (int w = 0; w < weeks; ++w) labels.push_back(std::to_string(w));
    return labels;
}

ExpectedFi estimate_expected_fi(double lambda, std::int64_t q, std::int64_t samples,
                                std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("estimate_expected_fi: samples must be >= 1");
    if (q < 0) throw std::invalid_argument("estimate_expected_fi: q must be non-negative");
    if (!(lambda > 0.0)) throw std::domain_error("estimate_expected_fi: lambda must be positive");

    PortableRng rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const std::int64_t d = rng.poisson(lambda);
        const double v = d == 0 ? 1.0
                                : static_cast<double>(std::min(q, d)) / static_cast<double>(d);
        sum += v;
        sum_sq += v * v;
    }
    ExpectedFi out;
    const double n = static_cast<double>(samples);
    out.mean = sum / n;
    if (samples > 1) {
        const double variance = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
        out.std_error = std::sqrt(variance / n);
    }
    return out;
}

}  // namespace skualloc::backtest
