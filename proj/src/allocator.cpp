#include "skualloc/allocator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "skualloc/errors.hpp"

namespace skualloc::alloc {

namespace {

void require_positive_s(std::int64_t s) {
    if (s <= 0) throw std::invalid_argument("objective: s must be positive");
}

}  // namespace

void validate_r(double r) {
    if (!std::isfinite(r) || r <= 0.0 || r > 10.0) {
        std::ostringstream msg;
        msg << "r must be in (0, 10], got " << r;
        throw ConfigError(msg.str());
    }
}

double objective(std::int64_t q, double lambda, const AllocationParams& params) {
    validate_r(params.r);
    require_positive_s(params.s);
    if (q < 0) throw std::invalid_argument("objective: q must be non-negative");

    // Demand at or below q is fully served (and D = 0 counts as served);
    // above q each unit of stock contributes 1/k per demanded unit.
    const double served = demand::poisson_cdf(q, lambda);
    const double tail = demand::poisson_reciprocal_tail(q + 1, lambda).exact;
    const double cost = params.r * static_cast<double>(q) / static_cast<double>(params.s);
    return served + static_cast<double>(q) * tail - cost;
}

double objective(double q, const demand::ContinuousDensity& density,
                 const AllocationParams& params) {
    validate_r(params.r);
    require_positive_s(params.s);
    if (q < 0.0) throw std::invalid_argument("objective: q must be non-negative");
    if (q == 0.0) return 0.0;

    const double tail = demand::continuous_reciprocal_tail(density, q);
    const double cost = params.r * q / static_cast<double>(params.s);
    return density.cdf(q) + q * tail - cost;
}

double objective_derivative(double q, const demand::ContinuousDensity& density,
                            const AllocationParams& params) {
    validate_r(params.r);
    require_positive_s(params.s);
    if (!(q > 0.0)) throw std::invalid_argument("objective_derivative: q must be positive");
    return demand::continuous_reciprocal_tail(density, q) -
           params.r / static_cast<double>(params.s);
}

double solve_continuous(const demand::ContinuousDensity& density,
                        const AllocationParams& params) {
    validate_r(params.r);
    require_positive_s(params.s);

    const double target = params.r / static_cast<double>(params.s);
    if (!(target < density.reciprocal_mean())) {
        std::ostringstream msg;
        msg << "solve_continuous: r/s = " << target << " >= E[1/D] = "
            << density.reciprocal_mean() << " for " << density.name()
            << "; no interior root, optimal allocation is 0";
        throw NoInteriorSolutionError(msg.str());
    }

    const auto derivative = [&](double q) {
        return demand::continuous_reciprocal_tail(density, q) - target;
    };

    const double expansion_cap = 1e3 * density.upper_bound();
    double lo = density.quantile(0.5);
    double hi = lo;

    if (derivative(lo) > 0.0) {
        do {
            hi *= 2.0;
            if (hi > expansion_cap) {
                throw NumericError("solve_continuous: bracket expansion exceeded 1000x the "
                                   "upper quantile for " + density.name());
            }
        } while (derivative(hi) > 0.0);
    } else {
        do {
            lo *= 0.5;
            if (lo < 1e-300) {
                throw NumericError("solve_continuous: lower bracket underflowed for " +
                                   density.name());
            }
        } while (derivative(lo) <= 0.0);
    }

    // derivative(lo) > 0 >= derivative(hi); bisect.
    double mid = 0.5 * (lo + hi);
    while (hi - lo > 1e-9 * std::max(1.0, mid)) {
        mid = 0.5 * (lo + hi);
        if (derivative(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid = 0.5 * (lo + hi);

    const double residual = derivative(mid);
    if (std::abs(residual) >= 1e-8) {
        std::ostringstream msg;
        msg << "solve_continuous: residual derivative " << residual << " at q=" << mid
            << " exceeds 1e-8 for " << density.name();
        throw NumericError(msg.str());
    }
    return mid;
}

AllocationDecision solve_poisson_closed_form(const demand::PoissonDemandModel& model,
                                             const AllocationParams& params) {
    validate_r(params.r);

    AllocationDecision decision;
    decision.cluster_id = model.cluster_id;
    decision.sku_id = model.sku_id;
    decision.lambda_hat = model.lambda_hat;
    decision.s = params.s;
    decision.r = params.r;

    const bool has_demand = model.lambda_hat > 0.0;
    const bool has_sales = params.s > 0;
    if (!has_demand || !has_sales ||
        params.r * model.lambda_hat >= static_cast<double>(params.s)) {
        decision.eligible = false;
        decision.q_star = 0;
        return decision;
    }

    const double fractile = 1.0 - params.r * model.lambda_hat / static_cast<double>(params.s);
    decision.eligible = true;
    decision.fractile = fractile;
    decision.q_star = demand::poisson_quantile(fractile, model.lambda_hat);
    return decision;
}

AllocationBatch allocate(const std::vector<demand::SalesWindow>& windows, double r) {
    validate_r(r);

    AllocationBatch batch;
    batch.decisions.reserve(windows.size());
    for (const auto& window : windows) {
        try {
            const auto model = demand::fit_poisson_mle(window);
            AllocationParams params;
            params.r = r;
            params.s = window.last_week_sales();
            batch.decisions.push_back(solve_poisson_closed_form(model, params));
        } catch (const std::exception& e) {
            batch.failures.push_back({window.cluster_id, window.sku_id, e.what()});
        }
    }
    return batch;
}

}  // namespace skualloc::alloc
