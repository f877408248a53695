#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skualloc/demand.hpp"

namespace skualloc::alloc {

/// Trade-off weight and previous-week sales shared by the objective and
/// both solvers. r is validated into (0, 10].
struct AllocationParams {
    double r = 0.1;
    std::int64_t s = 0;
};

/// Per-(cluster, SKU) recommendation. Ineligible SKUs carry q_star = 0 and
/// no fractile rather than being omitted.
struct AllocationDecision {
    std::string cluster_id;
    std::string sku_id;
    std::int64_t q_star = 0;
    bool eligible = false;
    std::optional<double> fractile;  ///< 1 - r*lambda_hat/s, in (0, 1) when eligible
    double lambda_hat = 0.0;
    std::int64_t s = 0;
    double r = 0.0;

    bool operator==(const AllocationDecision&) const = default;
};

struct AllocationFailure {
    std::string cluster_id;
    std::string sku_id;
    std::string message;
};

/// Batch output: one decision per successfully fitted window, in input
/// order, plus the windows that could not be fitted.
struct AllocationBatch {
    std::vector<AllocationDecision> decisions;
    std::vector<AllocationFailure> failures;
};

/// Throws ConfigError unless 0 < r <= 10.
void validate_r(double r);

/// Expected fulfilment-minus-weighted-utilization for a discrete demand
/// with rate lambda: cdf(q) + q * reciprocal_tail(q + 1) - r*q/s. Zero
/// demand counts as fully fulfilled. Requires s > 0.
double objective(std::int64_t q, double lambda, const AllocationParams& params);

/// Continuous analogue: F(q) + q * tail(q) - r*q/s. Requires s > 0, q >= 0.
double objective(double q, const demand::ContinuousDensity& density,
                 const AllocationParams& params);

/// Derivative of the continuous objective: tail(q) - r/s. Strictly
/// decreasing in q.
double objective_derivative(double q, const demand::ContinuousDensity& density,
                            const AllocationParams& params);

/// Root of the derivative via bisection; the bracket is grown geometrically
/// from the median until the derivative changes sign. Throws
/// NoInteriorSolutionError when r/s >= E[1/D] (the optimum is 0) and
/// NumericError when bracket expansion runs away.
double solve_continuous(const demand::ContinuousDensity& density,
                        const AllocationParams& params);

/// Quantile closed form: q* = quantile(1 - r*lambda/s). Total over valid
/// params; lambda = 0, s = 0, or r*lambda >= s yield an ineligible decision.
AllocationDecision solve_poisson_closed_form(const demand::PoissonDemandModel& model,
                                             const AllocationParams& params);

/// Fit and solve each window independently. Fit failures are collected per
/// SKU instead of aborting the batch.
AllocationBatch allocate(const std::vector<demand::SalesWindow>& windows, double r);

}  // namespace skualloc::alloc
