#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace skualloc::demand {

/// Fitted per-(cluster, SKU) weekly demand model. lambda_hat is the plain
/// sample mean of the estimation window, no smoothing.
struct PoissonDemandModel {
    std::string cluster_id;
    std::string sku_id;
    double lambda_hat = 0.0;  ///< units/week, >= 0
    int n_samples = 0;        ///< weeks in the estimation window, >= 1
};

/// Windowed weekly sales for one (cluster, SKU), oldest week first.
/// The last entry is the previous-week sales s used by the allocator.
struct SalesWindow {
    std::string cluster_id;
    std::string sku_id;
    std::vector<std::int64_t> weekly_sales;
    std::int64_t target_week = 0;

    std::int64_t last_week_sales() const { return weekly_sales.back(); }
};

/// P(D = k) for D ~ Poisson(lambda), evaluated in log space.
/// Throws std::domain_error for non-finite or non-positive lambda, k < 0.
double poisson_pmf(std::int64_t k, double lambda);

/// P(D <= k): running sum of pmf terms. cdf(-1) is 0 by convention.
double poisson_cdf(std::int64_t k, double lambda);

/// Generalized inverse CDF: smallest k with cdf(k) >= p. Requires 0 <= p < 1.
std::int64_t poisson_quantile(double p, double lambda);

/// Sample-mean fit over the window. Throws DataError on an empty window.
PoissonDemandModel fit_poisson_mle(const SalesWindow& window);

/// Exact reciprocal upper-tail sum and its closed-form surrogate, returned
/// together so callers can measure the substitution error.
struct ReciprocalTail {
    double exact = 0.0;   ///< sum_{k >= max(q,1)} pmf(k) / k
    double approx = 0.0;  ///< (1 - cdf(q - 1)) / lambda

    double gap() const { return exact - approx; }
};

ReciprocalTail poisson_reciprocal_tail(std::int64_t q, double lambda);

/// Continuous demand distribution with support in (0, inf).
class ContinuousDensity {
public:
    virtual ~ContinuousDensity() = default;

    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    /// Inverse CDF; p in [0, 1).
    virtual double quantile(double p) const = 0;
    /// E[1/D]; +inf when the reciprocal moment diverges.
    virtual double reciprocal_mean() const = 0;
    virtual std::string name() const = 0;

    /// Effective upper end of the support used to truncate tail integrals.
    double upper_bound() const { return quantile(1.0 - 1e-12); }
};

class Lognormal final : public ContinuousDensity {
public:
    Lognormal(double mu, double sigma);

    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double p) const override;
    double reciprocal_mean() const override;
    std::string name() const override;

    double mu() const { return mu_; }
    double sigma() const { return sigma_; }

private:
    double mu_;
    double sigma_;
};

/// Gamma parameterized by shape and rate (not scale).
class Gamma final : public ContinuousDensity {
public:
    Gamma(double shape, double rate);

    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double p) const override;
    double reciprocal_mean() const override;
    std::string name() const override;

    double shape() const { return shape_; }
    double rate() const { return rate_; }

private:
    double shape_;
    double rate_;
};

/// Adaptive quadrature of pdf(x)/x over (q, upper_bound()]. Non-increasing
/// in q; approaches E[1/D] as q -> 0+. Requires q > 0. Throws NumericError
/// when the quadrature error estimate exceeds the requested tolerance.
double continuous_reciprocal_tail(const ContinuousDensity& density, double q);

}  // namespace skualloc::demand
