#include "skualloc/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "skualloc/errors.hpp"

namespace skualloc::demand {

namespace {

// Log-factorial table; lgamma takes over past the cap.
constexpr std::int64_t kLogFactorialCap = 10000;

double log_factorial(std::int64_t k) {
    static const std::vector<double> table = [] {
        std::vector<double> t(static_cast<std::size_t>(kLogFactorialCap) + 1, 0.0);
        for (std::int64_t i = 1; i <= kLogFactorialCap; ++i) {
            t[static_cast<std::size_t>(i)] =
                t[static_cast<std::size_t>(i - 1)] + std::log(static_cast<double>(i));
        }
        return t;
    }();
    if (k <= kLogFactorialCap) return table[static_cast<std::size_t>(k)];
    return std::lgamma(static_cast<double>(k) + 1.0);
}

void require_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        std::ostringstream msg;
        msg << "lambda must be finite and positive, got " << lambda;
        throw std::domain_error(msg.str());
    }
}

// Terms below this relative size no longer move a double-precision sum.
constexpr double kTailTermCutoff = 1e-16;

}  // namespace

double poisson_pmf(std::int64_t k, double lambda) {
    require_lambda(lambda);
    if (k < 0) throw std::domain_error("poisson_pmf: k must be non-negative");
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) - log_factorial(k));
}

double poisson_cdf(std::int64_t k, double lambda) {
    require_lambda(lambda);
    if (k < 0) return 0.0;
    double sum = 0.0;
    for (std::int64_t j = 0; j <= k; ++j) sum += poisson_pmf(j, lambda);
    return sum;
}

std::int64_t poisson_quantile(double p, double lambda) {
    require_lambda(lambda);
    if (!(p >= 0.0 && p < 1.0)) {
        std::ostringstream msg;
        msg << "poisson_quantile: p must be in [0, 1), got " << p;
        throw std::domain_error(msg.str());
    }
    std::int64_t k = 0;
    double acc = poisson_pmf(0, lambda);
    // The sum saturates numerically near 1; stop once it can no longer grow.
    while (acc < p && 1.0 - acc > 1e-15) {
        ++k;
        acc += poisson_pmf(k, lambda);
    }
    return k;
}

PoissonDemandModel fit_poisson_mle(const SalesWindow& window) {
    if (window.weekly_sales.empty()) {
        throw DataError("fit_poisson_mle: empty sales window for cluster '" +
                        window.cluster_id + "' sku '" + window.sku_id + "'");
    }
    for (std::int64_t v : window.weekly_sales) {
        if (v < 0) {
            throw DataError("fit_poisson_mle: negative weekly sales for cluster '" +
                            window.cluster_id + "' sku '" + window.sku_id + "'");
        }
    }
    const std::int64_t total = std::accumulate(window.weekly_sales.begin(),
                                               window.weekly_sales.end(), std::int64_t{0});
    PoissonDemandModel model;
    model.cluster_id = window.cluster_id;
    model.sku_id = window.sku_id;
    model.lambda_hat =
        static_cast<double>(total) / static_cast<double>(window.weekly_sales.size());
    model.n_samples = static_cast<int>(window.weekly_sales.size());
    return model;
}

ReciprocalTail poisson_reciprocal_tail(std::int64_t q, double lambda) {
    require_lambda(lambda);
    if (q < 0) q = 0;

    ReciprocalTail tail;
    // k = 0 contributes nothing to unmet-demand fulfilment; the sum starts at 1.
    const std::int64_t start = std::max<std::int64_t>(q, 1);
    double sum = 0.0;
    for (std::int64_t k = start;; ++k) {
        const double term = poisson_pmf(k, lambda) / static_cast<double>(k);
        sum += term;
        // Terms decay monotonically once past the mode.
        if (static_cast<double>(k) > lambda && term <= kTailTermCutoff * sum) break;
    }
    tail.exact = sum;
    tail.approx = (1.0 - poisson_cdf(q - 1, lambda)) / lambda;
    return tail;
}

// --- continuous densities ------------------------------------------------

Lognormal::Lognormal(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma <= 0.0) {
        throw std::domain_error("Lognormal: sigma must be finite and positive");
    }
}

double Lognormal::pdf(double x) const {
    if (x <= 0.0) return 0.0;
    return boost::math::pdf(boost::math::lognormal_distribution<>(mu_, sigma_), x);
}

double Lognormal::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::lognormal_distribution<>(mu_, sigma_), x);
}

double Lognormal::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("Lognormal::quantile: p not in [0, 1)");
    if (p == 0.0) return 0.0;
    return boost::math::quantile(boost::math::lognormal_distribution<>(mu_, sigma_), p);
}

double Lognormal::reciprocal_mean() const { return std::exp(-mu_ + 0.5 * sigma_ * sigma_); }

std::string Lognormal::name() const {
    std::ostringstream s;
    s << "lognormal(" << mu_ << ", " << sigma_ << ")";
    return s.str();
}

Gamma::Gamma(double shape, double rate) : shape_(shape), rate_(rate) {
    if (!std::isfinite(shape) || shape <= 0.0 || !std::isfinite(rate) || rate <= 0.0) {
        throw std::domain_error("Gamma: shape and rate must be finite and positive");
    }
}

double Gamma::pdf(double x) const {
    if (x <= 0.0) return 0.0;
    return boost::math::pdf(boost::math::gamma_distribution<>(shape_, 1.0 / rate_), x);
}

double Gamma::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::gamma_distribution<>(shape_, 1.0 / rate_), x);
}

double Gamma::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("Gamma::quantile: p not in [0, 1)");
    if (p == 0.0) return 0.0;
    return boost::math::quantile(boost::math::gamma_distribution<>(shape_, 1.0 / rate_), p);
}

double Gamma::reciprocal_mean() const {
    if (shape_ <= 1.0) return std::numeric_limits<double>::infinity();
    return rate_ / (shape_ - 1.0);
}

std::string Gamma::name() const {
    std::ostringstream s;
    s << "gamma(" << shape_ << ", " << rate_ << ")";
    return s.str();
}

double continuous_reciprocal_tail(const ContinuousDensity& density, double q) {
    if (!(q > 0.0)) throw std::domain_error("continuous_reciprocal_tail: q must be positive");

    const double upper = density.upper_bound();
    if (q >= upper) return 0.0;

    const auto integrand = [&density](double x) { return density.pdf(x) / x; };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, q, upper, /*max_depth=*/15, /*tol=*/1e-12, &error);

    const double tolerance = 1e-10 * std::max(std::abs(value), 1e-14);
    if (!std::isfinite(value) || error > tolerance) {
        std::ostringstream msg;
        msg << "continuous_reciprocal_tail: quadrature did not converge for " << density.name()
            << " at q=" << q << " (value=" << value << ", error estimate=" << error
            << ", tolerance=" << tolerance << ")";
        throw NumericError(msg.str());
    }
    return std::max(value, 0.0);
}

}  // namespace skualloc::demand
