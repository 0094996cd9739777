#include "hvi/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace hvi {

namespace {
    constexpr double kSqrt2 = std::numbers::sqrt2;
    constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
    constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
} // namespace

double erfcx(double x) noexcept
{
    if (std::isnan(x)) {
        return x;
    }
    if (x < 0.0) {
        if (x < -26.0) {
            return kInf;
        }
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < 25.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    // asymptotic series, truncated where terms drop below 1e-19
    double const inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

namespace stdnorm {

double pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) noexcept { return 0.5 * std::erfc(-z / kSqrt2); }

double sf(double z) noexcept { return 0.5 * std::erfc(z / kSqrt2); }

double log_sf(double z) noexcept
{
    if (z == kInf) {
        return -kInf;
    }
    if (z == -kInf) {
        return 0.0;
    }
    if (z >= 0.0) {
        return std::log(0.5 * erfcx(z / kSqrt2)) - 0.5 * z * z;
    }
    return std::log(sf(z));
}

double log_cdf(double z) noexcept { return log_sf(-z); }

double log_interval_mass(double a, double b) noexcept
{
    if (!(a < b)) {
        return -kInf;
    }
    if (b <= 0.0) {
        double const lb = log_cdf(b);
        double const la = log_cdf(a);
        return lb + std::log1p(-std::exp(la - lb));
    }
    if (a >= 0.0) {
        double const la = log_sf(a);
        double const lb = log_sf(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    return std::log1p(-(cdf(a) + sf(b)));
}

double interval_mass(double a, double b) noexcept
{
    if (!(a < b)) {
        return 0.0;
    }
    if (b <= 0.0) {
        return cdf(b) - cdf(a);
    }
    if (a >= 0.0) {
        return sf(a) - sf(b);
    }
    return 1.0 - cdf(a) - sf(b);
}

} // namespace stdnorm

double phi(Gaussian1D g, double x) noexcept
{
    return stdnorm::pdf((x - g.mu) / g.sigma) / g.sigma;
}

double Phi(Gaussian1D g, double x) noexcept
{
    if (x == -kInf) {
        return 0.0;
    }
    if (x == kInf) {
        return 1.0;
    }
    return stdnorm::cdf((x - g.mu) / g.sigma);
}

double Phi_inv(Gaussian1D g, double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("Phi_inv: probability must lie in (0, 1)");
    }
    double const z = -kSqrt2 * boost::math::erfc_inv(2.0 * p);
    return g.mu + g.sigma * z;
}

TruncatedNormal::TruncatedNormal(double mu, double sigma, double lo, double hi)
    : mu_(mu), sigma_(sigma), lo_(lo), hi_(hi)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("TruncatedNormal: sigma must be positive and finite");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("TruncatedNormal: empty truncation interval");
    }
    a_ = (lo - mu) / sigma;
    b_ = (hi - mu) / sigma;
    log_mass_ = stdnorm::log_interval_mass(a_, b_);
    log_norm_pdf_ = -std::log(sigma) - kLogSqrt2Pi - log_mass_;

    double const mode = std::clamp(mu, lo, hi);
    double const radius = std::sqrt((mode - mu) * (mode - mu) + 80.0 * sigma * sigma);
    eff_lo_ = std::max(lo, mu - radius);
    eff_hi_ = std::min(hi, mu + radius);
}

double TruncatedNormal::pdf(double x) const noexcept
{
    if (x < lo_ || x > hi_) {
        return 0.0;
    }
    double const z = (x - mu_) / sigma_;
    return std::exp(log_norm_pdf_ - 0.5 * z * z);
}

double TruncatedNormal::cdf(double x) const noexcept
{
    if (x <= lo_) {
        return 0.0;
    }
    if (x >= hi_) {
        return 1.0;
    }
    double const z = (x - mu_) / sigma_;
    if (z <= 0.0) {
        return std::exp(stdnorm::log_interval_mass(a_, z) - log_mass_);
    }
    return 1.0 - std::exp(stdnorm::log_interval_mass(z, b_) - log_mass_);
}

double TruncatedNormal::sf(double x) const noexcept
{
    if (x <= lo_) {
        return 1.0;
    }
    if (x >= hi_) {
        return 0.0;
    }
    double const z = (x - mu_) / sigma_;
    if (z >= 0.0) {
        return std::exp(stdnorm::log_interval_mass(z, b_) - log_mass_);
    }
    return 1.0 - std::exp(stdnorm::log_interval_mass(a_, z) - log_mass_);
}

} // namespace hvi
