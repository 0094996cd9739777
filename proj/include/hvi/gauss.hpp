#pragma once

#include <limits>

namespace hvi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Gaussian1D {
    double mu{0.0};
    double sigma{1.0};
};

// Scalar normal primitives. Phi accepts +-infinity.
double phi(Gaussian1D g, double x) noexcept;
double Phi(Gaussian1D g, double x) noexcept;
// Throws std::domain_error for p outside (0, 1).
double Phi_inv(Gaussian1D g, double p);

namespace stdnorm {
    double pdf(double z) noexcept;
    double cdf(double z) noexcept;
    // Upper tail 1 - cdf(z), accurate for large z.
    double sf(double z) noexcept;
    double log_cdf(double z) noexcept;
    double log_sf(double z) noexcept;
    // log(cdf(b) - cdf(a)) for a < b, stable in both tails.
    double log_interval_mass(double a, double b) noexcept;
    // cdf(b) - cdf(a) without cancellation in the tails.
    double interval_mass(double a, double b) noexcept;
} // namespace stdnorm

// exp(x^2) * erfc(x), scaled complementary error function.
double erfcx(double x) noexcept;

/// Normal law N(mu, sigma^2) conditioned on [lo, hi].
///
/// All quantities are computed relative to the interval mass so the
/// law stays usable when [lo, hi] lies tens of standard deviations
/// away from mu (the mass itself would underflow).
class TruncatedNormal {
public:
    TruncatedNormal() = default;
    TruncatedNormal(double mu, double sigma, double lo, double hi);

    double mu() const noexcept { return mu_; }
    double sigma() const noexcept { return sigma_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    double pdf(double x) const noexcept;
    double cdf(double x) const noexcept;
    double sf(double x) const noexcept;

    // Sub-interval of [lo, hi] outside which the density is below
    // exp(-40) times its maximum.
    double effective_lo() const noexcept { return eff_lo_; }
    double effective_hi() const noexcept { return eff_hi_; }

private:
    double mu_{0.0}, sigma_{1.0}, lo_{-kInf}, hi_{kInf};
    double a_{-kInf}, b_{kInf};
    double log_mass_{0.0};
    double log_norm_pdf_{0.0};
    double eff_lo_{-kInf}, eff_hi_{kInf};
};

} // namespace hvi
