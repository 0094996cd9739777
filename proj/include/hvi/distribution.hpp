#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hvi/gauss.hpp"
#include "hvi/pareto.hpp"
#include "hvi/quadrature.hpp"

namespace hvi {

// Independent bivariate normal predictive law of an objective point.
struct BiGaussian {
    double mu1{0.0};
    double mu2{0.0};
    double sigma1{1.0};
    double sigma2{1.0};
};

// Standard deviations below this are treated as exact (Dirac) coordinates.
inline constexpr double kDiracSigma = 1e-12;

struct DistributionConfig {
    QuadratureConfig quad{};
    // Cells whose extended box misses mu +- prune_sigmas * sigma are dropped.
    double prune_sigmas{6.0};
    // Infinite cell bounds are clipped this many standard deviations out.
    double clip_sigmas{6.0};
};

/// Non-negative factor of the anchored product inside one cell.
///
/// Either a constant or an affine image t = shift - y (reflected) or
/// t = y - shift of a truncated normal coordinate y.
class Factor {
public:
    static Factor constant(double value);
    static Factor affine(TruncatedNormal const& y, double shift, bool reflected);

    bool is_constant() const noexcept { return constant_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double effective_lo() const noexcept { return eff_lo_; }
    double effective_hi() const noexcept { return eff_hi_; }

    double pdf(double t) const noexcept;
    double cdf(double t) const noexcept;

private:
    bool constant_{true};
    bool reflected_{false};
    double shift_{0.0};
    double lo_{0.0}, hi_{0.0}, eff_lo_{0.0}, eff_hi_{0.0};
    TruncatedNormal law_{};
};

// Integration range [alpha, beta] of the product kernel for p in [L1L2, U1U2].
// When L1*U2 > U1*L2 the variables are swapped first; `swapped` reports it and
// the bounds then refer to the second variable.
struct ProductBounds {
    double alpha{0.0};
    double beta{0.0};
    bool swapped{false};
};
ProductBounds product_bounds(double L1, double U1, double L2, double U2, double p) noexcept;

// Law of Z = t1 * t2 for independent non-negative factors.
// `strict` selects P(Z < p) instead of P(Z <= p); only atoms differ.
QuadratureResult product_cdf(Factor const& t1, Factor const& t2, double p, QuadratureConfig const& quad,
                             bool strict = false);
QuadratureResult product_pdf(Factor const& t1, Factor const& t2, double p, QuadratureConfig const& quad);

/// Conditional law of the generalized HVI inside one cell piece:
/// Delta = sign * (t1 * t2 + gamma).
struct CellLaw {
    Cell cell{};
    double prob{0.0};
    int sign{1};
    double gamma{0.0};
    Factor t1{}, t2{};
    double support_lo{0.0};
    double support_hi{0.0};

    bool is_atom() const noexcept { return support_lo == support_hi; }
};

QuadratureResult conditional_pdf(CellLaw const& cl, double delta, QuadratureConfig const& quad);
QuadratureResult conditional_cdf(CellLaw const& cl, double delta, QuadratureConfig const& quad);

/// Marginal law of the generalized HVI of y ~ pred w.r.t. a front.
///
/// Predictive mass beyond the reference point is assigned to the outer
/// row/column cells with y clipped to r, so the retained cell pieces carry
/// the full mass up to pruning. Coordinates clipped to r become constants,
/// which may put atoms into the law; pdf() is the density of the
/// continuous part.
class HviDistribution {
public:
    static HviDistribution build(ParetoFront2D const& front, BiGaussian const& pred,
                                 DistributionConfig const& cfg = {});

    std::span<CellLaw const> cells() const noexcept { return cells_; }
    ParetoFront2D const& front() const noexcept { return front_; }
    BiGaussian const& pred() const noexcept { return pred_; }
    DistributionConfig const& config() const noexcept { return cfg_; }

    double retained_mass() const noexcept { return retained_mass_; }
    double atom_mass() const noexcept { return atom_mass_; }
    double support_lo() const noexcept { return support_lo_; }
    double support_hi() const noexcept { return support_hi_; }

    double pdf(double delta) const;
    double cdf(double delta) const;
    // Smallest delta with cdf(delta) >= omega (up to tolerance), found by
    // Newton steps safeguarded with bisection. Throws std::domain_error
    // unless 0 < omega < 1.
    double quantile(double omega) const;
    // log P(Delta > delta) for delta > 0 under the unclipped predictive law,
    // as a level-curve integral in log space. Stays accurate where 1 - cdf
    // underflows or is cut off by clipping. Throws std::domain_error unless
    // delta > 0.
    double log_tail(double delta) const;

private:
    ParetoFront2D front_;
    BiGaussian pred_{};
    DistributionConfig cfg_{};
    std::vector<CellLaw> cells_;
    double retained_mass_{0.0};
    double atom_mass_{0.0};
    double support_lo_{0.0};
    double support_hi_{0.0};
};

inline double marginal_pdf(HviDistribution const& d, double delta) { return d.pdf(delta); }
inline double marginal_cdf(HviDistribution const& d, double delta) { return d.cdf(delta); }
inline double quantile(HviDistribution const& d, double omega) { return d.quantile(omega); }

// P(y in C(i,j)) for all (n+1)^2 cells with the outer row and column
// extended to +infinity, ordered as decompose_cells.
std::vector<double> all_cell_probabilities(ParetoFront2D const& front, BiGaussian const& pred);

enum class Execution { Serial, Parallel };

struct GridValues {
    std::vector<double> pdf;
    std::vector<double> cdf;
};

// pdf and cdf on a grid of deltas; Parallel splits grid points across
// OpenMP threads and returns the same values as Serial.
GridValues evaluate_grid(HviDistribution const& d, std::span<double const> deltas,
                         Execution exec = Execution::Parallel);

} // namespace hvi
