#include "hvi/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hvi {

Factor Factor::constant(double value)
{
    Factor f;
    f.constant_ = true;
    f.lo_ = f.hi_ = f.eff_lo_ = f.eff_hi_ = std::max(value, 0.0);
    return f;
}

Factor Factor::affine(TruncatedNormal const& y, double shift, bool reflected)
{
    Factor f;
    f.constant_ = false;
    f.reflected_ = reflected;
    f.shift_ = shift;
    f.law_ = y;
    if (reflected) {
        f.lo_ = shift - y.hi();
        f.hi_ = shift - y.lo();
        f.eff_lo_ = shift - y.effective_hi();
        f.eff_hi_ = shift - y.effective_lo();
    } else {
        f.lo_ = y.lo() - shift;
        f.hi_ = y.hi() - shift;
        f.eff_lo_ = y.effective_lo() - shift;
        f.eff_hi_ = y.effective_hi() - shift;
    }
    // the anchor corner bounds the cell, so only rounding can push below 0
    f.lo_ = std::max(f.lo_, 0.0);
    f.eff_lo_ = std::clamp(f.eff_lo_, f.lo_, f.hi_);
    f.eff_hi_ = std::clamp(f.eff_hi_, f.eff_lo_, f.hi_);
    return f;
}

double Factor::pdf(double t) const noexcept
{
    if (constant_) {
        return 0.0;
    }
    return reflected_ ? law_.pdf(shift_ - t) : law_.pdf(t + shift_);
}

double Factor::cdf(double t) const noexcept
{
    if (t < lo_) {
        return 0.0;
    }
    if (t >= hi_) {
        return 1.0;
    }
    return reflected_ ? law_.sf(shift_ - t) : law_.cdf(t + shift_);
}

ProductBounds product_bounds(double L1, double U1, double L2, double U2, double p) noexcept
{
    if (L1 * U2 > U1 * L2) {
        ProductBounds b = product_bounds(L2, U2, L1, U1, p);
        b.swapped = true;
        return b;
    }
    if (p < L1 * U2) {
        return {L1, p / L2, false};
    }
    if (p < U1 * L2) {
        return {p / U2, p / L2, false};
    }
    return {p / U2, U1, false};
}

namespace {
    // Z = c * x for a constant factor c and a (possibly constant) factor x.
    QuadratureResult linear_cdf(double c, Factor const& x, double p, bool strict)
    {
        if (c == 0.0 || x.is_constant()) {
            double const v = c * x.lo();
            return {(strict ? v < p : v <= p) ? 1.0 : 0.0, 0.0, true};
        }
        return {x.cdf(p / c), 0.0, true};
    }
} // namespace

namespace {
    // Integral over [a, c] with 0 < a in u = ln z: h(p / z) varies on the
    // scale of z itself, so its window keeps a fixed width whatever p is.
    template<class F>
    QuadratureResult integrate_log(F&& f, double a, double c, QuadratureConfig const& quad)
    {
        if (!(a > 0.0)) {
            return integrate(f, a, c, quad);
        }
        return integrate(
            [&](double u) {
                double const z = std::exp(u);
                return f(z) * z;
            },
            std::log(a), std::log(c), quad);
    }
} // namespace

QuadratureResult product_cdf(Factor const& t1, Factor const& t2, double p, QuadratureConfig const& quad, bool strict)
{
    if (t1.is_constant()) {
        return linear_cdf(t1.lo(), t2, p, strict);
    }
    if (t2.is_constant()) {
        return linear_cdf(t2.lo(), t1, p, strict);
    }
    if (p <= t1.lo() * t2.lo()) {
        return {0.0, 0.0, true};
    }
    if (p >= t1.hi() * t2.hi()) {
        return {1.0, 0.0, true};
    }
    ProductBounds const b = product_bounds(t1.lo(), t1.hi(), t2.lo(), t2.hi(), p);
    Factor const& g = b.swapped ? t2 : t1;
    Factor const& h = b.swapped ? t1 : t2;

    // mass of g below alpha has h-argument above its support
    double const head = g.cdf(b.alpha);
    double const a = std::max(b.alpha, g.effective_lo());
    double const c = std::min(b.beta, g.effective_hi());
    QuadratureResult r{head, 0.0, true};
    if (a < c) {
        auto const body = integrate_log([&](double z) { return g.pdf(z) * h.cdf(p / z); }, a, c, quad);
        r.value += body.value;
        r.error = body.error;
        r.converged = body.converged;
    }
    r.value = std::clamp(r.value, 0.0, 1.0);
    return r;
}

QuadratureResult product_pdf(Factor const& t1, Factor const& t2, double p, QuadratureConfig const& quad)
{
    if (t1.is_constant() && t2.is_constant()) {
        return {0.0, 0.0, true};
    }
    if (t1.is_constant() || t2.is_constant()) {
        double const c = t1.is_constant() ? t1.lo() : t2.lo();
        Factor const& x = t1.is_constant() ? t2 : t1;
        return {c > 0.0 ? x.pdf(p / c) / c : 0.0, 0.0, true};
    }
    if (p <= t1.lo() * t2.lo() || p >= t1.hi() * t2.hi()) {
        return {0.0, 0.0, true};
    }
    ProductBounds const b = product_bounds(t1.lo(), t1.hi(), t2.lo(), t2.hi(), p);
    Factor const& g = b.swapped ? t2 : t1;
    Factor const& h = b.swapped ? t1 : t2;

    double const a = std::max({b.alpha, g.effective_lo(), p / h.effective_hi()});
    double const c = std::min({b.beta, g.effective_hi(), h.effective_lo() > 0.0 ? p / h.effective_lo() : kInf});
    if (!(a < c)) {
        return {0.0, 0.0, true};
    }
    return integrate_log([&](double z) { return g.pdf(z) * h.pdf(p / z) / z; }, a, c, quad);
}

QuadratureResult conditional_pdf(CellLaw const& cl, double delta, QuadratureConfig const& quad)
{
    if (!(delta > cl.support_lo && delta < cl.support_hi)) {
        return {0.0, 0.0, true};
    }
    double const p = cl.sign * delta - cl.gamma;
    return product_pdf(cl.t1, cl.t2, p, quad);
}

QuadratureResult conditional_cdf(CellLaw const& cl, double delta, QuadratureConfig const& quad)
{
    if (delta < cl.support_lo) {
        return {0.0, 0.0, true};
    }
    if (delta >= cl.support_hi) {
        return {1.0, 0.0, true};
    }
    double const p = cl.sign * delta - cl.gamma;
    if (cl.sign > 0) {
        return product_cdf(cl.t1, cl.t2, p, quad);
    }
    // Delta <= delta  <=>  t1 t2 >= p
    auto r = product_cdf(cl.t1, cl.t2, p, quad, true);
    r.value = 1.0 - r.value;
    return r;
}

namespace {
    // One slice [lo, hi) of a coordinate axis with its probability and the
    // conditional law of the (clipped) coordinate on it.
    struct AxisPiece {
        std::size_t index{0};
        double mass{0.0};
        bool constant{false};
        double value{0.0};
        TruncatedNormal law{};
    };

    // edges[0] = -inf < edges[1] < ... < edges[n+1] = r; piece k is [edges[k], edges[k+1]),
    // and the last piece also receives everything beyond r (clipped to r).
    std::vector<AxisPiece> axis_pieces(std::vector<double> const& edges, double mu, double sigma,
                                       DistributionConfig const& cfg)
    {
        std::size_t const last = edges.size() - 2;
        double const r = edges.back();
        std::vector<AxisPiece> out;
        if (sigma < kDiracSigma) {
            if (mu >= r) {
                out.push_back({last, 1.0, true, r, {}});
            } else {
                auto it = std::upper_bound(edges.begin() + 1, edges.end(), mu);
                out.push_back({static_cast<std::size_t>(it - edges.begin()) - 1, 1.0, true, mu, {}});
            }
            return out;
        }
        double const win_lo = mu - cfg.prune_sigmas * sigma;
        double const win_hi = mu + cfg.prune_sigmas * sigma;
        for (std::size_t k = 0; k <= last; ++k) {
            double const lo = edges[k];
            double const hi = edges[k + 1];
            if (hi <= win_lo || lo > win_hi) {
                continue;
            }
            double const mass = stdnorm::interval_mass((lo - mu) / sigma, (hi - mu) / sigma);
            if (!(mass > 0.0)) {
                continue;
            }
            double const lo_c = std::isfinite(lo) ? lo : std::min(mu, hi) - cfg.clip_sigmas * sigma;
            double const width = hi - lo_c;
            if (width < 1e-14 || width < 1e-9 * sigma) {
                out.push_back({k, mass, true, 0.5 * (lo_c + hi), {}});
            } else {
                out.push_back({k, mass, false, 0.0, TruncatedNormal(mu, sigma, lo_c, hi)});
            }
        }
        if (r <= win_hi) {
            double const mass = stdnorm::sf((r - mu) / sigma);
            if (mass > 0.0) {
                out.push_back({last, mass, true, r, {}});
            }
        }
        return out;
    }

    std::vector<double> column_edges(ParetoFront2D const& f)
    {
        std::vector<double> e(f.size() + 2);
        for (std::size_t k = 0; k < e.size(); ++k) {
            e[k] = f.q1(k);
        }
        e.back() = f.ref().y1;
        return e;
    }

    std::vector<double> row_edges(ParetoFront2D const& f)
    {
        std::size_t const n = f.size();
        std::vector<double> e(n + 2);
        for (std::size_t k = 0; k <= n + 1; ++k) {
            e[k] = f.q2(n + 1 - k);
        }
        e.back() = f.ref().y2;
        return e;
    }

    Factor orient(AxisPiece const& piece, double anchor, bool reflected)
    {
        if (piece.constant) {
            return Factor::constant(reflected ? anchor - piece.value : piece.value - anchor);
        }
        return Factor::affine(piece.law, anchor, reflected);
    }
} // namespace

HviDistribution HviDistribution::build(ParetoFront2D const& front, BiGaussian const& pred, DistributionConfig const& cfg)
{
    if (!(pred.sigma1 >= 0.0 && pred.sigma2 >= 0.0) || !std::isfinite(pred.mu1) || !std::isfinite(pred.mu2)) {
        throw std::invalid_argument("HviDistribution: invalid predictive law");
    }
    HviDistribution d;
    d.front_ = front;
    d.pred_ = pred;
    d.cfg_ = cfg;

    auto const cols = axis_pieces(column_edges(front), pred.mu1, pred.sigma1, cfg);
    auto const rows = axis_pieces(row_edges(front), pred.mu2, pred.sigma2, cfg);
    std::size_t const n = front.size();

    d.cells_.reserve(cols.size() * rows.size());
    d.support_lo_ = kInf;
    d.support_hi_ = -kInf;
    for (auto const& c : cols) {
        for (auto const& r : rows) {
            CellLaw cl;
            cl.prob = c.mass * r.mass;
            if (!(cl.prob > 0.0)) {
                continue;
            }
            cl.cell = cell_at(front, c.index, r.index);
            double const a1 = front.q1(n + 1 - r.index);
            double const a2 = front.q2(c.index);
            bool const nondominated = cl.cell.side == CellSide::NonDominated;
            cl.sign = nondominated ? 1 : -1;
            cl.gamma = nondominated ? front.nondominated_offset(c.index, r.index)
                                    : front.dominated_offset(c.index, r.index);
            cl.t1 = orient(c, a1, nondominated);
            cl.t2 = orient(r, a2, nondominated);

            double const zlo = cl.t1.lo() * cl.t2.lo() + cl.gamma;
            double const zhi = cl.t1.hi() * cl.t2.hi() + cl.gamma;
            cl.support_lo = nondominated ? zlo : -zhi;
            cl.support_hi = nondominated ? zhi : -zlo;

            d.retained_mass_ += cl.prob;
            if (cl.is_atom()) {
                d.atom_mass_ += cl.prob;
            }
            d.support_lo_ = std::min(d.support_lo_, cl.support_lo);
            d.support_hi_ = std::max(d.support_hi_, cl.support_hi);
            d.cells_.push_back(cl);
        }
    }
    if (d.cells_.empty()) {
        throw std::runtime_error("HviDistribution: no cell carries predictive mass");
    }
    return d;
}

double HviDistribution::pdf(double delta) const
{
    double s = 0.0;
    for (auto const& cl : cells_) {
        if (delta > cl.support_lo && delta < cl.support_hi) {
            s += cl.prob * conditional_pdf(cl, delta, cfg_.quad).value;
        }
    }
    return s;
}

double HviDistribution::cdf(double delta) const
{
    double s = 0.0;
    for (auto const& cl : cells_) {
        if (delta >= cl.support_hi) {
            s += cl.prob;
        } else if (delta >= cl.support_lo) {
            s += cl.prob * conditional_cdf(cl, delta, cfg_.quad).value;
        }
    }
    return std::clamp(s, 0.0, 1.0);
}

double HviDistribution::quantile(double omega) const
{
    if (!(omega > 0.0 && omega < 1.0)) {
        throw std::domain_error("quantile: omega must lie in (0, 1)");
    }
    constexpr double tol = 1e-10;
    double lo = support_lo_;
    double hi = support_hi_;
    if (cdf(lo) >= omega - tol) {
        return lo;
    }
    if (cdf(hi) < omega - tol) {
        return hi; // omega falls into pruned mass
    }

    double seed = 0.0;
    for (auto const& cl : cells_) {
        seed += cl.prob * 0.5 * (cl.support_lo + cl.support_hi);
    }
    double x = std::clamp(seed / retained_mass_, lo, hi);
    for (int it = 0; it < 200; ++it) {
        double const F = cdf(x);
        if (F >= omega - tol) {
            hi = x;
        } else {
            lo = x;
        }
        double const f = pdf(x);
        if (std::abs(F - omega) <= tol && f > 1e-12) {
            return x;
        }
        if (hi - lo <= 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
            break;
        }
        double next = f > 1e-12 ? x - (F - omega) / f : lo;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        x = next;
    }
    return hi;
}

namespace {
    // Largest y2 with hvi_plus((y1, y2)) >= delta > 0, for y1 < r1. Walks the
    // strips below r2 from the top; strip widths follow the staircase.
    double level_y2(std::span<Point2 const> pts, Point2 ref, double y1, double delta)
    {
        double area = 0.0;
        double top = ref.y2;
        for (auto const& q : pts) {
            double const h = q.y1 - y1;
            if (h > 0.0) {
                double const strip = h * (top - q.y2);
                if (area + strip >= delta) {
                    return top - (delta - area) / h;
                }
                area += strip;
            }
            top = q.y2;
        }
        return top - (delta - area) / (ref.y1 - y1);
    }

    // log P(hvi_plus(y) > delta): y2 must fall below the level curve, so the
    // tail is the y1-integral of phi1 * Phi2(level) taken relative to its peak.
    double log_tail_integral(std::span<Point2 const> pts, Point2 ref, BiGaussian const& p, double delta)
    {
        auto const log_inner = [&](double y1) {
            if (y1 >= ref.y1) {
                return -kInf;
            }
            double const b = level_y2(pts, ref, y1, delta);
            if (p.sigma2 < kDiracSigma) {
                return b > p.mu2 ? 0.0 : -kInf;
            }
            return stdnorm::log_cdf((b - p.mu2) / p.sigma2);
        };
        if (p.sigma1 < kDiracSigma) {
            return log_inner(p.mu1);
        }
        constexpr double reach = 60.0;
        constexpr double step = 0.25;
        double const lo = p.mu1 - reach * p.sigma1;
        double const hi = std::min(ref.y1, p.mu1 + reach * p.sigma1);
        if (!(lo < hi)) {
            return -kInf;
        }
        auto const log_f = [&](double y1) {
            double const z = (y1 - p.mu1) / p.sigma1;
            return -0.5 * z * z + log_inner(y1);
        };
        auto const cells = static_cast<std::size_t>(std::ceil((hi - lo) / (step * p.sigma1)));
        std::vector<double> nodes(cells + 1);
        std::vector<double> vals(cells + 1);
        double peak = -kInf;
        for (std::size_t k = 0; k <= cells; ++k) {
            nodes[k] = k == cells ? hi : lo + static_cast<double>(k) * step * p.sigma1;
            vals[k] = log_f(nodes[k]);
            peak = std::max(peak, vals[k]);
        }
        if (!std::isfinite(peak)) {
            return -kInf;
        }
        QuadratureConfig const quad{1e-12 * p.sigma1, 50};
        double sum = 0.0;
        for (std::size_t k = 0; k < cells; ++k) {
            if (std::max(vals[k], vals[k + 1]) < peak - 60.0) {
                continue;
            }
            sum += integrate([&](double y1) { return std::exp(log_f(y1) - peak); }, nodes[k], nodes[k + 1], quad)
                       .value;
        }
        if (!(sum > 0.0)) {
            return -kInf;
        }
        return peak + std::log(sum / (p.sigma1 * std::sqrt(2.0 * std::numbers::pi)));
    }
} // namespace

double HviDistribution::log_tail(double delta) const
{
    if (!(delta > 0.0)) {
        throw std::domain_error("log_tail: delta must be positive");
    }
    auto const pts = front_.points();
    Point2 const ref = front_.ref();
    if (pred_.sigma2 < kDiracSigma && pred_.sigma1 >= kDiracSigma) {
        // integrate over the continuous coordinate
        std::vector<Point2> swapped(pts.rbegin(), pts.rend());
        for (auto& q : swapped) {
            std::swap(q.y1, q.y2);
        }
        return log_tail_integral(swapped, {ref.y2, ref.y1}, {pred_.mu2, pred_.mu1, pred_.sigma2, pred_.sigma1},
                                 delta);
    }
    return log_tail_integral(pts, ref, pred_, delta);
}

std::vector<double> all_cell_probabilities(ParetoFront2D const& front, BiGaussian const& pred)
{
    auto masses = [](std::vector<double> const& edges, double mu, double sigma) {
        std::size_t const m = edges.size() - 1;
        std::vector<double> p(m, 0.0);
        if (sigma < kDiracSigma) {
            auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, mu);
            p[static_cast<std::size_t>(it - edges.begin()) - 1] = 1.0;
            return p;
        }
        for (std::size_t k = 0; k + 1 < m; ++k) {
            p[k] = stdnorm::interval_mass((edges[k] - mu) / sigma, (edges[k + 1] - mu) / sigma);
        }
        p[m - 1] = stdnorm::sf((edges[m - 1] - mu) / sigma);
        return p;
    };
    auto const p1 = masses(column_edges(front), pred.mu1, pred.sigma1);
    auto const p2 = masses(row_edges(front), pred.mu2, pred.sigma2);
    std::vector<double> out;
    out.reserve(p1.size() * p2.size());
    for (double a : p1) {
        for (double b : p2) {
            out.push_back(a * b);
        }
    }
    return out;
}

GridValues evaluate_grid(HviDistribution const& d, std::span<double const> deltas, Execution exec)
{
    auto const m = static_cast<std::ptrdiff_t>(deltas.size());
    GridValues g{std::vector<double>(deltas.size()), std::vector<double>(deltas.size())};
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t k = 0; k < m; ++k) {
            g.pdf[static_cast<std::size_t>(k)] = d.pdf(deltas[static_cast<std::size_t>(k)]);
            g.cdf[static_cast<std::size_t>(k)] = d.cdf(deltas[static_cast<std::size_t>(k)]);
        }
    } else {
        for (std::ptrdiff_t k = 0; k < m; ++k) {
            g.pdf[static_cast<std::size_t>(k)] = d.pdf(deltas[static_cast<std::size_t>(k)]);
            g.cdf[static_cast<std::size_t>(k)] = d.cdf(deltas[static_cast<std::size_t>(k)]);
        }
    }
    return g;
}

} // namespace hvi
