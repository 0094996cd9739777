#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hvi/distribution.hpp"
#include "hvi/mc_oracle.hpp"
#include "hvi/rng.hpp"
#include "oracles.hpp"

using hvi::BiGaussian;
using hvi::HviDistribution;
using hvi::ParetoFront2D;
using hvi::Point2;

namespace {
std::vector<Point2> const kThree{{1, 5}, {3, 3}, {5, 1}};
Point2 const kRef{6.5, 6.5};
BiGaussian const kThreePred{2.0, 0.8, 1.0, 0.5};

// Integral of the continuous part split at every cell support endpoint.
double integrate_pdf(HviDistribution const& d)
{
    std::set<double> cuts;
    for (auto const& cl : d.cells()) {
        cuts.insert(cl.support_lo);
        cuts.insert(cl.support_hi);
    }
    std::vector<double> pts(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        total += hvi::integrate([&](double x) { return d.pdf(x); }, pts[k], pts[k + 1], {1e-10, 400}).value;
    }
    return total;
}

// P(t1 t2 <= p) on a midpoint grid over both supports.
double grid_product_cdf(hvi::Factor const& t1, hvi::Factor const& t2, double p, int m)
{
    double const h1 = (t1.hi() - t1.lo()) / m;
    double const h2 = (t2.hi() - t2.lo()) / m;
    double s = 0.0;
    for (int a = 0; a < m; ++a) {
        double const z1 = t1.lo() + (a + 0.5) * h1;
        double const w1 = t1.pdf(z1) * h1;
        for (int b = 0; b < m; ++b) {
            double const z2 = t2.lo() + (b + 0.5) * h2;
            if (z1 * z2 <= p) {
                s += w1 * t2.pdf(z2) * h2;
            }
        }
    }
    return s;
}
} // namespace

TEST_CASE("integration bounds: three-case split equals the max/min form")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 2000; ++rep) {
        double const L1 = rep % 7 == 0 ? 0.0 : 2 * u(rng);
        double const U1 = L1 + 0.01 + 3 * u(rng);
        double const L2 = rep % 5 == 0 ? 0.0 : 2 * u(rng);
        double const U2 = L2 + 0.01 + 3 * u(rng);
        double const p = L1 * L2 + u(rng) * (U1 * U2 - L1 * L2);
        auto const b = hvi::product_bounds(L1, U1, L2, U2, p);
        CHECK(b.alpha <= b.beta * (1 + 1e-14));
        // reference form integrates the variable the bounds refer to
        double const gl = b.swapped ? L2 : L1, gu = b.swapped ? U2 : U1;
        double const hl = b.swapped ? L1 : L2, hu = b.swapped ? U1 : U2;
        double const ref_alpha = std::max(gl, p / hu);
        double const ref_beta = hl > 0 ? std::min(gu, p / hl) : gu;
        CHECK(b.alpha == doctest::Approx(ref_alpha).epsilon(1e-14));
        CHECK(b.beta == doctest::Approx(ref_beta).epsilon(1e-14));
        CHECK(b.swapped == (L1 * U2 > U1 * L2));
    }
}

TEST_CASE("integration bounds are continuous at the case boundaries")
{
    double const L1 = 1.0, U1 = 4.0, L2 = 2.0, U2 = 3.0; // L1U2 = 3 < U1L2 = 8
    for (double knot : {L1 * U2, U1 * L2}) {
        auto const below = hvi::product_bounds(L1, U1, L2, U2, std::nextafter(knot, 0.0));
        auto const at = hvi::product_bounds(L1, U1, L2, U2, knot);
        CHECK(below.alpha == doctest::Approx(at.alpha).epsilon(1e-12));
        CHECK(below.beta == doctest::Approx(at.beta).epsilon(1e-12));
    }
    // tie L1U2 = U1L2: no middle case
    auto const tie = hvi::product_bounds(1.0, 2.0, 1.0, 2.0, 2.0);
    CHECK(tie.alpha == 1.0);
    CHECK(tie.beta == 2.0);
}

TEST_CASE("product law against a grid oracle")
{
    hvi::QuadratureConfig const q{};
    hvi::TruncatedNormal const y1(0.3, 0.8, -1.0, 1.5);
    hvi::TruncatedNormal const y2(2.0, 0.4, 0.5, 2.5);
    auto const t1 = hvi::Factor::affine(y1, 1.5, true);  // 1.5 - y1 in [0, 2.5]
    auto const t2 = hvi::Factor::affine(y2, 0.5, false); // y2 - 0.5 in [0, 2]
    CHECK(t1.lo() == 0.0);
    CHECK(t1.hi() == doctest::Approx(2.5));
    CHECK(hvi::integrate([&](double t) { return t1.pdf(t); }, 0.0, 2.5).value == doctest::Approx(1.0));
    for (double p : {0.05, 0.4, 1.0, 2.2, 4.0}) {
        double const exact = hvi::product_cdf(t1, t2, p, q).value;
        CHECK(exact == doctest::Approx(grid_product_cdf(t1, t2, p, 1200)).epsilon(2e-3).scale(1.0));
        double const h = 1e-4;
        double const fd = (hvi::product_cdf(t1, t2, p + h, q).value - hvi::product_cdf(t1, t2, p - h, q).value) / (2 * h);
        CHECK(hvi::product_pdf(t1, t2, p, q).value == doctest::Approx(fd).epsilon(1e-4));
    }
    CHECK(hvi::product_cdf(t1, t2, -1.0, q).value == 0.0);
    CHECK(hvi::product_cdf(t1, t2, 6.0, q).value == 1.0);

    auto const c = hvi::Factor::constant(2.0);
    CHECK(hvi::product_cdf(c, t2, 2.0, q).value == doctest::Approx(t2.cdf(1.0)));
    CHECK(hvi::product_pdf(t1, c, 1.0, q).value == doctest::Approx(t1.pdf(0.5) / 2.0));
    auto const zero = hvi::Factor::constant(0.0);
    CHECK(hvi::product_cdf(zero, t2, 0.0, q).value == 1.0);
    CHECK(hvi::product_cdf(zero, t2, 0.0, q, true).value == 0.0);
}

TEST_CASE("build on the three-point front")
{
    ParetoFront2D const f(kThree, kRef);
    auto const probs = hvi::all_cell_probabilities(f, kThreePred);
    REQUIRE(probs.size() == 16);
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    auto const d = HviDistribution::build(f, kThreePred);
    CHECK(d.retained_mass() >= 1.0 - 1e-6);
    CHECK(d.retained_mass() <= 1.0 + 1e-12);
    // each retained piece matches the direct interval-mass product of its cell
    for (auto const& cl : d.cells()) {
        CHECK(cl.prob <= probs[cl.cell.i * 4 + cl.cell.j] * (1 + 1e-12));
        CHECK(cl.support_lo <= cl.support_hi);
    }
    auto const paper_window = HviDistribution::build(f, kThreePred, {{}, 3.0, 6.0});
    CHECK(paper_window.cells().size() <= d.cells().size());
    CHECK(paper_window.retained_mass() >= 1.0 - 3e-3);
}

TEST_CASE("build edge cases")
{
    ParetoFront2D const empty({}, {1, 1});
    auto const probs = hvi::all_cell_probabilities(empty, {0, 0, 1, 1});
    REQUIRE(probs.size() == 1);
    CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-15));
    auto const d = HviDistribution::build(empty, {0, 0, 1, 1});
    CHECK(d.retained_mass() == doctest::Approx(1.0).epsilon(1e-9));
    for (auto const& cl : d.cells()) {
        CHECK(cl.cell.i == 0);
        CHECK(cl.cell.j == 0);
    }

    ParetoFront2D const f(kThree, kRef);
    auto const at_ref = HviDistribution::build(f, {6.5, 6.5, 1e-6, 1e-6});
    for (auto const& cl : at_ref.cells()) {
        CHECK(cl.cell.i == 3);
        CHECK(cl.cell.j == 3);
        CHECK(cl.sign == -1);
    }
    CHECK(at_ref.retained_mass() == doctest::Approx(1.0));
    CHECK_THROWS_AS(HviDistribution::build(f, {0, 0, -1, 1}), std::invalid_argument);
}

TEST_CASE("conditional laws on the empty front against sampling")
{
    ParetoFront2D const empty({}, {1, 1});
    BiGaussian const pred{0, 0, 1, 1};
    auto const d = HviDistribution::build(empty, pred);
    auto const it = std::find_if(d.cells().begin(), d.cells().end(),
                                 [](auto const& cl) { return !cl.t1.is_constant() && !cl.t2.is_constant(); });
    REQUIRE(it != d.cells().end());
    auto const& cl = *it;
    hvi::QuadratureConfig const q{};

    // (1 - y1)(1 - y2) given y < r, by rejection
    auto eng = hvi::substream(99, 0);
    std::vector<double> s;
    while (s.size() < 2000000) {
        auto const [z1, z2] = hvi::normal_pair(eng);
        if (z1 < 1 && z2 < 1) {
            s.push_back((1 - z1) * (1 - z2));
        }
    }
    std::sort(s.begin(), s.end());
    double const h = 0.02;
    auto const in_bin = std::upper_bound(s.begin(), s.end(), 1 + h) - std::lower_bound(s.begin(), s.end(), 1 - h);
    double const density = static_cast<double>(in_bin) / (2 * h * static_cast<double>(s.size()));
    CHECK(hvi::conditional_pdf(cl, 1.0, q).value == doctest::Approx(density).epsilon(0.02));

    CHECK(hvi::conditional_cdf(cl, cl.support_hi, q).value == 1.0);
    CHECK(hvi::conditional_cdf(cl, cl.support_lo, q).value == doctest::Approx(0.0).scale(1));
    CHECK(hvi::conditional_pdf(cl, cl.support_hi + 1, q).value == 0.0);
    CHECK(hvi::conditional_pdf(cl, cl.support_lo - 1, q).value == 0.0);
    double const ks = oracle::ks_at_quantiles(s, [&](double x) { return hvi::conditional_cdf(cl, x, q).value; }, 200);
    CHECK(ks <= 0.005);
}

TEST_CASE("nearly deterministic second coordinate")
{
    ParetoFront2D const empty({}, {1, 1});
    auto const d = HviDistribution::build(empty, {0.0, 0.0, 1.0, 1e-3});
    auto const it = std::find_if(d.cells().begin(), d.cells().end(),
                                 [](auto const& cl) { return !cl.t1.is_constant() && !cl.t2.is_constant(); });
    REQUIRE(it != d.cells().end());
    // y2' = 1 - y2 concentrates at 1, so the product follows 1 - y1 given y1 < 1
    double const mass = hvi::Phi({0, 1}, 1.0);
    for (double delta : {0.3, 1.0, 2.0}) {
        double const limit = hvi::phi({0, 1}, 1.0 - delta) / mass;
        CHECK(hvi::conditional_pdf(*it, delta, {}).value == doctest::Approx(limit).epsilon(0.01));
    }
}

TEST_CASE("marginal law on the three-point front")
{
    ParetoFront2D const f(kThree, kRef);
    auto const d = HviDistribution::build(f, kThreePred);
    CHECK(d.cdf(-1e9) == 0.0);
    CHECK(d.cdf(1e9) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d.pdf(d.support_hi() + 1.0) == 0.0);
    CHECK(integrate_pdf(d) + d.atom_mass() == doctest::Approx(d.retained_mass()).epsilon(1e-6));

    auto s = hvi::sample_hvi(f, kThreePred, {100000, 1});
    std::sort(s.begin(), s.end());
    CHECK(oracle::ks_at_quantiles(s, [&](double x) { return d.cdf(x); }, 200) <= 0.01);

    // support bound from the corner where the open cells are clipped
    Point2 const corner{std::min(kThreePred.mu1, 1.0) - 6 * kThreePred.sigma1,
                        std::min(kThreePred.mu2, 1.0) - 6 * kThreePred.sigma2};
    CHECK(d.support_hi() == doctest::Approx(hvi::generalized_hvi(corner, f)).epsilon(1e-12));
}

TEST_CASE("quantile")
{
    ParetoFront2D const f(kThree, kRef);
    auto const d = HviDistribution::build(f, kThreePred);
    CHECK_THROWS_AS(d.quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(d.quantile(1.0), std::domain_error);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        double const d0 = d.support_lo() + u(rng) * (d.support_hi() - d.support_lo());
        double const w = d.cdf(d0);
        if (w <= 1e-6 || w >= 1 - 1e-6 || d.pdf(d0) < 1e-3) {
            continue;
        }
        CHECK(d.quantile(w) == doctest::Approx(d0).epsilon(1e-5).scale(1.0));
    }
    for (double w : {0.1, 0.5, 0.9}) {
        CHECK(std::abs(d.cdf(d.quantile(w)) - w) <= 1e-6);
    }

    // Dirac limits
    for (Point2 m : {Point2{0.5, 2.0}, Point2{5.8, 5.8}, Point2{2.0, 0.8}}) {
        auto const dirac = HviDistribution::build(f, {m.y1, m.y2, 0.0, 0.0});
        REQUIRE(dirac.cells().size() == 1);
        for (double w : {0.05, 0.5, 0.95}) {
            CHECK(dirac.quantile(w) == doctest::Approx(hvi::generalized_hvi(m, f)).epsilon(1e-12));
        }
        auto const tight = HviDistribution::build(f, {m.y1, m.y2, 1e-9, 1e-9});
        CHECK(tight.quantile(0.5) == doctest::Approx(hvi::generalized_hvi(m, f)).epsilon(1e-7));
    }

    ParetoFront2D const empty({}, {1, 1});
    BiGaussian const sym{0, 0, 1, 1};
    auto const e = HviDistribution::build(empty, sym);
    auto s = hvi::sample_hvi(empty, sym, {1000000, 3});
    std::nth_element(s.begin(), s.begin() + 500000, s.end());
    CHECK(e.quantile(0.5) == doctest::Approx(s[500000]).epsilon(1e-3));
}

TEST_CASE("cell probabilities sum to one")
{
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        auto pts = oracle::random_front(rng, rep % 21, {10, 10});
        ParetoFront2D const f(pts, {10, 10});
        auto const pred = oracle::random_pred(rng, {10, 10});
        auto const probs = hvi::all_cell_probabilities(f, pred);
        CHECK(probs.size() == (f.size() + 1) * (f.size() + 1));
        CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        auto const d = HviDistribution::build(f, pred);
        CHECK(d.retained_mass() >= 1.0 - 1e-6);
    }
}

TEST_CASE("marginal cdf is monotone, bounded and differentiates to the pdf")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        auto pts = oracle::random_front(rng, 1 + rep * 2, {10, 10});
        ParetoFront2D const f(pts, {10, 10});
        auto const d = HviDistribution::build(f, oracle::random_pred(rng, {10, 10}));
        double const width = d.support_hi() - d.support_lo();
        std::vector<double> grid(1000);
        for (auto& x : grid) {
            x = d.support_lo() - 0.05 * width + 1.1 * width * u(rng);
        }
        std::sort(grid.begin(), grid.end());
        auto const g = hvi::evaluate_grid(d, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            CHECK(g.cdf[k] >= 0.0);
            CHECK(g.cdf[k] <= 1.0);
            if (k > 0) {
                CHECK(g.cdf[k] >= g.cdf[k - 1] - 1e-9);
            }
        }
        std::set<double> cuts;
        for (auto const& cl : d.cells()) {
            cuts.insert(cl.support_lo);
            cuts.insert(cl.support_hi);
        }
        double const h = 1e-4 * width;
        for (std::size_t k = 0; k < grid.size(); k += 10) {
            double const x = grid[k];
            auto const near = cuts.lower_bound(x - 10 * h);
            if (near != cuts.end() && *near <= x + 10 * h) {
                continue;
            }
            double const pdf = g.pdf[k];
            if (pdf <= 1e-3) {
                continue;
            }
            double const fd = (d.cdf(x + h) - d.cdf(x - h)) / (2 * h);
            CHECK(fd == doctest::Approx(pdf).epsilon(1e-3));
        }
    }
}

TEST_CASE("serial and parallel grid evaluation agree exactly")
{
    ParetoFront2D const f(kThree, kRef);
    auto const d = HviDistribution::build(f, kThreePred);
    std::vector<double> grid(257);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = -15.0 + 30.0 * static_cast<double>(k) / 256.0;
    }
    auto const a = hvi::evaluate_grid(d, grid, hvi::Execution::Serial);
    auto const b = hvi::evaluate_grid(d, grid, hvi::Execution::Parallel);
    CHECK(a.pdf == b.pdf);
    CHECK(a.cdf == b.cdf);
}

TEST_CASE("exact law against sampling on random instances")
{
    std::mt19937_64 rng(2718);
    for (int rep = 0; rep < 50; ++rep) {
        auto pts = oracle::random_front(rng, rep % 21, {10, 10});
        ParetoFront2D const f(pts, {10, 10});
        auto const pred = oracle::random_pred(rng, {10, 10});
        auto const d = HviDistribution::build(f, pred);
        auto s = hvi::sample_hvi(f, pred, {100000, static_cast<std::uint64_t>(rep)});
        std::sort(s.begin(), s.end());
        double const ks = oracle::ks_at_quantiles(s, [&](double x) { return d.cdf(x); }, 100);
        INFO("instance " << rep << " n=" << f.size());
        CHECK(ks <= 0.0086);
    }
}

namespace {
// P(generalized HVI > delta) by mode-shifted importance sampling: the proposal
// is centred on the most likely point of the event, found on a grid.
double importance_tail(ParetoFront2D const& f, BiGaussian const& p, double delta, int n, std::uint64_t seed)
{
    Point2 mode{};
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a <= 400; ++a) {
        for (int b = 0; b <= 400; ++b) {
            Point2 const y{p.mu1 + p.sigma1 * (-40.0 + 0.2 * a), p.mu2 + p.sigma2 * (-40.0 + 0.2 * b)};
            double const z1 = (y.y1 - p.mu1) / p.sigma1;
            double const z2 = (y.y2 - p.mu2) / p.sigma2;
            double const lp = -0.5 * (z1 * z1 + z2 * z2);
            if (lp > best && hvi::hvi_by_recomputation(y, f) > delta) {
                best = lp;
                mode = y;
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        double const e1 = g(rng);
        double const e2 = g(rng);
        Point2 const y{mode.y1 + p.sigma1 * e1, mode.y2 + p.sigma2 * e2};
        if (hvi::hvi_by_recomputation(y, f) > delta) {
            double const z1 = (y.y1 - p.mu1) / p.sigma1;
            double const z2 = (y.y2 - p.mu2) / p.sigma2;
            sum += std::exp(-0.5 * (z1 * z1 + z2 * z2) + 0.5 * (e1 * e1 + e2 * e2));
        }
    }
    return sum / n;
}
} // namespace

TEST_CASE("log tail agrees with the cdf where both are accurate")
{
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int compared = 0;
    for (int rep = 0; rep < 60; ++rep) {
        Point2 const ref{10, 10};
        ParetoFront2D const f(oracle::random_front(rng, static_cast<std::size_t>(rep % 12), ref), ref);
        auto pred = oracle::random_pred(rng, ref);
        if (rep % 10 == 3) {
            pred.sigma2 = 0.0;
        }
        if (rep % 10 == 7) {
            pred.sigma1 = 0.0;
        }
        auto const d = HviDistribution::build(f, pred);
        double prev = 0.0;
        for (double w : {0.3, 0.6, 0.9, 0.999}) {
            double const delta = d.support_lo() + w * (d.support_hi() - d.support_lo());
            if (!(delta > 0.0)) {
                continue;
            }
            double const tail = std::exp(d.log_tail(delta));
            double const upper = 1.0 - d.cdf(delta);
            CHECK(tail == doctest::Approx(upper).epsilon(1e-6).scale(1.0));
            CHECK(tail <= prev + (prev == 0.0 ? 2.0 : 1e-12));
            prev = tail;
            ++compared;
        }
    }
    CHECK(compared > 60);
    CHECK_THROWS_AS(HviDistribution::build(ParetoFront2D(kThree, kRef), kThreePred).log_tail(0.0), std::domain_error);
}

TEST_CASE("log tail in the far tail against importance sampling")
{
    ParetoFront2D const f(kThree, kRef);
    for (auto const& [pred, delta] : {std::pair{BiGaussian{4.0, 4.0, 0.3, 0.3}, 6.0},
                                      std::pair{BiGaussian{2.0, 0.8, 0.2, 0.1}, 16.0},
                                      std::pair{BiGaussian{6.0, 2.0, 0.5, 0.25}, 8.0}}) {
        auto const d = HviDistribution::build(f, pred);
        double const lt = d.log_tail(delta);
        CHECK(lt < std::log(1e-9));
        double const is = importance_tail(f, pred, delta, 200000, 5);
        REQUIRE(is > 0.0);
        CHECK(std::abs(lt - std::log(is)) <= 0.03);
    }
}
