#include "doctest.h"

#include <cmath>
#include <random>

#include "hvi/acquisition.hpp"
#include "hvi/gauss.hpp"
#include "hvi/mc_oracle.hpp"
#include "oracles.hpp"

using hvi::BiGaussian;
using hvi::ParetoFront2D;

namespace {
ParetoFront2D const& three_front()
{
    static ParetoFront2D const f({{1, 5}, {3, 3}, {5, 1}}, {6.5, 6.5});
    return f;
}

// frequency of y strictly inside the reference box and not weakly dominated by the front
double mc_nondominance(ParetoFront2D const& f, BiGaussian const& p, int n, std::uint64_t seed, double& se)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    int hits = 0;
    for (int k = 0; k < n; ++k) {
        hvi::Point2 const y{p.mu1 + p.sigma1 * g(rng), p.mu2 + p.sigma2 * g(rng)};
        bool ok = y.y1 < f.ref().y1 && y.y2 < f.ref().y2;
        for (auto const& q : f.points()) {
            ok = ok && !(q.y1 <= y.y1 && q.y2 <= y.y2);
        }
        hits += ok ? 1 : 0;
    }
    double const pr = static_cast<double>(hits) / n;
    se = std::sqrt(pr * (1 - pr) / n);
    return pr;
}
} // namespace

TEST_CASE("poi limits")
{
    ParetoFront2D const empty({}, {1, 1});
    CHECK(hvi::poi({0.5, 0.5, 1e-6, 1e-6}, empty) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hvi::poi({5.5, 5.5, 1e-6, 1e-6}, three_front()) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(hvi::poi({5.5, 5.5, 0.0, 0.0}, three_front()) == 0.0);
    CHECK(hvi::poi({0.5, 0.5, 0.0, 0.0}, three_front()) == 1.0);
}

TEST_CASE("poi against sampled non-dominance")
{
    BiGaussian const pred{2.0, 0.8, 1.0, 0.5};
    double se = 0.0;
    double const freq = mc_nondominance(three_front(), pred, 1000000, 7, se);
    CHECK(std::abs(hvi::poi(pred, three_front()) - freq) <= 3 * se);
}

TEST_CASE("poi and dominated mass are complementary")
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        auto const pts = oracle::random_front(rng, rep % 12, {10, 10});
        ParetoFront2D const f(pts, {10, 10});
        auto const pred = oracle::random_pred(rng, {10, 10});
        // dominated region: weakly dominated by some front point, or outside the box
        double dominated = 0.0;
        auto const cells = hvi::decompose_cells(f);
        auto const probs = hvi::all_cell_probabilities(f, pred);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (cells[k].side == hvi::CellSide::Dominated) {
                dominated += probs[k];
            }
        }
        double const outside = 1.0
                               - hvi::stdnorm::cdf((10 - pred.mu1) / pred.sigma1)
                                     * hvi::stdnorm::cdf((10 - pred.mu2) / pred.sigma2);
        // outside mass not already counted among dominated cells
        double outside_nd = 0.0;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (cells[k].side == hvi::CellSide::NonDominated) {
                auto const& c = cells[k];
                double const in1 = hvi::stdnorm::interval_mass((c.lower.y1 - pred.mu1) / pred.sigma1,
                                                               (std::min(c.upper.y1, 10.0) - pred.mu1) / pred.sigma1);
                double const in2 = hvi::stdnorm::interval_mass((c.lower.y2 - pred.mu2) / pred.sigma2,
                                                               (std::min(c.upper.y2, 10.0) - pred.mu2) / pred.sigma2);
                outside_nd += probs[k] - in1 * in2;
            }
        }
        CHECK(outside_nd <= outside + 1e-12);
        CHECK(hvi::poi(pred, f) + dominated + outside_nd == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("eps-poi")
{
    BiGaussian const pred{2.0, 0.8, 1.0, 0.5};
    CHECK(hvi::eps_poi(pred, three_front(), 0.0) == hvi::poi(pred, three_front()));
    CHECK(hvi::eps_poi(pred, three_front(), 1e3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    double prev = 2.0;
    for (double e : {0.0, 0.05, 0.1, 1.0}) {
        double const v = hvi::eps_poi(pred, three_front(), e);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK_THROWS_AS(hvi::eps_poi(pred, three_front(), -0.1), std::domain_error);
}

TEST_CASE("naive-ucb")
{
    CHECK(hvi::naive_ucb({0.5, 2, 0.3, 0.4}, three_front(), 0.0) == 10.25);
    CHECK(hvi::naive_ucb({0.5, 2, 0.3, 0.4}, three_front(), 0.0) == hvi::hvi_plus({0.5, 2}, three_front()));
    for (double w : {0.0, 1.0, 7.0}) {
        CHECK(hvi::naive_ucb({2, 2.5, 0, 0}, three_front(), w) == hvi::hvi_plus({2, 2.5}, three_front()));
    }
    double prev = -1.0;
    for (double w = 0.0; w <= 5.0; w += 0.25) {
        double const v = hvi::naive_ucb({4, 4, 0.5, 0.8}, three_front(), w);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(hvi::naive_ucb({0, 0, 1, 1}, three_front(), -1.0), std::domain_error);
}

TEST_CASE("ucb is the quantile")
{
    BiGaussian const pred{2.0, 0.8, 1.0, 0.5};
    auto const d = hvi::HviDistribution::build(three_front(), pred);
    double prev = -hvi::kInf;
    for (double w : {0.1, 0.5, 0.9}) {
        double const u = hvi::ucb(d, w);
        CHECK(hvi::marginal_cdf(d, u) == doctest::Approx(w).epsilon(1e-6));
        CHECK(u >= prev);
        prev = u;
    }
    auto const dirac = hvi::HviDistribution::build(three_front(), {2.0, 2.5, 0, 0});
    for (double w : {0.1, 0.5, 0.9}) {
        CHECK(hvi::ucb(dirac, w) == doctest::Approx(hvi::generalized_hvi({2.0, 2.5}, three_front())));
    }
}

TEST_CASE("eps-pohvi")
{
    BiGaussian const pred{2.0, 0.8, 1.0, 0.5};
    auto const d = hvi::HviDistribution::build(three_front(), pred);
    CHECK(hvi::eps_pohvi(d, three_front(), 0.0) == doctest::Approx(hvi::poi(pred, three_front())).epsilon(1e-6));
    CHECK(hvi::eps_pohvi(d, three_front(), 1e3) == 0.0);
    double prev = 2.0;
    for (double e : {0.0, 0.01, 0.05, 0.2, 0.5}) {
        double const v = hvi::eps_pohvi(d, three_front(), e);
        CHECK(v <= prev);
        prev = v;
    }

    auto const s = hvi::sample_hvi(three_front(), pred, {1000000, 17});
    double const thr = 0.05 * 18.25;
    double const freq = static_cast<double>(std::count_if(s.begin(), s.end(), [thr](double x) { return x > thr; }))
                        / static_cast<double>(s.size());
    double const se = std::sqrt(freq * (1 - freq) / static_cast<double>(s.size()));
    CHECK(std::abs(hvi::eps_pohvi(d, three_front(), 0.05) - freq) <= 3 * se);
    CHECK_THROWS_AS(hvi::eps_pohvi(d, three_front(), -1.0), std::domain_error);
}

TEST_CASE("eps-pohvi keeps ordering in the far tail")
{
    auto const& f = three_front();
    // confident prediction far from any large improvement
    BiGaussian pred{4.0, 4.0, 0.2, 0.2};
    double prev = 0.0;
    for (double mu = 4.0; mu >= 2.0; mu -= 0.25) {
        pred.mu1 = mu;
        auto const d = hvi::HviDistribution::build(f, pred);
        double const v = hvi::log_eps_pohvi(d, f, 0.5);
        CHECK(std::isfinite(v));
        CHECK(v < std::log(1e-6));
        if (mu < 4.0) {
            CHECK(v > prev);
        }
        prev = v;
    }
    // same order for wider spread at a fixed mean
    auto const narrow = hvi::HviDistribution::build(f, {4.0, 4.0, 0.2, 0.2});
    auto const wide = hvi::HviDistribution::build(f, {4.0, 4.0, 0.3, 0.3});
    CHECK(hvi::log_eps_pohvi(wide, f, 0.5) > hvi::log_eps_pohvi(narrow, f, 0.5));
}

TEST_CASE("schedules")
{
    using hvi::Schedule;
    CHECK(hvi::schedule_value(Schedule::exponential_decay(0.05, 0.02), 0) == 0.05);
    CHECK(hvi::schedule_value(Schedule::exponential_decay(0.05, 0.02), 50) == doctest::Approx(0.018394).epsilon(1e-4));
    CHECK(hvi::schedule_value(Schedule::ucb_omega(), 1) == doctest::Approx(0.8382).epsilon(1e-4));
    CHECK(hvi::schedule_value(Schedule::ucb_omega(), 0) == hvi::schedule_value(Schedule::ucb_omega(), 1));
    CHECK(hvi::schedule_value(Schedule::naive_ucb_omega(), 0) == 10.0);
    CHECK(hvi::schedule_value(Schedule::naive_ucb_omega(), 1) == 10.0);
    CHECK(hvi::schedule_value(Schedule::naive_ucb_omega(), 2) == doctest::Approx(std::sqrt(2 / std::log(2.0))));
    CHECK(hvi::schedule_value(Schedule::constant(0.05), 123) == 0.05);
    for (int t = 0; t < 500; ++t) {
        double const w = hvi::schedule_value(Schedule::ucb_omega(), t);
        CHECK((w > 0.0 && w < 1.0));
        CHECK(hvi::schedule_value(Schedule::naive_ucb_omega(), t) > 0.0);
        CHECK(hvi::schedule_value(Schedule::exponential_decay(0.05, 0.02), t) >= 0.0);
        if (t >= 1) {
            CHECK(w >= hvi::schedule_value(Schedule::ucb_omega(), t - 1));
        }
    }
}

TEST_CASE("dispatcher")
{
    using hvi::AcquisitionKind;
    for (auto k : {AcquisitionKind::PoI, AcquisitionKind::EpsPoI, AcquisitionKind::NaiveUcb, AcquisitionKind::Ucb,
                   AcquisitionKind::EpsPoHvi}) {
        CHECK(hvi::parse_acquisition(hvi::to_string(k)) == k);
    }
    CHECK_THROWS_AS(hvi::parse_acquisition("ehvi"), std::invalid_argument);

    BiGaussian const pred{2.0, 0.8, 1.0, 0.5};
    auto const& f = three_front();
    CHECK(hvi::Acquisition::make(AcquisitionKind::PoI)(pred, f, 3) == hvi::poi(pred, f));
    CHECK(hvi::Acquisition::make(AcquisitionKind::EpsPoI)(pred, f, 3) == hvi::eps_poi(pred, f, 0.05));
    CHECK(hvi::Acquisition::make(AcquisitionKind::NaiveUcb)(pred, f, 5)
          == hvi::naive_ucb(pred, f, std::sqrt(5 / std::log(5.0))));
    auto const d = hvi::HviDistribution::build(f, pred);
    CHECK(hvi::Acquisition::make(AcquisitionKind::EpsPoHvi)(pred, f, 10)
          == hvi::log_eps_pohvi(d, f, 0.05 * std::exp(-0.2)));
    CHECK(std::exp(hvi::log_eps_pohvi(d, f, 0.05)) == doctest::Approx(hvi::eps_pohvi(d, f, 0.05)).epsilon(1e-12));
    auto const u = hvi::Acquisition::make(AcquisitionKind::Ucb);
    // bit-identical on repeat
    CHECK(u(pred, f, 4) == u(pred, f, 4));
    CHECK(u(pred, f, 4) == hvi::ucb(d, hvi::schedule_value(hvi::Schedule::ucb_omega(), 4)));
}
