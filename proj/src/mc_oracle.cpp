#include "hvi/mc_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "hvi/rng.hpp"

namespace hvi {

double hvi_by_recomputation(Point2 y, ParetoFront2D const& front)
{
    Point2 const r = front.ref();
    Point2 const yc{std::min(y.y1, r.y1), std::min(y.y2, r.y2)};
    std::vector<Point2> pts(front.points().begin(), front.points().end());

    std::vector<Point2> below;
    for (auto const& p : pts) {
        if (weakly_dominates(p, yc)) {
            below.push_back(p);
        }
    }
    if (!below.empty() || yc.y1 >= r.y1 || yc.y2 >= r.y2) {
        return -hypervolume(below, yc);
    }
    pts.push_back(yc);
    return hypervolume(pts, r) - front.hypervolume();
}

std::vector<double> sample_hvi(ParetoFront2D const& front, BiGaussian const& pred, McConfig const& cfg, Execution exec)
{
    std::vector<double> out(cfg.n_samples);
    auto const chunks = static_cast<std::ptrdiff_t>((cfg.n_samples + kMcChunk - 1) / kMcChunk);
    auto run_chunk = [&](std::ptrdiff_t c) {
        auto eng = substream(cfg.seed, static_cast<std::uint64_t>(c));
        std::size_t const begin = static_cast<std::size_t>(c) * kMcChunk;
        std::size_t const end = std::min(begin + kMcChunk, cfg.n_samples);
        for (std::size_t k = begin; k < end; ++k) {
            auto const [z1, z2] = normal_pair(eng);
            Point2 const y{pred.mu1 + pred.sigma1 * z1, pred.mu2 + pred.sigma2 * z2};
            out[k] = hvi_by_recomputation(y, front);
        }
    };
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t c = 0; c < chunks; ++c) {
            run_chunk(c);
        }
    } else {
        for (std::ptrdiff_t c = 0; c < chunks; ++c) {
            run_chunk(c);
        }
    }
    return out;
}

double empirical_cdf(std::span<double const> samples, double delta)
{
    if (samples.empty()) {
        throw std::domain_error("empirical_cdf: no samples");
    }
    auto const hits = std::count_if(samples.begin(), samples.end(), [delta](double s) { return s <= delta; });
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

namespace {
    template<class F>
    double median_seconds(F&& f, int reps)
    {
        f(); // warm-up
        std::vector<double> t;
        for (int k = 0; k < std::max(reps, 1); ++k) {
            auto const start = std::chrono::steady_clock::now();
            f();
            t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        }
        std::sort(t.begin(), t.end());
        std::size_t const m = t.size();
        return m % 2 == 1 ? t[m / 2] : 0.5 * (t[m / 2 - 1] + t[m / 2]);
    }

    std::vector<double> grid_between(double lo, double hi, std::size_t m)
    {
        std::vector<double> g(m);
        for (std::size_t k = 0; k < m; ++k) {
            g[k] = m == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
        }
        return g;
    }
} // namespace

std::vector<TimingRow> timing_comparison(std::span<ParetoFront2D const> fronts, BiGaussian const& pred,
                                         McConfig const& mc, QuadratureConfig const& quad, TimingConfig const& timing)
{
    std::vector<TimingRow> rows;
    DistributionConfig dcfg;
    dcfg.quad = quad;
    for (auto const& front : fronts) {
        auto const probe = HviDistribution::build(front, pred, dcfg);
        auto const grid = grid_between(probe.support_lo(), probe.support_hi(), timing.grid_points);

        volatile double sink = 0.0;
        double const t_exact = median_seconds(
            [&] {
                auto const d = HviDistribution::build(front, pred, dcfg);
                double acc = 0.0;
                for (double x : grid) {
                    acc += d.cdf(x);
                }
                sink = sink + acc;
            },
            timing.repetitions);
        double const t_mc = median_seconds(
            [&] {
                auto s = sample_hvi(front, pred, mc, Execution::Serial);
                std::sort(s.begin(), s.end());
                double acc = 0.0;
                for (double x : grid) {
                    acc += static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
                }
                sink = sink + acc;
            },
            timing.repetitions);
        rows.push_back({front.size(), t_exact, t_mc});
    }
    return rows;
}

ParetoFront2D segment_front(std::size_t n, Point2 ref, std::uint64_t seed)
{
    auto eng = substream(seed, n);
    double const c = 0.8 * std::min(ref.y1, ref.y2);
    double const gap = c / static_cast<double>(n);
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        double const y1 = gap * (static_cast<double>(k) + 0.5 + 0.5 * (uniform01(eng) - 0.5));
        double const y2 = c - y1 + 0.2 * gap * (uniform01(eng) - 0.5);
        pts.push_back({y1, y2});
    }
    return ParetoFront2D(std::move(pts), ref);
}

} // namespace hvi
