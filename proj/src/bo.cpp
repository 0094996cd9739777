#include "hvi/bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Core>

#include "hvi/gp.hpp"
#include "hvi/rng.hpp"

namespace hvi {

Problem ExperimentConfig::make_problem() const
{
    auto p = Problem::make(problem);
    if (dim != 0) {
        p = Problem::make(p.kind, dim);
    }
    return p;
}

void ExperimentConfig::validate() const
{
    (void)make_problem();
    if (doe < 2) {
        throw std::invalid_argument("config: doe must be at least 2");
    }
    if (budget < doe) {
        throw std::invalid_argument("config: budget must be at least doe");
    }
    if (!std::isfinite(ref.y1) || !std::isfinite(ref.y2)) {
        throw std::invalid_argument("config: reference point must be finite");
    }
    if (repetitions < 1) {
        throw std::invalid_argument("config: repetitions must be at least 1");
    }
    if (maximizer.screen_per_dim < 1 || maximizer.refine_starts < 1) {
        throw std::invalid_argument("config: maximizer needs screening points and at least one start");
    }
    if (gp.full_refit_every < 1 || gp.starts < 1 || gp.max_iterations < 1) {
        throw std::invalid_argument("config: GP schedule values must be positive");
    }
}

ParetoFront2D RunRecord::final_front() const
{
    std::vector<Point2> ys;
    ys.reserve(rows.size());
    for (auto const& r : rows) {
        ys.push_back(r.y);
    }
    return ParetoFront2D::from_points(ys, ref);
}

namespace {
    // Hooke-Jeeves pattern search clipped to the box; strict improvements only.
    class PatternSearch {
    public:
        PatternSearch(ScoreFn const& score, double lo, double hi, std::size_t budget)
            : score_(score), lo_(lo), hi_(hi), budget_(budget)
        {
        }

        double run(std::vector<double>& x, double fx, double step, std::mt19937_64& eng)
        {
            std::size_t const d = x.size();
            dir_.assign(d, 1.0);
            order_.resize(d);
            std::iota(order_.begin(), order_.end(), std::size_t{0});
            double const min_step = 1e-9 * (hi_ - lo_);
            while (used_ < budget_ && step > min_step) {
                auto y = x;
                double fy = fx;
                explore(y, fy, step, eng);
                if (!(fy > fx)) {
                    step *= 0.5;
                    continue;
                }
                // pattern moves while they keep paying off
                while (used_ < budget_) {
                    std::vector<double> p(d);
                    for (std::size_t j = 0; j < d; ++j) {
                        p[j] = std::clamp(2.0 * y[j] - x[j], lo_, hi_);
                    }
                    x = y;
                    fx = fy;
                    if (p == y) {
                        break;
                    }
                    double fp = eval(p);
                    explore(p, fp, step, eng);
                    if (!(fp > fy)) {
                        break;
                    }
                    y = std::move(p);
                    fy = fp;
                }
                if (fy > fx) {
                    x = std::move(y);
                    fx = fy;
                }
            }
            return fx;
        }

    private:
        double eval(std::vector<double> const& y)
        {
            ++used_;
            return score_(y);
        }

        // One sweep over the coordinates in random order; each first tries
        // the direction that last succeeded.
        void explore(std::vector<double>& y, double& fy, double step, std::mt19937_64& eng)
        {
            std::shuffle(order_.begin(), order_.end(), eng);
            for (std::size_t j : order_) {
                double const keep = y[j];
                for (double sgn : {dir_[j], -dir_[j]}) {
                    if (used_ >= budget_) {
                        return;
                    }
                    double const v = std::clamp(keep + sgn * step, lo_, hi_);
                    if (v == keep) {
                        continue;
                    }
                    y[j] = v;
                    double const f = eval(y);
                    if (f > fy) {
                        fy = f;
                        dir_[j] = sgn;
                        break;
                    }
                    y[j] = keep;
                }
            }
        }

        ScoreFn const& score_;
        double lo_, hi_;
        std::size_t budget_;
        std::size_t used_{0};
        std::vector<double> dir_;
        std::vector<std::size_t> order_;
    };
} // namespace

std::vector<double> maximize_acquisition(ScoreFn const& score, std::size_t d, double lo, double hi,
                                         MaximizerSettings const& settings, std::uint64_t seed, Execution exec)
{
    if (d == 0 || !(lo < hi)) {
        throw std::invalid_argument("maximize_acquisition: empty box");
    }
    auto eng = substream(seed, 0);
    auto cand = latin_hypercube(settings.screen_per_dim * d, d, eng);
    for (auto& c : cand) {
        for (double& v : c) {
            v = lo + (hi - lo) * v;
        }
    }
    auto const m = static_cast<std::ptrdiff_t>(cand.size());
    std::vector<double> f(cand.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t k = 0; k < m; ++k) {
            f[static_cast<std::size_t>(k)] = score(cand[static_cast<std::size_t>(k)]);
        }
    } else {
        for (std::ptrdiff_t k = 0; k < m; ++k) {
            f[static_cast<std::size_t>(k)] = score(cand[static_cast<std::size_t>(k)]);
        }
    }
    for (double& v : f) {
        if (std::isnan(v)) {
            v = -std::numeric_limits<double>::infinity();
        }
    }

    // stable order keeps the first-found candidate ahead on ties
    std::vector<std::size_t> order(cand.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });

    std::vector<double> best = cand[order[0]];
    double best_f = f[order[0]];
    std::size_t const starts = std::min(settings.refine_starts, order.size());
    for (std::size_t s = 0; s < starts; ++s) {
        auto x = cand[order[s]];
        auto local = substream(seed, 1 + s);
        PatternSearch search(score, lo, hi, settings.refine_evals);
        double const fx = search.run(x, f[order[s]], settings.initial_step * (hi - lo), local);
        if (fx > best_f) {
            best_f = fx;
            best = std::move(x);
        }
    }
    return best;
}

std::uint64_t repetition_seed(std::uint64_t master, std::size_t k) noexcept
{
    return substream(master, 0x726570ULL + k)();
}

namespace {
    GpModel fit_objective(Eigen::MatrixXd const& X, Eigen::VectorXd const& y, Eigen::VectorXd const& widths,
                          std::optional<GpHyper> const& warm, bool full, GpSchedule const& gs, std::uint64_t seed)
    {
        GpFitOptions opt;
        opt.starts = full || !warm ? gs.starts : 0;
        opt.max_iterations = gs.max_iterations;
        opt.seed = seed;
        opt.warm_start = warm;
        try {
            return GpModel::fit(X, y, widths, opt);
        } catch (std::runtime_error const&) {
            // second attempt: drop the warm start and search from fresh starts
            opt.starts = gs.starts;
            opt.warm_start.reset();
            opt.seed = seed ^ 0x9e3779b97f4a7c15ULL;
            return GpModel::fit(X, y, widths, opt);
        }
    }
} // namespace

RunRecord run(ExperimentConfig const& cfg, std::uint64_t seed)
{
    cfg.validate();
    Problem const prob = cfg.make_problem();
    std::size_t const d = prob.dim;

    RunRecord rec;
    rec.problem = prob.name();
    rec.acquisition = std::string(to_string(cfg.acquisition.kind));
    rec.seed = seed;
    rec.ref = cfg.ref;

    std::vector<Point2> ys;
    auto append = [&](std::vector<double> x) {
        Point2 const y = prob.evaluate(x);
        ys.push_back(y);
        double const hv = hypervolume(ys, cfg.ref);
        rec.rows.push_back({rec.rows.size() + 1, std::move(x), y, hv});
    };

    for (auto& x : lhs({cfg.doe, substream(seed, 1)()}, d, prob.lo, prob.hi)) {
        append(std::move(x));
    }

    Eigen::VectorXd const widths = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), prob.hi - prob.lo);
    std::optional<GpHyper> warm1;
    std::optional<GpHyper> warm2;
    for (std::size_t t = 0; rec.rows.size() < cfg.budget; ++t) {
        auto const n = static_cast<Eigen::Index>(rec.rows.size());
        Eigen::MatrixXd X(n, static_cast<Eigen::Index>(d));
        Eigen::VectorXd y1(n);
        Eigen::VectorXd y2(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto const& row = rec.rows[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < d; ++k) {
                X(i, static_cast<Eigen::Index>(k)) = row.x[k];
            }
            y1[i] = row.y.y1;
            y2[i] = row.y.y2;
        }
        bool const full = t % static_cast<std::size_t>(cfg.gp.full_refit_every) == 0;
        auto const gp_seed = substream(seed, 2 + 2 * t)();
        std::optional<GpModel> m1;
        std::optional<GpModel> m2;
        try {
            m1 = fit_objective(X, y1, widths, warm1, full, cfg.gp, gp_seed);
            m2 = fit_objective(X, y2, widths, warm2, full, cfg.gp, gp_seed + 1);
        } catch (std::runtime_error const& e) {
            throw std::runtime_error("run aborted at iteration " + std::to_string(t) + " (" + rec.problem + ", "
                                     + rec.acquisition + ", seed " + std::to_string(seed)
                                     + "): surrogate fit failed: " + e.what());
        }
        warm1 = m1->hyper();
        warm2 = m2->hyper();

        auto const front = ParetoFront2D::from_points(ys, cfg.ref);
        int const it = static_cast<int>(t);
        ScoreFn const score = [&](std::span<double const> x) {
            Eigen::Map<Eigen::VectorXd const> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            try {
                return cfg.acquisition(predict(*m1, *m2, xv), front, it);
            } catch (std::domain_error const&) {
                // an unusable predictive law ranks last rather than ending the run
                return -std::numeric_limits<double>::infinity();
            }
        };
        auto x = maximize_acquisition(score, d, prob.lo, prob.hi, cfg.maximizer, substream(seed, 3 + 2 * t)());
        append(std::move(x));
    }
    return rec;
}

std::vector<RunOutcome> run_repetitions(ExperimentConfig const& cfg, Execution exec)
{
    cfg.validate();
    std::vector<RunOutcome> out(cfg.repetitions);
    auto one = [&](std::ptrdiff_t k) {
        auto& o = out[static_cast<std::size_t>(k)];
        o.repetition = static_cast<std::size_t>(k);
        o.seed = repetition_seed(cfg.seed, o.repetition);
        try {
            o.record = run(cfg, o.seed);
        } catch (std::exception const& e) {
            o.error = e.what();
        }
    };
    auto const reps = static_cast<std::ptrdiff_t>(cfg.repetitions);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t k = 0; k < reps; ++k) {
            one(k);
        }
    } else {
        for (std::ptrdiff_t k = 0; k < reps; ++k) {
            one(k);
        }
    }
    return out;
}

} // namespace hvi
