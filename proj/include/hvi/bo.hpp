#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvi/acquisition.hpp"
#include "hvi/distribution.hpp"
#include "hvi/pareto.hpp"
#include "hvi/problems.hpp"

namespace hvi {

struct MaximizerSettings {
    // Screening set size is screen_per_dim * d Latin-hypercube points.
    std::size_t screen_per_dim{100};
    // Best distinct screening points refined locally.
    std::size_t refine_starts{5};
    // Score evaluations per local refinement (upper bound).
    std::size_t refine_evals{200};
    // Initial pattern-search step as a fraction of the box width; halved
    // after every unsuccessful sweep.
    double initial_step{0.1};
};

struct GpSchedule {
    // Full multistart hyperparameter search every this many iterations
    // (and at the first); warm start from the previous fit otherwise.
    int full_refit_every{10};
    int starts{8};
    int max_iterations{200};
};

struct ExperimentConfig {
    std::string problem{"zdt1"};
    // 0 keeps the problem's default dimension.
    std::size_t dim{0};
    Acquisition acquisition{Acquisition::make(AcquisitionKind::EpsPoHvi)};
    std::size_t doe{30};
    std::size_t budget{200};
    Point2 ref{15.0, 15.0};
    std::size_t repetitions{15};
    std::uint64_t seed{0};
    MaximizerSettings maximizer{};
    GpSchedule gp{};

    Problem make_problem() const;
    // Throws std::invalid_argument when the configuration is unusable.
    void validate() const;
};

struct RunRow {
    // 1-based evaluation index; rows 1..doe are the initial design.
    std::size_t t{0};
    std::vector<double> x;
    Point2 y{};
    double hv_best{0.0};
};

struct RunRecord {
    std::string problem;
    std::string acquisition;
    std::uint64_t seed{0};
    Point2 ref{};
    std::vector<RunRow> rows;

    ParetoFront2D final_front() const;
};

using ScoreFn = std::function<double(std::span<double const>)>;

// Multi-start local search of score over [lo, hi]^d: screen_per_dim * d
// Latin-hypercube candidates, then Hooke-Jeeves pattern search clipped to the
// box from the best
// refine_starts. Strict improvement only, so ties keep the first point found.
// With Execution::Parallel the screening set is scored concurrently; score
// must then be thread-safe.
std::vector<double> maximize_acquisition(ScoreFn const& score, std::size_t d, double lo, double hi,
                                         MaximizerSettings const& settings, std::uint64_t seed,
                                         Execution exec = Execution::Parallel);

// Seed of repetition k derived from the master seed.
std::uint64_t repetition_seed(std::uint64_t master, std::size_t k) noexcept;

// One BO run with the given seed. Throws std::runtime_error with a
// diagnostic when the surrogate cannot be fitted.
RunRecord run(ExperimentConfig const& cfg, std::uint64_t seed);

struct RunOutcome {
    std::size_t repetition{0};
    std::uint64_t seed{0};
    std::optional<RunRecord> record;
    // Diagnostic of an aborted run.
    std::string error;
};

// cfg.repetitions independent runs seeded by repetition_seed(cfg.seed, k);
// with Execution::Parallel they run concurrently. Results are in repetition
// order and do not depend on the thread count.
std::vector<RunOutcome> run_repetitions(ExperimentConfig const& cfg, Execution exec = Execution::Parallel);

} // namespace hvi
