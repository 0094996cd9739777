#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hvi/bo.hpp"
#include "hvi/distribution.hpp"
#include "hvi/mc_oracle.hpp"
#include "hvi/pareto.hpp"

namespace hvi {

// Malformed input; line is 1-based (0 when not tied to a line).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string const& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// 17 significant digits, round-trips exactly.
std::string format_double(double v);

// Front file: "# ref: r1,r2" header, then one "y1,y2" pair per line.
void write_front(std::ostream& os, ParetoFront2D const& front);
// Throws ParseError on malformed lines, a missing reference or an empty front.
ParetoFront2D read_front(std::istream& is);

// "# problem/acquisition/seed/ref" comments, then t,x1..xd,f1,f2,hv_best.
void write_run(std::ostream& os, RunRecord const& rec);
RunRecord read_run(std::istream& is);

struct GridRow {
    double delta{0.0};
    double pdf{0.0};
    double cdf{0.0};
};
// Evenly spaced grid over the distribution's support.
std::vector<GridRow> distribution_grid(HviDistribution const& d, std::size_t points);
// delta,pdf,cdf[,mc_cdf]; mc_cdf is appended when samples are given.
void write_grid(std::ostream& os, std::span<GridRow const> rows, std::span<double const> mc_samples = {});

// n,t_exact_s,t_mc_s,ratio
void write_timing(std::ostream& os, std::span<TimingRow const> rows);

struct SummaryRow {
    std::size_t t{0};
    double mean_hv{0.0};
    // 1.96 * sd / sqrt(runs); 0 for a single run
    double ci95_half_width{0.0};
    std::size_t runs{0};
};
// Per-t mean best-so-far hypervolume over runs; rows up to the shortest run.
std::vector<SummaryRow> summarize(std::span<RunRecord const> runs);
void write_summary(std::ostream& os, std::span<SummaryRow const> rows);

struct EcdfCurve {
    std::string acquisition;
    std::size_t runs{0};
    // hitting[v][i]: first t with hv_best >= targets[v], SIZE_MAX if never
    std::vector<std::vector<std::size_t>> hitting;
    // ecdf[t - 1] for t = 1..horizon
    std::vector<double> ecdf;
};

struct EcdfReport {
    std::string problem;
    // log-evenly spaced over the pooled hv range, strictly increasing
    std::vector<double> targets;
    // added to hv values before taking logs (0 when the pooled minimum is positive)
    double shift{0.0};
    std::size_t horizon{0};
    std::vector<EcdfCurve> curves;
};

inline constexpr std::size_t kNeverHit = std::numeric_limits<std::size_t>::max();

// Targets pooled over every run; one curve per acquisition in first-seen order.
// Throws std::invalid_argument on an empty set or mixed problems.
EcdfReport runtime_ecdf(std::span<RunRecord const> runs, std::size_t n_targets = 10);
// acquisition,t,ecdf with a comment header listing the targets.
void write_ecdf(std::ostream& os, EcdfReport const& report);

// INI experiment description. Sections and keys (all optional):
//   [experiment]  problem, dim, acquisition, doe, budget, ref = r1,r2, repetitions, seed
//   [schedule]    kind = constant|exponential-decay|naive-ucb-omega|ucb-omega, a, b
//   [maximizer]   screen_per_dim, refine_starts, refine_evals, initial_step
//   [gp]          full_refit_every, starts, max_iterations
//   [quadrature]  abs_tol, max_subintervals, prune_sigmas, clip_sigmas
// Throws ParseError on syntax errors, unknown keys and invalid values.
ExperimentConfig read_config(std::istream& is);
void write_config(std::ostream& os, ExperimentConfig const& cfg);

} // namespace hvi
