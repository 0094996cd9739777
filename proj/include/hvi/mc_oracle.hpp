#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hvi/distribution.hpp"
#include "hvi/pareto.hpp"
#include "hvi/quadrature.hpp"

namespace hvi {

struct McConfig {
    std::size_t n_samples{10000};
    std::uint64_t seed{0};
};

// Samples are drawn in chunks of this size, each from its own substream.
inline constexpr std::size_t kMcChunk = 4096;

// generalized HVI of n_samples draws y ~ pred, by hypervolume recomputation
// (O(n log n) per draw). Output is identical for Serial and Parallel.
std::vector<double> sample_hvi(ParetoFront2D const& front, BiGaussian const& pred, McConfig const& cfg,
                               Execution exec = Execution::Parallel);

// Generalized HVI of a single point from hypervolume differences; shares
// no code with the cell formula.
double hvi_by_recomputation(Point2 y, ParetoFront2D const& front);

// Fraction of samples <= delta. Throws std::domain_error on empty input.
double empirical_cdf(std::span<double const> samples, double delta);

struct TimingRow {
    std::size_t n{0};
    double t_exact_s{0.0};
    double t_mc_s{0.0};
};

struct TimingConfig {
    int repetitions{5};
    // Both methods produce the CDF on this many equally spaced deltas.
    std::size_t grid_points{32};
};

// Median single-threaded wall time of computing the CDF on a common grid,
// exactly (build + evaluate) and by MC (sample + empirical CDF), one row per
// front. A warm-up run per method is discarded.
std::vector<TimingRow> timing_comparison(std::span<ParetoFront2D const> fronts, BiGaussian const& pred,
                                         McConfig const& mc, QuadratureConfig const& quad,
                                         TimingConfig const& timing = {});

// Front of n points near the segment y2 = c - y1 inside (0, r) with jitter.
ParetoFront2D segment_front(std::size_t n, Point2 ref, std::uint64_t seed);

} // namespace hvi
