#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hvi/pareto.hpp"

namespace hvi {

enum class ProblemKind { Zdt1, Zdt2, Zdt3, Zdt4, Zdt6 };

/// Bi-objective ZDT benchmark on the box [lo, hi]^dim.
struct Problem {
    ProblemKind kind{ProblemKind::Zdt1};
    std::size_t dim{30};
    double lo{0.0};
    double hi{1.0};

    // "zdt1", "zdt2", "zdt3", "zdt4", "zdt6" (case-insensitive) with the
    // default dimension: 30 for ZDT1-3, 10 for ZDT4 and ZDT6.
    // Throws std::invalid_argument for unknown names.
    static Problem make(std::string_view name);
    static Problem make(ProblemKind kind, std::size_t dim);

    std::string name() const;
    // Throws std::domain_error when x has the wrong size or leaves the box.
    Point2 evaluate(std::span<double const> x) const;
};

struct DoePlan {
    std::size_t n_points{30};
    std::uint64_t seed{0};
    // Random Latin hypercubes drawn; the one with the largest minimum pairwise distance is kept.
    std::size_t candidates{20};
};

// Maximin Latin-hypercube design on [lo, hi]^dim; one point per row.
std::vector<std::vector<double>> lhs(DoePlan const& plan, std::size_t dim, double lo = 0.0, double hi = 1.0);

} // namespace hvi
