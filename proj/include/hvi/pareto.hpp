#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hvi/gauss.hpp"

namespace hvi {

// Bi-objective point, both objectives minimised.
struct Point2 {
    double y1{0.0};
    double y2{0.0};
    friend bool operator==(Point2 const&, Point2 const&) = default;
};

bool weakly_dominates(Point2 a, Point2 b) noexcept;
// Pareto order: weak dominance between distinct points.
bool dominates(Point2 a, Point2 b) noexcept;

// Minimal elements under the Pareto order, duplicates collapsed, sorted by y1.
std::vector<Point2> non_dominated_filter(std::span<Point2 const> points);

// Hypervolume of an arbitrary point set w.r.t. ref (sort + sweep, O(n log n)).
// Points not strictly dominating ref contribute nothing.
double hypervolume(std::span<Point2 const> points, Point2 ref);

/// Mutually non-dominated 2-D set with its reference point.
///
/// Stores the augmented front q(0..n+1) where q(0) = (-inf, r2) and
/// q(n+1) = (r1, -inf), so q1 ascends and q2 descends strictly. Prefix sums
/// over the staircase make every cell offset an O(1) lookup.
class ParetoFront2D {
public:
    ParetoFront2D() = default;
    // Throws std::invalid_argument unless points ascend strictly in y1,
    // descend strictly in y2 and strictly dominate ref.
    ParetoFront2D(std::vector<Point2> points, Point2 ref);

    // Filters an arbitrary set: drops dominated points and points that do
    // not strictly dominate ref.
    static ParetoFront2D from_points(std::span<Point2 const> points, Point2 ref);

    std::span<Point2 const> points() const noexcept { return points_; }
    Point2 ref() const noexcept { return ref_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    double q1(std::size_t k) const noexcept { return q1_[k]; }
    double q2(std::size_t k) const noexcept { return q2_[k]; }

    double hypervolume() const noexcept { return hv_; }

    // Column i with q1(i) <= y1 < q1(i+1); y1 >= r1 maps to column n.
    std::size_t column_of(double y1) const noexcept;
    // Row j with q2(n+1-j) <= y2 < q2(n-j); y2 >= r2 maps to row n.
    std::size_t row_of(double y2) const noexcept;

    // Offset gamma of the anchored product inside cell (i, j), i + j <= n:
    // hvi_plus(y) = (q1(n+1-j) - y1)(q2(i) - y2) + offset.
    double nondominated_offset(std::size_t i, std::size_t j) const noexcept;
    // Offset inside a dominated cell (i + j > n):
    // hvi_minus(y) = -[(y1 - q1(n+1-j))(y2 - q2(i)) + offset].
    double dominated_offset(std::size_t i, std::size_t j) const noexcept;

private:
    // sum_{k=a}^{b} (q1(k+1) - q1(k)) * q2(k), for 1 <= a, b <= n
    double weighted_sum(std::size_t a, std::size_t b) const noexcept;

    std::vector<Point2> points_;
    Point2 ref_{};
    std::vector<double> q1_, q2_;
    std::vector<double> prefix_wq2_;
    double hv_{0.0};
};

double hv2d(ParetoFront2D const& front) noexcept;

double hvi_plus(Point2 y, ParetoFront2D const& front) noexcept;
// Throws std::domain_error when y is not weakly dominated by the augmented front.
double hvi_minus(Point2 y, ParetoFront2D const& front);
double generalized_hvi(Point2 y, ParetoFront2D const& front) noexcept;

// Whether some point of the augmented front weakly dominates y clipped to ref.
bool weakly_dominated_by_augmented(Point2 y, ParetoFront2D const& front) noexcept;

enum class CellSide { NonDominated, Dominated };

struct Cell {
    std::size_t i{0};
    std::size_t j{0};
    Point2 lower{};
    Point2 upper{};
    CellSide side{CellSide::NonDominated};
};

Cell cell_at(ParetoFront2D const& front, std::size_t i, std::size_t j) noexcept;

// All (n+1)^2 cells, ordered by i then j.
std::vector<Cell> decompose_cells(ParetoFront2D const& front);

} // namespace hvi
