#include "hvi/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hvi {

bool weakly_dominates(Point2 a, Point2 b) noexcept { return a.y1 <= b.y1 && a.y2 <= b.y2; }

bool dominates(Point2 a, Point2 b) noexcept { return weakly_dominates(a, b) && a != b; }

std::vector<Point2> non_dominated_filter(std::span<Point2 const> points)
{
    std::vector<Point2> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](Point2 a, Point2 b) {
        return a.y1 < b.y1 || (a.y1 == b.y1 && a.y2 < b.y2);
    });
    std::vector<Point2> front;
    front.reserve(sorted.size());
    for (auto const& p : sorted) {
        if (front.empty() || p.y2 < front.back().y2) {
            front.push_back(p);
        }
    }
    return front;
}

double hypervolume(std::span<Point2 const> points, Point2 ref)
{
    std::vector<Point2> inside;
    inside.reserve(points.size());
    for (auto const& p : points) {
        if (p.y1 < ref.y1 && p.y2 < ref.y2) {
            inside.push_back(p);
        }
    }
    std::sort(inside.begin(), inside.end(), [](Point2 a, Point2 b) {
        return a.y1 < b.y1 || (a.y1 == b.y1 && a.y2 < b.y2);
    });
    double hv = 0.0;
    double level = ref.y2;
    for (auto const& p : inside) {
        if (p.y2 < level) {
            hv += (ref.y1 - p.y1) * (level - p.y2);
            level = p.y2;
        }
    }
    return hv;
}

ParetoFront2D::ParetoFront2D(std::vector<Point2> points, Point2 ref) : points_(std::move(points)), ref_(ref)
{
    if (!std::isfinite(ref.y1) || !std::isfinite(ref.y2)) {
        throw std::invalid_argument("ParetoFront2D: reference point must be finite");
    }
    for (std::size_t k = 0; k < points_.size(); ++k) {
        auto const& p = points_[k];
        if (!std::isfinite(p.y1) || !std::isfinite(p.y2)) {
            throw std::invalid_argument("ParetoFront2D: non-finite point");
        }
        if (!(p.y1 < ref.y1 && p.y2 < ref.y2)) {
            throw std::invalid_argument("ParetoFront2D: point does not strictly dominate the reference point");
        }
        if (k > 0 && !(points_[k - 1].y1 < p.y1 && points_[k - 1].y2 > p.y2)) {
            throw std::invalid_argument("ParetoFront2D: points must ascend strictly in y1 and descend strictly in y2");
        }
    }

    std::size_t const n = points_.size();
    q1_.resize(n + 2);
    q2_.resize(n + 2);
    q1_[0] = -kInf;
    q2_[0] = ref.y2;
    for (std::size_t k = 0; k < n; ++k) {
        q1_[k + 1] = points_[k].y1;
        q2_[k + 1] = points_[k].y2;
    }
    q1_[n + 1] = ref.y1;
    q2_[n + 1] = -kInf;

    prefix_wq2_.assign(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        prefix_wq2_[k] = prefix_wq2_[k - 1] + (q1_[k + 1] - q1_[k]) * q2_[k];
    }

    double level = ref.y2;
    for (auto const& p : points_) {
        hv_ += (ref.y1 - p.y1) * (level - p.y2);
        level = p.y2;
    }
}

ParetoFront2D ParetoFront2D::from_points(std::span<Point2 const> points, Point2 ref)
{
    std::vector<Point2> inside;
    inside.reserve(points.size());
    for (auto const& p : points) {
        if (std::isfinite(p.y1) && std::isfinite(p.y2) && p.y1 < ref.y1 && p.y2 < ref.y2) {
            inside.push_back(p);
        }
    }
    return ParetoFront2D(non_dominated_filter(inside), ref);
}

std::size_t ParetoFront2D::column_of(double y1) const noexcept
{
    auto it = std::upper_bound(points_.begin(), points_.end(), y1,
                               [](double v, Point2 const& p) { return v < p.y1; });
    return static_cast<std::size_t>(it - points_.begin());
}

std::size_t ParetoFront2D::row_of(double y2) const noexcept
{
    // y2 descends along the front, so points with p.y2 <= y2 form a suffix
    auto it = std::partition_point(points_.begin(), points_.end(), [y2](Point2 const& p) { return p.y2 > y2; });
    return static_cast<std::size_t>(points_.end() - it);
}

double ParetoFront2D::weighted_sum(std::size_t a, std::size_t b) const noexcept
{
    if (a > b) {
        return 0.0;
    }
    return prefix_wq2_[b] - prefix_wq2_[a - 1];
}

double ParetoFront2D::nondominated_offset(std::size_t i, std::size_t j) const noexcept
{
    std::size_t const n = size();
    std::size_t const a = i + 1;
    std::size_t const b = n - j;
    if (a > b) {
        return 0.0;
    }
    // minus the area already dominated by q(a..b) inside the anchored box
    double const width = q1_[b + 1] - q1_[a];
    return -(q2_[i] * width - weighted_sum(a, b));
}

double ParetoFront2D::dominated_offset(std::size_t i, std::size_t j) const noexcept
{
    std::size_t const n = size();
    std::size_t const a = n + 1 - j;
    std::size_t const b = i;
    if (a >= b) {
        return 0.0;
    }
    // minus the non-dominated area between the staircase q(a..b) and the anchor
    return q2_[b] * (q1_[b] - q1_[a]) - weighted_sum(a, b - 1);
}

double hv2d(ParetoFront2D const& front) noexcept { return front.hypervolume(); }

namespace {
    Point2 clip_to_ref(Point2 y, Point2 ref) noexcept { return {std::min(y.y1, ref.y1), std::min(y.y2, ref.y2)}; }

    double plus_in_cell(Point2 y, ParetoFront2D const& f, std::size_t i, std::size_t j) noexcept
    {
        std::size_t const n = f.size();
        double const v = (f.q1(n + 1 - j) - y.y1) * (f.q2(i) - y.y2) + f.nondominated_offset(i, j);
        return v > 0.0 ? v : 0.0;
    }

    double minus_in_cell(Point2 y, ParetoFront2D const& f, std::size_t i, std::size_t j) noexcept
    {
        std::size_t const n = f.size();
        double const v = -((y.y1 - f.q1(n + 1 - j)) * (y.y2 - f.q2(i)) + f.dominated_offset(i, j));
        return v < 0.0 ? v : 0.0;
    }
} // namespace

double hvi_plus(Point2 y, ParetoFront2D const& front) noexcept
{
    Point2 const r = front.ref();
    if (!(y.y1 < r.y1 && y.y2 < r.y2)) {
        return 0.0;
    }
    std::size_t const i = front.column_of(y.y1);
    std::size_t const j = front.row_of(y.y2);
    if (i + j > front.size()) {
        return 0.0;
    }
    return plus_in_cell(y, front, i, j);
}

bool weakly_dominated_by_augmented(Point2 y, ParetoFront2D const& front) noexcept
{
    Point2 const yc = clip_to_ref(y, front.ref());
    if (yc.y1 >= front.ref().y1 || yc.y2 >= front.ref().y2) {
        return true;
    }
    std::size_t const c = front.column_of(yc.y1);
    return c > 0 && front.points()[c - 1].y2 <= yc.y2;
}

double hvi_minus(Point2 y, ParetoFront2D const& front)
{
    if (!weakly_dominated_by_augmented(y, front)) {
        throw std::domain_error("hvi_minus: point lies in the non-dominated region");
    }
    Point2 const yc = clip_to_ref(y, front.ref());
    std::size_t const i = front.column_of(yc.y1);
    std::size_t const j = front.row_of(yc.y2);
    if (i + j <= front.size()) {
        return 0.0; // on the outer boundary of a non-dominated cell
    }
    return minus_in_cell(yc, front, i, j);
}

double generalized_hvi(Point2 y, ParetoFront2D const& front) noexcept
{
    Point2 const yc = clip_to_ref(y, front.ref());
    std::size_t const i = front.column_of(yc.y1);
    std::size_t const j = front.row_of(yc.y2);
    if (i + j <= front.size()) {
        return plus_in_cell(yc, front, i, j);
    }
    return minus_in_cell(yc, front, i, j);
}

Cell cell_at(ParetoFront2D const& front, std::size_t i, std::size_t j) noexcept
{
    std::size_t const n = front.size();
    Cell c;
    c.i = i;
    c.j = j;
    c.lower = {front.q1(i), front.q2(n + 1 - j)};
    c.upper = {front.q1(i + 1), front.q2(n - j)};
    c.side = (i + j <= n) ? CellSide::NonDominated : CellSide::Dominated;
    return c;
}

std::vector<Cell> decompose_cells(ParetoFront2D const& front)
{
    std::size_t const m = front.size() + 1;
    std::vector<Cell> cells;
    cells.reserve(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cells.push_back(cell_at(front, i, j));
        }
    }
    return cells;
}

} // namespace hvi
