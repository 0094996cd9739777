#include "hvi/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hvi/rng.hpp"

namespace hvi {

namespace {
    std::string lower(std::string_view s)
    {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
        return out;
    }

    double tail_sum(std::span<double const> x)
    {
        double s = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            s += x[i];
        }
        return s;
    }
} // namespace

Problem Problem::make(ProblemKind kind, std::size_t dim)
{
    if (dim < 2) {
        throw std::invalid_argument("Problem: ZDT needs at least two decision variables");
    }
    return {kind, dim, 0.0, 1.0};
}

Problem Problem::make(std::string_view name)
{
    auto const n = lower(name);
    if (n == "zdt1") {
        return make(ProblemKind::Zdt1, 30);
    }
    if (n == "zdt2") {
        return make(ProblemKind::Zdt2, 30);
    }
    if (n == "zdt3") {
        return make(ProblemKind::Zdt3, 30);
    }
    if (n == "zdt4") {
        return make(ProblemKind::Zdt4, 10);
    }
    if (n == "zdt6") {
        return make(ProblemKind::Zdt6, 10);
    }
    throw std::invalid_argument("unknown problem: " + std::string(name));
}

std::string Problem::name() const
{
    switch (kind) {
    case ProblemKind::Zdt1:
        return "zdt1";
    case ProblemKind::Zdt2:
        return "zdt2";
    case ProblemKind::Zdt3:
        return "zdt3";
    case ProblemKind::Zdt4:
        return "zdt4";
    case ProblemKind::Zdt6:
        return "zdt6";
    }
    return "?";
}

Point2 Problem::evaluate(std::span<double const> x) const
{
    if (x.size() != dim) {
        throw std::domain_error("Problem::evaluate: wrong dimension");
    }
    for (double v : x) {
        if (!(v >= lo && v <= hi)) {
            throw std::domain_error("Problem::evaluate: x outside the box");
        }
    }
    double const m1 = static_cast<double>(dim - 1);
    switch (kind) {
    case ProblemKind::Zdt1: {
        double const f1 = x[0];
        double const g = 1.0 + 9.0 * tail_sum(x) / m1;
        return {f1, g * (1.0 - std::sqrt(f1 / g))};
    }
    case ProblemKind::Zdt2: {
        double const f1 = x[0];
        double const g = 1.0 + 9.0 * tail_sum(x) / m1;
        return {f1, g * (1.0 - (f1 / g) * (f1 / g))};
    }
    case ProblemKind::Zdt3: {
        double const f1 = x[0];
        double const g = 1.0 + 9.0 * tail_sum(x) / m1;
        return {f1, g * (1.0 - std::sqrt(f1 / g) - f1 / g * std::sin(10.0 * std::numbers::pi * f1))};
    }
    case ProblemKind::Zdt4: {
        double const f1 = x[0];
        double g = 1.0 + 10.0 * m1;
        for (std::size_t i = 1; i < dim; ++i) {
            g += x[i] * x[i] - 10.0 * std::cos(4.0 * std::numbers::pi * x[i]);
        }
        return {f1, g * (1.0 - std::sqrt(f1 / g))};
    }
    case ProblemKind::Zdt6: {
        double const f1 = 1.0 - std::exp(-4.0 * x[0]) * std::pow(std::sin(6.0 * std::numbers::pi * x[0]), 6);
        double const g = 1.0 + 9.0 * std::pow(tail_sum(x) / m1, 0.25);
        return {f1, g * (1.0 - (f1 / g) * (f1 / g))};
    }
    }
    return {};
}

std::vector<std::vector<double>> lhs(DoePlan const& plan, std::size_t dim, double lo, double hi)
{
    auto eng = substream(plan.seed, 0x6c6873);
    std::vector<std::vector<double>> best;
    double best_score = -1.0;
    for (std::size_t c = 0; c < std::max<std::size_t>(plan.candidates, 1); ++c) {
        auto pts = latin_hypercube(plan.n_points, dim, eng);
        double score = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < dim; ++k) {
                    d2 += (pts[a][k] - pts[b][k]) * (pts[a][k] - pts[b][k]);
                }
                score = std::min(score, d2);
            }
        }
        if (score > best_score) {
            best_score = score;
            best = std::move(pts);
        }
    }
    for (auto& p : best) {
        for (double& v : p) {
            v = lo + (hi - lo) * v;
        }
    }
    return best;
}

} // namespace hvi
