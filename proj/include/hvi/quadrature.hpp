#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hvi {

struct QuadratureConfig {
    double abs_tol{1e-8};
    int max_subintervals{50};
};

struct QuadratureResult {
    double value{0.0};
    double error{0.0};
    bool converged{true};
};

namespace gk21 {
    // Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
    inline constexpr std::array<double, 11> kNodes{
        0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
        0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
        0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
        0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
        0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
        0.000000000000000000000000000000000,
    };
    inline constexpr std::array<double, 11> kKronrodWeights{
        0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
        0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
        0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
        0.123491976262065851077600634750734, 0.134709217311473325928054001771707,
        0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
        0.149445554002916905664936468389821,
    };
    inline constexpr std::array<double, 5> kGaussWeights{
        0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
        0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
        0.295524224714752870173892994651338,
    };

    struct Segment {
        double a, b, value, error;
    };

    // Single 21-point rule with the QUADPACK error heuristic.
    template<class F>
    Segment apply(F& f, double a, double b)
    {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        double const centre = 0.5 * (a + b);
        double const half = 0.5 * (b - a);

        std::array<double, 10> left{}, right{};
        double const fc = f(centre);
        double resk = kKronrodWeights[10] * fc;
        double resg = 0.0;
        double resabs = std::abs(resk);
        for (std::size_t k = 0; k < 10; ++k) {
            double const dx = half * kNodes[k];
            double const f1 = f(centre - dx);
            double const f2 = f(centre + dx);
            left[k] = f1;
            right[k] = f2;
            resk += kKronrodWeights[k] * (f1 + f2);
            resabs += kKronrodWeights[k] * (std::abs(f1) + std::abs(f2));
            if (k % 2 == 1) {
                resg += kGaussWeights[k / 2] * (f1 + f2);
            }
        }
        double const mean = 0.5 * resk;
        double resasc = kKronrodWeights[10] * std::abs(fc - mean);
        for (std::size_t k = 0; k < 10; ++k) {
            resasc += kKronrodWeights[k] * (std::abs(left[k] - mean) + std::abs(right[k] - mean));
        }
        double const ah = std::abs(half);
        resasc *= ah;
        resabs *= ah;
        double err = std::abs((resk - resg) * half);
        if (resasc != 0.0 && err != 0.0) {
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        }
        if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
            err = std::max(50.0 * eps * resabs, err);
        }
        if (!std::isfinite(resk) || !std::isfinite(err)) {
            throw std::runtime_error("integrate: integrand returned a non-finite value");
        }
        return {a, b, resk * half, err};
    }
} // namespace gk21

/// Globally adaptive 21-point Gauss-Kronrod quadrature on a finite [a, b].
///
/// The segment with the largest error estimate is bisected until the summed
/// estimate drops to cfg.abs_tol or the partition holds cfg.max_subintervals
/// segments. A non-converged result keeps the best value and sets
/// `converged = false`.
template<class F>
QuadratureResult integrate(F&& f, double a, double b, QuadratureConfig const& cfg = {})
{
    if (!(std::isfinite(a) && std::isfinite(b)) || a > b) {
        throw std::invalid_argument("integrate: limits must be finite with a <= b");
    }
    if (a == b) {
        return {0.0, 0.0, true};
    }
    auto by_error = [](gk21::Segment const& x, gk21::Segment const& y) { return x.error < y.error; };

    std::vector<gk21::Segment> heap;
    heap.reserve(static_cast<std::size_t>(std::max(cfg.max_subintervals, 1)));
    heap.push_back(gk21::apply(f, a, b));
    double total_err = heap.front().error;

    while (total_err > cfg.abs_tol && static_cast<int>(heap.size()) < cfg.max_subintervals) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        gk21::Segment const worst = heap.back();
        double const mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            break; // segment no longer representable
        }
        heap.back() = gk21::apply(f, worst.a, mid);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(gk21::apply(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end(), by_error);

        total_err = 0.0;
        for (auto const& s : heap) {
            total_err += s.error;
        }
    }

    double value = 0.0;
    for (auto const& s : heap) {
        value += s.value;
    }
    return {value, total_err, total_err <= cfg.abs_tol};
}

} // namespace hvi
