#pragma once

#include <string>
#include <string_view>

#include "hvi/distribution.hpp"
#include "hvi/pareto.hpp"

namespace hvi {

// P(y in the non-dominated region of the front, strictly inside the reference box).
double poi(BiGaussian const& pred, ParetoFront2D const& front);
// poi at the mean shifted by +eps on both objectives. Throws std::domain_error for eps < 0.
double eps_poi(BiGaussian const& pred, ParetoFront2D const& front, double eps);
// hvi_plus of the optimistic point mu - omega * sigma. Throws std::domain_error for omega < 0.
double naive_ucb(BiGaussian const& pred, ParetoFront2D const& front, double omega);
// omega-quantile of the HVI law.
double ucb(HviDistribution const& dist, double omega);
// P(HVI > eps * HV(front)). Throws std::domain_error for eps < 0.
double eps_pohvi(HviDistribution const& dist, ParetoFront2D const& front, double eps);
// log of eps_pohvi. Values below 1e-6 come from HviDistribution::log_tail
// instead of 1 - cdf, so far-tail candidates keep a finite, ordered score.
double log_eps_pohvi(HviDistribution const& dist, ParetoFront2D const& front, double eps);

enum class ScheduleKind { Constant, ExponentialDecay, NaiveUcbOmega, UcbOmega };

/// Iteration-dependent acquisition hyperparameter.
///
///   Constant:         a
///   ExponentialDecay: a * exp(-b t)
///   NaiveUcbOmega:    min(sqrt(t / ln t), a), and a for t in {0, 1}
///   UcbOmega:         Phi(a sqrt(ln(b max(t, 1)))), clamped to [1e-6, 1 - 1e-6]
struct Schedule {
    ScheduleKind kind{ScheduleKind::Constant};
    double a{0.0};
    double b{0.0};

    static Schedule constant(double v) { return {ScheduleKind::Constant, v, 0.0}; }
    static Schedule exponential_decay(double a0, double rate) { return {ScheduleKind::ExponentialDecay, a0, rate}; }
    static Schedule naive_ucb_omega(double cap = 10.0) { return {ScheduleKind::NaiveUcbOmega, cap, 0.0}; }
    static Schedule ucb_omega(double scale = 0.55, double factor = 25.0) { return {ScheduleKind::UcbOmega, scale, factor}; }
};

double schedule_value(Schedule const& s, int t);

enum class AcquisitionKind { PoI, EpsPoI, NaiveUcb, Ucb, EpsPoHvi };

// "poi", "eps-poi", "naive-ucb", "ucb", "eps-pohvi"
std::string_view to_string(AcquisitionKind k) noexcept;
// Throws std::invalid_argument for unknown names.
AcquisitionKind parse_acquisition(std::string_view name);

// Experiment defaults: eps-PoI 0.05; eps-PoHVI 0.05 exp(-0.02 t);
// naive-UCB sqrt(t / ln t); UCB Phi(0.55 sqrt(ln 25 t)).
Schedule default_schedule(AcquisitionKind k) noexcept;

struct Acquisition {
    AcquisitionKind kind{AcquisitionKind::EpsPoHvi};
    Schedule schedule{default_schedule(AcquisitionKind::EpsPoHvi)};
    DistributionConfig dist{};

    static Acquisition make(AcquisitionKind k) { return {k, default_schedule(k), {}}; }

    // Acquisition value at iteration t; larger is better. eps-PoHVI is scored
    // by its logarithm, which ranks candidates identically and does not
    // flatten to zero in the far tail.
    double operator()(BiGaussian const& pred, ParetoFront2D const& front, int t) const;
};

} // namespace hvi
