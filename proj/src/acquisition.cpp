#include "hvi/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hvi/gauss.hpp"

namespace hvi {

namespace {
    // mass of [lo, min(hi, cap)) under N(mu, sigma); a Dirac for tiny sigma
    double axis_mass(double mu, double sigma, double lo, double hi, double cap)
    {
        hi = std::min(hi, cap);
        if (!(lo < hi)) {
            return 0.0;
        }
        if (sigma < kDiracSigma) {
            return (mu >= lo && mu < hi) ? 1.0 : 0.0;
        }
        return stdnorm::interval_mass((lo - mu) / sigma, (hi - mu) / sigma);
    }
} // namespace

double poi(BiGaussian const& pred, ParetoFront2D const& front)
{
    Point2 const r = front.ref();
    std::size_t const n = front.size();
    // non-dominated cells C(i, j), i + j <= n, share row j with column range
    // [q1(0), q1(n+1-j)), so each row is one rectangle
    double total = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        double const lo2 = front.q2(n + 1 - j);
        double const hi2 = front.q2(n - j);
        double const m2 = axis_mass(pred.mu2, pred.sigma2, lo2, hi2, r.y2);
        if (m2 == 0.0) {
            continue;
        }
        total += m2 * axis_mass(pred.mu1, pred.sigma1, -kInf, front.q1(n + 1 - j), r.y1);
    }
    return std::clamp(total, 0.0, 1.0);
}

double eps_poi(BiGaussian const& pred, ParetoFront2D const& front, double eps)
{
    if (!(eps >= 0.0)) {
        throw std::domain_error("eps_poi: eps must be non-negative");
    }
    BiGaussian shifted = pred;
    shifted.mu1 += eps;
    shifted.mu2 += eps;
    return poi(shifted, front);
}

double naive_ucb(BiGaussian const& pred, ParetoFront2D const& front, double omega)
{
    if (!(omega >= 0.0)) {
        throw std::domain_error("naive_ucb: omega must be non-negative");
    }
    return hvi_plus({pred.mu1 - omega * pred.sigma1, pred.mu2 - omega * pred.sigma2}, front);
}

double ucb(HviDistribution const& dist, double omega)
{
    return dist.quantile(omega);
}

namespace {
    // Below this, 1 - cdf is dominated by quadrature error and clipping.
    constexpr double kTailSwitch = 1e-6;
}

double log_eps_pohvi(HviDistribution const& dist, ParetoFront2D const& front, double eps)
{
    if (!(eps >= 0.0)) {
        throw std::domain_error("eps_pohvi: eps must be non-negative");
    }
    double const threshold = eps * hv2d(front);
    double const upper = threshold < dist.support_hi() ? std::clamp(1.0 - dist.cdf(threshold), 0.0, 1.0) : 0.0;
    if (upper >= kTailSwitch || !(threshold > 0.0)) {
        return std::log(upper);
    }
    return std::min(dist.log_tail(threshold), std::log(kTailSwitch));
}

double eps_pohvi(HviDistribution const& dist, ParetoFront2D const& front, double eps)
{
    return std::exp(log_eps_pohvi(dist, front, eps));
}

double schedule_value(Schedule const& s, int t)
{
    double const tt = static_cast<double>(std::max(t, 0));
    switch (s.kind) {
    case ScheduleKind::Constant:
        return s.a;
    case ScheduleKind::ExponentialDecay:
        return s.a * std::exp(-s.b * tt);
    case ScheduleKind::NaiveUcbOmega:
        if (t <= 1) {
            return s.a;
        }
        return std::min(std::sqrt(tt / std::log(tt)), s.a);
    case ScheduleKind::UcbOmega: {
        double const arg = std::max(std::log(s.b * std::max(tt, 1.0)), 0.0);
        return std::clamp(Phi({0.0, 1.0}, s.a * std::sqrt(arg)), 1e-6, 1.0 - 1e-6);
    }
    }
    return 0.0;
}

std::string_view to_string(AcquisitionKind k) noexcept
{
    switch (k) {
    case AcquisitionKind::PoI:
        return "poi";
    case AcquisitionKind::EpsPoI:
        return "eps-poi";
    case AcquisitionKind::NaiveUcb:
        return "naive-ucb";
    case AcquisitionKind::Ucb:
        return "ucb";
    case AcquisitionKind::EpsPoHvi:
        return "eps-pohvi";
    }
    return "?";
}

AcquisitionKind parse_acquisition(std::string_view name)
{
    for (auto k : {AcquisitionKind::PoI, AcquisitionKind::EpsPoI, AcquisitionKind::NaiveUcb, AcquisitionKind::Ucb,
                   AcquisitionKind::EpsPoHvi}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown acquisition: " + std::string(name));
}

Schedule default_schedule(AcquisitionKind k) noexcept
{
    switch (k) {
    case AcquisitionKind::PoI:
        return Schedule::constant(0.0);
    case AcquisitionKind::EpsPoI:
        return Schedule::constant(0.05);
    case AcquisitionKind::NaiveUcb:
        return Schedule::naive_ucb_omega();
    case AcquisitionKind::Ucb:
        return Schedule::ucb_omega();
    case AcquisitionKind::EpsPoHvi:
        return Schedule::exponential_decay(0.05, 0.02);
    }
    return {};
}

double Acquisition::operator()(BiGaussian const& pred, ParetoFront2D const& front, int t) const
{
    double const h = schedule_value(schedule, t);
    switch (kind) {
    case AcquisitionKind::PoI:
        return poi(pred, front);
    case AcquisitionKind::EpsPoI:
        return eps_poi(pred, front, h);
    case AcquisitionKind::NaiveUcb:
        return naive_ucb(pred, front, h);
    case AcquisitionKind::Ucb:
        return ucb(HviDistribution::build(front, pred, dist), h);
    case AcquisitionKind::EpsPoHvi:
        return log_eps_pohvi(HviDistribution::build(front, pred, dist), front, h);
    }
    return 0.0;
}

} // namespace hvi
