#include "hvi/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>
#include <glog/logging.h>

#include "hvi/rng.hpp"

namespace hvi {

namespace {
    constexpr double kJitterStart = 1e-10;
    constexpr double kJitterMax = 1e-4;
    constexpr double kLengthLo = 1e-2;
    constexpr double kLengthHi = 1e2;
    constexpr double kSignalLo = 1e-6;
    constexpr double kSignalHi = 1e3;
    double const kSqrt5 = std::sqrt(5.0);

    double scaled_distance(Eigen::Ref<Eigen::VectorXd const> a, Eigen::Ref<Eigen::VectorXd const> b,
                           Eigen::VectorXd const& inv_len)
    {
        return ((a - b).cwiseProduct(inv_len)).norm();
    }

    // Cholesky of K + jitter I with tenfold escalation; returns the jitter used or NaN.
    double factor_with_jitter(Eigen::MatrixXd const& K, Eigen::LLT<Eigen::MatrixXd>& llt)
    {
        auto const n = K.rows();
        for (double jit = kJitterStart; jit <= kJitterMax * (1 + 1e-9); jit *= 10.0) {
            llt.compute(K + jit * Eigen::MatrixXd::Identity(n, n));
            if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()
                && (llt.matrixLLT().diagonal().array() > 0.0).all()) {
                return jit;
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    struct Box {
        Eigen::VectorXd lo;
        Eigen::VectorXd hi;
    };

    Box hyper_box(Eigen::VectorXd const& widths)
    {
        auto const d = widths.size();
        Box b{Eigen::VectorXd(d + 1), Eigen::VectorXd(d + 1)};
        for (Eigen::Index k = 0; k < d; ++k) {
            b.lo[k] = std::log(kLengthLo * widths[k]);
            b.hi[k] = std::log(kLengthHi * widths[k]);
        }
        b.lo[d] = std::log(kSignalLo);
        b.hi[d] = std::log(kSignalHi);
        return b;
    }

    GpHyper unpack(Eigen::VectorXd const& theta)
    {
        auto const d = theta.size() - 1;
        return {theta.head(d), theta[d]};
    }

    Eigen::VectorXd pack(GpHyper const& h)
    {
        Eigen::VectorXd theta(h.log_lengthscales.size() + 1);
        theta << h.log_lengthscales, h.log_signal_variance;
        return theta;
    }

    double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

    // Negative LML over unconstrained u, theta = lo + (hi - lo) * sigmoid(u).
    class NegLml final : public ceres::FirstOrderFunction {
    public:
        NegLml(Eigen::MatrixXd const& X, Eigen::VectorXd const& z, Box const& box) : X_(X), z_(z), box_(box) {}

        bool Evaluate(double const* u, double* cost, double* gradient) const override
        {
            auto const p = box_.lo.size();
            Eigen::Map<Eigen::VectorXd const> uv(u, p);
            Eigen::VectorXd theta(p);
            Eigen::VectorXd dtheta(p);
            for (Eigen::Index k = 0; k < p; ++k) {
                double const s = sigmoid(uv[k]);
                theta[k] = box_.lo[k] + (box_.hi[k] - box_.lo[k]) * s;
                dtheta[k] = (box_.hi[k] - box_.lo[k]) * s * (1.0 - s);
            }
            Eigen::VectorXd g;
            auto const lml = GpModel::log_marginal_likelihood(X_, z_, unpack(theta), gradient ? &g : nullptr);
            if (!lml || !std::isfinite(*lml)) {
                return false;
            }
            *cost = -*lml;
            if (gradient) {
                for (Eigen::Index k = 0; k < p; ++k) {
                    gradient[k] = -g[k] * dtheta[k];
                }
            }
            return true;
        }

        int NumParameters() const override { return static_cast<int>(box_.lo.size()); }

    private:
        Eigen::MatrixXd const& X_;
        Eigen::VectorXd const& z_;
        Box const& box_;
    };

    double to_unconstrained(double theta, double lo, double hi)
    {
        double const s = std::clamp((theta - lo) / (hi - lo), 1e-6, 1.0 - 1e-6);
        return std::log(s / (1.0 - s));
    }
} // namespace

Eigen::MatrixXd matern52(Eigen::MatrixXd const& A, Eigen::MatrixXd const& B, GpHyper const& hyper)
{
    Eigen::VectorXd const inv_len = (-hyper.log_lengthscales.array()).exp();
    double const s2 = std::exp(hyper.log_signal_variance);
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            double const r = scaled_distance(A.row(i).transpose(), B.row(j).transpose(), inv_len);
            K(i, j) = s2 * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r);
        }
    }
    return K;
}

std::optional<double> GpModel::log_marginal_likelihood(Eigen::MatrixXd const& X, Eigen::VectorXd const& z,
                                                       GpHyper const& hyper, Eigen::VectorXd* grad)
{
    auto const n = X.rows();
    auto const d = X.cols();
    Eigen::MatrixXd const K = matern52(X, X, hyper);
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (std::isnan(factor_with_jitter(K, llt))) {
        return std::nullopt;
    }
    Eigen::VectorXd const alpha = llt.solve(z);
    double const logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    double const lml = -0.5 * z.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    if (grad) {
        grad->resize(d + 1);
        // dLML/dtheta = 0.5 tr(W dK), W = alpha alpha^T - K^-1
        Eigen::MatrixXd W = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
        Eigen::VectorXd const inv_len = (-hyper.log_lengthscales.array()).exp();
        double const s2 = std::exp(hyper.log_signal_variance);
        // M = W o s2 (5/3)(1 + sqrt5 r) exp(-sqrt5 r)
        Eigen::MatrixXd M(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                double const r = scaled_distance(X.row(i).transpose(), X.row(j).transpose(), inv_len);
                M(i, j) = W(i, j) * s2 * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
            }
        }
        Eigen::VectorXd const m = M.rowwise().sum();
        for (Eigen::Index k = 0; k < d; ++k) {
            Eigen::VectorXd const xk = X.col(k);
            // sum_ij M_ij (x_ik - x_jk)^2 = 2 (sum_i x_ik^2 m_i - x_k^T M x_k)
            double const quad = xk.array().square().matrix().dot(m) - xk.dot(M * xk);
            (*grad)[k] = quad * inv_len[k] * inv_len[k];
        }
        (*grad)[d] = 0.5 * (W.cwiseProduct(K)).sum();
    }
    return lml;
}

void GpModel::factorize()
{
    Eigen::MatrixXd const K = matern52(X_, X_, hyper_);
    jitter_ = factor_with_jitter(K, llt_);
    if (std::isnan(jitter_)) {
        throw std::runtime_error("GpModel: covariance not positive definite after jitter escalation");
    }
    alpha_ = llt_.solve(z_);
    double const logdet = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    lml_ = -0.5 * z_.dot(alpha_) - 0.5 * logdet
           - 0.5 * static_cast<double>(X_.rows()) * std::log(2.0 * std::numbers::pi);
}

namespace {
    void standardize(Eigen::VectorXd const& y, Eigen::VectorXd& z, double& mean, double& scale)
    {
        mean = y.mean();
        double const var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
        scale = var > 0.0 ? std::sqrt(var) : 1.0;
        z = (y.array() - mean) / scale;
    }

    void check_data(Eigen::MatrixXd const& X, Eigen::VectorXd const& y)
    {
        if (X.rows() < 1 || X.rows() != y.size() || X.cols() < 1) {
            throw std::invalid_argument("GpModel: X and y must be non-empty with matching rows");
        }
        if (!X.allFinite() || !y.allFinite()) {
            throw std::invalid_argument("GpModel: non-finite training data");
        }
    }
} // namespace

GpModel GpModel::with_hyper(Eigen::MatrixXd X, Eigen::VectorXd const& y, GpHyper const& hyper)
{
    check_data(X, y);
    if (hyper.log_lengthscales.size() != X.cols()) {
        throw std::invalid_argument("GpModel: length-scale count must equal input dimension");
    }
    GpModel m;
    m.X_ = std::move(X);
    standardize(y, m.z_, m.y_mean_, m.y_scale_);
    m.hyper_ = hyper;
    m.factorize();
    return m;
}

GpModel GpModel::fit(Eigen::MatrixXd X, Eigen::VectorXd const& y, Eigen::VectorXd const& widths,
                     GpFitOptions const& opt)
{
    check_data(X, y);
    if (widths.size() != X.cols() || (widths.array() <= 0.0).any()) {
        throw std::invalid_argument("GpModel: widths must be positive, one per input dimension");
    }
    Eigen::VectorXd z;
    double mean = 0.0;
    double scale = 1.0;
    standardize(y, z, mean, scale);

    Box const box = hyper_box(widths);
    auto const p = box.lo.size();
    // Length scales near sqrt(d) * width keep the kernel from collapsing to
    // white noise in high dimension; starts are drawn a decade around it.
    double const root_d = std::sqrt(static_cast<double>(p - 1));
    Eigen::VectorXd centre(p);
    for (Eigen::Index k = 0; k + 1 < p; ++k) {
        centre[k] = std::log(root_d * widths[k]);
    }
    centre[p - 1] = 0.0;
    centre = centre.cwiseMax(box.lo).cwiseMin(box.hi);

    std::vector<Eigen::VectorXd> starts;
    if (opt.warm_start) {
        starts.push_back(pack(*opt.warm_start).cwiseMax(box.lo).cwiseMin(box.hi));
    }
    if (opt.starts > 0) {
        starts.push_back(centre);
        auto eng = substream(opt.seed, 0x6770);
        auto const lhs = latin_hypercube(static_cast<std::size_t>(opt.starts), static_cast<std::size_t>(p), eng);
        for (auto const& row : lhs) {
            Eigen::VectorXd theta(p);
            for (Eigen::Index k = 0; k < p; ++k) {
                theta[k] = centre[k] + std::log(10.0) * (2.0 * row[static_cast<std::size_t>(k)] - 1.0);
            }
            starts.push_back(theta.cwiseMax(box.lo).cwiseMin(box.hi));
        }
    }
    if (starts.empty()) {
        starts.push_back(0.5 * (box.lo + box.hi));
    }

    // line-search chatter from the solver is not actionable here
    static bool const quiet = [] {
        FLAGS_minloglevel = google::GLOG_ERROR;
        return true;
    }();
    (void)quiet;

    ceres::GradientProblemSolver::Options options;
    options.line_search_direction_type = ceres::LBFGS;
    options.max_num_iterations = opt.max_iterations;
    options.logging_type = ceres::SILENT;
    options.minimizer_progress_to_stdout = false;

    Eigen::VectorXd best_theta;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (auto const& theta0 : starts) {
        auto const lml0 = log_marginal_likelihood(X, z, unpack(theta0));
        if (lml0 && *lml0 > best_lml) {
            best_lml = *lml0;
            best_theta = theta0;
        }
        std::vector<double> u(static_cast<std::size_t>(p));
        for (Eigen::Index k = 0; k < p; ++k) {
            u[static_cast<std::size_t>(k)] = to_unconstrained(theta0[k], box.lo[k], box.hi[k]);
        }
        ceres::GradientProblem problem(new NegLml(X, z, box));
        ceres::GradientProblemSolver::Summary summary;
        ceres::Solve(options, problem, u.data(), &summary);
        Eigen::VectorXd theta(p);
        for (Eigen::Index k = 0; k < p; ++k) {
            theta[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * sigmoid(u[static_cast<std::size_t>(k)]);
        }
        auto const lml = log_marginal_likelihood(X, z, unpack(theta));
        if (lml && *lml > best_lml) {
            best_lml = *lml;
            best_theta = theta;
        }
    }
    if (best_theta.size() == 0) {
        throw std::runtime_error("GpModel: covariance not positive definite after jitter escalation");
    }

    GpModel m;
    m.X_ = std::move(X);
    m.z_ = std::move(z);
    m.y_mean_ = mean;
    m.y_scale_ = scale;
    m.hyper_ = unpack(best_theta);
    m.factorize();
    return m;
}

double GpModel::prior_variance() const noexcept
{
    return std::exp(hyper_.log_signal_variance) * y_scale_ * y_scale_;
}

std::pair<double, double> GpModel::predict(Eigen::Ref<Eigen::VectorXd const> x) const
{
    Eigen::MatrixXd const xs = x.transpose();
    Eigen::VectorXd mean;
    Eigen::VectorXd var;
    predict(xs, mean, var);
    return {mean[0], var[0]};
}

void GpModel::predict(Eigen::MatrixXd const& Xs, Eigen::VectorXd& mean, Eigen::VectorXd& var) const
{
    Eigen::MatrixXd const Ks = matern52(Xs, X_, hyper_);
    Eigen::MatrixXd const V = llt_.matrixL().solve(Ks.transpose());
    double const s2 = std::exp(hyper_.log_signal_variance);
    mean = ((Ks * alpha_).array() * y_scale_ + y_mean_).matrix();
    var = ((s2 - V.colwise().squaredNorm().transpose().array()).max(0.0) * y_scale_ * y_scale_).matrix();
}

BiGaussian predict(GpModel const& m1, GpModel const& m2, Eigen::Ref<Eigen::VectorXd const> x)
{
    auto const [mu1, v1] = m1.predict(x);
    auto const [mu2, v2] = m2.predict(x);
    return {mu1, mu2, std::sqrt(v1), std::sqrt(v2)};
}

} // namespace hvi
