#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hvi/distribution.hpp"

namespace hvi {

// Matern-5/2 ARD hyperparameters in log space.
struct GpHyper {
    Eigen::VectorXd log_lengthscales;
    double log_signal_variance{0.0};
};

struct GpFitOptions {
    // Latin-hypercube starts within a decade of length scale sqrt(d) * width and
    // unit signal variance, plus that point itself; 0 runs only the warm start.
    int starts{8};
    int max_iterations{200};
    std::uint64_t seed{0};
    std::optional<GpHyper> warm_start;
};

/// Zero-mean GP on standardized targets with a Matern-5/2 ARD kernel.
///
/// Hyperparameters maximize the log marginal likelihood by L-BFGS from
/// several starts; length scales live in [1e-2, 1e2] * domain width and the
/// signal variance in [1e-6, 1e3] (standardized units). Jitter starts at
/// 1e-10 and grows tenfold up to 1e-4 until the Cholesky factor exists.
class GpModel {
public:
    // X holds one training input per row; widths are the domain box widths.
    // Throws std::invalid_argument on malformed data and std::runtime_error
    // when no jitter makes the covariance positive definite.
    static GpModel fit(Eigen::MatrixXd X, Eigen::VectorXd const& y, Eigen::VectorXd const& widths,
                       GpFitOptions const& opt = {});

    // Model with fixed hyperparameters (no optimization).
    static GpModel with_hyper(Eigen::MatrixXd X, Eigen::VectorXd const& y, GpHyper const& hyper);

    // Posterior mean and variance in target units; variance floored at 0.
    std::pair<double, double> predict(Eigen::Ref<Eigen::VectorXd const> x) const;
    // Row-wise batch version of predict.
    void predict(Eigen::MatrixXd const& Xs, Eigen::VectorXd& mean, Eigen::VectorXd& var) const;

    GpHyper const& hyper() const noexcept { return hyper_; }
    double jitter() const noexcept { return jitter_; }
    // Log marginal likelihood of the standardized targets at hyper().
    double log_marginal_likelihood() const noexcept { return lml_; }
    // Signal variance in target units.
    double prior_variance() const noexcept;

    // LML of standardized targets z and its gradient w.r.t.
    // [log l_1 .. log l_d, log s2]. Returns nullopt if the covariance cannot
    // be factorized with jitter up to 1e-4.
    static std::optional<double> log_marginal_likelihood(Eigen::MatrixXd const& X, Eigen::VectorXd const& z,
                                                         GpHyper const& hyper, Eigen::VectorXd* grad = nullptr);

private:
    void factorize();

    Eigen::MatrixXd X_;
    Eigen::VectorXd z_;
    double y_mean_{0.0};
    double y_scale_{1.0};
    GpHyper hyper_;
    double jitter_{0.0};
    double lml_{0.0};
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
};

// Independent per-objective posteriors combined into the predictive law.
BiGaussian predict(GpModel const& m1, GpModel const& m2, Eigen::Ref<Eigen::VectorXd const> x);

// Matern-5/2 covariance between the rows of A and B.
Eigen::MatrixXd matern52(Eigen::MatrixXd const& A, Eigen::MatrixXd const& B, GpHyper const& hyper);

} // namespace hvi
