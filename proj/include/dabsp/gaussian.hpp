#pragma once

#include <Eigen/Dense>

namespace dabsp {

/// Smallest covariance eigenvalue allowed before inversion.
inline constexpr double kCovJitterFloor = 1e-9;

/// Relative tolerance for accepting a covariance as symmetric.
inline constexpr double kSymmetryTolerance = 1e-9;

/// One mode of a belief: mean and positive-definite covariance.
///
/// Construction symmetrizes the covariance and lifts eigenvalues to the
/// jitter floor; `jittered()` reports whether the lift fired. Instances
/// are immutable values.
class GaussianComponent {
  public:
    GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }
    Eigen::Index dim() const { return mean_.size(); }
    bool jittered() const { return jittered_; }

    double logPdf(const Eigen::VectorXd& x) const;
    double pdf(const Eigen::VectorXd& x) const;

    /// Squared Mahalanobis distance of x from the mean.
    double mahalanobisSq(const Eigen::VectorXd& x) const;

  private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    bool jittered_ = false;
};

/// Log-density of N(x; mean, cov) without constructing a component.
double gaussianLogPdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                      const Eigen::MatrixXd& cov);

}  // namespace dabsp
