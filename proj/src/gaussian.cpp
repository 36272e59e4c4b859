#include "dabsp/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "dabsp/errors.hpp"

namespace dabsp {

GaussianComponent::GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw ContractViolation("GaussianComponent: covariance shape does not match mean");
    }
    const double scale = 1.0 + cov_.norm();
    if ((cov_ - cov_.transpose()).norm() > kSymmetryTolerance * scale) {
        throw ContractViolation("GaussianComponent: covariance is not symmetric");
    }
    cov_ = ((cov_ + cov_.transpose()) * 0.5).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
    if (es.eigenvalues().minCoeff() < kCovJitterFloor) {
        Eigen::VectorXd lifted = es.eigenvalues().cwiseMax(kCovJitterFloor);
        cov_ = es.eigenvectors() * lifted.asDiagonal() * es.eigenvectors().transpose();
        cov_ = ((cov_ + cov_.transpose()) * 0.5).eval();
        jittered_ = true;
    }
}

double GaussianComponent::logPdf(const Eigen::VectorXd& x) const {
    return gaussianLogPdf(x, mean_, cov_);
}

double GaussianComponent::pdf(const Eigen::VectorXd& x) const { return std::exp(logPdf(x)); }

double GaussianComponent::mahalanobisSq(const Eigen::VectorXd& x) const {
    if (x.size() != mean_.size()) {
        throw ContractViolation("mahalanobisSq: dimension mismatch");
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov_);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("mahalanobisSq: covariance factorization failed");
    }
    const Eigen::VectorXd diff = x - mean_;
    return diff.dot(ldlt.solve(diff));
}

double gaussianLogPdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                      const Eigen::MatrixXd& cov) {
    if (x.size() != mean.size()) {
        throw ContractViolation("gaussianLogPdf: dimension mismatch");
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("gaussianLogPdf: covariance factorization failed");
    }
    const Eigen::VectorXd diff = x - mean;
    const double quad = diff.dot(ldlt.solve(diff));
    const double logDet = ldlt.vectorD().array().log().sum();
    const double d = static_cast<double>(x.size());
    return -0.5 * (quad + logDet + d * std::log(2.0 * std::numbers::pi));
}

}  // namespace dabsp
