#include "dabsp/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "dabsp/errors.hpp"

namespace dabsp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double RandomStream::uniform() {
    // 53 significand bits, value in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd RandomStream::gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw ContractViolation("gaussian draw: covariance/mean dimension mismatch");
    }
    if (cov.isZero(0.0)) return mean;

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    Eigen::MatrixXd chol;
    if (llt.info() == Eigen::Success) {
        chol = llt.matrixL();
    } else {
        // Semi-definite covariance: fall back to an eigenvalue square root.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
        chol = es.eigenvectors() * vals.cwiseSqrt().asDiagonal();
    }
    Eigen::VectorXd unit(mean.size());
    for (Eigen::Index i = 0; i < unit.size(); ++i) unit[i] = normal();
    return mean + chol * unit;
}

RandomStream RandomStream::fork(std::string_view label) const {
    return RandomStream(splitmix64(seed_ ^ fnv1a(label)));
}

}  // namespace dabsp
