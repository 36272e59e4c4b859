#include <doctest.h>

#include <cmath>
#include <vector>

#include "dabsp/errors.hpp"
#include "dabsp/gmm.hpp"
#include "dabsp/random.hpp"

using namespace dabsp;

namespace {

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

WeightedComponent comp(double w, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    return {w, GaussianComponent(mean, cov), {}};
}

/// Moments of the un-normalized density prior(x) * N(z; x - anchor + shift, R)
/// computed on a dense grid. This is the brute-force Bayes reference for
/// the linear-Gaussian measurement update.
struct GridMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

GridMoments gridBayes(const GaussianComponent& prior, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& anchor, const Eigen::VectorXd& shift,
                      const Eigen::MatrixXd& R, int cells = 201, double span = 5.0) {
    const double sigma = std::sqrt(prior.cov().diagonal().maxCoeff());
    const Eigen::VectorXd lo = prior.mean().array() - span * sigma;
    const Eigen::VectorXd hi = prior.mean().array() + span * sigma;
    const double hx = (hi[0] - lo[0]) / (cells - 1);
    const double hy = (hi[1] - lo[1]) / (cells - 1);

    double mass = 0.0;
    Eigen::VectorXd first = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const Eigen::VectorXd x = vec2(lo[0] + i * hx, lo[1] + j * hy);
            const Eigen::VectorXd predicted = x - anchor + shift;
            const double p =
                prior.pdf(x) * std::exp(gaussianLogPdf(z, predicted, R));
            mass += p;
            first += p * x;
            second += p * x * x.transpose();
        }
    }
    GridMoments out;
    out.mean = first / mass;
    out.cov = second / mass - out.mean * out.mean.transpose();
    return out;
}

}  // namespace

TEST_CASE("component construction symmetrizes and validates") {
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.3 + 1e-12, 0.3, 1.0;  // tiny asymmetry is absorbed
    const GaussianComponent c(vec2(0, 0), cov);
    CHECK(c.cov()(0, 1) == doctest::Approx(c.cov()(1, 0)));

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(GaussianComponent(vec2(0, 0), bad), ContractViolation);
}

TEST_CASE("degenerate covariance is lifted to the jitter floor") {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = 1.0;  // second eigenvalue is exactly zero
    const GaussianComponent c(vec2(0, 0), cov);
    CHECK(c.jittered());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.cov());
    CHECK(es.eigenvalues().minCoeff() >= kCovJitterFloor * 0.999);
    CHECK(std::isfinite(c.logPdf(vec2(0, 0))));
}

TEST_CASE("gaussian pdf matches the closed form in 1-D") {
    Eigen::VectorXd m(1), x(1);
    m << 2.0;
    x << 3.5;
    Eigen::MatrixXd s(1, 1);
    s << 4.0;
    const GaussianComponent c(m, s);
    const double expected =
        std::exp(-0.5 * (1.5 * 1.5) / 4.0) / std::sqrt(2.0 * M_PI * 4.0);
    CHECK(c.pdf(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("belief normalizes weights and rejects bad inputs") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    GmmBelief b({comp(2.0, vec2(0, 0), I), comp(6.0, vec2(1, 1), I)});
    CHECK(b.components()[0].weight == doctest::Approx(0.25));
    CHECK(b.components()[1].weight == doctest::Approx(0.75));
    CHECK(b.argmaxWeight() == 1);

    CHECK_THROWS_AS(GmmBelief({}), ContractViolation);
    CHECK_THROWS_AS(GmmBelief({comp(0.0, vec2(0, 0), I)}), ContractViolation);
    Eigen::VectorXd m1(1);
    m1 << 0.0;
    CHECK_THROWS_AS(
        GmmBelief({comp(1.0, vec2(0, 0), I),
                   {1.0, GaussianComponent(m1, Eigen::MatrixXd::Identity(1, 1)), {}}}),
        ContractViolation);
}

TEST_CASE("propagate shifts means, inflates covariances, keeps weights") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    const GmmBelief b({comp(0.3, vec2(0, 0), I), comp(0.7, vec2(5, 0), 2.0 * I)});
    MotionModel motion{0.1 * I};
    const Action u{"u", vec2(1, -1)};
    const GmmBelief out = propagate(b, motion, u);
    CHECK(out.components()[0].weight == doctest::Approx(0.3));
    CHECK(out.components()[0].component.mean().isApprox(vec2(1, -1)));
    CHECK(out.components()[1].component.mean().isApprox(vec2(6, -1)));
    CHECK(out.components()[0].component.cov().isApprox(1.1 * I));
    CHECK(out.components()[1].component.cov().isApprox(2.1 * I));

    CHECK_THROWS_AS(propagate(b, motion, Action{"bad", Eigen::VectorXd::Ones(3)}),
                    ContractViolation);
}

TEST_CASE("conditioning matches the dense-grid Bayes posterior") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd R = 0.01 * I;
    const GaussianComponent prior(vec2(0, 0), I);
    const Eigen::VectorXd anchor = vec2(0, 5);
    const Eigen::VectorXd shift = vec2(0, 0);
    const Eigen::VectorXd z = vec2(0, -5);

    const GaussianComponent post = condition(prior, z, anchor, shift, ObservationModel{R});
    const GridMoments oracle = gridBayes(prior, z, anchor, shift, R);

    CHECK((post.mean() - oracle.mean).lpNorm<1>() < 1e-3);
    CHECK((post.cov() - oracle.cov).lpNorm<1>() < 1e-3);
    // Closed form for this symmetric case: cov = (I + R^-1)^-1.
    const Eigen::MatrixXd expectedCov = (I + R.inverse()).inverse();
    CHECK(post.cov().isApprox(expectedCov, 1e-9));
}

TEST_CASE("conditioning matches grid Bayes on a correlated off-center case") {
    Eigen::MatrixXd cov(2, 2);
    cov << 1.5, 0.4, 0.4, 0.8;
    Eigen::MatrixXd R(2, 2);
    R << 0.05, 0.01, 0.01, 0.04;
    const GaussianComponent prior(vec2(1.0, -0.5), cov);
    const Eigen::VectorXd anchor = vec2(2, 3);
    const Eigen::VectorXd shift = vec2(0.5, -0.2);
    const Eigen::VectorXd z = vec2(-0.3, -3.0);

    const GaussianComponent post = condition(prior, z, anchor, shift, ObservationModel{R});
    const GridMoments oracle = gridBayes(prior, z, anchor, shift, R, 301, 6.0);
    CHECK((post.mean() - oracle.mean).lpNorm<1>() < 1e-3);
    CHECK((post.cov() - oracle.cov).lpNorm<1>() < 1e-3);
}

TEST_CASE("collapse reproduces sample moments of the mixture") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd c2(2, 2);
    c2 << 0.5, 0.2, 0.2, 0.9;
    const GmmBelief b({comp(0.25, vec2(-3, 1), I), comp(0.75, vec2(2, -1), c2)});
    const GaussianComponent merged = collapse(b);

    RandomStream rng(2024);
    const int n = 400000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        const auto& pick = rng.uniform() < 0.25 ? b.components()[0] : b.components()[1];
        const Eigen::VectorXd x = rng.gaussian(pick.component.mean(), pick.component.cov());
        sum += x;
        outer += x * x.transpose();
    }
    const Eigen::VectorXd mean = sum / n;
    const Eigen::MatrixXd cov = outer / n - mean * mean.transpose();
    CHECK((merged.mean() - mean).norm() < 0.01 * (1.0 + mean.norm()));
    CHECK((merged.cov() - cov).norm() < 0.01 * (1.0 + cov.norm()));
}

TEST_CASE("prune drops light components and renormalizes") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    const GmmBelief b({comp(0.94, vec2(0, 0), I), comp(0.05, vec2(1, 0), I),
                       comp(0.01, vec2(2, 0), I)});
    const GmmBelief out = prune(b, 0.02);
    REQUIRE(out.size() == 2);
    CHECK(out.components()[0].weight == doctest::Approx(0.94 / 0.99));
    CHECK(out.components()[1].weight == doctest::Approx(0.05 / 0.99));
}

TEST_CASE("prune keeps the largest component when everything falls below") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    const GmmBelief b({comp(0.4, vec2(0, 0), I), comp(0.6, vec2(1, 0), I)});
    const GmmBelief out = prune(b, 0.9);
    REQUIRE(out.size() == 1);
    CHECK(out.components()[0].weight == doctest::Approx(1.0));
    CHECK(out.components()[0].component.mean().isApprox(vec2(1, 0)));

    CHECK_THROWS_AS(prune(b, 1.0), ContractViolation);
    CHECK_THROWS_AS(prune(b, -0.1), ContractViolation);
}

TEST_CASE("KL divergence from uniform") {
    WeightDistribution uniform{{{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}}, true};
    CHECK(klToUniform(uniform) == doctest::Approx(0.0));

    WeightDistribution delta{{{"a", 1.0}, {"b", 0.0}, {"c", 0.0}}, true};
    CHECK(klToUniform(delta) == doctest::Approx(std::log(3.0)));

    WeightDistribution skew{{{"a", 0.7}, {"b", 0.3}}, true};
    const double expected = 0.7 * std::log(1.4) + 0.3 * std::log(0.6);
    CHECK(klToUniform(skew) == doctest::Approx(expected));

    WeightDistribution unnormalized{{{"a", 0.7}, {"b", 0.7}}, false};
    CHECK_THROWS_AS(klToUniform(unnormalized), ContractViolation);
    CHECK(klToUniform(unnormalized.normalize()) == doctest::Approx(0.0));
}

TEST_CASE("weight conservation holds across propagate and prune") {
    RandomStream rng(17);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<WeightedComponent> cs;
        const int m = 1 + static_cast<int>(rng.uniform() * 6);
        for (int j = 0; j < m; ++j) {
            cs.push_back(comp(rng.uniform() + 1e-3,
                              vec2(10 * rng.normal(), 10 * rng.normal()),
                              (0.5 + rng.uniform()) * I));
        }
        const GmmBelief b(cs);
        double total = 0.0;
        for (const auto& c : b.components()) total += c.weight;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

        const GmmBelief moved = propagate(b, MotionModel{0.1 * I}, Action{"u", vec2(1, 0)});
        total = 0.0;
        for (const auto& c : moved.components()) total += c.weight;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

        const GmmBelief kept = prune(moved, 0.05);
        total = 0.0;
        for (const auto& c : kept.components()) total += c.weight;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}
