#include <doctest.h>

#include <cmath>
#include <vector>

#include "dabsp/association.hpp"
#include "dabsp/errors.hpp"
#include "dabsp/gaussian.hpp"
#include "dabsp/random.hpp"
#include "dabsp/world_presets.hpp"

using namespace dabsp;

namespace {

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

/// Midpoint-rule reference for one scene weight:
///   w^i = sum_j xi_j \int N(z; x - anchor + shift, R) P(A_i|x) N(x; mu_j, S_j) dx.
/// The event density is piecewise constant, so integration runs box by box.
double gridTermA(const Eigen::VectorXd& z, const GmmBelief& belief, const World& world,
                 const Scene& scene, int cells = 500) {
    double total = 0.0;
    for (const auto& box : scene.region.boxes) {
        const double hx = (box.hi[0] - box.lo[0]) / cells;
        const double hy = (box.hi[1] - box.lo[1]) / cells;
        double mass = 0.0;
        for (int i = 0; i < cells; ++i) {
            for (int j = 0; j < cells; ++j) {
                const Eigen::VectorXd x =
                    vec2(box.lo[0] + (i + 0.5) * hx, box.lo[1] + (j + 0.5) * hy);
                const Eigen::VectorXd predicted = x - scene.anchor + scene.shift;
                mass += belief.pdf(x) *
                        std::exp(gaussianLogPdf(z, predicted, world.obsModel().measurementNoise));
            }
        }
        total += box.density * mass * hx * hy;
    }
    return total;
}

GmmBelief single(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    return GmmBelief({{1.0, GaussianComponent(mean, cov), {}}});
}

}  // namespace

TEST_CASE("box mass matches erf in 1-D") {
    Eigen::VectorXd mean(1), lo(1), hi(1);
    mean << 0.5;
    lo << -1.0;
    hi << 2.0;
    Eigen::MatrixXd cov(1, 1);
    cov << 0.8;
    const double sd = std::sqrt(0.8);
    const double expected = 0.5 * (std::erf((2.0 - 0.5) / (sd * std::sqrt(2.0))) -
                                   std::erf((-1.0 - 0.5) / (sd * std::sqrt(2.0))));
    CHECK(gaussianBoxMass(mean, cov, {lo, hi, 1.0}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("box mass factorizes for a diagonal 2-D covariance") {
    Eigen::MatrixXd cov(2, 2);
    cov << 0.4, 0.0, 0.0, 1.5;
    const RegionBox box{vec2(-1, 0), vec2(1, 2), 1.0};
    const auto axisMass = [](double m, double v, double lo, double hi) {
        const double s = std::sqrt(2.0 * v);
        return 0.5 * (std::erf((hi - m) / s) - std::erf((lo - m) / s));
    };
    const double expected = axisMass(0.2, 0.4, -1, 1) * axisMass(1.0, 1.5, 0, 2);
    CHECK(gaussianBoxMass(vec2(0.2, 1.0), cov, box) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("box mass handles correlated 2-D covariances") {
    Eigen::MatrixXd cov(2, 2);
    cov << 0.5, 0.3, 0.3, 0.4;
    const Eigen::VectorXd mean = vec2(0.1, -0.2);
    const RegionBox box{vec2(-0.8, -1.0), vec2(1.2, 0.6), 1.0};

    // Dense midpoint-rule reference.
    const int cells = 1200;
    const double hx = (box.hi[0] - box.lo[0]) / cells;
    const double hy = (box.hi[1] - box.lo[1]) / cells;
    double expected = 0.0;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const Eigen::VectorXd x = vec2(box.lo[0] + (i + 0.5) * hx, box.lo[1] + (j + 0.5) * hy);
            expected += std::exp(gaussianLogPdf(x, mean, cov));
        }
    }
    expected *= hx * hy;
    CHECK(gaussianBoxMass(mean, cov, box) == doctest::Approx(expected).epsilon(1e-6));

    // A box far wider than the support captures all the mass.
    const RegionBox everything{vec2(-50, -50), vec2(50, 50), 1.0};
    CHECK(gaussianBoxMass(mean, cov, everything) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scene integral reduces to the closed-form marginal when the region is huge") {
    // With P(A|x) = 1 everywhere that matters, the integral is the marginal
    // likelihood N(z + anchor - shift; mu, Sigma + R).
    Scene scene;
    scene.id = "S";
    scene.anchor = vec2(2, 3);
    scene.shift = vec2(0.5, 0);
    scene.region.boxes.push_back({vec2(-100, -100), vec2(100, 100), 1.0});
    Eigen::MatrixXd cov(2, 2);
    cov << 0.7, 0.2, 0.2, 0.5;
    const Eigen::MatrixXd R = 0.05 * Eigen::MatrixXd::Identity(2, 2);
    const GaussianComponent prior(vec2(1, -1), cov);
    const Eigen::VectorXd z = vec2(-0.7, -3.6);

    const Eigen::VectorXd zEff = z + scene.anchor - scene.shift;
    const double expected = std::exp(gaussianLogPdf(zEff, prior.mean(), cov + R));
    QuadratureOptions quad;
    quad.gateEnabled = false;
    CHECK(sceneComponentIntegral(z, prior, scene, ObservationModel{R}, quad) ==
          doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("observation-likelihood weights match the dense-grid oracle") {
    AbstractWorldOptions opts;
    opts.aliasSets = {{"A1", "A2"}};
    const World w = makeAbstractWorld(opts);
    const Eigen::MatrixXd cov = 0.09 * Eigen::MatrixXd::Identity(2, 2);

    struct Case {
        Eigen::VectorXd mean;
        Eigen::VectorXd z;
    };
    const std::vector<Case> cases = {
        {vec2(-5.0, 1.0), vec2(0.0, -4.0)},
        {vec2(-4.6, 1.4), vec2(0.3, -3.8)},
        {vec2(0.2, 0.9), vec2(-0.1, -4.2)},
    };
    for (const auto& c : cases) {
        const GmmBelief b = single(c.mean, cov);
        const WeightDistribution wa = termAWeights(c.z, b, w);
        REQUIRE(wa.entries.size() == 3);
        for (std::size_t i = 0; i < wa.entries.size(); ++i) {
            const double oracle = gridTermA(c.z, b, w, w.scenes()[i]);
            if (oracle > 1e-12) {
                CHECK(wa.entries[i].second == doctest::Approx(oracle).epsilon(1e-4));
            } else {
                CHECK(wa.entries[i].second <= 1e-10);
            }
        }
    }
}

TEST_CASE("far-fetched observations carry negligible likelihood") {
    const World w = makeAbstractWorld();
    const GmmBelief b = single(vec2(-5, 1), 0.09 * Eigen::MatrixXd::Identity(2, 2));
    // Peak: the measurement the component actually predicts for A1.
    const double peak = termAWeights(vec2(0.0, -4.0), b, w).sum();
    // z implies a pose far from any prior mass.
    QuadratureOptions quad;
    quad.gateEnabled = false;
    const double far = termAWeights(vec2(12.0, -4.0), b, w, quad).sum();
    CHECK(far < 1e-6 * peak);
}

TEST_CASE("association rows are normalized and match the grid oracle") {
    // Asymmetric single-component case spanning two stripes.
    AbstractWorldOptions opts;
    opts.aliasSets = {{"A1", "A2", "A3"}};
    const World w = makeAbstractWorld(opts);
    Eigen::MatrixXd cov(2, 2);
    cov << 7.0, 0.4, 0.4, 0.5;  // wide in x: sees several stripes
    const GmmBelief b = single(vec2(-2.5, 1.0), cov);
    const Eigen::VectorXd z = vec2(0.1, -4.1);

    const AssociationMatrix assoc = termBWeights(z, b, w);
    REQUIRE(assoc.weights.rows() == 1);
    REQUIRE(assoc.weights.cols() == 3);
    CHECK(assoc.rowSupported[0]);
    CHECK(assoc.weights.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));

    double raw[3];
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        raw[i] = gridTermA(z, b, w, w.scenes()[static_cast<std::size_t>(i)]);
        total += raw[i];
    }
    for (int i = 0; i < 3; ++i) {
        CHECK(assoc.weights(0, i) == doctest::Approx(raw[i] / total).epsilon(1e-4));
    }
}

TEST_CASE("row sums stay one for randomized beliefs") {
    const World w = makeAbstractWorld();
    RandomStream rng(2025);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<WeightedComponent> cs;
        const int m = 1 + static_cast<int>(rng.uniform() * 4);
        for (int j = 0; j < m; ++j) {
            cs.push_back({0.1 + rng.uniform(),
                          GaussianComponent(vec2(-5.0 + 10.0 * rng.uniform(), 1.0 + rng.normal()),
                                            (0.05 + 0.3 * rng.uniform()) * I),
                          {}});
        }
        const GmmBelief b(cs);
        const Eigen::VectorXd z = vec2(30.0 * rng.uniform(), -4.0 + rng.normal());
        const AssociationMatrix assoc = termBWeights(z, b, w);
        for (int j = 0; j < assoc.weights.rows(); ++j) {
            if (assoc.rowSupported[static_cast<std::size_t>(j)]) {
                CHECK(assoc.weights.row(j).sum() == doctest::Approx(1.0).epsilon(1e-9));
            } else {
                CHECK(assoc.weights.row(j).sum() == doctest::Approx(0.0));
            }
        }
    }
}

TEST_CASE("posterior update splits, prunes and renormalizes") {
    AbstractWorldOptions opts;
    opts.aliasSets = {{"A1", "A2"}};
    const World w = makeAbstractWorld(opts);
    const Eigen::MatrixXd cov = 0.09 * Eigen::MatrixXd::Identity(2, 2);
    const GmmBelief b({{0.4, GaussianComponent(vec2(-5, 1), cov), {}},
                       {0.6, GaussianComponent(vec2(0, 1), cov), {}}});
    const Observation z = vec2(0.0, -4.0);

    const PosteriorDetail detail = posteriorUpdateDetailed(b, z, w, 1e-3);
    CHECK_FALSE(detail.nullObservation);
    // Two components times the supported scene count.
    CHECK(detail.prePruneCount == 2 * detail.supportedScenes);
    CHECK(detail.postPruneCount == static_cast<int>(detail.belief.size()));
    for (double pruned : detail.prunedWeights) CHECK(pruned < 1e-3);

    double total = 0.0;
    for (const auto& c : detail.belief.components()) {
        total += c.weight;
        REQUIRE_FALSE(c.lineage.empty());
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("null observation leaves the propagated belief unchanged") {
    const World w = makeAbstractWorld();
    const GmmBelief b = single(vec2(-5, 1), 0.09 * Eigen::MatrixXd::Identity(2, 2));
    const PosteriorDetail detail = posteriorUpdateDetailed(b, std::nullopt, w, 1e-3);
    CHECK(detail.nullObservation);
    CHECK(detail.belief.size() == b.size());
    CHECK(detail.belief.components()[0].component.mean() == b.components()[0].component.mean());
    CHECK(detail.belief.components()[0].lineage.empty());
}

TEST_CASE("no aliasing keeps the mode count and yields a confident row") {
    const World w = makeAbstractWorld();  // distinct shifts
    const Eigen::MatrixXd cov = 0.09 * Eigen::MatrixXd::Identity(2, 2);
    const GmmBelief b({{0.5, GaussianComponent(vec2(-5, 1), cov), {}},
                       {0.5, GaussianComponent(vec2(0, 1), cov), {}}});
    // z generated at A1's stripe under A1's shift (which is distinct).
    const Eigen::VectorXd z = observeNominal(w, vec2(-5, 1), "A1");

    const AssociationMatrix assoc = termBWeights(z, b, w);
    const int a1 = w.sceneIndex("A1");
    CHECK(assoc.weights(0, a1) > 1.0 - 1e-6);

    const PosteriorDetail detail = posteriorUpdateDetailed(b, Observation(z), w, 1e-3);
    CHECK(detail.belief.size() == b.size());  // mode count preserved
}

TEST_CASE("full aliasing spreads a broad component's row uniformly") {
    AbstractWorldOptions opts;
    opts.aliasSets = {{"A1", "A2", "A3"}};
    const World w = makeAbstractWorld(opts);
    // One broad component covering all three stripes equally.
    Eigen::MatrixXd cov(2, 2);
    cov << 400.0, 0.0, 0.0, 0.25;
    const GmmBelief b = single(vec2(0.0, 1.0), cov);
    const Eigen::VectorXd z = observeNominal(w, vec2(0.0, 1.0), "A2");

    const AssociationMatrix assoc = termBWeights(z, b, w);
    for (int i = 0; i < 3; ++i) {
        CHECK(assoc.weights(0, i) == doctest::Approx(1.0 / 3.0).epsilon(2e-2));
    }
}

TEST_CASE("an inexplicable row keeps its component at a floor weight") {
    AbstractWorldOptions opts;
    opts.aliasSets = {{"A1", "A2"}};
    const World w = makeAbstractWorld(opts);
    const Eigen::MatrixXd cov = 0.09 * Eigen::MatrixXd::Identity(2, 2);
    // Second component sits far from every stripe: its row integrates to zero.
    const GmmBelief b({{0.5, GaussianComponent(vec2(-5, 1), cov), {}},
                       {0.5, GaussianComponent(vec2(0, 40), cov), {}}});
    const Eigen::VectorXd z = vec2(0.0, -4.0);

    const AssociationMatrix assoc = termBWeights(z, b, w);
    CHECK(assoc.rowSupported[0]);
    CHECK_FALSE(assoc.rowSupported[1]);

    // Without pruning the floored component must survive, unsplit.
    const PosteriorDetail detail = posteriorUpdateDetailed(b, Observation(z), w, 0.0);
    bool foundFloor = false;
    for (const auto& c : detail.belief.components()) {
        if (c.lineage.empty()) {
            foundFloor = true;
            CHECK(c.weight < 1e-9);
            CHECK(c.component.mean().isApprox(vec2(0, 40)));
        }
    }
    CHECK(foundFloor);
}

TEST_CASE("posterior mixture density matches the grid Bayes posterior") {
    AbstractWorldOptions opts;
    opts.aliasSets = {{"A1", "A2"}};
    const World w = makeAbstractWorld(opts);
    Eigen::MatrixXd cov(2, 2);
    cov << 8.0, 0.0, 0.0, 0.3;
    const GmmBelief prior = single(vec2(-2.5, 1.2), cov);
    const Eigen::VectorXd z = vec2(0.05, -3.95);

    const GmmBelief post = posteriorUpdate(prior, Observation(z), w, 0.0);

    // Brute-force joint posterior on a grid covering the prior support.
    const int cells = 400;
    const double xLo = -12, xHi = 8, yLo = -1, yHi = 3.5;
    const double hx = (xHi - xLo) / cells, hy = (yHi - yLo) / cells;
    double mass = 0.0;
    Eigen::MatrixXd grid(cells, cells);
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const Eigen::VectorXd x = vec2(xLo + (i + 0.5) * hx, yLo + (j + 0.5) * hy);
            double lik = 0.0;
            for (const auto& s : w.scenes()) {
                const double pa = eventLikelihood(w, s.id, x);
                if (pa <= 0.0) continue;
                lik += pa * std::exp(gaussianLogPdf(z, x - s.anchor + s.shift,
                                                    w.obsModel().measurementNoise));
            }
            grid(i, j) = prior.pdf(x) * lik;
            mass += grid(i, j);
        }
    }
    REQUIRE(mass > 0.0);
    double l1 = 0.0;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const Eigen::VectorXd x = vec2(xLo + (i + 0.5) * hx, yLo + (j + 0.5) * hy);
            l1 += std::abs(post.pdf(x) - grid(i, j) / (mass * hx * hy)) * hx * hy;
        }
    }
    CHECK(l1 < 1e-3);
}

TEST_CASE("the scene gate only discards negligible contributions") {
    const World w = makeAbstractWorld();
    RandomStream rng(314);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const GmmBelief b = single(vec2(-6.0 + 12.0 * rng.uniform(), 0.5 + rng.uniform()),
                                   (0.05 + 0.2 * rng.uniform()) * I);
        const Eigen::VectorXd z = vec2(60.0 * rng.uniform(), -4.0 + 0.5 * rng.normal());
        QuadratureOptions gated;
        QuadratureOptions open;
        open.gateEnabled = false;
        const WeightDistribution a = termAWeights(z, b, w, gated);
        const WeightDistribution c = termAWeights(z, b, w, open);
        if (c.sum() < 1e-20) {
            // The observation is essentially inexplicable either way.
            CHECK(a.sum() < 1e-20);
            continue;
        }
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(std::abs(a.entries[i].second - c.entries[i].second) <= 1e-6 * c.sum());
        }
    }
}

TEST_CASE("three-dimensional regions are rejected explicitly") {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(3), hi = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(gaussianBoxMass(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3),
                                    {lo, hi, 1.0}),
                    ContractViolation);
}
