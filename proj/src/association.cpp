#include "dabsp/association.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dabsp/errors.hpp"

namespace dabsp {

namespace {

constexpr double kUnsupportedRowFloor = 1e-12;

double normalCdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

/// Mass of a 1-D normal on [lo, hi].
double axisMass(double mean, double sigma, double lo, double hi) {
    if (sigma <= 0.0) return (mean >= lo && mean <= hi) ? 1.0 : 0.0;
    return normalCdf((hi - mean) / sigma) - normalCdf((lo - mean) / sigma);
}

/// Composite Simpson over [lo, hi] with an even interval count sized to the
/// product-Gaussian scale.
template <typename F>
double simpson(F&& f, double lo, double hi, double sigma, double stepDivisor) {
    if (hi <= lo) return 0.0;
    const double step = sigma / std::max(stepDivisor, 1.0);
    long n = static_cast<long>(std::ceil((hi - lo) / step));
    n = std::clamp(n, 8L, 4000L);
    if (n % 2 != 0) ++n;
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = f(lo) + f(hi);
    for (long k = 1; k < n; ++k) {
        acc += f(lo + h * static_cast<double>(k)) * ((k % 2 == 0) ? 2.0 : 4.0);
    }
    return acc * h / 3.0;
}

}  // namespace

double gaussianBoxMass(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       const RegionBox& box, const QuadratureOptions& opts) {
    const Eigen::Index d = mean.size();
    if (d == 1) {
        return axisMass(mean[0], std::sqrt(cov(0, 0)), box.lo[0], box.hi[0]);
    }
    if (d != 2) {
        throw ContractViolation("gaussianBoxMass: only 1-D and 2-D poses are supported");
    }
    const double s1 = std::sqrt(cov(0, 0));
    const double s2 = std::sqrt(cov(1, 1));
    const double offDiag = cov(0, 1);
    if (std::abs(offDiag) < 1e-14 * std::max(s1 * s2, 1e-300)) {
        return axisMass(mean[0], s1, box.lo[0], box.hi[0]) *
               axisMass(mean[1], s2, box.lo[1], box.hi[1]);
    }
    // Exact conditional CDF along axis 2, Simpson along axis 1.
    const double lo1 = std::max(box.lo[0], mean[0] - opts.bboxSigmas * s1);
    const double hi1 = std::min(box.hi[0], mean[0] + opts.bboxSigmas * s1);
    if (hi1 <= lo1) return 0.0;
    const double slope = offDiag / cov(0, 0);
    const double condVar = cov(1, 1) - offDiag * slope;
    const double condSigma = std::sqrt(std::max(condVar, 0.0));
    const double norm1 = 1.0 / (s1 * std::sqrt(2.0 * std::numbers::pi));
    const auto integrand = [&](double x1) {
        const double t = (x1 - mean[0]) / s1;
        const double marginal = norm1 * std::exp(-0.5 * t * t);
        const double condMean = mean[1] + slope * (x1 - mean[0]);
        return marginal * axisMass(condMean, condSigma, box.lo[1], box.hi[1]);
    };
    return simpson(integrand, lo1, hi1, s1, opts.stepDivisor);
}

double sceneComponentIntegral(const Eigen::VectorXd& z, const GaussianComponent& component,
                              const Scene& scene, const ObservationModel& obsModel,
                              const QuadratureOptions& opts) {
    // P(z|x,A_i) as a function of x is a Gaussian in pose space centered at
    // the interpretation pose z + anchor - shift. Its product with the
    // component is scale * N(x; mu*, Sigma*).
    const Eigen::VectorXd zEff = z + scene.anchor - scene.shift;
    const Eigen::MatrixXd& R = obsModel.measurementNoise;
    const Eigen::MatrixXd S = component.cov() + R;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
        throw NumericalError("sceneComponentIntegral: singular innovation covariance");
    }
    const double logScale = gaussianLogPdf(zEff, component.mean(), S);
    if (logScale < -700.0) return 0.0;
    const double scale = std::exp(logScale);

    const Eigen::VectorXd diff = zEff - component.mean();
    const Eigen::MatrixXd gain = component.cov() * ldlt.solve(Eigen::MatrixXd::Identity(S.rows(), S.cols()));
    const Eigen::VectorXd productMean = component.mean() + gain * diff;
    Eigen::MatrixXd productCov = component.cov() - gain * component.cov();
    productCov = ((productCov + productCov.transpose()) * 0.5).eval();

    double mass = 0.0;
    for (const auto& box : scene.region.boxes) {
        mass += box.density * gaussianBoxMass(productMean, productCov, box, opts);
    }
    return scale * mass;
}

bool sceneWithinGate(const Scene& scene, const GaussianComponent& component, double gateSigmas) {
    const Eigen::Index d = component.dim();
    for (const auto& box : scene.region.boxes) {
        bool inside = true;
        for (Eigen::Index a = 0; a < d; ++a) {
            const double sigma = std::sqrt(component.cov()(a, a));
            const double nearest = std::clamp(component.mean()[a], box.lo[a], box.hi[a]);
            if (std::abs(nearest - component.mean()[a]) > gateSigmas * sigma) {
                inside = false;
                break;
            }
        }
        if (inside) return true;
    }
    return false;
}

namespace {

std::vector<bool> gateScenes(const GmmBelief& propagated, const World& world,
                             const QuadratureOptions& opts) {
    std::vector<bool> supported(world.scenes().size(), !opts.gateEnabled);
    if (!opts.gateEnabled) return supported;
    for (std::size_t i = 0; i < world.scenes().size(); ++i) {
        for (const auto& c : propagated.components()) {
            if (sceneWithinGate(world.scenes()[i], c.component, opts.gateSigmas)) {
                supported[i] = true;
                break;
            }
        }
    }
    return supported;
}

void checkObservationDim(const Eigen::VectorXd& z, const GmmBelief& propagated,
                         const World& world) {
    if (z.size() != propagated.dim() || z.size() != world.dim()) {
        throw ContractViolation("association: observation dimension mismatch");
    }
}

}  // namespace

WeightDistribution termAWeights(const Eigen::VectorXd& z, const GmmBelief& propagated,
                                const World& world, const QuadratureOptions& opts) {
    checkObservationDim(z, propagated, world);
    const auto supported = gateScenes(propagated, world, opts);
    WeightDistribution out;
    out.normalized = false;
    out.entries.reserve(world.scenes().size());
    for (std::size_t i = 0; i < world.scenes().size(); ++i) {
        double wi = 0.0;
        if (supported[i]) {
            for (const auto& c : propagated.components()) {
                wi += c.weight *
                      sceneComponentIntegral(z, c.component, world.scenes()[i], world.obsModel(), opts);
            }
        }
        out.entries.emplace_back(world.scenes()[i].id, wi);
    }
    return out;
}

AssociationMatrix termBWeights(const Eigen::VectorXd& z, const GmmBelief& propagated,
                               const World& world, const QuadratureOptions& opts) {
    checkObservationDim(z, propagated, world);
    AssociationMatrix out;
    out.sceneSupported = gateScenes(propagated, world, opts);
    out.sceneIds.reserve(world.scenes().size());
    for (const auto& s : world.scenes()) out.sceneIds.push_back(s.id);

    const auto M = static_cast<Eigen::Index>(propagated.size());
    const auto N = static_cast<Eigen::Index>(world.scenes().size());
    out.weights = Eigen::MatrixXd::Zero(M, N);
    out.rowSupported.assign(propagated.size(), false);

    for (Eigen::Index j = 0; j < M; ++j) {
        const auto& comp = propagated.components()[static_cast<std::size_t>(j)].component;
        double rowSum = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            if (!out.sceneSupported[static_cast<std::size_t>(i)]) continue;
            const double w = sceneComponentIntegral(
                z, comp, world.scenes()[static_cast<std::size_t>(i)], world.obsModel(), opts);
            out.weights(j, i) = w;
            rowSum += w;
        }
        if (rowSum > 0.0) {
            out.weights.row(j) /= rowSum;  // per-component normalization
            out.rowSupported[static_cast<std::size_t>(j)] = true;
        }
    }
    return out;
}

PosteriorDetail posteriorUpdateDetailed(const GmmBelief& propagated, const Observation& z,
                                        const World& world, double pruneThreshold,
                                        const QuadratureOptions& opts) {
    if (!z.has_value()) {
        PosteriorDetail detail{propagated, {}, {}, static_cast<int>(propagated.size()),
                               static_cast<int>(propagated.size()), 0, {}, true};
        return detail;
    }
    if (!(pruneThreshold >= 0.0 && pruneThreshold < 1.0)) {
        throw ContractViolation("posteriorUpdate: prune threshold must be in [0, 1)");
    }

    PosteriorDetail detail{propagated, termBWeights(*z, propagated, world, opts),
                           termAWeights(*z, propagated, world, opts), 0, 0, 0, {}, false};
    const auto& assoc = detail.assoc;
    for (bool s : assoc.sceneSupported) detail.supportedScenes += s ? 1 : 0;

    std::vector<WeightedComponent> raw;
    for (std::size_t j = 0; j < propagated.size(); ++j) {
        const auto& prior = propagated.components()[j];
        if (!assoc.rowSupported[j]) {
            // Observation inexplicable from this mode: keep it at a floor
            // weight instead of dropping it outright.
            raw.push_back({prior.weight * kUnsupportedRowFloor, prior.component, prior.lineage});
            ++detail.prePruneCount;
            continue;
        }
        for (std::size_t i = 0; i < assoc.sceneIds.size(); ++i) {
            if (!assoc.sceneSupported[i]) continue;
            ++detail.prePruneCount;
            const double wTilde = assoc.weights(static_cast<Eigen::Index>(j),
                                                static_cast<Eigen::Index>(i));
            const double weight = prior.weight * wTilde;
            if (weight <= 0.0) continue;
            const Scene& scene = world.scenes()[i];
            auto lineage = prior.lineage;
            lineage.push_back({static_cast<int>(j), scene.id});
            raw.push_back({weight, condition(prior.component, *z, scene, world.obsModel()),
                           std::move(lineage)});
        }
    }
    if (raw.empty()) {
        // Every row unsupported and floored away is impossible (floors are
        // positive), but guard against an all-gated world.
        detail.belief = propagated;
        detail.postPruneCount = static_cast<int>(propagated.size());
        return detail;
    }

    GmmBelief unpruned(std::move(raw));
    GmmBelief pruned = prune(unpruned, pruneThreshold);
    std::vector<std::size_t> below;
    for (std::size_t r = 0; r < unpruned.size(); ++r) {
        if (unpruned.components()[r].weight < pruneThreshold) below.push_back(r);
    }
    const bool keptLargest = below.size() == unpruned.size();
    for (std::size_t r : below) {
        if (keptLargest && r == unpruned.argmaxWeight()) continue;  // survived as fallback
        detail.prunedWeights.push_back(unpruned.components()[r].weight);
    }
    detail.postPruneCount = static_cast<int>(pruned.size());
    detail.belief = std::move(pruned);
    return detail;
}

GmmBelief posteriorUpdate(const GmmBelief& propagated, const Observation& z, const World& world,
                          double pruneThreshold, const QuadratureOptions& opts) {
    return posteriorUpdateDetailed(propagated, z, world, pruneThreshold, opts).belief;
}

}  // namespace dabsp
