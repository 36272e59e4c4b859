#include "dabsp/metrics.hpp"

#include <cmath>
#include <limits>

#include "dabsp/errors.hpp"

namespace dabsp {

namespace {

// 99% chi-square quantiles for 1..3 dof, used for the pose-proximity
// fallback when no association lineage exists.
double chi2Gate(Eigen::Index dim) {
    switch (dim) {
        case 1: return 6.63;
        case 2: return 9.21;
        case 3: return 11.34;
        default: return 9.21 + 2.0 * static_cast<double>(dim - 2);
    }
}

}  // namespace

double metricEtaDa(const GmmBelief& posterior, const GroundTruth& gt, const World& world) {
    bool anyLineage = false;
    for (const auto& c : posterior.components()) {
        if (!c.lineage.empty()) anyLineage = true;
    }
    if (gt.trueScene.has_value() && anyLineage) {
        double mass = 0.0;
        for (const auto& c : posterior.components()) {
            if (!c.lineage.empty() && c.lineage.back().sceneId == *gt.trueScene) {
                mass += c.weight;
            }
        }
        return mass;  // 0 when the correct component was pruned
    }

    // Nearest-mode correspondence on the pose itself.
    const double gate = chi2Gate(posterior.dim());
    double mass = 0.0;
    double bestDist = std::numeric_limits<double>::infinity();
    double bestWeight = 0.0;
    for (const auto& c : posterior.components()) {
        const double d2 = c.component.mahalanobisSq(gt.pose);
        if (d2 <= gate) mass += c.weight;
        if (d2 < bestDist) {
            bestDist = d2;
            bestWeight = c.weight;
        }
    }
    return mass > 0.0 ? mass : bestWeight;
}

double metricEpsilon(const GmmBelief& posterior, const GroundTruth& gt, EpsilonMode mode) {
    if (gt.pose.size() != posterior.dim()) {
        throw ContractViolation("metricEpsilon: pose dimension mismatch");
    }
    if (mode == EpsilonMode::Bsp) {
        return (gt.pose - collapse(posterior).mean()).norm();
    }
    double err = 0.0;
    for (const auto& c : posterior.components()) {
        err += c.weight * (gt.pose - c.component.mean()).norm();
    }
    return err;
}

}  // namespace dabsp
