#pragma once

#include "dabsp/gmm.hpp"
#include "dabsp/world.hpp"

namespace dabsp {

enum class EpsilonMode { Bsp, Da };

/// Probability mass the posterior puts on the association consistent with
/// ground truth. Components whose latest lineage scene matches the true
/// scene count; when no lineage or true scene is available, components are
/// matched to the true pose by Mahalanobis distance instead. Returns 0 when
/// the correct component was pruned.
double metricEtaDa(const GmmBelief& posterior, const GroundTruth& gt, const World& world);

/// Estimation error against the true pose. Bsp: distance from the true pose
/// to the collapsed mean (single-hypothesis reading). Da: weight-averaged
/// distance to the component means.
double metricEpsilon(const GmmBelief& posterior, const GroundTruth& gt, EpsilonMode mode);

}  // namespace dabsp
