#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dabsp/gmm.hpp"
#include "dabsp/world.hpp"

namespace dabsp {

/// Controls for the Gaussian-times-region integrals behind the weights.
struct QuadratureOptions {
    /// Simpson intervals per standard deviation of the product Gaussian.
    double stepDivisor = 10.0;
    /// Integration window half-width in product-Gaussian sigmas.
    double bboxSigmas = 6.0;
    /// Scenes whose region lies beyond this many sigmas (position marginal)
    /// of every component are skipped.
    double gateSigmas = 3.0;
    bool gateEnabled = true;
};

/// Per-component association weights for one observation.
/// Rows follow the belief components, columns follow `sceneIds`.
/// Supported rows are normalized to sum to one; a row with zero mass for
/// every scene is flagged unsupported and left at zero.
struct AssociationMatrix {
    std::vector<std::string> sceneIds;
    Eigen::MatrixXd weights;            // M_k x |scenes|
    std::vector<bool> rowSupported;     // per component
    std::vector<bool> sceneSupported;   // per scene, false when gated out
};

/// Everything produced by one posterior assembly, for reporting.
struct PosteriorDetail {
    GmmBelief belief;
    AssociationMatrix assoc;
    WeightDistribution likelihoodWeights;  // unnormalized term-(a) weights
    int prePruneCount = 0;
    int postPruneCount = 0;
    int supportedScenes = 0;
    std::vector<double> prunedWeights;  // normalized weights removed by pruning
    bool nullObservation = false;
};

/// Unnormalized observation-likelihood weights w^i, one entry per scene
/// (gated scenes carry 0). Their sum estimates P(z | history).
WeightDistribution termAWeights(const Eigen::VectorXd& z, const GmmBelief& propagated,
                                const World& world, const QuadratureOptions& opts = {});

/// Row-normalized association weights w~^{ij}.
AssociationMatrix termBWeights(const Eigen::VectorXd& z, const GmmBelief& propagated,
                               const World& world, const QuadratureOptions& opts = {});

/// Split every component across the supported scene hypotheses, reweight by
/// xi_j * w~^{ij}, prune and renormalize. A null observation returns the
/// propagated belief unchanged.
PosteriorDetail posteriorUpdateDetailed(const GmmBelief& propagated, const Observation& z,
                                        const World& world, double pruneThreshold,
                                        const QuadratureOptions& opts = {});

GmmBelief posteriorUpdate(const GmmBelief& propagated, const Observation& z, const World& world,
                          double pruneThreshold, const QuadratureOptions& opts = {});

/// Integral of N(x; mean, cov) over an axis-aligned box (1-D and 2-D).
double gaussianBoxMass(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       const RegionBox& box, const QuadratureOptions& opts = {});

/// Single (component, scene) contribution:
/// integral of P(z|x,A_i) P(A_i|x) N(x; component) dx over the scene region.
double sceneComponentIntegral(const Eigen::VectorXd& z, const GaussianComponent& component,
                              const Scene& scene, const ObservationModel& obsModel,
                              const QuadratureOptions& opts = {});

/// True when some region box comes within `gateSigmas` of the component
/// mean on every axis of the position marginal.
bool sceneWithinGate(const Scene& scene, const GaussianComponent& component, double gateSigmas);

}  // namespace dabsp
