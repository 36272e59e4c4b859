#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dabsp/association.hpp"
#include "dabsp/gmm.hpp"
#include "dabsp/obs_sim.hpp"
#include "dabsp/world.hpp"

namespace dabsp {

/// Cost-combination weights and the uncertainty-term flavor.
struct CostWeights {
    enum class SigmaMode { WorstCase, Collapse };

    double controlWeight = 0.0;    // M_u
    double goalWeight = 0.0;       // M_G
    double sigmaWeight = 0.0;      // M_Sigma
    double ambiguityWeight = 0.0;  // M_w
    double epsilon = 1e-6;
    SigmaMode sigmaMode = SigmaMode::Collapse;
    std::optional<Eigen::VectorXd> goal;
};

struct CostBreakdown {
    double control = 0.0;
    double goal = 0.0;
    double sigma = 0.0;
    double ambiguity = 0.0;
    double total = 0.0;
};

/// Per simulated observation bookkeeping inside one action evaluation.
struct ObservationLedgerEntry {
    int index = 0;
    bool nullObservation = false;
    double likelihood = 0.0;  // w_s
    CostBreakdown cost;
    int modesPrePrune = 0;
    int modesPostPrune = 0;
};

struct ActionEvaluation {
    Action action;
    double objective = 0.0;              // likelihood-normalized expectation of cost
    double objectiveUnnormalized = 0.0;  // (1/n) sum of w_s * c, as accumulated
    double stdError = 0.0;               // Monte-Carlo standard error of `objective`
    CostBreakdown meanBreakdown;         // w_s-weighted term means
    double meanModesPostPrune = 0.0;
    int totalModesPrePrune = 0;
    std::vector<ObservationLedgerEntry> ledger;
};

struct PlanReport {
    std::vector<ActionEvaluation> entries;
    int chosenIndex = -1;
    std::string tieBreakNote;

    const ActionEvaluation& chosen() const { return entries[static_cast<std::size_t>(chosenIndex)]; }
};

/// Posterior weight mass per world scene, read off the components' most
/// recent lineage entries. Unnormalized; zero-mass when nothing has been
/// associated yet.
WeightDistribution aggregateSceneWeights(const GmmBelief& posterior, const World& world);

/// Combine control, goal-distance, uncertainty and ambiguity terms.
/// `sceneWeights` is the lineage-aggregated distribution from
/// aggregateSceneWeights; with zero mass the ambiguity term is zero.
CostBreakdown evaluateCost(const GmmBelief& posterior, const WeightDistribution& sceneWeights,
                           const Action& action, const CostWeights& cw);

/// Monte-Carlo evaluation of the one-step objective for one action.
ActionEvaluation evaluateObjective(const GmmBelief& belief, const Action& action,
                                   const World& world, const CostWeights& cw, int n,
                                   RandomStream rng, double pruneThreshold,
                                   const QuadratureOptions& quad = {});

/// Evaluate every candidate on its own deterministic substream and pick the
/// argmin objective; ties go to the earlier action in the list.
PlanReport selectAction(const GmmBelief& belief, const std::vector<Action>& actions,
                        const World& world, const CostWeights& cw, int n, const RandomStream& rng,
                        double pruneThreshold, const QuadratureOptions& quad = {});

/// Closed-loop measurement update; the belief must already be propagated
/// with the executed action.
GmmBelief inferStep(const GmmBelief& propagated, const Observation& z, const World& world,
                    double pruneThreshold, const QuadratureOptions& quad = {});

/// Single-hypothesis baseline: commit to the maximum-likelihood scene and
/// condition every component on it. Null or inexplicable observations leave
/// the belief unchanged.
GmmBelief forcedMlUpdate(const GmmBelief& propagated, const Observation& z, const World& world,
                         const QuadratureOptions& quad = {});

}  // namespace dabsp
