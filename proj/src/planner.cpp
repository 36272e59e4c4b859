#include "dabsp/planner.hpp"

#include <cmath>
#include <limits>

#include "dabsp/errors.hpp"

namespace dabsp {

WeightDistribution aggregateSceneWeights(const GmmBelief& posterior, const World& world) {
    WeightDistribution out;
    out.normalized = false;
    out.entries.reserve(world.scenes().size());
    for (const auto& s : world.scenes()) out.entries.emplace_back(s.id, 0.0);
    for (const auto& c : posterior.components()) {
        if (c.lineage.empty()) continue;
        const int idx = world.sceneIndex(c.lineage.back().sceneId);
        if (idx >= 0) out.entries[static_cast<std::size_t>(idx)].second += c.weight;
    }
    return out;
}

CostBreakdown evaluateCost(const GmmBelief& posterior, const WeightDistribution& sceneWeights,
                           const Action& action, const CostWeights& cw) {
    CostBreakdown br;
    br.control = action.control.norm();

    if (cw.goal.has_value() || cw.sigmaMode == CostWeights::SigmaMode::Collapse) {
        const GaussianComponent collapsed = collapse(posterior);
        if (cw.goal.has_value()) br.goal = (collapsed.mean() - *cw.goal).norm();
        if (cw.sigmaMode == CostWeights::SigmaMode::Collapse) br.sigma = collapsed.cov().trace();
    }
    if (cw.sigmaMode == CostWeights::SigmaMode::WorstCase) {
        double worst = 0.0;
        for (const auto& c : posterior.components()) {
            worst = std::max(worst, c.component.cov().trace());
        }
        br.sigma = worst;
    }

    if (sceneWeights.sum() > 0.0) {
        br.ambiguity = 1.0 / (klToUniform(sceneWeights.normalize()) + cw.epsilon);
    } else {
        br.ambiguity = 0.0;  // no association event yet, nothing to disambiguate
    }

    br.total = cw.controlWeight * br.control + cw.goalWeight * br.goal +
               cw.sigmaWeight * br.sigma + cw.ambiguityWeight * br.ambiguity;
    return br;
}

ActionEvaluation evaluateObjective(const GmmBelief& belief, const Action& action,
                                   const World& world, const CostWeights& cw, int n,
                                   RandomStream rng, double pruneThreshold,
                                   const QuadratureOptions& quad) {
    if (n < 1) {
        throw ContractViolation("evaluateObjective: n must be >= 1");
    }
    ActionEvaluation eval;
    eval.action = action;

    const GmmBelief propagated = propagate(belief, world.motion(), action);
    const auto observations = simulateObservations(propagated, world, n, rng);

    double sumW = 0.0;
    double sumWC = 0.0;
    CostBreakdown sums;
    double sumModesPost = 0.0;
    std::vector<double> costs(observations.size(), 0.0);
    std::vector<double> likelihoods(observations.size(), 0.0);

    for (std::size_t k = 0; k < observations.size(); ++k) {
        const auto& sim = observations[k];
        ObservationLedgerEntry entry;
        entry.index = static_cast<int>(k);

        double ws;
        CostBreakdown cost;
        if (!sim.z.has_value()) {
            // No measurement: the propagated belief carries the cost and the
            // likelihood gets a unit floor so the sample still counts.
            entry.nullObservation = true;
            ws = 1.0;
            cost = evaluateCost(propagated, aggregateSceneWeights(propagated, world), action, cw);
            entry.modesPrePrune = static_cast<int>(propagated.size());
            entry.modesPostPrune = static_cast<int>(propagated.size());
        } else {
            const PosteriorDetail detail =
                posteriorUpdateDetailed(propagated, sim.z, world, pruneThreshold, quad);
            ws = detail.likelihoodWeights.sum();
            cost = evaluateCost(detail.belief, aggregateSceneWeights(detail.belief, world), action, cw);
            entry.modesPrePrune = detail.prePruneCount;
            entry.modesPostPrune = detail.postPruneCount;
        }
        entry.likelihood = ws;
        entry.cost = cost;
        costs[k] = cost.total;
        likelihoods[k] = ws;

        sumW += ws;
        sumWC += ws * cost.total;
        sums.control += ws * cost.control;
        sums.goal += ws * cost.goal;
        sums.sigma += ws * cost.sigma;
        sums.ambiguity += ws * cost.ambiguity;
        sumModesPost += static_cast<double>(entry.modesPostPrune);
        eval.totalModesPrePrune += entry.modesPrePrune;
        eval.ledger.push_back(entry);
    }

    eval.objectiveUnnormalized = sumWC / static_cast<double>(n);
    if (sumW > 0.0) {
        eval.objective = sumWC / sumW;
        eval.meanBreakdown = {sums.control / sumW, sums.goal / sumW, sums.sigma / sumW,
                              sums.ambiguity / sumW, eval.objective};
        double var = 0.0;
        for (std::size_t k = 0; k < costs.size(); ++k) {
            const double d = costs[k] - eval.objective;
            var += likelihoods[k] * likelihoods[k] * d * d;
        }
        eval.stdError = std::sqrt(var) / sumW;
    }
    eval.meanModesPostPrune = sumModesPost / static_cast<double>(n);
    return eval;
}

PlanReport selectAction(const GmmBelief& belief, const std::vector<Action>& actions,
                        const World& world, const CostWeights& cw, int n, const RandomStream& rng,
                        double pruneThreshold, const QuadratureOptions& quad) {
    if (actions.empty()) {
        throw ContractViolation("selectAction: empty action list");
    }
    PlanReport report;
    report.entries.reserve(actions.size());
    for (const auto& action : actions) {
        report.entries.push_back(evaluateObjective(belief, action, world, cw, n,
                                                   rng.fork("plan/" + action.id), pruneThreshold,
                                                   quad));
    }
    report.chosenIndex = 0;
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        if (report.entries[i].objective <
            report.entries[static_cast<std::size_t>(report.chosenIndex)].objective) {
            report.chosenIndex = static_cast<int>(i);
        }
    }
    const double best = report.entries[static_cast<std::size_t>(report.chosenIndex)].objective;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        if (static_cast<int>(i) != report.chosenIndex &&
            std::abs(report.entries[i].objective - best) <= 1e-12 * (1.0 + std::abs(best))) {
            report.tieBreakNote = "tie with '" + report.entries[i].action.id +
                                  "'; kept earlier action '" + report.chosen().action.id + "'";
            break;
        }
    }
    return report;
}

GmmBelief inferStep(const GmmBelief& propagated, const Observation& z, const World& world,
                    double pruneThreshold, const QuadratureOptions& quad) {
    return posteriorUpdate(propagated, z, world, pruneThreshold, quad);
}

GmmBelief forcedMlUpdate(const GmmBelief& propagated, const Observation& z, const World& world,
                         const QuadratureOptions& quad) {
    if (!z.has_value()) return propagated;
    const WeightDistribution wa = termAWeights(*z, propagated, world, quad);
    if (wa.sum() <= 0.0) return propagated;
    std::size_t best = 0;
    for (std::size_t i = 1; i < wa.entries.size(); ++i) {
        if (wa.entries[i].second > wa.entries[best].second) best = i;
    }
    const Scene& scene = world.scene(wa.entries[best].first);
    std::vector<WeightedComponent> out;
    out.reserve(propagated.size());
    for (std::size_t j = 0; j < propagated.size(); ++j) {
        const auto& prior = propagated.components()[j];
        auto lineage = prior.lineage;
        lineage.push_back({static_cast<int>(j), scene.id});
        out.push_back({prior.weight, condition(prior.component, *z, scene, world.obsModel()),
                       std::move(lineage)});
    }
    return GmmBelief(std::move(out));
}

}  // namespace dabsp
