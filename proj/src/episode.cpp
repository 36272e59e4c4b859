#include "dabsp/episode.hpp"

#include <iomanip>
#include <sstream>

#include "dabsp/errors.hpp"

namespace dabsp {

namespace {

using nlohmann::json;

json vectorJson(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrixJson(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vectorJson(m.row(r).transpose()));
    return out;
}

json componentsJson(const std::vector<WeightedComponent>& components) {
    json out = json::array();
    for (const auto& c : components) {
        json lineage = json::array();
        for (const auto& entry : c.lineage) {
            lineage.push_back({{"prior", entry.priorIndex}, {"scene", entry.sceneId}});
        }
        out.push_back({{"weight", c.weight},
                       {"mean", vectorJson(c.component.mean())},
                       {"cov", matrixJson(c.component.cov())},
                       {"lineage", lineage}});
    }
    return out;
}

json stepJson(const StepRecord& rec) {
    json termA = json::array();
    for (const auto& [id, w] : rec.termAWeights) termA.push_back({{"scene", id}, {"w", w}});
    json obs;
    if (rec.observation.has_value()) {
        obs = vectorJson(*rec.observation);
    }
    return {{"type", "step"},
            {"step", rec.step},
            {"action", rec.actionId},
            {"objective", rec.objective},
            {"objective_stderr", rec.objectiveStdError},
            {"cost", {{"c_u", rec.chosenBreakdown.control},
                      {"c_G", rec.chosenBreakdown.goal},
                      {"c_sigma", rec.chosenBreakdown.sigma},
                      {"c_w", rec.chosenBreakdown.ambiguity}}},
            {"plan_modes_mean", rec.meanModesPostPrune},
            {"plan_modes_total_pre_prune", rec.totalModesPrePrune},
            {"observation", obs},
            {"null_observation", rec.nullObservation},
            {"modes_prior", rec.modesPrior},
            {"modes_posterior", rec.modesPosterior},
            {"term_a", termA},
            {"eta_da", rec.etaDa},
            {"eps_bsp", rec.epsBsp},
            {"eps_da", rec.epsDa},
            {"gt_pose", vectorJson(rec.gtPose)},
            {"gt_scene", rec.gtScene ? json(*rec.gtScene) : json()},
            {"tie_break", rec.tieBreakNote}};
}

std::string formatDouble(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace

EpisodeLog runEpisode(const ScenarioConfig& config) {
    EpisodeLog log;
    log.seed = config.seed;
    log.priorComponents = config.priorComponents;

    GmmBelief belief = config.prior();
    GroundTruth gt = config.groundTruth;
    const RandomStream root(config.seed);

    for (int step = 1; step <= config.episodeLength; ++step) {
        const RandomStream stepRng = root.fork("step/" + std::to_string(step));
        const PlanReport report =
            selectAction(belief, config.actions, config.world, config.cost, config.samples,
                         stepRng.fork("plan"), config.pruneThreshold, config.quad);
        const Action& chosen = report.chosen().action;

        const GmmBelief propagated = propagate(belief, config.world.motion(), chosen);
        RandomStream actRng = stepRng.fork("act");
        gt = stepGroundTruth(config.world, gt, chosen, actRng);
        const Observation z = observeGroundTruth(config.world, gt, actRng);

        const GmmBelief posterior =
            inferStep(propagated, z, config.world, config.pruneThreshold, config.quad);
        const GmmBelief mlPosterior = forcedMlUpdate(propagated, z, config.world, config.quad);

        StepRecord rec;
        rec.step = step;
        rec.actionId = chosen.id;
        rec.objective = report.chosen().objective;
        rec.chosenBreakdown = report.chosen().meanBreakdown;
        rec.objectiveStdError = report.chosen().stdError;
        rec.meanModesPostPrune = report.chosen().meanModesPostPrune;
        rec.totalModesPrePrune = report.chosen().totalModesPrePrune;
        rec.tieBreakNote = report.tieBreakNote;
        rec.nullObservation = !z.has_value();
        rec.observation = z;
        rec.modesPrior = static_cast<int>(propagated.size());
        rec.modesPosterior = static_cast<int>(posterior.size());
        if (z.has_value()) {
            rec.termAWeights = termAWeights(*z, propagated, config.world, config.quad).entries;
        }
        rec.etaDa = metricEtaDa(posterior, gt, config.world);
        rec.epsBsp = metricEpsilon(mlPosterior, gt, EpsilonMode::Bsp);
        rec.epsDa = metricEpsilon(posterior, gt, EpsilonMode::Da);
        rec.gtPose = gt.pose;
        rec.gtScene = gt.trueScene;
        log.steps.push_back(std::move(rec));

        belief = posterior;
        if (belief.components()[belief.argmaxWeight()].weight > 0.99) {
            log.disambiguated = true;
            break;
        }
    }
    log.finalComponents = belief.components();
    return log;
}

std::string serializeJsonl(const EpisodeLog& log) {
    std::ostringstream out;
    out << json{{"type", "prior"}, {"seed", log.seed},
                {"components", componentsJson(log.priorComponents)}}
               .dump()
        << '\n';
    for (const auto& rec : log.steps) out << stepJson(rec).dump() << '\n';
    out << json{{"type", "final"},
                {"disambiguated", log.disambiguated},
                {"components", componentsJson(log.finalComponents)}}
               .dump()
        << '\n';
    return out.str();
}

std::string episodeCsv(const EpisodeLog& log) {
    std::ostringstream out;
    out << "step,action,J,c_u,c_G,c_sigma,c_w,modes,eta_da,eps_bsp,eps_da\n";
    for (const auto& rec : log.steps) {
        out << rec.step << ',' << rec.actionId << ',' << formatDouble(rec.objective) << ','
            << formatDouble(rec.chosenBreakdown.control) << ','
            << formatDouble(rec.chosenBreakdown.goal) << ','
            << formatDouble(rec.chosenBreakdown.sigma) << ','
            << formatDouble(rec.chosenBreakdown.ambiguity) << ',' << rec.modesPosterior << ','
            << formatDouble(rec.etaDa) << ',' << formatDouble(rec.epsBsp) << ','
            << formatDouble(rec.epsDa) << '\n';
    }
    return out.str();
}

json episodeSummary(const EpisodeLog& log) {
    json steps = json::array();
    for (const auto& rec : log.steps) steps.push_back(stepJson(rec));
    return {{"seed", log.seed},
            {"steps", static_cast<int>(log.steps.size())},
            {"disambiguated", log.disambiguated},
            {"final_modes", static_cast<int>(log.finalComponents.size())},
            {"trace", steps}};
}

namespace {

std::string aliasLabel(const std::vector<std::vector<std::string>>& groups) {
    if (groups.empty()) return "none";
    std::string label;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g > 0) label += '|';
        for (std::size_t i = 0; i < groups[g].size(); ++i) {
            if (i > 0) label += '+';
            label += groups[g][i];
        }
    }
    return label;
}

}  // namespace

std::vector<SweepCell> runSweep(const ScenarioConfig& config) {
    if (!config.abstractOptions.has_value()) {
        throw ConfigError("$.sweep", "sweep requires the abstract builtin world");
    }
    std::vector<std::vector<std::vector<std::string>>> aliasSets = config.sweepAliasSets;
    if (aliasSets.empty()) aliasSets.push_back(config.abstractOptions->aliasSets);

    std::vector<SweepCell> cells;
    const RandomStream root(config.seed);
    for (const auto& aliasSet : aliasSets) {
        AbstractWorldOptions opts = *config.abstractOptions;
        opts.aliasSets = aliasSet;
        const World world = makeAbstractWorld(opts);
        const std::string label = aliasLabel(aliasSet);

        for (const auto& action : config.actions) {
            SweepCell cell;
            cell.aliasLabel = label;
            cell.actionId = action.id;

            const std::string cellKey = "sweep/" + label + "/" + action.id;
            const ActionEvaluation eval =
                evaluateObjective(config.prior(), action, world, config.cost, config.samples,
                                  root.fork(cellKey + "/plan"), config.pruneThreshold, config.quad);
            cell.objective = eval.objective;
            cell.meanBreakdown = eval.meanBreakdown;
            cell.meanModesPostPrune = eval.meanModesPostPrune;

            double etaSum = 0.0, bspSum = 0.0, daSum = 0.0;
            for (int trial = 0; trial < config.sweepSeeds; ++trial) {
                RandomStream rng = root.fork(cellKey + "/trial/" + std::to_string(trial));
                const GmmBelief propagated = propagate(config.prior(), world.motion(), action);
                GroundTruth gt = stepGroundTruth(world, config.groundTruth, action, rng);
                const Observation z = observeGroundTruth(world, gt, rng);
                const GmmBelief posterior =
                    inferStep(propagated, z, world, config.pruneThreshold, config.quad);
                const GmmBelief mlPosterior = forcedMlUpdate(propagated, z, world, config.quad);
                etaSum += metricEtaDa(posterior, gt, world);
                bspSum += metricEpsilon(mlPosterior, gt, EpsilonMode::Bsp);
                daSum += metricEpsilon(posterior, gt, EpsilonMode::Da);
            }
            const double trials = static_cast<double>(config.sweepSeeds);
            cell.meanEtaDa = etaSum / trials;
            cell.meanEpsBsp = bspSum / trials;
            cell.meanEpsDa = daSum / trials;
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::string sweepCsv(const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out << "alias,action,J,c_u,c_G,c_sigma,c_w,modes_mean,eta_da,eps_bsp,eps_da\n";
    for (const auto& cell : cells) {
        out << cell.aliasLabel << ',' << cell.actionId << ',' << formatDouble(cell.objective)
            << ',' << formatDouble(cell.meanBreakdown.control) << ','
            << formatDouble(cell.meanBreakdown.goal) << ','
            << formatDouble(cell.meanBreakdown.sigma) << ','
            << formatDouble(cell.meanBreakdown.ambiguity) << ','
            << formatDouble(cell.meanModesPostPrune) << ',' << formatDouble(cell.meanEtaDa) << ','
            << formatDouble(cell.meanEpsBsp) << ',' << formatDouble(cell.meanEpsDa) << '\n';
    }
    return out.str();
}

}  // namespace dabsp
