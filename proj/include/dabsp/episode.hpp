#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dabsp/metrics.hpp"
#include "dabsp/planner.hpp"
#include "dabsp/scenario.hpp"

namespace dabsp {

/// One closed-loop plan-act-infer step.
struct StepRecord {
    int step = 0;
    std::string actionId;
    double objective = 0.0;
    CostBreakdown chosenBreakdown;  // w_s-weighted term means of the chosen action
    double objectiveStdError = 0.0;
    double meanModesPostPrune = 0.0;
    int totalModesPrePrune = 0;
    bool nullObservation = true;
    Observation observation;
    int modesPrior = 0;
    int modesPosterior = 0;
    std::vector<std::pair<std::string, double>> termAWeights;
    double etaDa = 0.0;
    double epsBsp = 0.0;
    double epsDa = 0.0;
    Eigen::VectorXd gtPose;
    std::optional<std::string> gtScene;
    std::string tieBreakNote;
};

/// Append-only record of one episode; replayable from (config, seed).
struct EpisodeLog {
    std::uint64_t seed = 0;
    std::vector<WeightedComponent> priorComponents;
    std::vector<StepRecord> steps;
    std::vector<WeightedComponent> finalComponents;
    bool disambiguated = false;
};

/// Closed-loop episode: plan, execute, observe the true state, update, log
/// metrics. Stops early once the posterior is effectively unimodal
/// (max weight > 0.99).
EpisodeLog runEpisode(const ScenarioConfig& config);

/// Line-delimited JSON serialization (one record per line).
std::string serializeJsonl(const EpisodeLog& log);

/// Fixed-column CSV: step, action, J, c_u, c_G, c_sigma, c_w, modes,
/// eta_da, eps_bsp, eps_da.
std::string episodeCsv(const EpisodeLog& log);

/// Machine-readable run summary.
nlohmann::json episodeSummary(const EpisodeLog& log);

/// One sweep cell result: an alias configuration evaluated for one action.
struct SweepCell {
    std::string aliasLabel;
    std::string actionId;
    double objective = 0.0;
    CostBreakdown meanBreakdown;
    double meanModesPostPrune = 0.0;
    double meanEtaDa = 0.0;
    double meanEpsBsp = 0.0;
    double meanEpsDa = 0.0;
};

/// Grid over the configured alias sets and actions on the abstract builder;
/// every cell runs `sweepSeeds` independent act-infer trials.
std::vector<SweepCell> runSweep(const ScenarioConfig& config);

std::string sweepCsv(const std::vector<SweepCell>& cells);

}  // namespace dabsp
