#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dabsp/gmm.hpp"
#include "dabsp/planner.hpp"
#include "dabsp/world.hpp"
#include "dabsp/world_presets.hpp"

namespace dabsp {

/// Fully parsed scenario: world, prior, actions, cost and run counts.
/// `abstractOptions` is kept when the world came from the abstract builder
/// so sweeps can rebuild it under different alias configurations.
struct ScenarioConfig {
    std::uint64_t seed = 0;
    World world;
    std::vector<WeightedComponent> priorComponents;
    std::vector<Action> actions;
    CostWeights cost;
    int samples = 200;
    int episodeLength = 1;
    double pruneThreshold = 1e-3;
    GroundTruth groundTruth;
    QuadratureOptions quad;
    std::optional<AbstractWorldOptions> abstractOptions;
    std::vector<std::vector<std::vector<std::string>>> sweepAliasSets;
    int sweepSeeds = 20;
    std::string outputDir = "out";

    GmmBelief prior() const { return GmmBelief(priorComponents); }
};

/// Parse and validate a scenario document. Throws ConfigError with the
/// offending field path on any problem.
ScenarioConfig loadScenario(const nlohmann::json& doc);

/// Load from disk; supports `seed`/`samples` overrides from the CLI.
ScenarioConfig loadScenarioFile(const std::string& path,
                                std::optional<std::uint64_t> seedOverride = std::nullopt,
                                std::optional<int> samplesOverride = std::nullopt);

}  // namespace dabsp
