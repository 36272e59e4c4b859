#include "dabsp/scenario.hpp"

#include <fstream>

#include "dabsp/errors.hpp"

namespace dabsp {

namespace {

using nlohmann::json;

const json& require(const json& doc, const std::string& key, const std::string& path) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw ConfigError(path + "." + key, "missing required field");
    }
    return doc.at(key);
}

double asNumber(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

Eigen::VectorXd asVector(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array");
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = asNumber(v[i], path + "[" + std::to_string(i) + "]");
    }
    return out;
}

std::vector<double> asDoubleList(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(asNumber(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Eigen::MatrixXd asMatrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected an array of rows");
    const std::size_t rows = v.size();
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    if (cols == 0) throw ConfigError(path, "expected non-empty rows");
    Eigen::MatrixXd out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const Eigen::VectorXd row = asVector(v[r], path + "[" + std::to_string(r) + "]");
        if (static_cast<std::size_t>(row.size()) != cols) {
            throw ConfigError(path, "ragged matrix rows");
        }
        out.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return out;
}

std::vector<std::vector<std::string>> asAliasGroups(const json& v, const std::string& path) {
    std::vector<std::vector<std::string>> groups;
    if (!v.is_array()) throw ConfigError(path, "expected an array of scene-id groups");
    for (std::size_t g = 0; g < v.size(); ++g) {
        if (!v[g].is_array()) {
            throw ConfigError(path + "[" + std::to_string(g) + "]", "expected an array of ids");
        }
        groups.push_back(v[g].get<std::vector<std::string>>());
    }
    return groups;
}

AbstractWorldOptions parseAbstractOptions(const json& worldDoc, const std::string& path) {
    AbstractWorldOptions opts;
    if (worldDoc.contains("alias_sets")) {
        opts.aliasSets = asAliasGroups(worldDoc.at("alias_sets"), path + ".alias_sets");
    }
    if (worldDoc.contains("options")) {
        const json& o = worldDoc.at("options");
        const std::string p = path + ".options";
        if (o.contains("scene_x")) {
            opts.sceneX = asDoubleList(o.at("scene_x"), p + ".scene_x");
        }
        if (o.contains("scene_y")) opts.sceneY = asNumber(o.at("scene_y"), p + ".scene_y");
        if (o.contains("region_half_width"))
            opts.regionHalfWidth = asNumber(o.at("region_half_width"), p + ".region_half_width");
        if (o.contains("region_y_lo")) opts.regionYLo = asNumber(o.at("region_y_lo"), p + ".region_y_lo");
        if (o.contains("region_y_hi")) opts.regionYHi = asNumber(o.at("region_y_hi"), p + ".region_y_hi");
        if (o.contains("process_noise"))
            opts.processNoise = asNumber(o.at("process_noise"), p + ".process_noise");
        if (o.contains("measurement_noise"))
            opts.measurementNoise = asNumber(o.at("measurement_noise"), p + ".measurement_noise");
    }
    return opts;
}

CorridorWorldOptions parseCorridorOptions(const json& worldDoc, const std::string& path) {
    CorridorWorldOptions opts;
    if (worldDoc.contains("options")) {
        const json& o = worldDoc.at("options");
        const std::string p = path + ".options";
        if (o.contains("floors")) opts.floors = static_cast<int>(asNumber(o.at("floors"), p + ".floors"));
        if (o.contains("floor_spacing"))
            opts.floorSpacing = asNumber(o.at("floor_spacing"), p + ".floor_spacing");
        if (o.contains("shelf_x")) {
            opts.shelfX = asDoubleList(o.at("shelf_x"), p + ".shelf_x");
        }
        if (o.contains("shelf_mask")) {
            opts.shelfMask.clear();
            for (const auto& row : o.at("shelf_mask")) {
                std::vector<bool> mask;
                for (const auto& cell : row) mask.push_back(cell.get<bool>());
                opts.shelfMask.push_back(std::move(mask));
            }
        }
        if (o.contains("region_half_width"))
            opts.regionHalfWidth = asNumber(o.at("region_half_width"), p + ".region_half_width");
        if (o.contains("region_half_height"))
            opts.regionHalfHeight = asNumber(o.at("region_half_height"), p + ".region_half_height");
        if (o.contains("process_noise"))
            opts.processNoise = asNumber(o.at("process_noise"), p + ".process_noise");
        if (o.contains("measurement_noise"))
            opts.measurementNoise = asNumber(o.at("measurement_noise"), p + ".measurement_noise");
    }
    return opts;
}

World parseExplicitWorld(const json& worldDoc, const std::string& path) {
    std::vector<Scene> scenes;
    const json& sceneDocs = require(worldDoc, "scenes", path);
    for (std::size_t i = 0; i < sceneDocs.size(); ++i) {
        const std::string sp = path + ".scenes[" + std::to_string(i) + "]";
        const json& sd = sceneDocs[i];
        Scene s;
        s.id = require(sd, "id", sp).get<std::string>();
        s.anchor = asVector(require(sd, "anchor", sp), sp + ".anchor");
        s.shift = asVector(require(sd, "shift", sp), sp + ".shift");
        const json& boxes = require(sd, "region", sp);
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            const std::string bp = sp + ".region[" + std::to_string(b) + "]";
            RegionBox box;
            box.lo = asVector(require(boxes[b], "lo", bp), bp + ".lo");
            box.hi = asVector(require(boxes[b], "hi", bp), bp + ".hi");
            box.density = boxes[b].contains("density")
                              ? asNumber(boxes[b].at("density"), bp + ".density")
                              : 1.0;
            s.region.boxes.push_back(std::move(box));
        }
        scenes.push_back(std::move(s));
    }
    MotionModel motion{asMatrix(require(worldDoc, "motion_noise", path), path + ".motion_noise")};
    ObservationModel obs{
        asMatrix(require(worldDoc, "measurement_noise", path), path + ".measurement_noise")};
    std::vector<std::vector<std::string>> groups;
    if (worldDoc.contains("alias_groups")) {
        groups = asAliasGroups(worldDoc.at("alias_groups"), path + ".alias_groups");
    }
    try {
        return World(std::move(scenes), std::move(motion), std::move(obs), std::move(groups));
    } catch (const ContractViolation& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

ScenarioConfig loadScenario(const json& doc) {
    if (!doc.is_object()) throw ConfigError("$", "scenario document must be an object");
    if (!doc.contains("seed")) throw ConfigError("$.seed", "seed is mandatory");
    const std::uint64_t seed = doc.at("seed").get<std::uint64_t>();

    const json& worldDoc = require(doc, "world", "$");
    std::optional<AbstractWorldOptions> abstractOpts;
    World world = [&]() -> World {
        if (worldDoc.contains("builtin")) {
            const std::string builtin = worldDoc.at("builtin").get<std::string>();
            if (builtin == "abstract") {
                abstractOpts = parseAbstractOptions(worldDoc, "$.world");
                return makeAbstractWorld(*abstractOpts);
            }
            if (builtin == "corridor") {
                return makeCorridorWorld(parseCorridorOptions(worldDoc, "$.world"));
            }
            throw ConfigError("$.world.builtin", "unknown builtin world '" + builtin + "'");
        }
        return parseExplicitWorld(worldDoc, "$.world");
    }();

    std::vector<WeightedComponent> prior;
    const json& priorDoc = require(doc, "prior", "$");
    if (!priorDoc.is_array() || priorDoc.empty()) {
        throw ConfigError("$.prior", "expected a non-empty component array");
    }
    for (std::size_t i = 0; i < priorDoc.size(); ++i) {
        const std::string pp = "$.prior[" + std::to_string(i) + "]";
        try {
            prior.push_back(
                {asNumber(require(priorDoc[i], "weight", pp), pp + ".weight"),
                 GaussianComponent(asVector(require(priorDoc[i], "mean", pp), pp + ".mean"),
                                   asMatrix(require(priorDoc[i], "cov", pp), pp + ".cov")),
                 {}});
        } catch (const ContractViolation& e) {
            throw ConfigError(pp, e.what());
        }
    }

    std::vector<Action> actions;
    const json& actionDoc = require(doc, "actions", "$");
    for (std::size_t i = 0; i < actionDoc.size(); ++i) {
        const std::string ap = "$.actions[" + std::to_string(i) + "]";
        actions.push_back({require(actionDoc[i], "id", ap).get<std::string>(),
                           asVector(require(actionDoc[i], "control", ap), ap + ".control")});
    }
    if (actions.empty()) throw ConfigError("$.actions", "need at least one action");

    CostWeights cost;
    if (doc.contains("cost")) {
        const json& c = doc.at("cost");
        if (c.contains("control")) cost.controlWeight = asNumber(c.at("control"), "$.cost.control");
        if (c.contains("goal")) cost.goalWeight = asNumber(c.at("goal"), "$.cost.goal");
        if (c.contains("sigma")) cost.sigmaWeight = asNumber(c.at("sigma"), "$.cost.sigma");
        if (c.contains("ambiguity")) cost.ambiguityWeight = asNumber(c.at("ambiguity"), "$.cost.ambiguity");
        if (c.contains("epsilon")) cost.epsilon = asNumber(c.at("epsilon"), "$.cost.epsilon");
        if (cost.epsilon <= 0.0) throw ConfigError("$.cost.epsilon", "epsilon must be > 0");
        if (c.contains("sigma_mode")) {
            const std::string mode = c.at("sigma_mode").get<std::string>();
            if (mode == "collapse") {
                cost.sigmaMode = CostWeights::SigmaMode::Collapse;
            } else if (mode == "worst-case") {
                cost.sigmaMode = CostWeights::SigmaMode::WorstCase;
            } else {
                throw ConfigError("$.cost.sigma_mode", "expected 'collapse' or 'worst-case'");
            }
        }
        if (c.contains("goal_pose") && !c.at("goal_pose").is_null()) {
            cost.goal = asVector(c.at("goal_pose"), "$.cost.goal_pose");
        }
    }

    ScenarioConfig cfg{seed,
                       std::move(world),
                       std::move(prior),
                       std::move(actions),
                       cost,
                       200,
                       1,
                       1e-3,
                       GroundTruth{},
                       QuadratureOptions{},
                       std::move(abstractOpts),
                       {},
                       20,
                       "out"};

    if (doc.contains("samples")) cfg.samples = static_cast<int>(asNumber(doc.at("samples"), "$.samples"));
    if (cfg.samples < 1) throw ConfigError("$.samples", "must be >= 1");
    if (doc.contains("episode_length")) {
        cfg.episodeLength = static_cast<int>(asNumber(doc.at("episode_length"), "$.episode_length"));
    }
    if (cfg.episodeLength < 0) throw ConfigError("$.episode_length", "must be >= 0");
    if (doc.contains("prune_threshold")) {
        cfg.pruneThreshold = asNumber(doc.at("prune_threshold"), "$.prune_threshold");
    }
    if (!(cfg.pruneThreshold >= 0.0 && cfg.pruneThreshold < 1.0)) {
        throw ConfigError("$.prune_threshold", "must be in [0, 1)");
    }

    const json& gtDoc = require(doc, "ground_truth", "$");
    cfg.groundTruth.pose = asVector(require(gtDoc, "pose", "$.ground_truth"), "$.ground_truth.pose");
    if (gtDoc.contains("scene") && !gtDoc.at("scene").is_null()) {
        cfg.groundTruth.trueScene = gtDoc.at("scene").get<std::string>();
    }

    if (doc.contains("quadrature")) {
        const json& q = doc.at("quadrature");
        if (q.contains("step_divisor"))
            cfg.quad.stepDivisor = asNumber(q.at("step_divisor"), "$.quadrature.step_divisor");
        if (q.contains("bbox_sigmas"))
            cfg.quad.bboxSigmas = asNumber(q.at("bbox_sigmas"), "$.quadrature.bbox_sigmas");
        if (q.contains("gate_sigmas"))
            cfg.quad.gateSigmas = asNumber(q.at("gate_sigmas"), "$.quadrature.gate_sigmas");
        if (q.contains("gate_enabled")) cfg.quad.gateEnabled = q.at("gate_enabled").get<bool>();
    }

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        if (s.contains("alias_sets")) {
            for (std::size_t i = 0; i < s.at("alias_sets").size(); ++i) {
                cfg.sweepAliasSets.push_back(asAliasGroups(
                    s.at("alias_sets")[i], "$.sweep.alias_sets[" + std::to_string(i) + "]"));
            }
        }
        if (s.contains("seeds")) cfg.sweepSeeds = static_cast<int>(asNumber(s.at("seeds"), "$.sweep.seeds"));
        if (cfg.sweepSeeds < 1) throw ConfigError("$.sweep.seeds", "must be >= 1");
    }

    if (doc.contains("output_dir")) cfg.outputDir = doc.at("output_dir").get<std::string>();

    // Cross-checks the parser cannot express locally.
    if (cfg.groundTruth.pose.size() != cfg.world.dim()) {
        throw ConfigError("$.ground_truth.pose", "dimension does not match world");
    }
    for (const auto& c : cfg.priorComponents) {
        if (c.component.dim() != cfg.world.dim()) {
            throw ConfigError("$.prior", "component dimension does not match world");
        }
    }
    for (const auto& a : cfg.actions) {
        if (a.control.size() != cfg.world.dim()) {
            throw ConfigError("$.actions", "control dimension does not match world");
        }
    }
    if (cfg.groundTruth.trueScene &&
        cfg.world.sceneIndex(*cfg.groundTruth.trueScene) < 0) {
        throw ConfigError("$.ground_truth.scene", "unknown scene id");
    }
    return cfg;
}

ScenarioConfig loadScenarioFile(const std::string& path, std::optional<std::uint64_t> seedOverride,
                                std::optional<int> samplesOverride) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    if (seedOverride) doc["seed"] = *seedOverride;
    if (samplesOverride) doc["samples"] = *samplesOverride;
    return loadScenario(doc);
}

}  // namespace dabsp
