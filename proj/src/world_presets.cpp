#include "dabsp/world_presets.hpp"

#include "dabsp/errors.hpp"

namespace dabsp {

namespace {

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

}  // namespace

World makeAbstractWorld(const AbstractWorldOptions& opts) {
    if (opts.sceneX.empty()) {
        throw ContractViolation("makeAbstractWorld: need at least one scene");
    }
    std::vector<Scene> scenes;
    for (std::size_t i = 0; i < opts.sceneX.size(); ++i) {
        Scene s;
        s.id = "A" + std::to_string(i + 1);
        s.anchor = vec2(opts.sceneX[i], opts.sceneY);
        // Distinct shifts keep un-aliased scenes distinguishable.
        s.shift = vec2(30.0 * static_cast<double>(i), 0.0);
        s.region.boxes.push_back({vec2(opts.sceneX[i] - opts.regionHalfWidth, opts.regionYLo),
                                  vec2(opts.sceneX[i] + opts.regionHalfWidth, opts.regionYHi),
                                  1.0});
        scenes.push_back(std::move(s));
    }
    // Equate shifts inside each alias set (exact aliasing).
    for (const auto& group : opts.aliasSets) {
        if (group.empty()) continue;
        Eigen::VectorXd ref;
        for (auto& s : scenes) {
            if (s.id == group.front()) ref = s.shift;
        }
        if (ref.size() == 0) {
            throw ContractViolation("makeAbstractWorld: unknown scene in alias set");
        }
        for (auto& s : scenes) {
            for (const auto& id : group) {
                if (s.id == id) s.shift = ref;
            }
        }
    }
    MotionModel motion{Eigen::MatrixXd::Identity(2, 2) * opts.processNoise};
    ObservationModel obs{Eigen::MatrixXd::Identity(2, 2) * opts.measurementNoise};
    return World(std::move(scenes), std::move(motion), std::move(obs), opts.aliasSets);
}

World makeCorridorWorld(const CorridorWorldOptions& opts) {
    if (opts.floors < 1 || static_cast<std::size_t>(opts.floors) != opts.shelfMask.size()) {
        throw ContractViolation("makeCorridorWorld: shelfMask must list every floor");
    }
    std::vector<Scene> scenes;
    std::vector<std::string> shelfGroup;
    for (int f = 0; f < opts.floors; ++f) {
        const double y = opts.floorSpacing * static_cast<double>(f);
        const auto& mask = opts.shelfMask[static_cast<std::size_t>(f)];
        if (mask.size() != opts.shelfX.size()) {
            throw ContractViolation("makeCorridorWorld: shelfMask row size mismatch");
        }
        for (std::size_t sidx = 0; sidx < opts.shelfX.size(); ++sidx) {
            if (!mask[sidx]) continue;
            Scene s;
            s.id = "F" + std::to_string(f + 1) + "S" + std::to_string(sidx + 1);
            s.anchor = vec2(opts.shelfX[sidx], y);
            s.shift = Eigen::VectorXd::Zero(2);  // all shelves look alike
            s.region.boxes.push_back(
                {vec2(opts.shelfX[sidx] - opts.regionHalfWidth, y - opts.regionHalfHeight),
                 vec2(opts.shelfX[sidx] + opts.regionHalfWidth, y + opts.regionHalfHeight),
                 1.0});
            shelfGroup.push_back(s.id);
            scenes.push_back(std::move(s));
        }
    }
    MotionModel motion{Eigen::MatrixXd::Identity(2, 2) * opts.processNoise};
    ObservationModel obs{Eigen::MatrixXd::Identity(2, 2) * opts.measurementNoise};
    return World(std::move(scenes), std::move(motion), std::move(obs), {shelfGroup});
}

}  // namespace dabsp
