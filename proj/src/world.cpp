#include "dabsp/world.hpp"

#include <unordered_set>

#include "dabsp/errors.hpp"

namespace dabsp {

bool RegionBox::contains(const Eigen::VectorXd& x) const {
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        if (x[a] < lo[a] || x[a] > hi[a]) return false;
    }
    return true;
}

double EventRegion::densityAt(const Eigen::VectorXd& x) const {
    double d = 0.0;
    for (const auto& box : boxes) {
        if (box.contains(x)) d += box.density;
    }
    return d;
}

World::World(std::vector<Scene> scenes, MotionModel motion, ObservationModel obsModel,
             std::vector<std::vector<std::string>> aliasGroups)
    : scenes_(std::move(scenes)),
      motion_(std::move(motion)),
      obsModel_(std::move(obsModel)),
      aliasGroups_(std::move(aliasGroups)) {
    if (scenes_.empty()) {
        throw ContractViolation("World: needs at least one scene");
    }
    std::unordered_set<std::string> ids;
    for (const auto& s : scenes_) {
        if (!ids.insert(s.id).second) {
            throw ContractViolation("World: duplicate scene id '" + s.id + "'");
        }
        for (const auto& box : s.region.boxes) {
            if (box.density < 0.0) {
                throw ContractViolation("World: negative event density in scene '" + s.id + "'");
            }
            if (((box.hi - box.lo).array() < 0.0).any()) {
                throw ContractViolation("World: inverted region box in scene '" + s.id + "'");
            }
        }
    }
    // Exact aliasing: members of one group share the appearance shift.
    for (const auto& group : aliasGroups_) {
        if (group.empty()) continue;
        const Eigen::VectorXd& ref = scene(group.front()).shift;
        for (const auto& id : group) {
            if (scene(id).shift != ref) {
                throw ContractViolation("World: alias group members must share the shift");
            }
        }
    }
}

const Scene& World::scene(const std::string& id) const {
    const int idx = sceneIndex(id);
    if (idx < 0) {
        throw ContractViolation("World: unknown scene id '" + id + "'");
    }
    return scenes_[static_cast<std::size_t>(idx)];
}

int World::sceneIndex(const std::string& id) const {
    for (std::size_t i = 0; i < scenes_.size(); ++i) {
        if (scenes_[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

double eventLikelihood(const World& world, const std::string& sceneId,
                       const Eigen::VectorXd& pose) {
    return world.scene(sceneId).region.densityAt(pose);
}

Eigen::VectorXd observeNominal(const World& world, const Eigen::VectorXd& pose,
                               const std::string& sceneId) {
    const Scene& s = world.scene(sceneId);
    return (pose - s.anchor) + s.shift;
}

std::optional<std::string> sampleSceneAt(const World& world, const Eigen::VectorXd& pose,
                                         RandomStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& s : world.scenes()) {
        acc += s.region.densityAt(pose);
        if (u < acc) return s.id;
    }
    return std::nullopt;
}

GroundTruth stepGroundTruth(const World& world, const GroundTruth& gt, const Action& action,
                            RandomStream& rng) {
    if (action.control.size() != gt.pose.size()) {
        throw ContractViolation("stepGroundTruth: action dimension mismatch");
    }
    GroundTruth next;
    next.pose = rng.gaussian(world.motion().apply(gt.pose, action.control),
                             world.motion().processNoise);
    next.trueScene = sampleSceneAt(world, next.pose, rng);
    return next;
}

Observation observeGroundTruth(const World& world, const GroundTruth& gt, RandomStream& rng) {
    if (!gt.trueScene) return std::nullopt;
    const Eigen::VectorXd nominal = observeNominal(world, gt.pose, *gt.trueScene);
    return rng.gaussian(nominal, world.obsModel().measurementNoise);
}

GaussianComponent condition(const GaussianComponent& component, const Eigen::VectorXd& z,
                            const Scene& scene, const ObservationModel& obsModel) {
    return condition(component, z, scene.anchor, scene.shift, obsModel);
}

}  // namespace dabsp
