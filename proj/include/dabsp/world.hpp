#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dabsp/gaussian.hpp"
#include "dabsp/gmm.hpp"
#include "dabsp/models.hpp"
#include "dabsp/random.hpp"

namespace dabsp {

/// Axis-aligned box in pose space carrying a constant event density.
struct RegionBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    double density = 1.0;

    bool contains(const Eigen::VectorXd& x) const;
};

/// Piecewise-constant observability footprint of one scene.
struct EventRegion {
    std::vector<RegionBox> boxes;

    /// Event density at x; zero outside every box.
    double densityAt(const Eigen::VectorXd& x) const;
};

/// Environment object: anchor pose, appearance shift and where it can be seen.
struct Scene {
    std::string id;
    Eigen::VectorXd anchor;
    Eigen::VectorXd shift;
    EventRegion region;
};

struct GroundTruth {
    Eigen::VectorXd pose;
    std::optional<std::string> trueScene;  // scene observed at the last step
};

/// Immutable environment description.
class World {
  public:
    World(std::vector<Scene> scenes, MotionModel motion, ObservationModel obsModel,
          std::vector<std::vector<std::string>> aliasGroups = {});

    const std::vector<Scene>& scenes() const { return scenes_; }
    const MotionModel& motion() const { return motion_; }
    const ObservationModel& obsModel() const { return obsModel_; }
    const std::vector<std::vector<std::string>>& aliasGroups() const { return aliasGroups_; }
    Eigen::Index dim() const { return scenes_.front().anchor.size(); }

    const Scene& scene(const std::string& id) const;
    int sceneIndex(const std::string& id) const;  // -1 if unknown

  private:
    std::vector<Scene> scenes_;
    MotionModel motion_;
    ObservationModel obsModel_;
    std::vector<std::vector<std::string>> aliasGroups_;
};

/// P(A_i | x) from the scene's event region.
double eventLikelihood(const World& world, const std::string& sceneId, const Eigen::VectorXd& pose);

/// Noise-free predicted observation of a scene from a pose.
Eigen::VectorXd observeNominal(const World& world, const Eigen::VectorXd& pose,
                               const std::string& sceneId);

/// Advance the true state: noisy motion step, then re-sample the observed
/// scene from the event likelihoods at the new pose (remainder = no scene).
GroundTruth stepGroundTruth(const World& world, const GroundTruth& gt, const Action& action,
                            RandomStream& rng);

/// Sample a scene id at a pose according to the event likelihoods; nullopt
/// with the leftover probability mass.
std::optional<std::string> sampleSceneAt(const World& world, const Eigen::VectorXd& pose,
                                         RandomStream& rng);

/// Noisy observation of the true state, or nullopt when no scene is observed.
Observation observeGroundTruth(const World& world, const GroundTruth& gt, RandomStream& rng);

/// Measurement update of one component against a scene hypothesis.
GaussianComponent condition(const GaussianComponent& component, const Eigen::VectorXd& z,
                            const Scene& scene, const ObservationModel& obsModel);

}  // namespace dabsp
