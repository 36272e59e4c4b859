#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dabsp/gmm.hpp"
#include "dabsp/models.hpp"
#include "dabsp/world.hpp"

namespace dabsp {

/// One sampled future observation. The generating pose and scene are kept
/// for metrics only; the planner never reads them.
struct SimulatedObservation {
    Observation z;                          // disengaged in null-observation zones
    Eigen::VectorXd sourcePose;
    std::optional<std::string> sourceScene;
    double weightHint = 1.0;                // importance weight, uniform by default
};

/// Sample n viewpoints from the propagated mixture, pick an observed scene
/// per viewpoint from the event likelihoods, and emit noisy observations.
std::vector<SimulatedObservation> simulateObservations(const GmmBelief& propagated,
                                                       const World& world, int n,
                                                       RandomStream& rng);

}  // namespace dabsp
