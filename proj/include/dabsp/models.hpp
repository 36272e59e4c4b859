#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace dabsp {

/// A future observation; disengaged when the viewpoint sees no scene.
using Observation = std::optional<Eigen::VectorXd>;

/// Candidate control: a labelled pose displacement.
struct Action {
    std::string id;
    Eigen::VectorXd control;
};

/// Additive-noise translation motion: x' = x + u + w, w ~ N(0, processNoise).
/// The motion Jacobian is the identity.
struct MotionModel {
    Eigen::MatrixXd processNoise;

    Eigen::VectorXd apply(const Eigen::VectorXd& pose, const Eigen::VectorXd& control) const {
        return pose + control;
    }
};

/// Object-centric linear sensing: z = (x - anchor) + shift + v, v ~ N(0, measurementNoise).
struct ObservationModel {
    Eigen::MatrixXd measurementNoise;
};

}  // namespace dabsp
