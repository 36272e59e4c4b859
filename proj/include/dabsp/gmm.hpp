#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dabsp/gaussian.hpp"
#include "dabsp/models.hpp"

namespace dabsp {

/// One measurement-update event: which prior component was conditioned on
/// which scene hypothesis.
struct LineageEntry {
    int priorIndex;
    std::string sceneId;

    bool operator==(const LineageEntry&) const = default;
};

/// Weighted Gaussian component plus the association history that produced it.
struct WeightedComponent {
    double weight;
    GaussianComponent component;
    std::vector<LineageEntry> lineage;
};

/// Normalized Gaussian mixture belief over the robot pose.
///
/// Weights are normalized on construction; the component list is never
/// empty and all components share one dimension. Immutable value type.
class GmmBelief {
  public:
    explicit GmmBelief(std::vector<WeightedComponent> components);

    const std::vector<WeightedComponent>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    Eigen::Index dim() const { return components_.front().component.dim(); }

    double pdf(const Eigen::VectorXd& x) const;

    /// Index of the highest-weight component.
    std::size_t argmaxWeight() const;

  private:
    std::vector<WeightedComponent> components_;
};

/// Per-scene association weights; `normalized` marks whether the entries
/// were scaled to sum to one.
struct WeightDistribution {
    std::vector<std::pair<std::string, double>> entries;
    bool normalized = false;

    double sum() const;
    WeightDistribution normalize() const;
};

/// Push every component through the motion model; weights are unchanged.
GmmBelief propagate(const GmmBelief& belief, const MotionModel& motion, const Action& action);

/// Exact linear-Gaussian measurement update of one component against the
/// pose-space pseudo-measurement `z + anchor - shift`.
GaussianComponent condition(const GaussianComponent& component, const Eigen::VectorXd& z,
                            const Eigen::VectorXd& sceneAnchor, const Eigen::VectorXd& sceneShift,
                            const ObservationModel& obsModel);

/// Moment-matched single Gaussian of the mixture.
GaussianComponent collapse(const GmmBelief& belief);

/// Drop components with weight below `threshold` and renormalize. If all
/// fall below, the single largest component survives. Lineage is kept.
GmmBelief prune(const GmmBelief& belief, double threshold);

/// KL(w || uniform(n)) in nats, with 0 log 0 := 0.
double klToUniform(const WeightDistribution& weights);

}  // namespace dabsp
