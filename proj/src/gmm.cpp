#include "dabsp/gmm.hpp"

#include <algorithm>
#include <cmath>

#include "dabsp/errors.hpp"

namespace dabsp {

GmmBelief::GmmBelief(std::vector<WeightedComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw ContractViolation("GmmBelief: component list is empty");
    }
    const Eigen::Index d = components_.front().component.dim();
    double total = 0.0;
    for (const auto& c : components_) {
        if (c.component.dim() != d) {
            throw ContractViolation("GmmBelief: mixed component dimensions");
        }
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
            throw ContractViolation("GmmBelief: component weight must be finite and >= 0");
        }
        total += c.weight;
    }
    if (total <= 0.0) {
        throw ContractViolation("GmmBelief: total weight must be positive");
    }
    for (auto& c : components_) c.weight /= total;
}

double GmmBelief::pdf(const Eigen::VectorXd& x) const {
    double p = 0.0;
    for (const auto& c : components_) p += c.weight * c.component.pdf(x);
    return p;
}

std::size_t GmmBelief::argmaxWeight() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < components_.size(); ++i) {
        if (components_[i].weight > components_[best].weight) best = i;
    }
    return best;
}

double WeightDistribution::sum() const {
    double s = 0.0;
    for (const auto& [id, w] : entries) s += w;
    return s;
}

WeightDistribution WeightDistribution::normalize() const {
    const double s = sum();
    if (s <= 0.0) {
        throw NumericalError("WeightDistribution: cannot normalize zero-mass distribution");
    }
    WeightDistribution out;
    out.entries.reserve(entries.size());
    for (const auto& [id, w] : entries) out.entries.emplace_back(id, w / s);
    out.normalized = true;
    return out;
}

GmmBelief propagate(const GmmBelief& belief, const MotionModel& motion, const Action& action) {
    if (action.control.size() != belief.dim()) {
        throw ContractViolation("propagate: action dimension does not match belief");
    }
    if (motion.processNoise.rows() != belief.dim() || motion.processNoise.cols() != belief.dim()) {
        throw ContractViolation("propagate: process noise dimension does not match belief");
    }
    std::vector<WeightedComponent> out;
    out.reserve(belief.size());
    for (const auto& c : belief.components()) {
        // Linear model with identity Jacobian: F Sigma F^T + Sigma_w.
        out.push_back({c.weight,
                       GaussianComponent(motion.apply(c.component.mean(), action.control),
                                         c.component.cov() + motion.processNoise),
                       c.lineage});
    }
    return GmmBelief(std::move(out));
}

GaussianComponent condition(const GaussianComponent& component, const Eigen::VectorXd& z,
                            const Eigen::VectorXd& sceneAnchor, const Eigen::VectorXd& sceneShift,
                            const ObservationModel& obsModel) {
    if (z.size() != component.dim()) {
        throw ContractViolation("condition: observation dimension does not match model output");
    }
    const Eigen::MatrixXd& R = obsModel.measurementNoise;
    const Eigen::MatrixXd S = component.cov() + R;  // innovation covariance, H = I
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
        throw NumericalError("condition: innovation covariance is not invertible");
    }
    const Eigen::VectorXd predicted = component.mean() - sceneAnchor + sceneShift;
    const Eigen::VectorXd innovation = z - predicted;
    const Eigen::MatrixXd gain = component.cov() * ldlt.solve(Eigen::MatrixXd::Identity(S.rows(), S.cols()));
    const Eigen::VectorXd mean = component.mean() + gain * innovation;
    const Eigen::MatrixXd cov = component.cov() - gain * component.cov();
    return GaussianComponent(mean, cov);
}

GaussianComponent collapse(const GmmBelief& belief) {
    const Eigen::Index d = belief.dim();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& c : belief.components()) mean += c.weight * c.component.mean();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& c : belief.components()) {
        const Eigen::VectorXd diff = c.component.mean() - mean;
        cov += c.weight * (c.component.cov() + diff * diff.transpose());
    }
    return GaussianComponent(mean, cov);
}

GmmBelief prune(const GmmBelief& belief, double threshold) {
    if (!(threshold >= 0.0 && threshold < 1.0)) {
        throw ContractViolation("prune: threshold must be in [0, 1)");
    }
    std::vector<WeightedComponent> survivors;
    for (const auto& c : belief.components()) {
        if (c.weight >= threshold) survivors.push_back(c);
    }
    if (survivors.empty()) {
        survivors.push_back(belief.components()[belief.argmaxWeight()]);
    }
    return GmmBelief(std::move(survivors));
}

double klToUniform(const WeightDistribution& weights) {
    if (weights.entries.empty()) {
        throw ContractViolation("klToUniform: empty distribution");
    }
    if (!weights.normalized || std::abs(weights.sum() - 1.0) > 1e-9) {
        throw ContractViolation("klToUniform: weights must be normalized");
    }
    const double n = static_cast<double>(weights.entries.size());
    double kl = 0.0;
    for (const auto& [id, w] : weights.entries) {
        if (w > 0.0) kl += w * std::log(w * n);
    }
    return std::max(kl, 0.0);
}

}  // namespace dabsp
