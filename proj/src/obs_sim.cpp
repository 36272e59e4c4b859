#include "dabsp/obs_sim.hpp"

#include "dabsp/errors.hpp"

namespace dabsp {

std::vector<SimulatedObservation> simulateObservations(const GmmBelief& propagated,
                                                       const World& world, int n,
                                                       RandomStream& rng) {
    if (n < 1) {
        throw ContractViolation("simulateObservations: n must be >= 1");
    }
    std::vector<SimulatedObservation> out;
    out.reserve(static_cast<std::size_t>(n));
    const double uniformWeight = 1.0 / static_cast<double>(n);
    for (int k = 0; k < n; ++k) {
        SimulatedObservation sim;
        sim.weightHint = uniformWeight;

        // Component choice proportional to xi, then a Gaussian draw.
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t pick = propagated.size() - 1;
        for (std::size_t j = 0; j < propagated.size(); ++j) {
            acc += propagated.components()[j].weight;
            if (u < acc) {
                pick = j;
                break;
            }
        }
        const auto& comp = propagated.components()[pick].component;
        sim.sourcePose = rng.gaussian(comp.mean(), comp.cov());

        sim.sourceScene = sampleSceneAt(world, sim.sourcePose, rng);
        if (sim.sourceScene) {
            const Eigen::VectorXd nominal = observeNominal(world, sim.sourcePose, *sim.sourceScene);
            sim.z = rng.gaussian(nominal, world.obsModel().measurementNoise);
        }
        out.push_back(std::move(sim));
    }
    return out;
}

}  // namespace dabsp
