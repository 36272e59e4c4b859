#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace dabsp {

/// Seeded random stream with deterministic, label-addressed substreams.
///
/// Substreams let independent consumers (one per candidate action, per
/// episode step, ...) draw concurrently while staying bit-reproducible
/// for a fixed root seed. Normal variates use Box-Muller with no cached
/// state, so every draw depends only on the engine position.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    /// Uniform draw in [0, 1).
    double uniform();

    /// Standard normal draw.
    double normal();

    /// Draw from N(mean, cov). A zero covariance returns the mean.
    Eigen::VectorXd gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

    /// Child stream derived from this stream's seed and a label.
    /// Forking is a pure function of (seed, label); it does not advance
    /// or depend on this stream's draw position.
    RandomStream fork(std::string_view label) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace dabsp
