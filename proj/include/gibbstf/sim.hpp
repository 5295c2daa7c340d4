#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "gibbstf/core.hpp"
#include "gibbstf/models.hpp"

namespace gibbstf {

using Rng = std::mt19937_64;

struct SamplerConfig {
    std::uint64_t seed = 0;
    std::uint64_t burn_in = 10000;
    double steps_per_point = 200.0;
    double birth_probability = 0.5;
    // Births that would exceed this count are rejected; the chain then targets
    // the density truncated to n <= max_points.
    std::optional<std::size_t> max_points;

    void validate() const;
};

Configuration sample_poisson(const Window& window, double intensity, std::uint64_t seed);

/// Uniform position in `window` (unused coordinates left at zero).
Position uniform_position(const Window& window, Rng& rng);

/// Metropolis-Hastings birth-death chain for the finite-volume Gibbs density on
/// `window` with empty boundary condition, started from the empty pattern.
class BirthDeathSampler {
public:
    BirthDeathSampler(ModelPtr model, Vector theta, Window window, SamplerConfig config);

    /// One proposal; returns true when it was accepted.
    bool step();
    void run(std::uint64_t steps);

    std::size_t count() const { return index_.size(); }
    std::uint64_t steps_taken() const { return steps_; }
    std::uint64_t accepted() const { return accepted_; }
    Configuration configuration() const;

    /// Number of proposals sample_gibbs() runs after burn-in:
    /// steps_per_point * |W| * exp(-V(x | empty)).
    std::uint64_t default_steps() const;

private:
    double energy_at(const Position& x, std::optional<std::size_t> exclude) const;

    ModelPtr model_;
    Vector theta_;
    Window window_;
    SamplerConfig config_;
    Rng rng_;
    NeighborIndex index_;
    std::vector<std::size_t> ids_;  // live ids, for uniform death proposals
    std::vector<std::size_t> where_;  // id -> position in ids_
    mutable std::vector<double> stats_;
    std::uint64_t steps_ = 0;
    std::uint64_t accepted_ = 0;
};

Configuration sample_gibbs(ModelPtr model, const Vector& theta, const Window& window, const SamplerConfig& config);

/// m independent patterns; replicate r uses seed config.seed + r.
std::vector<Configuration> sample_replicates(ModelPtr model, const Vector& theta, const Window& window,
                                             const SamplerConfig& config, std::size_t m, unsigned threads);

}  // namespace gibbstf
