#include "gibbstf/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "gibbstf/parallel.hpp"

namespace gibbstf {

void SamplerConfig::validate() const {
    if (!(steps_per_point >= 1.0)) throw std::invalid_argument("SamplerConfig: steps_per_point must be >= 1");
    if (!(birth_probability > 0.0 && birth_probability < 1.0)) {
        throw std::invalid_argument("SamplerConfig: birth_probability must lie in (0,1)");
    }
}

Position uniform_position(const Window& window, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Position p{0.0, 0.0, 0.0};
    for (int a = 0; a < window.dim(); ++a) p[a] = window.lower()[a] + unit(rng) * window.side(a);
    return p;
}

Configuration sample_poisson(const Window& window, double intensity, std::uint64_t seed) {
    if (!(intensity > 0.0)) throw std::invalid_argument("sample_poisson: intensity must be positive");
    Rng rng(seed);
    std::poisson_distribution<long> count(intensity * window.volume());
    const long n = count(rng);
    std::vector<MarkedPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) pts.push_back({uniform_position(window, rng), std::nullopt});
    return Configuration(window, std::move(pts));
}

BirthDeathSampler::BirthDeathSampler(ModelPtr model, Vector theta, Window window, SamplerConfig config)
    : model_(std::move(model)),
      theta_(std::move(theta)),
      window_(std::move(window)),
      config_(config),
      rng_(config.seed),
      index_(window_, model_->range()),
      stats_(model_->parameter_count()) {
    config_.validate();
    if (static_cast<std::size_t>(theta_.size()) != model_->parameter_count()) {
        throw std::invalid_argument("BirthDeathSampler: theta has the wrong length");
    }
}

double BirthDeathSampler::energy_at(const Position& x, std::optional<std::size_t> exclude) const {
    model_->statistics(x, index_, exclude, stats_);
    double e = 0.0;
    for (std::size_t i = 0; i < stats_.size(); ++i) e += theta_[static_cast<Eigen::Index>(i)] * stats_[i];
    if (std::isnan(e)) throw NonFinite("BirthDeathSampler: local energy is NaN");
    return e;
}

bool BirthDeathSampler::step() {
    ++steps_;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pb = config_.birth_probability;
    const double volume = window_.volume();
    const std::size_t n = index_.size();
    if (unit(rng_) < pb) {
        const Position x = uniform_position(window_, rng_);
        if (config_.max_points && n >= *config_.max_points) return false;
        const double e = energy_at(x, std::nullopt);
        const double ratio = (1.0 - pb) / pb * volume * std::exp(-e) / static_cast<double>(n + 1);
        if (unit(rng_) < ratio) {
            const std::size_t id = index_.insert(x);
            if (where_.size() <= id) where_.resize(id + 1);
            where_[id] = ids_.size();
            ids_.push_back(id);
            ++accepted_;
            return true;
        }
        return false;
    }
    if (n == 0) return false;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t slot = pick(rng_);
    const std::size_t id = ids_[slot];
    const double e = energy_at(index_.position(id), id);
    const double ratio = pb / (1.0 - pb) * static_cast<double>(n) / (volume * std::exp(-e));
    if (unit(rng_) < ratio) {
        index_.erase(id);
        const std::size_t last = ids_.back();
        ids_[slot] = last;
        where_[last] = slot;
        ids_.pop_back();
        ++accepted_;
        return true;
    }
    return false;
}

void BirthDeathSampler::run(std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) step();
}

Configuration BirthDeathSampler::configuration() const {
    std::vector<MarkedPoint> pts;
    pts.reserve(ids_.size());
    for (std::size_t id : ids_) pts.push_back({index_.position(id), std::nullopt});
    return Configuration(window_, std::move(pts));
}

std::uint64_t BirthDeathSampler::default_steps() const {
    NeighborIndex empty(window_, model_->range());
    Vector v = model_->statistics(window_.lower(), empty, std::nullopt);
    const double expected = window_.volume() * std::exp(-theta_.dot(v));
    return static_cast<std::uint64_t>(std::ceil(config_.steps_per_point * std::max(1.0, expected)));
}

Configuration sample_gibbs(ModelPtr model, const Vector& theta, const Window& window, const SamplerConfig& config) {
    if (!model->box().contains(theta)) throw std::invalid_argument("sample_gibbs: theta outside the parameter box");
    BirthDeathSampler sampler(std::move(model), theta, window, config);
    sampler.run(config.burn_in + sampler.default_steps());
    return sampler.configuration();
}

std::vector<Configuration> sample_replicates(ModelPtr model, const Vector& theta, const Window& window,
                                             const SamplerConfig& config, std::size_t m, unsigned threads) {
    std::vector<std::optional<Configuration>> slots(m);
    parallel_for(m, threads, [&](std::size_t r) {
        SamplerConfig c = config;
        c.seed = config.seed + r;
        slots[r] = sample_gibbs(model, theta, window, c);
    });
    std::vector<Configuration> out;
    out.reserve(m);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace gibbstf
