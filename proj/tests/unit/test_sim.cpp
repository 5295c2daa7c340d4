#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "gibbstf/sim.hpp"
#include "helpers.hpp"

using namespace gibbstf;

namespace {

Vector th(double a, double b) {
    Vector t(2);
    t << a, b;
    return t;
}

std::size_t close_pairs(const Configuration& c, double R) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < c.size(); ++i) n += testing::scan(c, c[i].position, R, static_cast<long>(i));
    return n / 2;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }
double var(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("poisson sampler counts") {
    const Window w = Window::square(0, 3.1);
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 1000; ++s) counts.push_back(static_cast<double>(sample_poisson(w, 100.0, s).size()));
    const double expect = 100.0 * w.volume();
    CHECK(std::abs(mean(counts) - expect) < 3 * std::sqrt(expect / 1000));
    CHECK(var(counts) == doctest::Approx(expect).epsilon(0.15));

    const auto a = sample_poisson(w, 100.0, 7);
    const auto b = sample_poisson(w, 100.0, 7);
    CHECK(a.points() == b.points());
    for (const auto& p : a.points()) CHECK(w.contains(p.position));
    CHECK_THROWS_AS(sample_poisson(w, 0.0, 1), std::invalid_argument);
}

TEST_CASE("sampler config validation") {
    SamplerConfig c;
    CHECK_NOTHROW(c.validate());
    c.steps_per_point = 0.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.steps_per_point = 10;
    c.birth_probability = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    const auto m = std::make_shared<StraussModel>(0.05);
    CHECK_THROWS_AS(sample_gibbs(m, th(0, -1), Window::square(0, 1), SamplerConfig{}), std::invalid_argument);
}

TEST_CASE("strauss with theta2 = 0 is poisson") {
    const auto m = std::make_shared<StraussModel>(0.05);
    const Window w = Window::square(0, 1);
    const double beta = 50.0;
    SamplerConfig cfg;
    cfg.burn_in = 2000;
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 200; ++s) {
        cfg.seed = s;
        counts.push_back(static_cast<double>(sample_gibbs(m, th(-std::log(beta), 0.0), w, cfg).size()));
    }
    CHECK(std::abs(mean(counts) - beta) < 3 * std::sqrt(beta / 200));
}

TEST_CASE("gibbs sampler is deterministic given the seed") {
    const auto m = std::make_shared<StraussModel>(0.05);
    SamplerConfig cfg;
    cfg.seed = 11;
    const Vector t = theta_from_beta_gamma(100, 0.5);
    const auto a = sample_gibbs(m, t, Window::square(0, 1), cfg);
    const auto b = sample_gibbs(m, t, Window::square(0, 1), cfg);
    CHECK(a.points() == b.points());
    cfg.seed = 12;
    CHECK(sample_gibbs(m, t, Window::square(0, 1), cfg).points() != a.points());

    const auto reps = sample_replicates(m, t, Window::square(0, 1), cfg, 3, 2);
    REQUIRE(reps.size() == 3);
    SamplerConfig c1 = cfg;
    c1.seed = cfg.seed + 2;
    CHECK(reps[2].points() == sample_gibbs(m, t, Window::square(0, 1), c1).points());
}

TEST_CASE("strauss repulsion lowers the count below poisson") {
    const auto m = std::make_shared<StraussModel>(0.05);
    const Window w = Window::square(-0.05, 3.05);
    SamplerConfig cfg;
    cfg.seed = 3;
    const auto phi = sample_gibbs(m, theta_from_beta_gamma(100, 0.5), w, cfg);
    const double poisson = 100 * w.volume();
    CHECK(static_cast<double>(phi.size()) < poisson - 3 * std::sqrt(poisson));
    CHECK(phi.size() > 500);
}

TEST_CASE("detailed balance on a tiny window") {
    // All pairs interact, so the count distribution is explicit.
    const double beta = 2.0, gamma = 0.5;
    const std::size_t n_max = 3;
    const auto m = std::make_shared<StraussModel>(2.0);
    SamplerConfig cfg;
    cfg.seed = 5;
    cfg.max_points = n_max;
    BirthDeathSampler s(m, theta_from_beta_gamma(beta, gamma), Window::square(0, 1), cfg);
    s.run(1000);
    std::vector<double> freq(n_max + 1, 0.0);
    const int steps = 1000000;
    for (int i = 0; i < steps; ++i) {
        s.step();
        freq[s.count()] += 1.0 / steps;
    }
    std::vector<double> p(n_max + 1);
    double z = 0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        p[n] = std::pow(beta, n) * std::pow(gamma, n * (n - 1) / 2.0) / std::tgamma(n + 1.0);
        z += p[n];
    }
    double tv = 0;
    for (std::size_t n = 0; n <= n_max; ++n) tv += 0.5 * std::abs(freq[n] - p[n] / z);
    CHECK(tv < 0.02);
}

TEST_CASE("monotone repulsion in gamma") {
    const auto m = std::make_shared<StraussModel>(0.05);
    const Window w = Window::square(0, 1);
    std::vector<double> means, ses;
    for (double gamma : {0.9, 0.5, 0.1}) {
        std::vector<double> pairs;
        SamplerConfig cfg;
        for (std::uint64_t s = 0; s < 40; ++s) {
            cfg.seed = 100 + s;
            pairs.push_back(static_cast<double>(close_pairs(sample_gibbs(m, theta_from_beta_gamma(100, gamma), w, cfg), 0.05)));
        }
        means.push_back(mean(pairs));
        ses.push_back(std::sqrt(var(pairs) / pairs.size()));
    }
    for (std::size_t i = 0; i + 1 < means.size(); ++i) {
        CHECK(means[i + 1] <= means[i] + 3 * std::hypot(ses[i], ses[i + 1]));
    }
    CHECK(means.back() < means.front());
}
