#include <doctest.h>

#include <cmath>
#include <memory>

#include "gibbstf/diagnostics.hpp"
#include "helpers.hpp"

using namespace gibbstf;

namespace {

Vector th(double a, double b) {
    Vector t(2);
    t << a, b;
    return t;
}

const Window carrier = Window::square(-0.05, 1.05);
const Window lambda = Window::square(0, 1);

const std::vector<Configuration>& strauss_patterns() {
    static const std::vector<Configuration> p = [] {
        SamplerConfig cfg;
        cfg.seed = 1000;
        return sample_replicates(std::make_shared<StraussModel>(0.05), theta_from_beta_gamma(100, 0.5), carrier, cfg,
                                 100, 1);
    }();
    return p;
}

}  // namespace

TEST_CASE("gnz balance for poisson") {
    const PoissonModel m;
    std::vector<Configuration> pats;
    for (std::uint64_t s = 0; s < 60; ++s) pats.push_back(sample_poisson(lambda, 50, s));
    Vector t(1);
    t << -std::log(50.0);
    const std::vector<TestFunction> h{h_constant()};
    const auto r = gnz_balance(pats, lambda, h, m, t);
    CHECK(r.passed);
    CHECK(r.replicates == 60);
    CHECK(std::abs(r.entries[0].z) < 3);
    std::vector<Configuration> few(pats.begin(), pats.begin() + 10);
    CHECK_THROWS_AS(gnz_balance(few, lambda, h, m, t), std::invalid_argument);
}

TEST_CASE("gnz balance for strauss at the true parameter and power at a wrong one") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    const std::vector<TestFunction> h{h_count(0.05), h_strauss_indicator(m, 1), h_strauss_indicator(m, 2)};
    const auto at_truth = gnz_balance(pats, lambda, h, m, theta_from_beta_gamma(100, 0.5));
    CHECK(at_truth.passed);
    for (const auto& e : at_truth.entries) CHECK(std::abs(e.z) < 3);
    const std::vector<TestFunction> hc{h_count(0.05)};
    const auto wrong = gnz_balance(pats, lambda, hc, m, theta_from_beta_gamma(100, 0.9));
    CHECK(!wrong.passed);
    CHECK(std::abs(wrong.entries[0].z) > 3);

    // z is unchanged when h is scaled.
    const std::vector<TestFunction> scaled{h_count(0.05).scaled(7.5)};
    const auto a = gnz_balance(pats, lambda, hc, m, theta_from_beta_gamma(100, 0.5));
    const auto b = gnz_balance(pats, lambda, scaled, m, theta_from_beta_gamma(100, 0.5));
    CHECK(std::abs(a.entries[0].z - b.entries[0].z) < 1e-10);
}

TEST_CASE("gnz balance simulating overload is deterministic") {
    const auto m = std::make_shared<StraussModel>(0.05);
    SamplerConfig cfg;
    cfg.seed = 9;
    const std::vector<TestFunction> h{h_count(0.05)};
    const auto a = gnz_balance(m, theta_from_beta_gamma(100, 0.5), h, 30, carrier, lambda, cfg);
    const auto b = gnz_balance(m, theta_from_beta_gamma(100, 0.5), h, 30, carrier, lambda, cfg, {}, 2);
    CHECK(a.entries[0].mean == b.entries[0].mean);
    CHECK(a.replicates == 30);
}

TEST_CASE("contrast profile: minimum at the truth for the two indicators") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    const Vector star = theta_from_beta_gamma(100, 0.5);
    std::vector<double> a1, a2;
    for (int i = -3; i <= 3; ++i) {
        a1.push_back(star[0] + 0.1 * i);
        a2.push_back(star[1] + 0.15 * i);
    }
    const auto grid = product_grid(a1, a2);
    CHECK(grid.size() == 49);
    const std::vector<TestFunction> h{h_strauss_indicator(m, 1), h_strauss_indicator(m, 2)};
    const auto r = contrast_profile(pats, lambda, m, star, h, grid, QuadratureScheme::grid(1024));
    for (double u : r.U) CHECK(u >= 0.0);
    CHECK(r.argmin == 24);
    CHECK(r.U[24] == 0.0);
    CHECK(r.unique);
}

TEST_CASE("contrast profile: the exponential pair has a second root") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    const Vector star = theta_from_beta_gamma(100, 0.5);
    const auto q = QuadratureScheme::grid(1024);
    // E exp(-V*) from the same dummy points the profile uses.
    double mean_papangelou = 0;
    for (const auto& phi : pats) {
        NeighborIndex idx(phi, 0.05);
        const std::vector<TestFunction> h1{h_constant()};
        const SiteTable t(phi, idx, lambda, m, h1, q);
        mean_papangelou += t.integrals(star)[0] / lambda.volume() / pats.size();
    }
    const Vector tilde = th(-std::log(mean_papangelou), 0.0);
    const std::vector<TestFunction> h{h_constant(), h_exp_energy(m)};
    const auto r = contrast_profile(pats, lambda, m, star, h, {star, tilde, th(tilde[0] + 0.3, 0.0), th(star[0], 1.5)}, q);
    CHECK(r.U[0] == 0.0);
    CHECK(r.U[1] < 1e-20);
    CHECK(!r.unique);
    CHECK(r.near_minimum == std::vector<std::size_t>{1});
    CHECK(r.U[2] > r.U[1] + 3 * r.se[2]);
    CHECK(r.U[3] > 3 * r.se[3]);
}

TEST_CASE("det check: gradV gives consistent") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    std::vector<Configuration> some(pats.begin(), pats.begin() + 20);
    DetCheckOptions opt;
    opt.n_tuples = 5000;
    opt.locations_per_pattern = 500;
    const auto h = h_gradV(m);
    const auto r = det_check(some, lambda, m, theta_from_beta_gamma(100, 0.5), h, opt);
    CHECK(r.verdict == DetVerdict::consistent_with_Det);
    CHECK(r.positive >= 0.95);
    CHECK(r.negative == 0.0);
    CHECK(r.positive + r.negative + r.null == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.samples == 20 * 500);
    CHECK(r.bins.size() >= 2);
}

TEST_CASE("det check: indicator pair is consistent") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    std::vector<Configuration> some(pats.begin(), pats.begin() + 20);
    DetCheckOptions opt;
    opt.n_tuples = 5000;
    opt.locations_per_pattern = 500;
    const std::vector<TestFunction> h{h_strauss_indicator(m, 1), h_strauss_indicator(m, 2)};
    const auto r = det_check(some, lambda, m, theta_from_beta_gamma(100, 0.5), h, opt);
    CHECK(r.verdict == DetVerdict::consistent_with_Det);
}

TEST_CASE("det check: exponential pair at the second root is violated") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    std::vector<Configuration> some(pats.begin(), pats.begin() + 20);
    DetCheckOptions opt;
    opt.n_tuples = 2000;
    opt.locations_per_pattern = 500;
    const std::vector<TestFunction> h{h_constant(), h_exp_energy(m)};
    const auto r = det_check(some, lambda, m, th(-4.2, 0.0), h, opt);
    CHECK(r.verdict == DetVerdict::violated);
    CHECK(r.null == 1.0);
}

TEST_CASE("det check needs support in p bins") {
    const StraussModel m(0.05);
    std::vector<Configuration> empty(5, Configuration(carrier));
    const auto h = h_gradV(m);
    CHECK_THROWS_AS(det_check(empty, lambda, m, th(-4, 1), h, {}), InsufficientSupport);
}

TEST_CASE("det check with more test functions than parameters") {
    const StraussModel m(0.05);
    const auto& pats = strauss_patterns();
    std::vector<Configuration> some(pats.begin(), pats.begin() + 10);
    DetCheckOptions opt;
    opt.n_tuples = 2000;
    opt.locations_per_pattern = 300;
    auto h = h_gradV(m);
    h.push_back(h_strauss_indicator(m, 1));
    const auto r = det_check(some, lambda, m, theta_from_beta_gamma(100, 0.5), h, opt);
    CHECK(r.coefficients_found);
    CHECK(r.coefficients.size() == 3);
}

TEST_CASE("nonnegative combination search") {
    Matrix M(3, 2);
    M << 1, -1, 1, 0, 0, 1;
    const Vector c = nonnegative_combination(M);
    CHECK(((M * c).array() >= -1e-12).all());
    CHECK((M * c).sum() > 0.1);
    CHECK((c.array().abs() <= 1 + 1e-12).all());

    Matrix N(2, 2);
    N << 1, -1, -1, 1;
    const Vector d = nonnegative_combination(N);
    CHECK(std::abs((N * d).sum()) < 1e-12);
    CHECK(((N * d).array() >= -1e-12).all());

    Matrix P(4, 3);
    P << 1, 2, -1, -3, 1, 0, 0, -1, 2, 1, 1, 1;
    const Vector e = nonnegative_combination(P);
    CHECK(((P * e).array() >= -1e-12).all());
}
