#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gibbstf/testfn.hpp"
#include "helpers.hpp"

using namespace gibbstf;

namespace {

Vector th(double a, double b) {
    Vector t(2);
    t << a, b;
    return t;
}

// Evaluates h at a free location x against the whole of cfg.
double at(const TestFunction& h, const GibbsModel& m, const Vector& theta, const Position& x, const Configuration& cfg) {
    NeighborIndex idx(cfg, std::max({h.range(), m.range(), 1e-3}));
    const Vector v = m.statistics(x, idx, std::nullopt);
    return h(Site{x, std::nullopt, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), &idx}, theta);
}

// Evaluates h at data point i against cfg minus that point.
double at_point(const TestFunction& h, const GibbsModel& m, const Vector& theta, std::size_t i,
                const Configuration& cfg) {
    NeighborIndex idx(cfg, std::max({h.range(), m.range(), 1e-3}));
    const Position x = cfg[i].position;
    const Vector v = m.statistics(x, idx, i);
    return h(Site{x, i, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), &idx}, theta);
}

}  // namespace

TEST_CASE("count examples") {
    const StraussModel m(0.05);
    const Window w = Window::square(-1, 1);
    const Vector t = th(-4, 1);
    const auto h = h_count(0.05);
    CHECK(at(h, m, t, {0, 0, 0}, Configuration(w)) == 0.0);
    CHECK(at(h, m, t, {0, 0, 0}, testing::pattern(w, {{0.05, 0}})) == 1.0);
    CHECK(at(h, m, t, {0, 0, 0}, testing::pattern(w, {{0.0501, 0}})) == 0.0);
    const auto phi = testing::uniform_pattern(Window::square(0, 1), 500, 3);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const Position x{std::uniform_real_distribution<double>(0, 1)(rng), std::uniform_real_distribution<double>(0, 1)(rng), 0};
        CHECK(at(h, m, t, x, phi) == static_cast<double>(testing::scan(phi, x, 0.05)));
    }
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(at_point(h, m, t, i, phi) == static_cast<double>(testing::scan(phi, phi[i].position, 0.05, static_cast<long>(i))));
    }
    CHECK_THROWS_AS(h_count(0.0), std::invalid_argument);
}

TEST_CASE("fiksel is count times exp energy") {
    const StraussModel m(0.05);
    const auto h = h_fiksel(m, 0.08);
    CHECK(h.fiksel_factor());
    CHECK(h.fiksel_radius() == 0.08);
    CHECK(h.range() == 0.08);
    CHECK(at(h, m, th(-4, 1), {0, 0, 0}, Configuration(Window::square(-1, 1))) == 0.0);
    const auto phi = testing::uniform_pattern(Window::square(0, 1), 400, 8);
    const Vector t = th(-4.5, 0.7);
    for (const Position x : {Position{0.5, 0.5, 0}, Position{0.2, 0.7, 0}, Position{0.9, 0.1, 0}}) {
        const double expect = at(h_count(0.08), m, t, x, phi) * std::exp(local_energy(m, t, x, phi));
        CHECK(at(h, m, t, x, phi) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("strauss indicator examples") {
    const StraussModel m(0.05);
    const Window w = Window::square(-1, 1);
    const Vector t = th(-4, std::log(2.0));
    CHECK(at(h_strauss_indicator(m, 1), m, t, {0, 0, 0}, testing::pattern(w, {{0.3, 0}})) == 1.0);
    CHECK(at(h_strauss_indicator(m, 2), m, t, {0, 0, 0}, testing::pattern(w, {{0.03, 0}})) == doctest::Approx(2.0));
    CHECK(at(h_strauss_indicator(m, 2), m, t, {0, 0, 0}, testing::pattern(w, {{0.3, 0}})) == 0.0);
    CHECK(at(h_strauss_indicator(m, 3), m, t, {0, 0, 0}, testing::pattern(w, {{0.03, 0}, {0, 0.02}})) ==
          doctest::Approx(4.0));
    CHECK_THROWS_AS(h_strauss_indicator(m, 0), std::invalid_argument);
    CHECK_THROWS_AS(h_strauss_indicator(AreaModel(0.05), 1), ModelMismatch);
    CHECK_THROWS_AS(h_strauss_indicator(PoissonModel(), 1), ModelMismatch);
}

TEST_CASE("gradV reproduces the sufficient statistics") {
    const StraussModel m(0.05);
    const auto hs = h_gradV(m);
    REQUIRE(hs.size() == 2);
    const auto phi = testing::uniform_pattern(Window::square(0, 1), 300, 2);
    const Vector t = th(-4.2, 0.9);
    for (const Position x : {Position{0.5, 0.5, 0}, Position{0.01, 0.3, 0}}) {
        CHECK(at(hs[0], m, t, x, phi) == 1.0);
        CHECK(at(hs[1], m, t, x, phi) == static_cast<double>(testing::scan(phi, x, 0.05)));
        const double lin = t[0] * at(hs[0], m, t, x, phi) + t[1] * at(hs[1], m, t, x, phi);
        CHECK(lin == doctest::Approx(local_energy(m, t, x, phi)));
    }
}

TEST_CASE("exp energy") {
    const StraussModel m(0.05);
    const auto phi = testing::uniform_pattern(Window::square(0, 1), 300, 2);
    const Vector t = th(-4.2, 0.9);
    const Position x{0.4, 0.4, 0};
    CHECK(at(h_exp_energy(m), m, t, x, phi) == doctest::Approx(1.0 / papangelou(m, t, x, phi)));
}

TEST_CASE("per and iso examples") {
    const double R = 0.05;
    const AreaModel m(R);
    const Window w = Window::square(-1, 1);
    const Vector t = th(-4, 10);
    const double full = 2 * std::numbers::pi * R;
    CHECK(at(h_per(m), m, t, {0, 0, 0}, Configuration(w)) == doctest::Approx(full));
    CHECK(at(h_iso(m), m, t, {0, 0, 0}, Configuration(w)) == 1.0);
    CHECK(at(h_per(m), m, t, {0, 0, 0}, testing::pattern(w, {{0.1, 0}})) == doctest::Approx(full));
    CHECK(at(h_iso(m), m, t, {0, 0, 0}, testing::pattern(w, {{0.1, 0}})) == 1.0);
    CHECK(at(h_per(m), m, t, {0, 0, 0}, testing::pattern(w, {{0.3, 0}})) == doctest::Approx(full));
    // Neighbour at distance R covers a third of the circle.
    CHECK(at(h_per(m), m, t, {0, 0, 0}, testing::pattern(w, {{R, 0}})) == doctest::Approx(full * 2 / 3));
    CHECK(at(h_iso(m), m, t, {0, 0, 0}, testing::pattern(w, {{R, 0}})) == 0.0);
    CHECK_THROWS_AS(h_per(StraussModel(R)), ModelMismatch);
    CHECK_THROWS_AS(h_iso(StraussModel(R)), ModelMismatch);
}

TEST_CASE("per and iso stay in range") {
    const double R = 0.05;
    const AreaModel m(R);
    const auto phi = testing::uniform_pattern(Window::square(0, 1), 400, 13);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double p = at_point(h_per(m), m, th(0, 0), i, phi);
        const double iso = at_point(h_iso(m), m, th(0, 0), i, phi);
        CHECK(p >= 0.0);
        CHECK(p <= 2 * std::numbers::pi * R + 1e-12);
        CHECK((iso == 0.0 || iso == 1.0));
    }
}

TEST_CASE("sum of per over the pattern is the perimeter of the union") {
    const double R = 0.05;
    const AreaModel m(R);
    for (std::uint64_t seed : {1u, 2u}) {
        const auto phi = testing::uniform_pattern(Window::square(0, 1), 60, seed);
        double total = 0;
        for (std::size_t i = 0; i < phi.size(); ++i) total += at_point(h_per(m), m, th(0, 0), i, phi);
        const double raster = testing::raster_perimeter(phi, R, 0.001);
        CHECK(std::abs(total - raster) < 0.02 * raster);
    }
}

TEST_CASE("invariances of every shipped function") {
    const StraussModel strauss(0.05);
    const AreaModel area(0.04);
    struct Case {
        const GibbsModel* model;
        TestFunction h;
        bool exact;
    };
    std::vector<Case> cases{{&strauss, h_constant(2.0), true},
                            {&strauss, h_count(0.06), true},
                            {&strauss, h_fiksel(strauss, 0.06), false},
                            {&strauss, h_strauss_indicator(strauss, 2), false},
                            {&strauss, h_gradV(strauss)[1], true},
                            {&strauss, h_exp_energy(strauss), false},
                            {&area, h_per(area), false},
                            {&area, h_iso(area), true}};
    const Window w = Window::square(0, 1);
    std::vector<MarkedPoint> base;
    const auto raw = testing::uniform_pattern(w, 500, 21);
    for (const auto& p : raw.points()) {
        base.push_back({{std::ldexp(std::round(std::ldexp(p.position[0], 20)), -20),
                         std::ldexp(std::round(std::ldexp(p.position[1], 20)), -20), 0}, std::nullopt});
    }
    const Configuration phi(w, base);
    const Position shift{0.5, 0.25, 0};
    std::vector<MarkedPoint> moved;
    for (const auto& p : phi.points()) moved.push_back({{p.position[0] + shift[0], p.position[1] + shift[1], 0}, std::nullopt});
    const Configuration phi2(Window::rect(0.5, 0.25, 1.5, 1.25), moved);
    const Vector t = th(-4.0, 0.6);
    std::mt19937_64 rng(5);
    for (auto& c : cases) {
        CAPTURE(c.h.label());
        for (int trial = 0; trial < 20; ++trial) {
            const Position x{std::ldexp(std::round(std::ldexp(std::uniform_real_distribution<double>(0.2, 0.8)(rng), 20)), -20),
                             std::ldexp(std::round(std::ldexp(std::uniform_real_distribution<double>(0.2, 0.8)(rng), 20)), -20), 0};
            const double v = at(c.h, *c.model, t, x, phi);
            const double v2 = at(c.h, *c.model, t, {x[0] + shift[0], x[1] + shift[1], 0}, phi2);
            if (c.exact) CHECK(v == v2);
            else CHECK(v == doctest::Approx(v2).epsilon(1e-9));

            // Deleting everything beyond the declared range changes nothing.
            const double reach = std::max(c.h.range(), c.model->range());
            std::vector<MarkedPoint> near;
            for (const auto& p : phi.points()) {
                if (within(p.position, x, reach)) near.push_back(p);
            }
            CHECK(at(c.h, *c.model, t, x, Configuration(w, near)) == v);

            if (!c.h.depends_on_theta()) {
                for (int k = 0; k < 5; ++k) {
                    const Vector t2 = th(std::uniform_real_distribution<double>(-8, 8)(rng),
                                         std::uniform_real_distribution<double>(0, 4)(rng));
                    CHECK(at(c.h, *c.model, t2, x, phi) == v);
                }
            }
        }
    }
}

TEST_CASE("scaled test function") {
    const StraussModel m(0.05);
    const auto phi = testing::uniform_pattern(Window::square(0, 1), 300, 2);
    const Position x{0.5, 0.5, 0};
    const auto h = h_count(0.05);
    CHECK(at(h.scaled(3.0), m, th(-4, 1), x, phi) == 3.0 * at(h, m, th(-4, 1), x, phi));
}
