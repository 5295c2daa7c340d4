#include "gibbstf/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace gibbstf {

TestFunction::TestFunction(std::string label, double range, ThetaDependence dependence, Eval eval, Base base)
    : label_(std::move(label)), range_(range), dependence_(dependence), eval_(std::move(eval)), base_(std::move(base)) {
    if (dependence_ == ThetaDependence::fiksel && !base_) {
        throw std::invalid_argument("TestFunction: fiksel-form functions need a base factor");
    }
}

TestFunction TestFunction::scaled(double c) const {
    TestFunction out = *this;
    std::ostringstream label;
    label << c << "*" << label_;
    out.label_ = label.str();
    out.eval_ = [f = eval_, c](const Site& s, const Vector& t) { return c * f(s, t); };
    if (base_) out.base_ = [b = base_, c](const Site& s) { return c * b(s); };
    if (c != 1.0) out.fiksel_radius_.reset();
    return out;
}

TestFunction& TestFunction::with_fiksel_radius(double r) {
    fiksel_radius_ = r;
    return *this;
}

TestFunction& TestFunction::with_observable(bool v) {
    observable_ = v;
    return *this;
}

TestFunction& TestFunction::with_critical_radii(std::vector<double> radii) {
    critical_radii_ = std::move(radii);
    return *this;
}

namespace {

std::string fmt_radius(const char* name, double r) {
    std::ostringstream s;
    s << name << "(" << r << ")";
    return s.str();
}

const StraussModel& require_strauss(const GibbsModel& model, const char* who) {
    const auto* strauss = dynamic_cast<const StraussModel*>(&model);
    if (!strauss) throw ModelMismatch(std::string(who) + " requires a Strauss model, got " + model.name());
    return *strauss;
}

const AreaModel& require_area(const GibbsModel& model, const char* who) {
    const auto* area = dynamic_cast<const AreaModel*>(&model);
    if (!area) throw ModelMismatch(std::string(who) + " requires an area-interaction model, got " + model.name());
    return *area;
}

double dot(std::span<const double> v, const Vector& theta) {
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e += theta[static_cast<Eigen::Index>(i)] * v[i];
    return e;
}

std::vector<Position> discs_near(const Site& s, double reach) {
    std::vector<Position> out;
    s.phi->for_each_within(s.x, reach, s.exclude, [&](std::size_t id) { out.push_back(s.phi->position(id)); });
    return out;
}

}  // namespace

TestFunction h_constant(double value) {
    std::ostringstream label;
    label << value;
    return TestFunction(label.str(), 0.0, ThetaDependence::none, [value](const Site&, const Vector&) { return value; });
}

TestFunction h_count(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("h_count: r must be positive");
    return TestFunction(fmt_radius("count", r), r, ThetaDependence::none,
                        [r](const Site& s, const Vector&) {
                            return static_cast<double>(s.phi->count_within(s.x, r, s.exclude));
                        })
        .with_critical_radii({r});
}

TestFunction h_fiksel(const GibbsModel& model, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("h_fiksel: r must be positive");
    auto base = [r](const Site& s) { return static_cast<double>(s.phi->count_within(s.x, r, s.exclude)); };
    auto eval = [base](const Site& s, const Vector& theta) { return base(s) * std::exp(dot(s.stats, theta)); };
    return TestFunction(fmt_radius("fiksel", r), std::max(r, model.range()), ThetaDependence::fiksel, eval, base)
        .with_fiksel_radius(r)
        .with_critical_radii({r});
}

TestFunction h_strauss_indicator(const GibbsModel& model, int k) {
    if (k < 1) throw std::invalid_argument("h_strauss_indicator: k must be >= 1");
    const auto& strauss = require_strauss(model, "h_strauss_indicator");
    const double neighbours = static_cast<double>(k - 1);
    std::ostringstream label;
    label << "strauss_indicator(" << k << ")";
    return TestFunction(label.str(), strauss.interaction_radius(), ThetaDependence::statistics,
                        [neighbours](const Site& s, const Vector& theta) {
                            return s.stats[1] == neighbours ? std::exp(neighbours * theta[1]) : 0.0;
                        });
}

std::vector<TestFunction> h_gradV(const GibbsModel& model) {
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < model.parameter_count(); ++i) {
        std::ostringstream label;
        label << "gradV[" << i + 1 << "]";
        out.emplace_back(label.str(), model.range(), ThetaDependence::none,
                         [i](const Site& s, const Vector&) { return s.stats[i]; });
    }
    return out;
}

TestFunction h_exp_energy(const GibbsModel& model) {
    return TestFunction("exp_energy", model.range(), ThetaDependence::statistics,
                        [](const Site& s, const Vector& theta) { return std::exp(dot(s.stats, theta)); });
}

double uncovered_arc_length(const Position& x, double R, std::span<const Position> others) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::pair<double, double>> arcs;
    for (const auto& y : others) {
        const double dx = y[0] - x[0];
        const double dy = y[1] - x[1];
        const double d = std::hypot(dx, dy);
        if (d >= 2.0 * R) continue;
        if (d == 0.0) return 0.0;
        const double centre = std::atan2(dy, dx);
        const double half = std::acos(d / (2.0 * R));
        double a = centre - half;
        double b = centre + half;
        a = std::fmod(a + 2.0 * two_pi, two_pi);
        b = a + 2.0 * half;
        if (b > two_pi) {
            arcs.emplace_back(a, two_pi);
            arcs.emplace_back(0.0, b - two_pi);
        } else {
            arcs.emplace_back(a, b);
        }
    }
    if (arcs.empty()) return two_pi * R;
    std::sort(arcs.begin(), arcs.end());
    double covered = 0.0;
    double lo = arcs.front().first;
    double hi = arcs.front().second;
    for (std::size_t i = 1; i < arcs.size(); ++i) {
        if (arcs[i].first > hi) {
            covered += hi - lo;
            lo = arcs[i].first;
            hi = arcs[i].second;
        } else {
            hi = std::max(hi, arcs[i].second);
        }
    }
    covered += hi - lo;
    return std::max(0.0, R * (two_pi - covered));
}

TestFunction h_per(const GibbsModel& model) {
    const double R = require_area(model, "h_per").radius();
    return TestFunction("per", 2.0 * R, ThetaDependence::none,
                        [R](const Site& s, const Vector&) {
                            const auto near = discs_near(s, 2.0 * R);
                            return uncovered_arc_length(s.x, R, near);
                        })
        .with_observable(true)
        .with_critical_radii({2.0 * R});
}

TestFunction h_iso(const GibbsModel& model) {
    const double R = require_area(model, "h_iso").radius();
    return TestFunction("iso", 2.0 * R, ThetaDependence::none,
                        [R](const Site& s, const Vector&) {
                            const auto near = discs_near(s, 2.0 * R);
                            const double arc = uncovered_arc_length(s.x, R, near);
                            return arc >= 2.0 * std::numbers::pi * R - 1e-9 ? 1.0 : 0.0;
                        })
        .with_observable(true)
        .with_critical_radii({2.0 * R});
}

}  // namespace gibbstf
