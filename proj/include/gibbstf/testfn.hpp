#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbstf/core.hpp"
#include "gibbstf/models.hpp"

namespace gibbstf {

/// Everything a test function may look at when evaluated at x: the pattern
/// (with `exclude` removed when x is a data point) and the model statistics
/// V(x | phi) already computed for that same pattern.
struct Site {
    Position x{};
    std::optional<std::size_t> exclude;
    std::span<const double> stats;
    const NeighborIndex* phi = nullptr;
};

/// How a test function depends on theta; drives caching in the estimators.
enum class ThetaDependence {
    none,        // h(x, phi)
    statistics,  // h depends on (x, phi) only through V(x|phi)
    fiksel,      // h = base(x, phi) * exp(<theta, V(x|phi)>)
    general,
};

class TestFunction {
public:
    using Eval = std::function<double(const Site&, const Vector&)>;
    using Base = std::function<double(const Site&)>;

    TestFunction(std::string label, double range, ThetaDependence dependence, Eval eval, Base base = {});

    double operator()(const Site& site, const Vector& theta) const { return eval_(site, theta); }
    /// theta-free factor of a fiksel-form function.
    double base(const Site& site) const { return base_(site); }

    const std::string& label() const { return label_; }
    double range() const { return range_; }
    ThetaDependence dependence() const { return dependence_; }
    bool depends_on_theta() const { return dependence_ != ThetaDependence::none; }
    bool fiksel_factor() const { return dependence_ == ThetaDependence::fiksel; }
    // Radius r of a fiksel count function, enabling the |phi_Lambda| pi r^2 shortcut.
    std::optional<double> fiksel_radius() const { return fiksel_radius_; }
    // The sum over data points is computable from the union of balls alone.
    bool observable() const { return observable_; }
    const std::vector<double>& critical_radii() const { return critical_radii_; }

    TestFunction scaled(double c) const;
    TestFunction& with_fiksel_radius(double r);
    TestFunction& with_observable(bool v);
    TestFunction& with_critical_radii(std::vector<double> radii);

private:
    std::string label_;
    double range_;
    ThetaDependence dependence_;
    Eval eval_;
    Base base_;
    std::optional<double> fiksel_radius_;
    bool observable_ = false;
    std::vector<double> critical_radii_;
};

TestFunction h_constant(double value = 1.0);
/// |phi cap B(x, r)|, x itself excluded.
TestFunction h_count(double r);
/// |phi cap B(x, r)| * exp(<theta, V(x|phi)>).
TestFunction h_fiksel(const GibbsModel& model, double r);
/// exp((k-1) theta_2) when x has exactly k-1 Strauss neighbours, else 0.
TestFunction h_strauss_indicator(const GibbsModel& model, int k);
/// The sufficient statistics V_1, ..., V_p (maximum pseudo-likelihood).
std::vector<TestFunction> h_gradV(const GibbsModel& model);
/// exp(<theta, V(x|phi)>).
TestFunction h_exp_energy(const GibbsModel& model);
/// Length of the circle C(x,R) outside the other discs.
TestFunction h_per(const GibbsModel& model);
/// 1 when no other disc meets C(x,R).
TestFunction h_iso(const GibbsModel& model);

/// Arc length of the circle of radius R around x not covered by the closed
/// discs B(y,R); exact up to floating point.
double uncovered_arc_length(const Position& x, double R, std::span<const Position> others);

}  // namespace gibbstf
