#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbstf/core.hpp"

namespace gibbstf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Compact parameter space: closed bounds on every coordinate.
struct ParameterBox {
    Vector lower;
    Vector upper;

    ParameterBox(Vector lo, Vector hi);

    std::size_t size() const { return static_cast<std::size_t>(lower.size()); }
    bool contains(const Vector& theta) const;
    Vector center() const { return 0.5 * (lower + upper); }
    Vector clamp(const Vector& theta) const;
};

enum class ModelKind { poisson, strauss, multi_strauss, area };

/// A stationary finite-range Gibbs model whose local energy is linear in the
/// parameter: V(x | phi; theta) = <theta, V(x | phi)>.
class GibbsModel {
public:
    virtual ~GibbsModel() = default;

    virtual ModelKind kind() const = 0;
    virtual std::string name() const = 0;
    virtual std::size_t parameter_count() const = 0;
    /// Interaction range D: statistics at x only read points within D of x.
    virtual double range() const = 0;

    /// Writes V(x | phi minus `exclude`) into `out` (length parameter_count()).
    virtual void statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                            std::span<double> out) const = 0;

    const ParameterBox& box() const { return box_; }
    /// rho >= 0 with <theta, V(x|phi)> >= -rho for every theta in the box.
    virtual double local_stability_bound() const = 0;

    Vector statistics(const Position& x, const NeighborIndex& phi,
                      std::optional<std::size_t> exclude = std::nullopt) const;
    Vector statistics(const Position& x, const Configuration& phi) const;

protected:
    explicit GibbsModel(ParameterBox box) : box_(std::move(box)) {}

private:
    ParameterBox box_;
};

using ModelPtr = std::shared_ptr<const GibbsModel>;

/// Homogeneous Poisson process written as a one-parameter Gibbs model, V = (1).
class PoissonModel final : public GibbsModel {
public:
    explicit PoissonModel(std::optional<ParameterBox> box = std::nullopt);
    ModelKind kind() const override { return ModelKind::poisson; }
    std::string name() const override { return "poisson"; }
    std::size_t parameter_count() const override { return 1; }
    double range() const override { return 0.0; }
    void statistics(const Position&, const NeighborIndex&, std::optional<std::size_t>,
                    std::span<double> out) const override;
    double local_stability_bound() const override;
    using GibbsModel::statistics;
};

/// Strauss process, V(x|phi) = (1, n_R(x, phi)). theta_2 >= 0 in the box.
class StraussModel final : public GibbsModel {
public:
    explicit StraussModel(double R, std::optional<ParameterBox> box = std::nullopt);
    ModelKind kind() const override { return ModelKind::strauss; }
    std::string name() const override { return "strauss"; }
    std::size_t parameter_count() const override { return 2; }
    double range() const override { return R_; }
    double interaction_radius() const { return R_; }
    void statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                    std::span<double> out) const override;
    double local_stability_bound() const override;
    using GibbsModel::statistics;

    static ParameterBox default_box(double theta2_max = 5.0);

private:
    double R_;
};

/// Piecewise-constant pair interaction on annuli (R_{j-1}, R_j], R_0 = 0:
/// V = (1, #neighbors in annulus 1, ..., #neighbors in annulus q).
class MultiStraussModel final : public GibbsModel {
public:
    MultiStraussModel(std::vector<double> radii, std::optional<ParameterBox> box = std::nullopt);
    ModelKind kind() const override { return ModelKind::multi_strauss; }
    std::string name() const override { return "multi_strauss"; }
    std::size_t parameter_count() const override { return radii_.size() + 1; }
    double range() const override { return radii_.back(); }
    const std::vector<double>& radii() const { return radii_; }
    void statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                    std::span<double> out) const override;
    double local_stability_bound() const override;
    using GibbsModel::statistics;

private:
    std::vector<double> radii_;
};

struct AreaEstimate {
    double value = 0.0;
    double error_bound = 0.0;
};

/// Area of B(x,R) not covered by the discs B(y,R), y in `neighbors`, by
/// midpoint quadrature on a resolution x resolution grid over the bounding box
/// of B(x,R). Returns pi R^2 exactly when no disc overlaps B(x,R).
AreaEstimate uncovered_area(const Position& x, double R, std::span<const Position> neighbors,
                            int resolution = 128);
AreaEstimate uncovered_area(const Position& x, double R, const Configuration& phi, int resolution = 128);

/// Area-interaction process with fixed radius R: V(x|phi) = (1, uncovered area
/// of B(x,R) by the discs of phi). Range 2R.
class AreaModel final : public GibbsModel {
public:
    explicit AreaModel(double R, std::optional<ParameterBox> box = std::nullopt, int resolution = 128);
    ModelKind kind() const override { return ModelKind::area; }
    std::string name() const override { return "area"; }
    std::size_t parameter_count() const override { return 2; }
    double range() const override { return 2.0 * R_; }
    double radius() const { return R_; }
    int resolution() const { return resolution_; }
    void statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                    std::span<double> out) const override;
    double local_stability_bound() const override;
    using GibbsModel::statistics;

private:
    double R_;
    int resolution_;
};

double local_energy(const GibbsModel& model, const Vector& theta, const Position& x, const NeighborIndex& phi,
                    std::optional<std::size_t> exclude = std::nullopt);
double local_energy(const GibbsModel& model, const Vector& theta, const Position& x, const Configuration& phi);
/// Papangelou conditional intensity exp(-local_energy).
double papangelou(const GibbsModel& model, const Vector& theta, const Position& x, const NeighborIndex& phi,
                  std::optional<std::size_t> exclude = std::nullopt);
double papangelou(const GibbsModel& model, const Vector& theta, const Position& x, const Configuration& phi);

/// (beta, gamma) = (exp(-theta_1), exp(-theta_2)) for the two-parameter models.
Vector theta_from_beta_gamma(double beta, double gamma);

}  // namespace gibbstf
