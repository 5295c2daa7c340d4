#include "gibbstf/models.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace gibbstf {

ParameterBox::ParameterBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() == 0) {
        throw std::invalid_argument("ParameterBox: bounds must be non-empty and of equal length");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
            throw std::invalid_argument("ParameterBox: bounds must be finite with lower <= upper");
        }
    }
}

bool ParameterBox::contains(const Vector& theta) const {
    if (theta.size() != lower.size()) return false;
    return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

Vector ParameterBox::clamp(const Vector& theta) const { return theta.cwiseMax(lower).cwiseMin(upper); }

Vector GibbsModel::statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude) const {
    Vector v(static_cast<Eigen::Index>(parameter_count()));
    statistics(x, phi, exclude, std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
    return v;
}

Vector GibbsModel::statistics(const Position& x, const Configuration& phi) const {
    NeighborIndex index(phi, range());
    return statistics(x, index, std::nullopt);
}

namespace {

ParameterBox two_param_box(double t1lo, double t1hi, double t2lo, double t2hi) {
    Vector lo(2), hi(2);
    lo << t1lo, t2lo;
    hi << t1hi, t2hi;
    return ParameterBox(lo, hi);
}

ParameterBox multi_box(std::size_t q) {
    Vector lo = Vector::Zero(static_cast<Eigen::Index>(q + 1));
    Vector hi = Vector::Constant(static_cast<Eigen::Index>(q + 1), 5.0);
    lo[0] = -10.0;
    hi[0] = 10.0;
    return ParameterBox(lo, hi);
}

}  // namespace

PoissonModel::PoissonModel(std::optional<ParameterBox> box)
    : GibbsModel(box ? *box : ParameterBox(Vector::Constant(1, -10.0), Vector::Constant(1, 10.0))) {
    if (this->box().size() != 1) throw std::invalid_argument("PoissonModel: box must have one coordinate");
}

void PoissonModel::statistics(const Position&, const NeighborIndex&, std::optional<std::size_t>,
                              std::span<double> out) const {
    out[0] = 1.0;
}

double PoissonModel::local_stability_bound() const { return std::max(0.0, -box().lower[0]); }

ParameterBox StraussModel::default_box(double theta2_max) { return two_param_box(-10.0, 10.0, 0.0, theta2_max); }

StraussModel::StraussModel(double R, std::optional<ParameterBox> box)
    : GibbsModel(box ? *box : default_box()), R_(R) {
    if (!(R > 0.0)) throw std::invalid_argument("StraussModel: R must be positive");
    if (this->box().size() != 2) throw std::invalid_argument("StraussModel: box must have two coordinates");
    if (this->box().lower[1] < 0.0) throw std::invalid_argument("StraussModel: theta_2 must be bounded below by 0");
}

void StraussModel::statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                              std::span<double> out) const {
    out[0] = 1.0;
    out[1] = static_cast<double>(phi.count_within(x, R_, exclude));
}

double StraussModel::local_stability_bound() const { return std::max(0.0, -box().lower[0]); }

MultiStraussModel::MultiStraussModel(std::vector<double> radii, std::optional<ParameterBox> box)
    : GibbsModel(box ? *box : multi_box(radii.size())),
      radii_(std::move(radii)) {
    if (radii_.empty()) throw std::invalid_argument("MultiStraussModel: need at least one radius");
    for (std::size_t j = 0; j < radii_.size(); ++j) {
        if (!(radii_[j] > 0.0) || (j > 0 && !(radii_[j] > radii_[j - 1]))) {
            throw std::invalid_argument("MultiStraussModel: radii must be positive and increasing");
        }
    }
    if (this->box().size() != radii_.size() + 1) throw std::invalid_argument("MultiStraussModel: box size mismatch");
    if (radii_.size() == 0 || (this->box().lower.tail(static_cast<Eigen::Index>(radii_.size())).array() < 0.0).any()) {
        throw std::invalid_argument("MultiStraussModel: interaction coordinates must be bounded below by 0");
    }
}

void MultiStraussModel::statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                                   std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    phi.for_each_within(x, radii_.back(), exclude, [&](std::size_t id) {
        const double d2 = squared_distance(phi.position(id), x);
        for (std::size_t j = 0; j < radii_.size(); ++j) {
            if (d2 <= radii_[j] * radii_[j]) {
                out[j + 1] += 1.0;
                break;
            }
        }
    });
}

double MultiStraussModel::local_stability_bound() const { return std::max(0.0, -box().lower[0]); }

AreaEstimate uncovered_area(const Position& x, double R, std::span<const Position> neighbors, int resolution) {
    if (!(R > 0.0)) throw std::invalid_argument("uncovered_area: R must be positive");
    if (resolution < 1) throw std::invalid_argument("uncovered_area: resolution must be positive");
    const double full = std::numbers::pi * R * R;
    std::vector<std::array<double, 2>> offsets;
    for (const auto& y : neighbors) {
        const double dx = y[0] - x[0];
        const double dy = y[1] - x[1];
        if (dx * dx + dy * dy < 4.0 * R * R) offsets.push_back({dx, dy});
    }
    if (offsets.empty()) return {full, 0.0};

    const double h = 2.0 * R / resolution;
    const double half_diag = h * std::numbers::sqrt2 / 2.0;
    const double cell = h * h;
    const double R2 = R * R;
    std::size_t inside = 0;
    std::size_t ambiguous = 0;
    for (int j = 0; j < resolution; ++j) {
        const double cy = -R + (j + 0.5) * h;
        for (int i = 0; i < resolution; ++i) {
            const double cx = -R + (i + 0.5) * h;
            const double d_self = std::sqrt(cx * cx + cy * cy);
            bool near_edge = std::abs(d_self - R) <= half_diag;
            if (d_self > R + half_diag) continue;
            bool covered = false;
            for (const auto& o : offsets) {
                const double ex = cx - o[0];
                const double ey = cy - o[1];
                const double e2 = ex * ex + ey * ey;
                if (e2 <= R2) covered = true;
                if (std::abs(std::sqrt(e2) - R) <= half_diag) near_edge = true;
            }
            if (cx * cx + cy * cy <= R2 && !covered) ++inside;
            if (near_edge) ++ambiguous;
        }
    }
    return {std::min(full, static_cast<double>(inside) * cell), static_cast<double>(ambiguous) * cell};
}

AreaEstimate uncovered_area(const Position& x, double R, const Configuration& phi, int resolution) {
    std::vector<Position> pts;
    for (const auto& p : phi.points()) {
        if (p.position != x) pts.push_back(p.position);
    }
    return uncovered_area(x, R, pts, resolution);
}

AreaModel::AreaModel(double R, std::optional<ParameterBox> box, int resolution)
    : GibbsModel(box ? *box
                     : two_param_box(-10.0, 10.0, -10.0 / (std::numbers::pi * R * R),
                                     10.0 / (std::numbers::pi * R * R))),
      R_(R),
      resolution_(resolution) {
    if (!(R > 0.0)) throw std::invalid_argument("AreaModel: R must be positive");
    if (this->box().size() != 2) throw std::invalid_argument("AreaModel: box must have two coordinates");
}

void AreaModel::statistics(const Position& x, const NeighborIndex& phi, std::optional<std::size_t> exclude,
                           std::span<double> out) const {
    std::vector<Position> near;
    phi.for_each_within(x, 2.0 * R_, exclude, [&](std::size_t id) { near.push_back(phi.position(id)); });
    out[0] = 1.0;
    out[1] = uncovered_area(x, R_, near, resolution_).value;
}

double AreaModel::local_stability_bound() const {
    const double area = std::numbers::pi * R_ * R_;
    const double worst = box().lower[0] + std::min(0.0, box().lower[1] * area);
    return std::max(0.0, -worst);
}

double local_energy(const GibbsModel& model, const Vector& theta, const Position& x, const NeighborIndex& phi,
                    std::optional<std::size_t> exclude) {
    return theta.dot(model.statistics(x, phi, exclude));
}

double local_energy(const GibbsModel& model, const Vector& theta, const Position& x, const Configuration& phi) {
    return theta.dot(model.statistics(x, phi));
}

double papangelou(const GibbsModel& model, const Vector& theta, const Position& x, const NeighborIndex& phi,
                  std::optional<std::size_t> exclude) {
    return std::exp(-local_energy(model, theta, x, phi, exclude));
}

double papangelou(const GibbsModel& model, const Vector& theta, const Position& x, const Configuration& phi) {
    return std::exp(-local_energy(model, theta, x, phi));
}

Vector theta_from_beta_gamma(double beta, double gamma) {
    if (!(beta > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("beta and gamma must be positive");
    Vector t(2);
    t << -std::log(beta), -std::log(gamma);
    return t;
}

}  // namespace gibbstf
