#include "gibbstf/estimate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "gibbstf/sim.hpp"

namespace gibbstf {

// ---- quadrature -----------------------------------------------------------

const char* to_string(QuadratureKind kind) {
    return kind == QuadratureKind::stratified_grid ? "stratified_grid" : "monte_carlo";
}

std::array<std::size_t, 3> grid_shape(const Window& window, std::size_t n) {
    if (n == 0) throw std::invalid_argument("grid_shape: need at least one dummy point");
    std::array<std::size_t, 3> shape{1, 1, 1};
    const double per_length = std::pow(static_cast<double>(n) / window.volume(), 1.0 / window.dim());
    for (int a = 0; a < window.dim(); ++a) {
        shape[a] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window.side(a) * per_length)));
    }
    return shape;
}

QuadratureScheme QuadratureScheme::grid_spacing(const Window& window, double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("grid_spacing: spacing must be positive");
    std::size_t n = 1;
    for (int a = 0; a < window.dim(); ++a) {
        n *= std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window.side(a) / spacing)));
    }
    return grid(n);
}

std::vector<Position> dummy_points(const Window& window, const QuadratureScheme& scheme) {
    if (scheme.n_dummy == 0) throw std::invalid_argument("dummy_points: n_dummy must be >= 1");
    std::vector<Position> out;
    if (scheme.kind == QuadratureKind::monte_carlo) {
        Rng rng(scheme.seed);
        out.reserve(scheme.n_dummy);
        for (std::size_t i = 0; i < scheme.n_dummy; ++i) out.push_back(uniform_position(window, rng));
        return out;
    }
    const auto shape = grid_shape(window, scheme.n_dummy);
    std::array<double, 3> h{0.0, 0.0, 0.0};
    for (int a = 0; a < window.dim(); ++a) h[a] = window.side(a) / static_cast<double>(shape[a]);
    out.reserve(shape[0] * shape[1] * shape[2]);
    const auto& lo = window.lower();
    for (std::size_t k = 0; k < shape[2]; ++k) {
        for (std::size_t j = 0; j < shape[1]; ++j) {
            for (std::size_t i = 0; i < shape[0]; ++i) {
                Position p{lo[0] + (static_cast<double>(i) + 0.5) * h[0], 0.0, 0.0};
                if (window.dim() > 1) p[1] = lo[1] + (static_cast<double>(j) + 0.5) * h[1];
                if (window.dim() > 2) p[2] = lo[2] + (static_cast<double>(k) + 0.5) * h[2];
                out.push_back(p);
            }
        }
    }
    return out;
}

// ---- site table --------------------------------------------------------------

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<double>& v) const noexcept {
        std::size_t h = v.size();
        for (double d : v) h ^= std::hash<double>{}(d) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

std::vector<double> model_critical_radii(const GibbsModel& model) {
    if (const auto* s = dynamic_cast<const StraussModel*>(&model)) return {s->interaction_radius()};
    if (const auto* m = dynamic_cast<const MultiStraussModel*>(&model)) return m->radii();
    if (const auto* a = dynamic_cast<const AreaModel*>(&model)) return {2.0 * a->radius()};
    return {};
}

double max_range(const GibbsModel& model, std::span<const TestFunction> h) {
    double d = model.range();
    for (const auto& f : h) d = std::max(d, f.range());
    return d;
}

double half_diagonal(const Window& window, const QuadratureScheme& scheme) {
    const auto shape = grid_shape(window, scheme.n_dummy);
    double s = 0.0;
    for (int a = 0; a < window.dim(); ++a) {
        const double h = window.side(a) / static_cast<double>(shape[a]);
        s += h * h;
    }
    return 0.5 * std::sqrt(s);
}

}  // namespace

SiteTable::SiteTable([[maybe_unused]] const Configuration& phi, const NeighborIndex& index, const Window& window,
                     const GibbsModel& model, std::span<const TestFunction> h, const QuadratureScheme& scheme)
    : index_(&index), h_(h.begin(), h.end()), window_(window), kind_(scheme.kind) {
    const std::size_t p = model.parameter_count();
    const std::size_t K = h_.size();
    const Vector theta0 = Vector::Zero(static_cast<Eigen::Index>(p));
    const double volume = window.volume();

    std::vector<double> radii = model_critical_radii(model);
    for (const auto& f : h_) {
        for (double r : f.critical_radii()) radii.push_back(r);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    const bool grid = scheme.kind == QuadratureKind::stratified_grid;
    const double hd = grid ? half_diagonal(window, scheme) : 0.0;

    bool groupable = true;
    for (const auto& f : h_) groupable = groupable && f.dependence() != ThetaDependence::general;

    auto build = [&](const Position& x, std::optional<std::size_t> exclude, double weight, double ambiguous,
                     std::vector<Group>& groups, std::unordered_map<std::vector<double>, std::size_t, KeyHash>& seen,
                     std::size_t serial) {
        Group g;
        g.x = x;
        g.exclude = exclude;
        g.weight = weight;
        g.ambiguous_weight = ambiguous;
        g.stats.resize(p);
        model.statistics(x, index, exclude, g.stats);
        g.cached.assign(K, 0.0);
        const Site site{x, exclude, std::span<const double>(g.stats), &index};
        for (std::size_t k = 0; k < K; ++k) {
            switch (h_[k].dependence()) {
                case ThetaDependence::none: g.cached[k] = h_[k](site, theta0); break;
                case ThetaDependence::fiksel: g.cached[k] = h_[k].base(site); break;
                default: break;
            }
        }
        std::vector<double> key = g.stats;
        key.insert(key.end(), g.cached.begin(), g.cached.end());
        if (!groupable) key.push_back(static_cast<double>(serial));
        auto [it, inserted] = seen.try_emplace(std::move(key), groups.size());
        if (inserted) {
            groups.push_back(std::move(g));
        } else {
            groups[it->second].weight += weight;
            groups[it->second].ambiguous_weight += ambiguous;
        }
    };

    const auto dummies = dummy_points(window, scheme);
    n_dummy_ = dummies.size();
    const double w = volume / static_cast<double>(n_dummy_);
    std::unordered_map<std::vector<double>, std::size_t, KeyHash> seen_dummy;
    for (std::size_t s = 0; s < dummies.size(); ++s) {
        const Position& u = dummies[s];
        bool ambiguous = false;
        if (grid) {
            for (double r : radii) {
                const double inner = std::max(0.0, r - hd);
                index.for_each_within(u, r + hd, std::nullopt, [&](std::size_t id) {
                    if (squared_distance(index.position(id), u) >= inner * inner) ambiguous = true;
                });
                if (ambiguous) break;
            }
        }
        build(u, std::nullopt, w, ambiguous ? w : 0.0, dummy_, seen_dummy, s);
    }

    std::unordered_map<std::vector<double>, std::size_t, KeyHash> seen_data;
    for (std::size_t id = 0; id < index.capacity(); ++id) {
        if (!index.alive(id) || !window.contains(index.position(id))) continue;
        ++n_data_;
        build(index.position(id), id, 1.0, 0.0, data_, seen_data, id);
    }
}

Site SiteTable::site_of(const Group& g) const {
    return Site{g.x, g.exclude, std::span<const double>(g.stats), index_};
}

double SiteTable::energy(const Group& g, const Vector& theta) {
    double e = 0.0;
    for (std::size_t i = 0; i < g.stats.size(); ++i) e += theta[static_cast<Eigen::Index>(i)] * g.stats[i];
    return e;
}

double SiteTable::h_value(std::size_t k, const Group& g, const Vector& theta) const {
    switch (h_[k].dependence()) {
        case ThetaDependence::none: return g.cached[k];
        case ThetaDependence::fiksel: return g.cached[k] * std::exp(energy(g, theta));
        default: return h_[k](site_of(g), theta);
    }
}

Vector SiteTable::integrals(const Vector& theta) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(h_.size()));
    for (const auto& g : dummy_) {
        const double papangelou = std::exp(-energy(g, theta));
        for (std::size_t k = 0; k < h_.size(); ++k) {
            out[static_cast<Eigen::Index>(k)] += g.weight * h_value(k, g, theta) * papangelou;
        }
    }
    return out;
}

Vector SiteTable::sums(const Vector& theta) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(h_.size()));
    for (const auto& g : data_) {
        for (std::size_t k = 0; k < h_.size(); ++k) out[static_cast<Eigen::Index>(k)] += g.weight * h_value(k, g, theta);
    }
    return out;
}

Vector SiteTable::integral_errors(const Vector& theta) const {
    const auto K = static_cast<Eigen::Index>(h_.size());
    Vector out = Vector::Zero(K);
    const double volume = window_.volume();
    if (kind_ == QuadratureKind::monte_carlo) {
        Vector first = Vector::Zero(K), second = Vector::Zero(K);
        for (const auto& g : dummy_) {
            const double papangelou = std::exp(-energy(g, theta));
            for (Eigen::Index k = 0; k < K; ++k) {
                const double f = h_value(static_cast<std::size_t>(k), g, theta) * papangelou;
                first[k] += g.weight * f;
                second[k] += g.weight * f * f;
            }
        }
        for (Eigen::Index k = 0; k < K; ++k) {
            const double mean = first[k] / volume;
            const double var = std::max(0.0, second[k] / volume - mean * mean);
            out[k] = volume * std::sqrt(var / static_cast<double>(n_dummy_));
        }
        return out;
    }
    double ambiguous = 0.0;
    for (const auto& g : dummy_) ambiguous += g.ambiguous_weight;
    for (Eigen::Index k = 0; k < K; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& g : dummy_) {
            const double f = h_value(static_cast<std::size_t>(k), g, theta) * std::exp(-energy(g, theta));
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        out[k] = dummy_.empty() ? 0.0 : ambiguous * (hi - lo);
    }
    return out;
}

// ---- residuals and contrast --------------------------------------------------

void require_collar(const Configuration& phi, const Window& window, const GibbsModel& model,
                    std::span<const TestFunction> h) {
    const double reach = max_range(model, h);
    if (!phi.carrier().contains(window, reach)) {
        throw CollarMissing("carrier does not contain the estimation window grown by the range " +
                            std::to_string(reach));
    }
}

namespace {

Vector apply_shortcut(Vector integral, Vector& errors, const SiteTable& table, std::span<const TestFunction> h,
                      bool enabled) {
    if (!enabled || table.window().dim() != 2) return integral;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (auto r = h[k].fiksel_radius()) {
            integral[static_cast<Eigen::Index>(k)] =
                static_cast<double>(table.data_count()) * std::numbers::pi * (*r) * (*r);
            errors[static_cast<Eigen::Index>(k)] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return integral;
}

}  // namespace

ResidualVector residuals(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                         const GibbsModel& model, const Vector& theta, const ResidualOptions& options) {
    require_collar(phi, window, model, h);
    NeighborIndex index(phi, max_range(model, h));
    SiteTable table(phi, index, window, model, h, options.quadrature);
    ResidualVector out;
    out.quadrature_error = table.integral_errors(theta);
    const Vector integral = apply_shortcut(table.integrals(theta), out.quadrature_error, table, h,
                                           options.fiksel_shortcut);
    out.values = integral - table.sums(theta);
    return out;
}

double residual(const Configuration& phi, const Window& window, const TestFunction& h, const GibbsModel& model,
                const Vector& theta, const ResidualOptions& options) {
    return residuals(phi, window, std::span<const TestFunction>(&h, 1), model, theta, options).values[0];
}

double contrast_from_residuals(const Vector& residuals, double volume) {
    std::vector<double> squares(static_cast<std::size_t>(residuals.size()));
    for (Eigen::Index k = 0; k < residuals.size(); ++k) squares[static_cast<std::size_t>(k)] = residuals[k] * residuals[k];
    std::sort(squares.begin(), squares.end());
    double total = 0.0;
    for (double s : squares) total += s;
    return total / (volume * volume);
}

double contrast(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                const GibbsModel& model, const Vector& theta, const ResidualOptions& options) {
    if (h.empty()) throw std::invalid_argument("contrast: need at least one test function");
    return contrast_from_residuals(residuals(phi, window, h, model, theta, options).values, window.volume());
}

// ---- fits -------------------------------------------------------------------

ContrastReport fit_tf(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                      const GibbsModel& model, const ParameterBox& box, const FitOptions& options) {
    const std::size_t p = model.parameter_count();
    if (box.size() != p) throw std::invalid_argument("fit_tf: box dimension differs from the model");
    if (h.size() < p) throw std::invalid_argument("fit_tf: need at least as many test functions as parameters");
    require_collar(phi, window, model, h);

    ContrastReport report;
    report.method = "tf";
    report.window = window;
    report.quadrature_kind = options.quadrature.kind;
    if (h.size() == p) {
        report.warnings.push_back("K = p: identifiability is not guaranteed for this choice of test functions");
    }

    NeighborIndex index(phi, max_range(model, h));
    SiteTable table(phi, index, window, model, h, options.quadrature);
    report.n_dummy = table.dummy_count();
    const double volume = window.volume();
    Vector unused_errors = Vector::Zero(static_cast<Eigen::Index>(h.size()));
    auto residual_at = [&](const Vector& theta) {
        return Vector(apply_shortcut(table.integrals(theta), unused_errors, table, h, options.fiksel_shortcut) -
                      table.sums(theta));
    };
    auto objective = [&](const Vector& theta) { return contrast_from_residuals(residual_at(theta), volume); };

    std::vector<Vector> starts;
    starts.push_back(box.clamp(options.start ? *options.start : box.center()));
    Rng rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < options.random_starts; ++s) {
        Vector x(static_cast<Eigen::Index>(p));
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
        starts.push_back(x);
    }

    NelderMeadResult best;
    bool have_best = false;
    for (const auto& start : starts) {
        auto run = nelder_mead_box(objective, start, box, options.optimizer);
        report.iterations += run.iterations;
        if (!have_best || run.value < best.value) {
            best = run;
            have_best = true;
        }
    }
    NelderMeadOptions polish = options.optimizer;
    polish.initial_step = std::min(options.optimizer.initial_step, 1e-3);
    auto refined = nelder_mead_box(objective, best.x, box, polish);
    report.iterations += refined.iterations;
    if (refined.value <= best.value) {
        best.x = refined.x;
        best.value = refined.value;
    }
    best.converged = refined.converged;

    report.theta_hat = best.x;
    report.residuals = residual_at(best.x);
    report.U_value = contrast_from_residuals(report.residuals, volume);
    report.converged = best.converged;
    if (!report.converged) report.warnings.push_back("NotConverged: simplex did not shrink below tolerance");
    return report;
}

PseudoLikelihood pseudo_likelihood(const SiteTable& table, const Vector& theta) {
    const auto p = theta.size();
    PseudoLikelihood out;
    out.gradient = Vector::Zero(p);
    out.hessian = Matrix::Zero(p, p);
    for (const auto& g : table.dummy_groups()) {
        const Eigen::Map<const Vector> v(g.stats.data(), p);
        const double w = g.weight * std::exp(-theta.dot(v));
        out.value -= w;
        out.gradient += w * v;
        out.hessian -= w * v * v.transpose();
    }
    for (const auto& g : table.data_groups()) {
        const Eigen::Map<const Vector> v(g.stats.data(), p);
        out.value -= g.weight * theta.dot(v);
        out.gradient -= g.weight * v;
    }
    return out;
}

ContrastReport fit_mple(const Configuration& phi, const Window& window, const GibbsModel& model,
                        const ParameterBox& box, const QuadratureScheme& quadrature) {
    const auto p = static_cast<Eigen::Index>(model.parameter_count());
    if (static_cast<Eigen::Index>(box.size()) != p) throw std::invalid_argument("fit_mple: box dimension mismatch");
    require_collar(phi, window, model, {});

    ContrastReport report;
    report.method = "mple";
    report.window = window;
    report.quadrature_kind = quadrature.kind;

    NeighborIndex index(phi, model.range());
    SiteTable table(phi, index, window, model, {}, quadrature);
    report.n_dummy = table.dummy_count();

    Vector theta = Vector::Zero(p);
    const double n = static_cast<double>(std::max<std::size_t>(1, table.data_count()));
    theta[0] = -std::log(n / window.volume());
    theta = box.clamp(theta);

    constexpr int max_iterations = 200;
    auto pl = pseudo_likelihood(table, theta);
    for (report.iterations = 0; report.iterations < max_iterations; ++report.iterations) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(pl.hessian);
        report.hessian_max_eigenvalue.push_back(eig.eigenvalues().maxCoeff());

        Eigen::LDLT<Matrix> ldlt(-pl.hessian);
        Vector direction = ldlt.info() == Eigen::Success ? Vector(ldlt.solve(pl.gradient)) : pl.gradient;
        if (!direction.allFinite()) direction = pl.gradient;

        double t = 1.0;
        bool moved = false;
        Vector next = theta;
        PseudoLikelihood next_pl;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            next = box.clamp(theta + t * direction);
            next_pl = pseudo_likelihood(table, next);
            if (next_pl.value >= pl.value - 1e-12 * std::abs(pl.value)) {
                moved = true;
                break;
            }
        }
        const double change = moved ? (next - theta).cwiseAbs().maxCoeff() : 0.0;
        if (moved) {
            theta = next;
            pl = next_pl;
        }
        // Projected gradient: components pushing against an active bound do not count.
        Vector projected = pl.gradient;
        for (Eigen::Index i = 0; i < p; ++i) {
            if ((theta[i] <= box.lower[i] && projected[i] < 0) || (theta[i] >= box.upper[i] && projected[i] > 0)) {
                projected[i] = 0.0;
            }
        }
        const double scale = std::max(1.0, n);
        if (change < 1e-13 || projected.cwiseAbs().maxCoeff() < 1e-11 * scale) {
            report.converged = true;
            ++report.iterations;
            break;
        }
    }
    report.theta_hat = theta;
    report.residuals = pl.gradient;
    report.U_value = contrast_from_residuals(report.residuals, window.volume());
    if (!report.converged) report.warnings.push_back("NotConverged: Newton iterations exhausted");
    return report;
}

// ---- explicit Strauss estimator --------------------------------------------

std::size_t count_Nk(const Configuration& phi, const Window& window, double R, int k) {
    if (k < 0) throw std::invalid_argument("count_Nk: k must be >= 0");
    NeighborIndex index(phi, R);
    std::size_t n = 0;
    for (std::size_t id = 0; id < phi.size(); ++id) {
        const auto& x = phi[id].position;
        if (window.contains(x) && index.count_within(x, R, id) == static_cast<std::size_t>(k)) ++n;
    }
    return n;
}

std::size_t default_vk_resolution(const Window& window, double R) {
    const double spacing = R / 25.6;
    return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(window.max_side() / spacing)));
}

CoverageVolumes coverage_volumes(const Configuration& phi, const Window& window, double R, std::size_t resolution) {
    if (window.dim() != 2) throw std::invalid_argument("coverage_volumes: only planar windows are supported");
    if (resolution < 64) throw std::invalid_argument("coverage_volumes: resolution must be >= 64");
    if (!(R > 0.0)) throw std::invalid_argument("coverage_volumes: R must be positive");
    const auto& lo = window.lower();
    const double hx = window.side(0) / static_cast<double>(resolution);
    const double hy = window.side(1) / static_cast<double>(resolution);
    const auto n = static_cast<long>(resolution);
    std::vector<std::uint32_t> counts(resolution * resolution, 0);

    for (const auto& pt : phi.points()) {
        const Position& y = pt.position;
        const long i0 = std::max(0L, static_cast<long>(std::floor((y[0] - R - lo[0]) / hx - 0.5)));
        const long i1 = std::min(n - 1, static_cast<long>(std::ceil((y[0] + R - lo[0]) / hx - 0.5)));
        const long j0 = std::max(0L, static_cast<long>(std::floor((y[1] - R - lo[1]) / hy - 0.5)));
        const long j1 = std::min(n - 1, static_cast<long>(std::ceil((y[1] + R - lo[1]) / hy - 0.5)));
        for (long j = j0; j <= j1; ++j) {
            const double cy = lo[1] + (static_cast<double>(j) + 0.5) * hy;
            for (long i = i0; i <= i1; ++i) {
                const Position c{lo[0] + (static_cast<double>(i) + 0.5) * hx, cy, 0.0};
                if (within(y, c, R)) ++counts[static_cast<std::size_t>(j * n + i)];
            }
        }
    }
    CoverageVolumes out;
    out.spacing = std::max(hx, hy);
    out.resolution = resolution;
    std::vector<std::size_t> tally;
    for (std::uint32_t c : counts) {
        if (c >= tally.size()) tally.resize(c + 1, 0);
        ++tally[c];
    }
    out.volumes.resize(tally.size());
    for (std::size_t k = 0; k < tally.size(); ++k) out.volumes[k] = static_cast<double>(tally[k]) * hx * hy;
    return out;
}

double volume_Vk(const Configuration& phi, const Window& window, double R, int k, std::size_t resolution) {
    if (k < 0) throw std::invalid_argument("volume_Vk: k must be >= 0");
    const auto cov = coverage_volumes(phi, window, R, resolution);
    return static_cast<std::size_t>(k) < cov.volumes.size() ? cov.volumes[static_cast<std::size_t>(k)] : 0.0;
}

Vector strauss_explicit_theta(double N0, double V0, double N1, double V1) {
    std::string missing;
    if (!(N0 > 0.0)) missing += " N0=0";
    if (!(N1 > 0.0)) missing += " N1=0";
    if (!(V0 > 0.0)) missing += " V0=0";
    if (!(V1 > 0.0)) missing += " V1=0";
    if (!missing.empty()) throw DegenerateCounts("explicit Strauss estimator undefined:" + missing);
    const double t1 = std::log(V0 / N0);
    Vector theta(2);
    theta << t1, std::log(V1 / N1) - t1;
    return theta;
}

ContrastReport fit_strauss_explicit(const Configuration& phi, const Window& window, double R, std::size_t resolution) {
    if (!phi.carrier().contains(window, R)) {
        throw CollarMissing("carrier does not contain the estimation window grown by R");
    }
    if (resolution == 0) resolution = default_vk_resolution(window, R);
    const auto cov = coverage_volumes(phi, window, R, resolution);

    ContrastReport report;
    report.method = "explicit";
    report.window = window;
    report.quadrature_kind = QuadratureKind::stratified_grid;
    report.n_dummy = resolution * resolution;
    report.V_k = cov.volumes;

    NeighborIndex index(phi, R);
    for (std::size_t id = 0; id < phi.size(); ++id) {
        const auto& x = phi[id].position;
        if (!window.contains(x)) continue;
        const std::size_t k = index.count_within(x, R, id);
        if (k >= report.N_k.size()) report.N_k.resize(k + 1, 0.0);
        report.N_k[k] += 1.0;
    }
    auto at = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; };
    const double N0 = at(report.N_k, 0), N1 = at(report.N_k, 1);
    const double V0 = at(report.V_k, 0), V1 = at(report.V_k, 1);
    report.theta_hat = strauss_explicit_theta(N0, V0, N1, V1);
    const double t1 = report.theta_hat[0];
    const double t2 = report.theta_hat[1];
    report.residuals = Vector(2);
    report.residuals << std::exp(-t1) * V0 - N0, std::exp(-t1) * V1 - std::exp(t2) * N1;
    report.U_value = contrast_from_residuals(report.residuals, window.volume());
    report.converged = true;
    return report;
}

}  // namespace gibbstf
