#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbstf/core.hpp"
#include "gibbstf/models.hpp"
#include "gibbstf/optimize.hpp"
#include "gibbstf/testfn.hpp"

namespace gibbstf {

// ---- quadrature -----------------------------------------------------------

enum class QuadratureKind { stratified_grid, monte_carlo };

struct QuadratureScheme {
    QuadratureKind kind = QuadratureKind::stratified_grid;
    std::size_t n_dummy = 4096;
    std::uint64_t seed = 0;

    static QuadratureScheme grid(std::size_t n) { return {QuadratureKind::stratified_grid, n, 0}; }
    static QuadratureScheme monte_carlo(std::size_t n, std::uint64_t seed) { return {QuadratureKind::monte_carlo, n, seed}; }
    /// Stratified grid with cells of side about `spacing` over `window`.
    static QuadratureScheme grid_spacing(const Window& window, double spacing);
};

/// Cells per axis of the stratified grid with about n cells over `window`.
std::array<std::size_t, 3> grid_shape(const Window& window, std::size_t n);
/// Dummy points; each carries weight |window| / count.
std::vector<Position> dummy_points(const Window& window, const QuadratureScheme& scheme);
const char* to_string(QuadratureKind kind);

// ---- cached evaluation sites ------------------------------------------------

/// Dummy and data sites of one window with their model statistics and the
/// theta-free parts of every test function precomputed. Sites sharing all of
/// those values are merged into weighted groups, so evaluating residuals at a
/// new theta costs O(#groups) for the shipped test functions.
class SiteTable {
public:
    struct Group {
        double weight = 0.0;            // quadrature weight sum, or data-point count
        double ambiguous_weight = 0.0;  // weight of grid cells a critical circle passes through
        std::vector<double> stats;
        std::vector<double> cached;  // per test function: value (none) or base (fiksel)
        Position x{};
        std::optional<std::size_t> exclude;
    };

    SiteTable(const Configuration& phi, const NeighborIndex& index, const Window& window, const GibbsModel& model,
              std::span<const TestFunction> h, const QuadratureScheme& scheme);

    const std::vector<Group>& dummy_groups() const { return dummy_; }
    const std::vector<Group>& data_groups() const { return data_; }
    std::size_t dummy_count() const { return n_dummy_; }
    std::size_t data_count() const { return n_data_; }
    const Window& window() const { return window_; }
    QuadratureKind kind() const { return kind_; }

    double h_value(std::size_t k, const Group& g, const Vector& theta) const;
    static double energy(const Group& g, const Vector& theta);

    /// Integral part of C_Lambda for every test function.
    Vector integrals(const Vector& theta) const;
    /// Sum part of C_Lambda for every test function.
    Vector sums(const Vector& theta) const;
    /// Estimated absolute quadrature error of each integral.
    Vector integral_errors(const Vector& theta) const;

private:
    Site site_of(const Group& g) const;

    const NeighborIndex* index_;
    std::vector<TestFunction> h_;
    Window window_;
    QuadratureKind kind_;
    std::vector<Group> dummy_;
    std::vector<Group> data_;
    std::size_t n_dummy_ = 0;
    std::size_t n_data_ = 0;
};

// ---- residuals and contrast ----------------------------------------------

struct ResidualOptions {
    QuadratureScheme quadrature;
    // Replace the integral of a fiksel count function by |phi_Lambda| pi r^2 (d = 2).
    bool fiksel_shortcut = false;
};

struct ResidualVector {
    Vector values;
    Vector quadrature_error;  // NaN where the shortcut replaced the quadrature
};

/// Throws CollarMissing unless the carrier holds `window` grown by the largest
/// range among the model and the test functions.
void require_collar(const Configuration& phi, const Window& window, const GibbsModel& model,
                    std::span<const TestFunction> h);

ResidualVector residuals(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                         const GibbsModel& model, const Vector& theta, const ResidualOptions& options = {});
double residual(const Configuration& phi, const Window& window, const TestFunction& h, const GibbsModel& model,
                const Vector& theta, const ResidualOptions& options = {});

/// |window|^-2 * sum_k residual_k^2, summed in sorted order so that permuting
/// the test functions does not change the result.
double contrast_from_residuals(const Vector& residuals, double volume);
double contrast(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                const GibbsModel& model, const Vector& theta, const ResidualOptions& options = {});

// ---- fits -------------------------------------------------------------------

struct ContrastReport {
    std::string method;
    Vector theta_hat;
    Vector residuals;
    double U_value = 0.0;
    int iterations = 0;
    bool converged = false;
    Window window = Window::square(0.0, 1.0);
    QuadratureKind quadrature_kind = QuadratureKind::stratified_grid;
    std::size_t n_dummy = 0;
    std::vector<std::string> warnings;
    // Newton iterates of the pseudo-likelihood fit: largest Hessian eigenvalue.
    std::vector<double> hessian_max_eigenvalue;
    // Explicit Strauss estimator only.
    std::vector<double> N_k;
    std::vector<double> V_k;
};

struct FitOptions {
    QuadratureScheme quadrature;
    bool fiksel_shortcut = false;
    int random_starts = 4;
    std::uint64_t seed = 0;
    NelderMeadOptions optimizer;
    std::optional<Vector> start;  // replaces the box center as first start
};

/// Takacs-Fiksel estimate: argmin over the box of the contrast.
ContrastReport fit_tf(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                      const GibbsModel& model, const ParameterBox& box, const FitOptions& options = {});

/// Maximum pseudo-likelihood by damped Newton on the discretised LPL.
ContrastReport fit_mple(const Configuration& phi, const Window& window, const GibbsModel& model,
                        const ParameterBox& box, const QuadratureScheme& quadrature = {});

/// Log-pseudo-likelihood of the discretised objective, with gradient and Hessian.
struct PseudoLikelihood {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
};
PseudoLikelihood pseudo_likelihood(const SiteTable& table, const Vector& theta);

// ---- explicit Strauss estimator --------------------------------------------

/// Number of points of phi in `window` with exactly k R-neighbours in phi.
std::size_t count_Nk(const Configuration& phi, const Window& window, double R, int k);

struct CoverageVolumes {
    std::vector<double> volumes;  // V_k for k = 0 .. volumes.size() - 1
    double spacing = 0.0;
    std::size_t resolution = 0;
};

/// Volumes of {y in window : |B(y,R) cap phi| = k} for all k, by midpoint grid
/// with `resolution` cells along each axis.
CoverageVolumes coverage_volumes(const Configuration& phi, const Window& window, double R, std::size_t resolution);
double volume_Vk(const Configuration& phi, const Window& window, double R, int k, std::size_t resolution);
/// Grid spacing about R / 25.6 (512 cells per unit length at R = 0.05), at least 64 cells.
std::size_t default_vk_resolution(const Window& window, double R);

/// (ln(V0/N0), ln(V1/N1) - ln(V0/N0)); DegenerateCounts names any zero input.
Vector strauss_explicit_theta(double N0, double V0, double N1, double V1);

ContrastReport fit_strauss_explicit(const Configuration& phi, const Window& window, double R,
                                    std::size_t resolution = 0);

}  // namespace gibbstf
