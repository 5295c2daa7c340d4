#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gibbstf/estimate.hpp"
#include "gibbstf/sim.hpp"

namespace gibbstf {

// ---- GNZ balance --------------------------------------------------------------

struct GnzEntry {
    std::string label;
    double mean = 0.0;  // across replicates, of residual / |window|
    double se = 0.0;
    double z = 0.0;
};

struct GnzReport {
    std::vector<GnzEntry> entries;
    std::size_t replicates = 0;
    bool passed = false;  // every |z| < 3
};

/// Residuals at theta on already simulated patterns (theta is usually the
/// parameter they were simulated at). Needs at least 30 patterns.
GnzReport gnz_balance(std::span<const Configuration> patterns, const Window& window, std::span<const TestFunction> h,
                      const GibbsModel& model, const Vector& theta, const QuadratureScheme& quadrature = {});

GnzReport gnz_balance(ModelPtr model, const Vector& theta_star, std::span<const TestFunction> h, std::size_t m,
                      const Window& carrier, const Window& window, const SamplerConfig& sampler,
                      const QuadratureScheme& quadrature = {}, unsigned threads = 1);

// ---- contrast profile ---------------------------------------------------------

struct ProfileReport {
    std::vector<Vector> grid;
    std::vector<double> U;   // Monte-Carlo estimate of the limit contrast
    std::vector<double> se;
    std::size_t argmin = 0;
    bool unique = false;  // no cell is near the minimum
    // Cells other than argmin with U <= U[argmin] + 3 max(se[argmin], se).
    std::vector<std::size_t> near_minimum;
};

/// Estimates U(theta) = sum_k E(h_k (exp(-V(theta)) - exp(-V(theta_star))))^2 on a
/// list of grid points from dummy-point averages over `patterns`.
ProfileReport contrast_profile(std::span<const Configuration> patterns, const Window& window,
                               const GibbsModel& model, const Vector& theta_star, std::span<const TestFunction> h,
                               const std::vector<Vector>& grid, const QuadratureScheme& quadrature = {});

/// Cartesian product grid for two-parameter models.
std::vector<Vector> product_grid(const std::vector<double>& axis1, const std::vector<double>& axis2);

// ---- sign check -------------------------------------------------------------

enum class DetVerdict { consistent_with_Det, violated, inconclusive };
const char* to_string(DetVerdict v);

struct DetCheckOptions {
    std::size_t n_tuples = 20000;
    std::size_t locations_per_pattern = 2000;
    int bins = 50;
    // Values carrying at least this share of the samples get a bin of their own.
    double atom_mass = 0.05;
    std::uint64_t seed = 0;
    // Sampled rows fed to the coefficient search when K > p.
    std::size_t lp_rows = 400;
};

struct DetBin {
    Vector v;     // mean statistic in the bin
    Vector psi;   // mean test-function vector in the bin
    double mass = 0.0;
};

struct DetCheckReport {
    std::size_t samples = 0;
    std::size_t tuples = 0;
    double positive = 0.0;
    double negative = 0.0;
    double null = 0.0;
    DetVerdict verdict = DetVerdict::inconclusive;
    std::vector<DetBin> bins;
    double det_E_psi_v = 0.0;
    // K > p only: whether nonnegative coefficients over the p-subsets were found.
    bool coefficients_found = false;
    Vector coefficients;
    std::vector<std::string> notes;
};

/// Samples V(x|phi) and h(x, phi, theta) at uniform locations of the patterns,
/// bins them in V-space, and checks the sign of det(v_1..v_p) det(psi(v_1)..psi(v_p))
/// on random tuples of distinct bins. Throws InsufficientSupport with fewer than p bins.
DetCheckReport det_check(std::span<const Configuration> patterns, const Window& window, const GibbsModel& model,
                         const Vector& theta, std::span<const TestFunction> h, const DetCheckOptions& options = {});

/// Maximise 1^T M c subject to M c >= 0 and -1 <= c <= 1. Returns c; the
/// objective is positive iff a nontrivial nonnegative combination exists.
Vector nonnegative_combination(const Matrix& M);

/// Writes the binned (v, psi(v), mass) pairs as CSV for plotting.
void write_scatter_csv(const DetCheckReport& report, const std::string& path);

}  // namespace gibbstf
