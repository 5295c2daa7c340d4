#pragma once

#include <optional>
#include <span>

#include "gibbstf/estimate.hpp"

namespace gibbstf {

/// p x K matrix |window|^-1 * integral of h_k V_i exp(-<theta, V>) over the window.
Matrix estimate_E(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                  const GibbsModel& model, const Vector& theta, const QuadratureScheme& quadrature = {});

struct SigmaEstimate {
    Matrix sigma;
    double D_block = 0.0;
    std::size_t blocks = 0;
    std::size_t interior_blocks = 0;
};

/// Side of the blocks when none is given: max(model range, window side / 10).
double default_block_side(const Window& window, const GibbsModel& model);

/// Block estimate of Sigma: `window` is cut into cubes of side D_block starting
/// at its lower corner, each with its own residual vector; cross products with
/// the 3^d neighbouring blocks are averaged over interior blocks.
SigmaEstimate estimate_Sigma(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                             const GibbsModel& model, const Vector& theta, std::optional<double> D_block = std::nullopt,
                             const QuadratureScheme& quadrature = {});

struct Sandwich {
    Matrix sandwich;   // (E E^T)^-1 E Sigma E^T (E E^T)^-1
    Matrix S;          // [E Sigma E^T]^-1/2 E E^T
    double condition = 0.0;  // of E E^T
};

/// Throws SingularE when E E^T has condition number >= 1e8.
Sandwich sandwich_covariance(const Matrix& E, const Matrix& Sigma);

/// Symmetric square-root inverse with eigenvalues clamped at 1e-12.
Matrix inverse_sqrt_symmetric(const Matrix& A);

struct CovarianceReport {
    Matrix E_hat;
    Matrix Sigma_hat;
    Matrix sandwich;
    Matrix avar;  // sandwich / |window|
    Matrix S;
    Vector theta;
    double D_block = 0.0;
    std::size_t blocks = 0;
    std::size_t interior_blocks = 0;
    double condition = 0.0;
};

/// Plug-in covariance of a fit on a single pattern at theta (usually theta_hat).
CovarianceReport estimate_covariance(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                                     const GibbsModel& model, const Vector& theta,
                                     std::optional<double> D_block = std::nullopt,
                                     const QuadratureScheme& quadrature = {});

}  // namespace gibbstf
