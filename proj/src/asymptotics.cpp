#include "gibbstf/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace gibbstf {

Matrix estimate_E(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                  const GibbsModel& model, const Vector& theta, const QuadratureScheme& quadrature) {
    require_collar(phi, window, model, h);
    double reach = model.range();
    for (const auto& f : h) reach = std::max(reach, f.range());
    NeighborIndex index(phi, reach);
    SiteTable table(phi, index, window, model, h, quadrature);

    const auto p = static_cast<Eigen::Index>(model.parameter_count());
    const auto K = static_cast<Eigen::Index>(h.size());
    Matrix E = Matrix::Zero(p, K);
    for (const auto& g : table.dummy_groups()) {
        const double w = g.weight * std::exp(-SiteTable::energy(g, theta));
        for (Eigen::Index k = 0; k < K; ++k) {
            const double hk = table.h_value(static_cast<std::size_t>(k), g, theta);
            if (hk == 0.0) continue;
            for (Eigen::Index i = 0; i < p; ++i) E(i, k) += w * hk * g.stats[static_cast<std::size_t>(i)];
        }
    }
    return E / window.volume();
}

double default_block_side(const Window& window, const GibbsModel& model) {
    return std::max(model.range(), window.max_side() / 10.0);
}

SigmaEstimate estimate_Sigma(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                             const GibbsModel& model, const Vector& theta, std::optional<double> D_block,
                             const QuadratureScheme& quadrature) {
    if (h.empty()) throw std::invalid_argument("estimate_Sigma: need at least one test function");
    const double D = D_block ? *D_block : default_block_side(window, model);
    if (!(D > 0.0)) throw std::invalid_argument("estimate_Sigma: block side must be positive");
    if (D < model.range()) throw std::invalid_argument("estimate_Sigma: block side below the interaction range");
    require_collar(phi, window, model, h);

    const int d = window.dim();
    std::array<int, 3> n{1, 1, 1};
    for (int a = 0; a < d; ++a) n[a] = static_cast<int>(std::floor(window.side(a) / D + 1e-9));
    std::array<int, 3> inner{1, 1, 1};
    std::size_t interior = 1;
    for (int a = 0; a < d; ++a) {
        inner[a] = std::max(0, n[a] - 2);
        interior *= static_cast<std::size_t>(inner[a]);
    }
    if (interior < 9) {
        throw TooFewBlocks("estimate_Sigma: only " + std::to_string(interior) +
                           " interior blocks; need at least 9 (reduce the block side or enlarge the window)");
    }

    const double block_volume = std::pow(D, d);
    QuadratureScheme per_block = quadrature;
    per_block.n_dummy = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(quadrature.n_dummy) * block_volume / window.volume())));

    const auto K = static_cast<Eigen::Index>(h.size());
    auto flat = [&](int i, int j, int k) { return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i; };
    std::vector<Vector> C(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
    const auto& lo = window.lower();
    for (int k = 0; k < n[2]; ++k) {
        for (int j = 0; j < n[1]; ++j) {
            for (int i = 0; i < n[0]; ++i) {
                Position a = lo, b = lo;
                const std::array<int, 3> idx{i, j, k};
                for (int ax = 0; ax < d; ++ax) {
                    a[ax] = lo[ax] + idx[ax] * D;
                    b[ax] = lo[ax] + (idx[ax] + 1) * D;
                }
                const Window block(d, a, b);
                C[flat(i, j, k)] = residuals(phi, block, h, model, theta, {per_block, false}).values;
                if (per_block.kind == QuadratureKind::monte_carlo) ++per_block.seed;
            }
        }
    }

    Matrix sigma = Matrix::Zero(K, K);
    const int kz = d > 2 ? 1 : 0;
    const int ky = d > 1 ? 1 : 0;
    for (int k = kz; k < n[2] - kz; ++k) {
        for (int j = ky; j < n[1] - ky; ++j) {
            for (int i = 1; i < n[0] - 1; ++i) {
                const Vector& c0 = C[flat(i, j, k)];
                for (int dk = -kz; dk <= kz; ++dk) {
                    for (int dj = -ky; dj <= ky; ++dj) {
                        for (int di = -1; di <= 1; ++di) sigma += c0 * C[flat(i + di, j + dj, k + dk)].transpose();
                    }
                }
            }
        }
    }
    // In fewer than three dimensions the unused axes have a single block and no ring to drop.
    std::size_t counted = 1;
    counted *= static_cast<std::size_t>(n[0] - 2);
    if (d > 1) counted *= static_cast<std::size_t>(n[1] - 2);
    if (d > 2) counted *= static_cast<std::size_t>(n[2] - 2);
    sigma /= static_cast<double>(counted) * block_volume;
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    SigmaEstimate out;
    out.sigma = sigma;
    out.D_block = D;
    out.blocks = C.size();
    out.interior_blocks = counted;
    return out;
}

Matrix inverse_sqrt_symmetric(const Matrix& A) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (A + A.transpose()));
    Vector inv = eig.eigenvalues().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Sandwich sandwich_covariance(const Matrix& E, const Matrix& Sigma) {
    if (Sigma.rows() != E.cols() || Sigma.cols() != E.cols()) {
        throw std::invalid_argument("sandwich_covariance: Sigma must be K x K with E p x K");
    }
    const Matrix A = E * E.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition < 1e8)) {
        throw SingularE("E E^T is singular or ill-conditioned (condition " + std::to_string(condition) +
                        "); the test functions may not identify the parameter");
    }
    const Matrix A_inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    const Matrix B = E * Sigma * E.transpose();
    Sandwich out;
    out.sandwich = A_inv * B * A_inv;
    out.sandwich = 0.5 * (out.sandwich + out.sandwich.transpose()).eval();
    out.S = inverse_sqrt_symmetric(B) * A;
    out.condition = condition;
    return out;
}

CovarianceReport estimate_covariance(const Configuration& phi, const Window& window, std::span<const TestFunction> h,
                                     const GibbsModel& model, const Vector& theta, std::optional<double> D_block,
                                     const QuadratureScheme& quadrature) {
    CovarianceReport out;
    out.theta = theta;
    out.E_hat = estimate_E(phi, window, h, model, theta, quadrature);
    const auto sigma = estimate_Sigma(phi, window, h, model, theta, D_block, quadrature);
    out.Sigma_hat = sigma.sigma;
    out.D_block = sigma.D_block;
    out.blocks = sigma.blocks;
    out.interior_blocks = sigma.interior_blocks;
    const auto s = sandwich_covariance(out.E_hat, out.Sigma_hat);
    out.sandwich = s.sandwich;
    out.S = s.S;
    out.condition = s.condition;
    out.avar = out.sandwich / window.volume();
    return out;
}

}  // namespace gibbstf
