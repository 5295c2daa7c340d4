#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gibbstf/core.hpp"

namespace testing {

inline gibbstf::Configuration uniform_pattern(const gibbstf::Window& w, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<gibbstf::MarkedPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        gibbstf::Position p{0, 0, 0};
        for (int a = 0; a < w.dim(); ++a) {
            p[a] = std::uniform_real_distribution<double>(w.lower()[a], w.upper()[a])(rng);
        }
        pts.push_back({p, std::nullopt});
    }
    return gibbstf::Configuration(w, pts);
}

inline gibbstf::Configuration pattern(const gibbstf::Window& w, std::initializer_list<std::pair<double, double>> xy) {
    std::vector<gibbstf::MarkedPoint> pts;
    for (auto [x, y] : xy) pts.push_back({{x, y, 0.0}, std::nullopt});
    return gibbstf::Configuration(w, pts);
}

// Brute-force neighbour count, the oracle for every index-based count.
inline std::size_t scan(const gibbstf::Configuration& cfg, const gibbstf::Position& x, double r, long skip = -1) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (static_cast<long>(i) == skip) continue;
        const auto& y = cfg[i].position;
        double d2 = 0;
        for (int a = 0; a < 3; ++a) d2 += (y[a] - x[a]) * (y[a] - x[a]);
        if (d2 <= r * r) ++n;
    }
    return n;
}

// Length of the boundary of the union of discs by marching squares on the
// distance-to-nearest-centre field: an estimate independent of arc geometry.
inline double raster_perimeter(const gibbstf::Configuration& cfg, double R, double h) {
    const auto& lo = cfg.carrier().lower();
    const auto& hi = cfg.carrier().upper();
    const double x0 = lo[0] - 2 * R, y0 = lo[1] - 2 * R;
    const int nx = static_cast<int>(std::ceil((hi[0] - lo[0] + 4 * R) / h)) + 1;
    const int ny = static_cast<int>(std::ceil((hi[1] - lo[1] + 4 * R) / h)) + 1;
    std::vector<double> f(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double best = 1e300;
            for (const auto& p : cfg.points()) {
                best = std::min(best, std::hypot(x0 + i * h - p.position[0], y0 + j * h - p.position[1]));
            }
            f[static_cast<std::size_t>(j) * nx + i] = best - R;
        }
    }
    auto F = [&](int i, int j) { return f[static_cast<std::size_t>(j) * nx + i]; };
    double length = 0;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double c[4] = {F(i, j), F(i + 1, j), F(i + 1, j + 1), F(i, j + 1)};
            const double px[4] = {0, 1, 1, 0}, py[4] = {0, 0, 1, 1};
            std::vector<std::pair<double, double>> cuts;
            for (int e = 0; e < 4; ++e) {
                const int a = e, b = (e + 1) % 4;
                if ((c[a] < 0) != (c[b] < 0)) {
                    const double t = c[a] / (c[a] - c[b]);
                    cuts.emplace_back(px[a] + t * (px[b] - px[a]), py[a] + t * (py[b] - py[a]));
                }
            }
            for (std::size_t k = 0; k + 1 < cuts.size(); k += 2) {
                length += h * std::hypot(cuts[k].first - cuts[k + 1].first, cuts[k].second - cuts[k + 1].second);
            }
        }
    }
    return length;
}

}  // namespace testing
