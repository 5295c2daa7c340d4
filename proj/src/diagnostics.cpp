#include "gibbstf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>

namespace gibbstf {

// ---- GNZ balance --------------------------------------------------------------

GnzReport gnz_balance(std::span<const Configuration> patterns, const Window& window, std::span<const TestFunction> h,
                      const GibbsModel& model, const Vector& theta, const QuadratureScheme& quadrature) {
    const std::size_t m = patterns.size();
    if (m < 30) throw std::invalid_argument("gnz_balance: need at least 30 replicates");
    if (h.empty()) throw std::invalid_argument("gnz_balance: need at least one test function");
    const auto K = static_cast<Eigen::Index>(h.size());
    Matrix values(static_cast<Eigen::Index>(m), K);
    for (std::size_t r = 0; r < m; ++r) {
        const auto res = residuals(patterns[r], window, h, model, theta, {quadrature, false});
        values.row(static_cast<Eigen::Index>(r)) = res.values.transpose() / window.volume();
    }
    GnzReport report;
    report.replicates = m;
    report.passed = true;
    for (Eigen::Index k = 0; k < K; ++k) {
        GnzEntry e;
        e.label = h[static_cast<std::size_t>(k)].label();
        e.mean = values.col(k).mean();
        const double var = (values.col(k).array() - e.mean).square().sum() / static_cast<double>(m - 1);
        e.se = std::sqrt(var / static_cast<double>(m));
        if (e.se > 0.0) {
            e.z = e.mean / e.se;
        } else {
            e.z = e.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), e.mean);
        }
        report.passed = report.passed && std::abs(e.z) < 3.0;
        report.entries.push_back(e);
    }
    return report;
}

GnzReport gnz_balance(ModelPtr model, const Vector& theta_star, std::span<const TestFunction> h, std::size_t m,
                      const Window& carrier, const Window& window, const SamplerConfig& sampler,
                      const QuadratureScheme& quadrature, unsigned threads) {
    if (m < 30) throw std::invalid_argument("gnz_balance: need at least 30 replicates");
    const auto patterns = sample_replicates(model, theta_star, carrier, sampler, m, threads);
    return gnz_balance(patterns, window, h, *model, theta_star, quadrature);
}

// ---- contrast profile ---------------------------------------------------------

std::vector<Vector> product_grid(const std::vector<double>& axis1, const std::vector<double>& axis2) {
    std::vector<Vector> out;
    for (double a : axis1) {
        for (double b : axis2) {
            Vector t(2);
            t << a, b;
            out.push_back(t);
        }
    }
    return out;
}

ProfileReport contrast_profile(std::span<const Configuration> patterns, const Window& window,
                               const GibbsModel& model, const Vector& theta_star, std::span<const TestFunction> h,
                               const std::vector<Vector>& grid, const QuadratureScheme& quadrature) {
    if (patterns.size() < 2) throw std::invalid_argument("contrast_profile: need at least two patterns");
    if (grid.empty() || h.empty()) throw std::invalid_argument("contrast_profile: empty grid or test-function list");
    for (const auto& t : grid) {
        if (!model.box().contains(t)) throw std::invalid_argument("contrast_profile: grid point outside the box");
    }
    const std::size_t m = patterns.size();
    const std::size_t K = h.size();
    double reach = model.range();
    for (const auto& f : h) reach = std::max(reach, f.range());

    // g[cell][k] collects the per-pattern dummy averages.
    std::vector<std::vector<std::vector<double>>> g(grid.size(), std::vector<std::vector<double>>(K));
    for (const auto& phi : patterns) {
        require_collar(phi, window, model, h);
        NeighborIndex index(phi, reach);
        SiteTable table(phi, index, window, model, h, quadrature);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            std::vector<double> acc(K, 0.0);
            for (const auto& grp : table.dummy_groups()) {
                const double diff = std::exp(-SiteTable::energy(grp, grid[c])) - std::exp(-SiteTable::energy(grp, theta_star));
                if (diff == 0.0) continue;
                for (std::size_t k = 0; k < K; ++k) acc[k] += grp.weight * table.h_value(k, grp, grid[c]) * diff;
            }
            for (std::size_t k = 0; k < K; ++k) g[c][k].push_back(acc[k] / window.volume());
        }
    }

    ProfileReport report;
    report.grid = grid;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double u = 0.0, var = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto& xs = g[c][k];
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(m);
            double ss = 0.0;
            for (double x : xs) ss += (x - mean) * (x - mean);
            const double s2 = ss / static_cast<double>(m - 1) / static_cast<double>(m);
            u += mean * mean;
            var += 4.0 * mean * mean * s2 + 2.0 * s2 * s2;
        }
        report.U.push_back(u);
        report.se.push_back(std::sqrt(var));
    }
    report.argmin = static_cast<std::size_t>(std::min_element(report.U.begin(), report.U.end()) - report.U.begin());
    const double best = report.U[report.argmin];
    report.unique = true;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (c == report.argmin) continue;
        if (report.U[c] <= best + 3.0 * std::max(report.se[report.argmin], report.se[c])) {
            report.unique = false;
            report.near_minimum.push_back(c);
        }
    }
    return report;
}

// ---- sign check -------------------------------------------------------------

const char* to_string(DetVerdict v) {
    switch (v) {
        case DetVerdict::consistent_with_Det: return "consistent_with_Det";
        case DetVerdict::violated: return "violated";
        default: return "inconclusive";
    }
}

namespace {

// Per-coordinate binning: heavy atoms first, then equal-width bins over the rest.
struct AxisBinning {
    std::vector<double> atoms;
    double lo = 0.0, hi = 0.0;
    int bins = 1;

    int operator()(double x) const {
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (x == atoms[a]) return static_cast<int>(a);
        }
        int j = 0;
        if (hi > lo) j = std::min(bins - 1, static_cast<int>(std::floor((x - lo) / (hi - lo) * bins)));
        return static_cast<int>(atoms.size()) + std::max(0, j);
    }
};

AxisBinning make_axis(const std::vector<double>& xs, int bins, double atom_mass) {
    std::map<double, std::size_t> counts;
    for (double x : xs) ++counts[x];
    AxisBinning ax;
    ax.bins = std::max(1, bins);
    const double threshold = atom_mass * static_cast<double>(xs.size());
    for (const auto& [x, c] : counts) {
        if (static_cast<double>(c) >= threshold) ax.atoms.push_back(x);
    }
    bool first = true;
    for (double x : xs) {
        if (std::find(ax.atoms.begin(), ax.atoms.end(), x) != ax.atoms.end()) continue;
        if (first) {
            ax.lo = ax.hi = x;
            first = false;
        }
        ax.lo = std::min(ax.lo, x);
        ax.hi = std::max(ax.hi, x);
    }
    return ax;
}

double det_of_columns(const std::vector<const Vector*>& cols, const std::vector<std::size_t>& rows) {
    const auto p = static_cast<Eigen::Index>(cols.size());
    Matrix M(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) M(i, j) = (*cols[static_cast<std::size_t>(j)])[static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])];
    }
    return M.determinant();
}

std::vector<std::vector<std::size_t>> subsets(std::size_t K, std::size_t p) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == p) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < K; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

Vector nonnegative_combination(const Matrix& M) {
    // Variables y = (c+, c-) >= 0; constraints -M c <= 0, c+ <= 1, c- <= 1.
    // The origin is feasible, so the slack basis starts the simplex.
    const Eigen::Index r = M.rows();
    const Eigen::Index m = M.cols();
    const Eigen::Index n = 2 * m;
    const Eigen::Index rows = r + n;
    Matrix T = Matrix::Zero(rows + 1, n + rows + 1);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double scale = std::max(M.row(i).cwiseAbs().maxCoeff(), 1e-300);
        for (Eigen::Index j = 0; j < m; ++j) {
            T(i, j) = -M(i, j) / scale;
            T(i, m + j) = M(i, j) / scale;
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        T(r + j, j) = 1.0;
        T(r + j, n + rows) = 1.0;
    }
    for (Eigen::Index i = 0; i < rows; ++i) T(i, n + i) = 1.0;
    const Vector colsum = M.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < m; ++j) {
        T(rows, j) = -colsum[j];
        T(rows, m + j) = colsum[j];
    }
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
    for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = n + i;

    constexpr double eps = 1e-12;
    for (int iter = 0; iter < 100000; ++iter) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + rows; ++j) {
            if (T(rows, j) < -eps) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (T(i, enter) > eps) {
                const double ratio = T(i, n + rows) / T(i, enter);
                if (ratio < best - eps ||
                    (ratio <= best + eps && leave >= 0 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) break;  // unbounded cannot happen with the box constraints
        T.row(leave) /= T(leave, enter);
        for (Eigen::Index i = 0; i <= rows; ++i) {
            if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }
    Vector y = Vector::Zero(n);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (basis[static_cast<std::size_t>(i)] < n) y[basis[static_cast<std::size_t>(i)]] = T(i, n + rows);
    }
    return y.head(m) - y.tail(m);
}

DetCheckReport det_check(std::span<const Configuration> patterns, const Window& window, const GibbsModel& model,
                         const Vector& theta, std::span<const TestFunction> h, const DetCheckOptions& options) {
    const std::size_t p = model.parameter_count();
    const std::size_t K = h.size();
    if (K < p) throw std::invalid_argument("det_check: need at least p test functions");
    if (patterns.empty()) throw std::invalid_argument("det_check: no patterns");

    DetCheckReport report;
    Rng rng(options.seed);
    double reach = model.range();
    for (const auto& f : h) reach = std::max(reach, f.range());

    std::vector<Vector> vs, hs;
    std::vector<double> stats(p);
    for (const auto& phi : patterns) {
        require_collar(phi, window, model, h);
        NeighborIndex index(phi, reach);
        for (std::size_t s = 0; s < options.locations_per_pattern; ++s) {
            const Position x = uniform_position(window, rng);
            model.statistics(x, index, std::nullopt, stats);
            const Site site{x, std::nullopt, std::span<const double>(stats), &index};
            Vector v = Eigen::Map<const Vector>(stats.data(), static_cast<Eigen::Index>(p));
            Vector hv(static_cast<Eigen::Index>(K));
            for (std::size_t k = 0; k < K; ++k) hv[static_cast<Eigen::Index>(k)] = h[k](site, theta);
            vs.push_back(std::move(v));
            hs.push_back(std::move(hv));
        }
    }
    report.samples = vs.size();

    Matrix E_psi_v = Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(p));
    for (std::size_t s = 0; s < vs.size(); ++s) E_psi_v += hs[s] * vs[s].transpose();
    E_psi_v /= static_cast<double>(vs.size());
    if (K == p) report.det_E_psi_v = E_psi_v.determinant();

    std::vector<AxisBinning> axes;
    for (std::size_t i = 0; i < p; ++i) {
        std::vector<double> col;
        col.reserve(vs.size());
        for (const auto& v : vs) col.push_back(v[static_cast<Eigen::Index>(i)]);
        axes.push_back(make_axis(col, options.bins, options.atom_mass));
    }
    std::map<std::vector<int>, std::size_t> bin_of;
    std::vector<std::size_t> counts;
    for (std::size_t s = 0; s < vs.size(); ++s) {
        std::vector<int> key(p);
        for (std::size_t i = 0; i < p; ++i) key[i] = axes[i](vs[s][static_cast<Eigen::Index>(i)]);
        auto [it, inserted] = bin_of.try_emplace(key, report.bins.size());
        if (inserted) {
            report.bins.push_back({Vector::Zero(static_cast<Eigen::Index>(p)), Vector::Zero(static_cast<Eigen::Index>(K)), 0.0});
            counts.push_back(0);
        }
        auto& b = report.bins[it->second];
        b.v += vs[s];
        b.psi += hs[s];
        ++counts[it->second];
    }
    for (std::size_t b = 0; b < report.bins.size(); ++b) {
        const double c = static_cast<double>(counts[b]);
        report.bins[b].v /= c;
        report.bins[b].psi /= c;
        report.bins[b].mass = c / static_cast<double>(vs.size());
    }
    if (report.bins.size() < p) {
        throw InsufficientSupport("det_check: only " + std::to_string(report.bins.size()) +
                                  " distinct statistic bins; the statistics lie in a lower-dimensional set");
    }

    // Tuples of distinct bins drawn in proportion to bin mass.
    std::vector<double> masses;
    for (const auto& b : report.bins) masses.push_back(b.mass);
    std::discrete_distribution<std::size_t> pick(masses.begin(), masses.end());
    const auto families = subsets(K, p);
    std::vector<std::vector<std::size_t>> tuples;
    Matrix rows(static_cast<Eigen::Index>(options.n_tuples), static_cast<Eigen::Index>(families.size()));
    std::vector<double> scales(options.n_tuples);
    for (std::size_t t = 0; t < options.n_tuples; ++t) {
        std::vector<std::size_t> tuple;
        while (tuple.size() < p) {
            const std::size_t b = pick(rng);
            if (std::find(tuple.begin(), tuple.end(), b) == tuple.end()) tuple.push_back(b);
        }
        std::vector<const Vector*> vcols, pcols;
        double scale = 1.0;
        for (std::size_t b : tuple) {
            vcols.push_back(&report.bins[b].v);
            pcols.push_back(&report.bins[b].psi);
            scale *= report.bins[b].v.norm() * std::max(report.bins[b].psi.norm(), 1e-300);
        }
        std::vector<std::size_t> vrows(p);
        for (std::size_t i = 0; i < p; ++i) vrows[i] = i;
        const double dv = det_of_columns(vcols, vrows);
        for (std::size_t f = 0; f < families.size(); ++f) {
            rows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) = dv * det_of_columns(pcols, families[f]);
        }
        scales[t] = scale;
    }

    Vector c = Vector::Ones(static_cast<Eigen::Index>(families.size()));
    if (K > p) {
        const auto lp_rows = std::min<Eigen::Index>(rows.rows(), static_cast<Eigen::Index>(options.lp_rows));
        c = nonnegative_combination(rows.topRows(lp_rows));
        const double objective = (rows.topRows(lp_rows) * c).sum();
        report.coefficients_found = objective > 1e-12 * std::max(1.0, rows.topRows(lp_rows).cwiseAbs().sum());
        report.coefficients = c;
        report.notes.push_back("K > p: signs are those of the coefficient combination over the p-subsets");
    } else {
        report.coefficients = c;
    }

    std::size_t pos = 0, neg = 0, nul = 0;
    for (std::size_t t = 0; t < options.n_tuples; ++t) {
        const double prod = rows.row(static_cast<Eigen::Index>(t)).dot(c);
        if (std::abs(prod) < 1e-12 * scales[t]) {
            ++nul;
        } else if (prod > 0) {
            ++pos;
        } else {
            ++neg;
        }
    }
    const double n = static_cast<double>(options.n_tuples);
    report.tuples = options.n_tuples;
    report.positive = static_cast<double>(pos) / n;
    report.negative = static_cast<double>(neg) / n;
    report.null = static_cast<double>(nul) / n;

    const std::size_t nonzero = pos + neg;
    if (nonzero == 0) {
        report.verdict = DetVerdict::violated;
        report.notes.push_back("sampled products are identically null");
    } else {
        const double minority = static_cast<double>(std::min(pos, neg)) / static_cast<double>(nonzero);
        if (minority > 0.2) {
            report.verdict = DetVerdict::violated;
        } else if (minority <= 0.05 && nonzero >= 20) {
            report.verdict = DetVerdict::consistent_with_Det;
        } else {
            report.verdict = DetVerdict::inconclusive;
        }
    }
    report.notes.push_back("thresholds: minority sign <= 5% for consistency, > 20% for violation; Psi by binning");
    return report;
}

void write_scatter_csv(const DetCheckReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    if (report.bins.empty()) return;
    const auto p = report.bins.front().v.size();
    const auto K = report.bins.front().psi.size();
    for (Eigen::Index i = 0; i < p; ++i) out << "v" << i + 1 << ",";
    for (Eigen::Index k = 0; k < K; ++k) out << "psi" << k + 1 << ",";
    out << "mass\n";
    for (const auto& b : report.bins) {
        for (Eigen::Index i = 0; i < p; ++i) out << b.v[i] << ",";
        for (Eigen::Index k = 0; k < K; ++k) out << b.psi[k] << ",";
        out << b.mass << "\n";
    }
}

}  // namespace gibbstf
