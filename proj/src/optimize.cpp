#include "gibbstf/optimize.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace gibbstf {

Vector reflect_into(const Vector& x, const ParameterBox& box) {
    Vector y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] < box.lower[i]) y[i] = box.lower[i] + (box.lower[i] - y[i]);
        if (y[i] > box.upper[i]) y[i] = box.upper[i] - (y[i] - box.upper[i]);
    }
    return box.clamp(y);
}

NelderMeadResult nelder_mead_box(const std::function<double(const Vector&)>& f, const Vector& start,
                                 const ParameterBox& box, const NelderMeadOptions& options) {
    constexpr double alpha = 1.0;
    constexpr double gamma = 2.0;
    constexpr double rho = 0.5;
    constexpr double sigma = 0.5;

    const Eigen::Index n = start.size();
    NelderMeadResult result;
    auto eval = [&](const Vector& x) {
        ++result.evaluations;
        return f(x);
    };

    std::vector<Vector> simplex;
    simplex.push_back(box.clamp(start));
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector v = simplex.front();
        double step = options.initial_step * (box.upper[i] - box.lower[i]);
        if (step == 0.0) step = options.initial_step;
        v[i] += (v[i] + step <= box.upper[i]) ? step : -step;
        simplex.push_back(box.clamp(v));
    }
    std::vector<double> values(simplex.size());
    for (std::size_t j = 0; j < simplex.size(); ++j) values[j] = eval(simplex[j]);

    std::vector<std::size_t> order(simplex.size());
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<Vector> s2;
        std::vector<double> v2;
        for (std::size_t j : order) {
            s2.push_back(simplex[j]);
            v2.push_back(values[j]);
        }
        simplex.swap(s2);
        values.swap(v2);
    };

    const std::size_t worst = simplex.size() - 1;
    for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
        sort_simplex();
        double diameter = 0.0;
        for (std::size_t j = 1; j < simplex.size(); ++j) {
            diameter = std::max(diameter, (simplex[j] - simplex[0]).cwiseAbs().maxCoeff());
        }
        if (diameter < options.tolerance) {
            result.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (std::size_t j = 0; j < worst; ++j) centroid += simplex[j];
        centroid /= static_cast<double>(worst);

        const Vector xr = reflect_into(centroid + alpha * (centroid - simplex[worst]), box);
        const double fr = eval(xr);
        if (fr < values[0]) {
            const Vector xe = reflect_into(centroid + gamma * (xr - centroid), box);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[worst - 1]) {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Vector xc = outside ? Vector(centroid + rho * (xr - centroid))
                                  : Vector(centroid + rho * (simplex[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        for (std::size_t j = 1; j < simplex.size(); ++j) {
            simplex[j] = simplex[0] + sigma * (simplex[j] - simplex[0]);
            values[j] = eval(simplex[j]);
        }
    }
    sort_simplex();
    result.x = simplex[0];
    result.value = values[0];
    return result;
}

}  // namespace gibbstf
