#pragma once

#include <functional>

#include "gibbstf/models.hpp"

namespace gibbstf {

struct NelderMeadOptions {
    int max_iterations = 400;
    // Converged when every vertex lies within this distance (max-norm) of the best.
    double tolerance = 1e-6;
    // Initial simplex edge as a fraction of each box side.
    double initial_step = 0.1;
};

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex restricted to `box`: trial points leaving the box are
/// mirrored back across the violated bound (and clamped if still outside).
NelderMeadResult nelder_mead_box(const std::function<double(const Vector&)>& f, const Vector& start,
                                 const ParameterBox& box, const NelderMeadOptions& options = {});

/// Mirror `x` into the box.
Vector reflect_into(const Vector& x, const ParameterBox& box);

}  // namespace gibbstf
