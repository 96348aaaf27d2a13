#pragma once

#include <functional>

namespace dustmie::quad {

struct SimpsonOptions {
    double rel_tol = 1e-6;
    int max_depth = 40;
    int initial_panels = 8;
    long max_evaluations = 2'000'000;
};

struct QuadratureResult {
    double value = 0.0;
    long evaluations = 0;
};

/// Adaptive Simpson with interval bisection and Richardson correction.
/// The absolute tolerance is rel_tol times the magnitude of a coarse initial
/// estimate, split evenly across the initial panels. Throws QuadratureError
/// when max_depth or max_evaluations is exhausted before the local error
/// test passes.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const SimpsonOptions& options = {});

}  // namespace dustmie::quad
