#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vbsar {

/// Objective callback: returns f(x) and writes grad f(x) into `grad`.
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BfgsOptions {
    int max_iterations = 50;
    /// Converged when ||g||_2 <= gradient_tolerance * (1 + |f|).
    double gradient_tolerance = 1e-10;
    /// Converged when ||x_{k+1} - x_k||_2 <= step_tolerance * max(1, ||x_k||_2).
    double step_tolerance = 1e-8;
    double c1 = 1e-4;  ///< sufficient decrease
    double c2 = 0.9;   ///< curvature
    int max_line_search = 40;
};

struct BfgsReport {
    std::vector<double> x;
    double value = 0.0;
    std::vector<double> gradient;
    int iterations = 0;
    std::vector<double> value_trace;  ///< f at x0 and after each accepted step
    bool converged = false;
    std::string message;
};

/// Dense inverse-Hessian BFGS with a strong-Wolfe line search. The initial
/// inverse Hessian is rescaled by s'y / y'y after the first step.
BfgsReport minimize_bfgs(const ValueAndGradient& objective, std::vector<double> x0,
                         const BfgsOptions& options);

}  // namespace vbsar
