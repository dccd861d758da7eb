#include "vbsar/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace vbsar {
namespace {

using Vec = Eigen::VectorXd;

struct Trial {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;
    Vec x;
    Vec grad;
};

class LineFunction {
public:
    LineFunction(const ValueAndGradient& objective, const Vec& x, const Vec& direction)
        : objective_(objective), x_(x), direction_(direction) {}

    Trial at(double alpha) const {
        Trial t;
        t.alpha = alpha;
        t.x = x_ + alpha * direction_;
        t.grad.resize(t.x.size());
        t.value = objective_(std::span<const double>(t.x.data(), t.x.size()),
                             std::span<double>(t.grad.data(), t.grad.size()));
        t.slope = t.grad.dot(direction_);
        return t;
    }

private:
    const ValueAndGradient& objective_;
    const Vec& x_;
    const Vec& direction_;
};

// Minimiser of the quadratic through (a, fa, da) and (b, fb), safeguarded to
// the middle of the bracket.
double interpolate(const Trial& lo, const Trial& hi) {
    const double width = hi.alpha - lo.alpha;
    const double denom = 2.0 * (hi.value - lo.value - lo.slope * width);
    double alpha = lo.alpha + 0.5 * width;
    if (denom > 0.0) alpha = lo.alpha - lo.slope * width * width / denom;
    const double a = std::min(lo.alpha, hi.alpha);
    const double b = std::max(lo.alpha, hi.alpha);
    const double margin = 0.1 * (b - a);
    if (!(alpha > a + margin && alpha < b - margin)) alpha = 0.5 * (a + b);
    return alpha;
}

// Strong-Wolfe search (Nocedal & Wright, Algorithms 3.5 and 3.6).
bool wolfe_search(const LineFunction& line, const Trial& start, double alpha0,
                  const BfgsOptions& opt, Trial& accepted) {
    const double f0 = start.value;
    const double d0 = start.slope;
    Trial prev = start;
    double alpha = alpha0;
    int evaluations = 0;

    auto zoom = [&](Trial lo, Trial hi) {
        while (evaluations < opt.max_line_search) {
            Trial t = line.at(interpolate(lo, hi));
            ++evaluations;
            if (t.value > f0 + opt.c1 * t.alpha * d0 || t.value >= lo.value) {
                hi = std::move(t);
            } else {
                if (std::abs(t.slope) <= -opt.c2 * d0) {
                    accepted = std::move(t);
                    return true;
                }
                if (t.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(t);
            }
            if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, lo.alpha)) break;
        }
        // Fall back to the best sufficient-decrease point found.
        if (lo.alpha > 0.0 && lo.value < f0) {
            accepted = std::move(lo);
            return true;
        }
        return false;
    };

    for (bool first = true; evaluations < opt.max_line_search; first = false) {
        Trial t = line.at(alpha);
        ++evaluations;
        if (!std::isfinite(t.value)) {
            alpha *= 0.1;
            continue;
        }
        if (t.value > f0 + opt.c1 * alpha * d0 || (!first && t.value >= prev.value)) {
            return zoom(prev, std::move(t));
        }
        if (std::abs(t.slope) <= -opt.c2 * d0) {
            accepted = std::move(t);
            return true;
        }
        if (t.slope >= 0.0) return zoom(std::move(t), prev);
        prev = std::move(t);
        alpha *= 2.0;
    }
    return false;
}

}  // namespace

BfgsReport minimize_bfgs(const ValueAndGradient& objective, std::vector<double> x0,
                         const BfgsOptions& options) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    BfgsReport report;

    Trial current;
    current.x = Eigen::Map<const Vec>(x0.data(), n);
    current.grad.resize(n);
    current.value = objective(std::span<const double>(current.x.data(), n),
                              std::span<double>(current.grad.data(), n));
    report.value_trace.push_back(current.value);

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;

    auto finish = [&](bool converged, std::string message) {
        report.x.assign(current.x.data(), current.x.data() + n);
        report.gradient.assign(current.grad.data(), current.grad.data() + n);
        report.value = current.value;
        report.converged = converged;
        report.message = std::move(message);
        return report;
    };

    if (!std::isfinite(current.value)) return finish(false, "non-finite objective at x0");

    for (int it = 0; it < options.max_iterations; ++it) {
        if (current.grad.norm() <= options.gradient_tolerance * (1.0 + std::abs(current.value))) {
            return finish(true, "gradient tolerance reached");
        }
        Vec direction = -H * current.grad;
        double slope = current.grad.dot(direction);
        if (!(slope < 0.0)) {
            H.setIdentity();
            scaled = false;
            direction = -current.grad;
            slope = current.grad.dot(direction);
        }
        current.slope = slope;
        current.alpha = 0.0;
        const double alpha0 = scaled ? 1.0 : std::min(1.0, 1.0 / current.grad.norm());

        const LineFunction line(objective, current.x, direction);
        Trial next;
        if (!wolfe_search(line, current, alpha0, options, next)) {
            return finish(false, "line search failed");
        }

        const Vec s = next.x - current.x;
        const Vec y = next.grad - current.grad;
        const double sy = s.dot(y);
        const double step = s.norm();
        const double x_norm = current.x.norm();
        current = std::move(next);
        report.iterations = it + 1;
        report.value_trace.push_back(current.value);

        if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm()) {
            if (!scaled) {
                H *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Vec Hy = H * y;
            const double yHy = y.dot(Hy);
            H.noalias() -= rho * (Hy * s.transpose() + s * Hy.transpose());
            H.noalias() += (rho * rho * yHy + rho) * (s * s.transpose());
        }

        if (step <= options.step_tolerance * std::max(1.0, x_norm)) {
            return finish(true, "step tolerance reached");
        }
    }
    const bool converged =
        current.grad.norm() <= options.gradient_tolerance * (1.0 + std::abs(current.value));
    return finish(converged, converged ? "gradient tolerance reached" : "maximum iterations");
}

}  // namespace vbsar
