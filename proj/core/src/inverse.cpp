#include "vbsar/inverse.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <numbers>

#include "vbsar/bfgs.hpp"

namespace vbsar {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double l2(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

ResidualStack stack_residual(std::span<const Complex> data, std::span<const Complex> image) {
    const std::size_t m = data.size();
    ResidualStack out;
    out.values.resize(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        const Complex f = data[i] - image[i];
        out.values[i] = f.real();
        out.values[m + i] = f.imag();
    }
    return out;
}

Eigen::MatrixXd assemble_jacobian(const RowModel::Linearization& lin, std::size_t n) {
    const std::size_t m = lin.image.size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * m),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t e = lin.row_start[i]; e < lin.row_start[i + 1]; ++e) {
            const auto& entry = lin.entries[e];
            const auto col = static_cast<Eigen::Index>(entry.j);
            J(static_cast<Eigen::Index>(i), col) -= entry.value.real();
            J(static_cast<Eigen::Index>(m + i), col) -= entry.value.imag();
        }
    }
    return J;
}

// Discrete gradient of G = (h_R / 2) sum |F|^2, i.e. h times the Riesz gradient.
double value_and_discrete_gradient(const RowProblem& problem, std::span<const double> u,
                                   RowModel::Linearization& lin, std::span<double> grad) {
    const RowModel& model = problem.model();
    model.linearize(u, lin);
    const auto data = problem.data();
    const double hr = model.image_weight();
    double value = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < lin.image.size(); ++i) {
        const Complex f = data[i] - lin.image[i];
        value += std::norm(f);
        const Complex fc = std::conj(f);
        for (std::size_t e = lin.row_start[i]; e < lin.row_start[i + 1]; ++e) {
            grad[lin.entries[e].j] -= (lin.entries[e].value * fc).real() * hr;
        }
    }
    return 0.5 * hr * value;
}

double value_only(const RowProblem& problem, std::span<const double> u) {
    const auto image = problem.model().image(u);
    const auto data = problem.data();
    double value = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) value += std::norm(data[i] - image[i]);
    return 0.5 * problem.model().image_weight() * value;
}

InversionResult from_bfgs(const BfgsReport& report, const RowProblem& problem, SolverTag tag) {
    InversionResult out;
    out.tag = tag;
    out.u_r_est = report.x;
    out.iterations = report.iterations;
    out.converged = report.converged;
    out.message = report.message;
    const double hr = problem.model().image_weight();
    out.residual_norms.reserve(report.value_trace.size());
    for (double g : report.value_trace) out.residual_norms.push_back(std::sqrt(2.0 * g / hr));
    return out;
}

BfgsOptions bfgs_options(const SolverOptions& options) {
    BfgsOptions b;
    b.max_iterations = options.max_iterations;
    b.gradient_tolerance = options.residual_tolerance;
    b.step_tolerance = options.step_tolerance;
    return b;
}

}  // namespace

std::string_view to_string(SolverTag tag) noexcept {
    switch (tag) {
        case SolverTag::NL: return "NL";
        case SolverTag::FM: return "FM";
        case SolverTag::DFM: return "DFM";
        case SolverTag::ATI: return "ATI";
    }
    return "?";
}

SolverTag parse_solver_tag(std::string_view name) {
    for (SolverTag tag : {SolverTag::NL, SolverTag::FM, SolverTag::DFM, SolverTag::ATI}) {
        const std::string_view tag_name = to_string(tag);
        if (name.size() == tag_name.size() &&
            std::equal(name.begin(), name.end(), tag_name.begin(), [](char a, char b) {
                return std::toupper(static_cast<unsigned char>(a)) == b;
            })) {
            return tag;
        }
    }
    throw std::invalid_argument("unknown solver tag '" + std::string(name) + "'");
}

ResidualStack ResidualStack::from_complex(std::span<const Complex> residual) {
    ResidualStack out;
    out.values.resize(2 * residual.size());
    for (std::size_t i = 0; i < residual.size(); ++i) {
        out.values[i] = residual[i].real();
        out.values[residual.size() + i] = residual[i].imag();
    }
    return out;
}

std::vector<Complex> ResidualStack::to_complex() const {
    const std::size_t m = half();
    std::vector<Complex> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = Complex(values[i], values[m + i]);
    return out;
}

double ResidualStack::norm() const noexcept { return l2(values); }

void SolverOptions::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations: must be >= 1");
    if (!(step_tolerance > 0.0)) throw std::invalid_argument("step_tolerance: must be > 0");
    if (!(residual_tolerance > 0.0)) {
        throw std::invalid_argument("residual_tolerance: must be > 0");
    }
    if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step: must be > 0");
    if (regularization && !(*regularization >= 0.0)) {
        throw std::invalid_argument("regularization: must be >= 0");
    }
    if (max_halvings < 0) throw std::invalid_argument("max_halvings: must be >= 0");
}

RowProblem::RowProblem(std::vector<double> y, double period, std::vector<double> a_r,
                       std::vector<double> sigma0, std::vector<Complex> data,
                       const RadarConfig& config, std::size_t row_index,
                       const QuadratureOptions& quadrature)
    : model_(y, period, std::move(a_r), std::move(sigma0), y, config, quadrature),
      data_(std::move(data)),
      row_index_(row_index) {
    if (data_.size() != model_.m()) {
        throw std::invalid_argument("RowProblem: data row does not match the image axis");
    }
    double sum = 0.0;
    for (const Complex& d : data_) sum += std::norm(d);
    data_norm_ = std::sqrt(sum);
}

ResidualStack residual(std::span<const double> u, const RowProblem& problem) {
    return stack_residual(problem.data(), problem.model().image(u));
}

Complex integrand_derivative(double u_r, double a_r, double sigma0, double y, double y_r,
                             const RadarConfig& c) noexcept {
    const double pi = std::numbers::pi;
    const double rho_p = degraded_resolution(a_r, c);
    const double inv2 = 1.0 / (rho_p * rho_p);
    const double shift = y_r - y - c.R / c.V * u_r;
    const Complex bracket(2.0 * pi * pi * c.R * shift / c.V * inv2,
                          -4.0 * c.B * c.k_r * c.rho_a * c.rho_a / c.V * inv2);
    return bracket * vb_integrand(u_r, a_r, sigma0, y, y_r, c);
}

Eigen::MatrixXd jacobian(std::span<const double> u, const RowProblem& problem) {
    RowModel::Linearization lin;
    problem.model().linearize(u, lin);
    return assemble_jacobian(lin, problem.n());
}

Eigen::VectorXd tikhonov_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& F,
                              std::optional<double> alpha) {
    if (J.rows() != F.size()) {
        throw std::invalid_argument("tikhonov_step: Jacobian and residual sizes differ");
    }
    if (!J.allFinite() || !F.allFinite()) {
        throw std::runtime_error("tikhonov_step: non-finite Jacobian or residual");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw std::runtime_error("tikhonov_step: SVD failed");
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma1 = sigma.size() > 0 ? sigma(0) : 0.0;
    const double a = alpha.value_or(sigma1 * sigma1);

    const Eigen::VectorXd coeff = svd.matrixU().transpose() * F;
    Eigen::VectorXd filtered = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > 0.0) filtered(i) = sigma(i) / (sigma(i) * sigma(i) + a) * coeff(i);
    }
    return -(svd.matrixV() * filtered);
}

double functional_value(std::span<const double> u, const RowProblem& problem) {
    return value_only(problem, u);
}

std::vector<double> functional_gradient(std::span<const double> u, const RowProblem& problem) {
    RowModel::Linearization lin;
    std::vector<double> grad(problem.n());
    value_and_discrete_gradient(problem, u, lin, grad);
    const double h = problem.model().weight();
    for (double& g : grad) g /= h;
    return grad;
}

std::vector<double> finite_difference_gradient(std::span<const double> u,
                                               const RowProblem& problem, double fd_step,
                                               std::size_t* evaluations) {
    std::vector<double> point(u.begin(), u.end());
    std::vector<double> grad(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double eps = fd_step * std::max(1.0, std::abs(u[j]));
        point[j] = u[j] + eps;
        const double plus = value_only(problem, point);
        point[j] = u[j] - eps;
        const double minus = value_only(problem, point);
        point[j] = u[j];
        grad[j] = (plus - minus) / (2.0 * eps);
    }
    if (evaluations) *evaluations += 2 * u.size();
    return grad;
}

InversionResult newton_solve(const RowProblem& problem, const SolverOptions& options) {
    options.validate();
    const auto start = Clock::now();
    const std::size_t n = problem.n();
    const RowModel& model = problem.model();

    InversionResult out;
    out.tag = SolverTag::NL;
    std::vector<double> u(n, 0.0);
    RowModel::Linearization lin;
    model.linearize(u, lin);
    ++out.forward_evaluations;
    ResidualStack F = stack_residual(problem.data(), lin.image);
    double f_norm = F.norm();
    out.residual_norms.push_back(f_norm);
    out.message = "maximum iterations";

    for (int it = 0; it < options.max_iterations; ++it) {
        if (f_norm <= options.residual_tolerance * problem.data_norm()) {
            out.converged = true;
            out.message = "residual tolerance reached";
            break;
        }
        Eigen::VectorXd h;
        try {
            h = tikhonov_step(assemble_jacobian(lin, n), F.vector(), options.regularization);
        } catch (const std::exception& e) {
            throw SolverError(e.what(), problem.row_index());
        }
        const double u_scale = std::max(1.0, l2(u));
        if (h.norm() <= options.step_tolerance * u_scale) {
            out.converged = true;
            out.message = "step tolerance reached";
            break;
        }

        bool accepted = false;
        std::vector<double> trial(n);
        ResidualStack trial_F;
        for (int halving = 0; halving <= options.max_halvings; ++halving) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = u[j] + h(static_cast<Eigen::Index>(j));
            trial_F = residual(trial, problem);
            ++out.forward_evaluations;
            if (trial_F.norm() <= f_norm) {
                accepted = true;
                break;
            }
            h *= 0.5;
        }
        if (!accepted) {
            out.message = "step rejected after halving";
            break;
        }
        u = std::move(trial);
        out.iterations = it + 1;
        model.linearize(u, lin);
        ++out.forward_evaluations;
        F = stack_residual(problem.data(), lin.image);
        f_norm = F.norm();
        out.residual_norms.push_back(f_norm);
        if (h.norm() <= options.step_tolerance * u_scale) {
            out.converged = true;
            out.message = "step tolerance reached";
            break;
        }
    }
    if (!out.converged && f_norm <= options.residual_tolerance * problem.data_norm()) {
        out.converged = true;
        out.message = "residual tolerance reached";
    }
    out.u_r_est = std::move(u);
    out.seconds = seconds_since(start);
    return out;
}

InversionResult bfgs_solve(const RowProblem& problem, const SolverOptions& options) {
    options.validate();
    const auto start = Clock::now();
    RowModel::Linearization lin;
    std::size_t evaluations = 0;
    const ValueAndGradient objective = [&](std::span<const double> u, std::span<double> grad) {
        ++evaluations;
        return value_and_discrete_gradient(problem, u, lin, grad);
    };
    const BfgsReport report =
        minimize_bfgs(objective, std::vector<double>(problem.n(), 0.0), bfgs_options(options));
    InversionResult out = from_bfgs(report, problem, SolverTag::FM);
    out.forward_evaluations = evaluations;
    out.seconds = seconds_since(start);
    return out;
}

InversionResult dfm_solve(const RowProblem& problem, const SolverOptions& options) {
    options.validate();
    const auto start = Clock::now();
    std::size_t evaluations = 0;
    const ValueAndGradient objective = [&](std::span<const double> u, std::span<double> grad) {
        ++evaluations;
        const double value = value_only(problem, u);
        const auto g = finite_difference_gradient(u, problem, options.fd_step, &evaluations);
        std::copy(g.begin(), g.end(), grad.begin());
        return value;
    };
    const BfgsReport report =
        minimize_bfgs(objective, std::vector<double>(problem.n(), 0.0), bfgs_options(options));
    InversionResult out = from_bfgs(report, problem, SolverTag::DFM);
    out.forward_evaluations = evaluations;
    out.seconds = seconds_since(start);
    return out;
}

}  // namespace vbsar
