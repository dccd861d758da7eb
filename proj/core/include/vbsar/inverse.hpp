#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vbsar/forward.hpp"
#include "vbsar/row_model.hpp"

namespace vbsar {

enum class SolverTag { NL, FM, DFM, ATI };

std::string_view to_string(SolverTag tag) noexcept;
/// Throws std::invalid_argument for unknown names.
SolverTag parse_solver_tag(std::string_view name);

/// Real residual vector: real parts of D - I_vb(u) followed by imaginary parts.
struct ResidualStack {
    std::vector<double> values;

    static ResidualStack from_complex(std::span<const Complex> residual);
    std::vector<Complex> to_complex() const;
    std::size_t half() const noexcept { return values.size() / 2; }
    double norm() const noexcept;
    Eigen::Map<const Eigen::VectorXd> vector() const {
        return {values.data(), static_cast<Eigen::Index>(values.size())};
    }
};

/// Raised when a linear-algebra kernel fails inside a row solve.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

struct SolverOptions {
    int max_iterations = 50;
    double step_tolerance = 1e-8;
    double residual_tolerance = 1e-10;
    /// Relative central-difference step for DFM: eps_j = fd_step * max(1, |u_j|).
    double fd_step = 1.4901161193847656e-08;
    /// Tikhonov parameter; the largest squared singular value when absent.
    std::optional<double> regularization;
    /// Step halvings tried before a Newton step is rejected.
    int max_halvings = 20;

    void validate() const;
};

struct InversionResult {
    std::vector<double> u_r_est;
    SolverTag tag = SolverTag::NL;
    int iterations = 0;
    std::vector<double> residual_norms;  ///< ||F||_2 at u0 and after every iteration
    double seconds = 0.0;
    bool converged = false;
    std::string message;
    std::size_t forward_evaluations = 0;
};

/// One inversion problem: the noisy image row plus the frozen scene fields.
class RowProblem {
public:
    RowProblem(std::vector<double> y, double period, std::vector<double> a_r,
               std::vector<double> sigma0, std::vector<Complex> data, const RadarConfig& config,
               std::size_t row_index = 0, const QuadratureOptions& quadrature = {});

    const RowModel& model() const noexcept { return model_; }
    std::span<const Complex> data() const noexcept { return data_; }
    std::size_t row_index() const noexcept { return row_index_; }
    std::size_t n() const noexcept { return model_.n(); }
    double data_norm() const noexcept { return data_norm_; }

private:
    RowModel model_;
    std::vector<Complex> data_;
    std::size_t row_index_;
    double data_norm_;
};

/// F(u) = D - I_vb(u) stacked as [Re; Im].
ResidualStack residual(std::span<const double> u, const RowProblem& problem);

/// d f_vb / d u_r = [2 pi^2 R C / (V rho'^2) - j 4 B k_r rho_a^2 / (V rho'^2)] f_vb
/// with C = yR - y - (R/V) u_r.
Complex integrand_derivative(double u_r, double a_r, double sigma0, double y, double y_r,
                             const RadarConfig& config) noexcept;

/// F'(u) = -I'_vb(u) as a real (2 m) x n matrix, rows ordered [Re; Im].
Eigen::MatrixXd jacobian(std::span<const double> u, const RowProblem& problem);

/// h = -sum_i sigma_i / (sigma_i^2 + alpha) (u_i . F) v_i from the SVD of J.
/// alpha defaults to sigma_1^2. Zero singular values contribute nothing.
Eigen::VectorXd tikhonov_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& F,
                              std::optional<double> alpha = std::nullopt);

/// G(u) = 1/2 ||F(u)||^2 with the yR quadrature weight.
double functional_value(std::span<const double> u, const RowProblem& problem);

/// Riesz gradient Re{ -A int (d f_vb / d u_r) conj(F(yR)) dyR } sampled on y.
std::vector<double> functional_gradient(std::span<const double> u, const RowProblem& problem);

/// Gradient of the discrete G by central differences; `evaluations`
/// receives the number of forward-model calls.
std::vector<double> finite_difference_gradient(std::span<const double> u,
                                               const RowProblem& problem, double fd_step,
                                               std::size_t* evaluations = nullptr);

/// Regularised Newton on F(u) = 0 from u = 0 (tag NL). The acceleration is
/// frozen; steps that increase ||F|| are halved.
InversionResult newton_solve(const RowProblem& problem, const SolverOptions& options);

/// BFGS on G with the functional gradient (tag FM).
InversionResult bfgs_solve(const RowProblem& problem, const SolverOptions& options);

/// BFGS on G with finite-difference gradients (tag DFM).
InversionResult dfm_solve(const RowProblem& problem, const SolverOptions& options);

}  // namespace vbsar
