#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vbsar/bfgs.hpp"
#include "vbsar/inverse.hpp"
#include "vbsar/metrics.hpp"

using namespace vbsar;

namespace {

constexpr double kPi = std::numbers::pi;

const RadarConfig kRadar = RadarConfig::make(100.0, 0.25, 8000.0, 0.015, 0.03, 0.03);

// Smooth synthetic row on a 64-point, 640 m periodic mesh.
struct SmoothRow {
    static constexpr std::size_t n = 64;
    static constexpr double length = 640.0;
    std::vector<double> y = Mesh{n, length}.axis();
    std::vector<double> u, a, s0;
    std::vector<Complex> clean;

    explicit SmoothRow(double nrcs = 1.0) {
        for (double v : y) {
            u.push_back(0.3 * std::sin(2.0 * kPi * 2.0 * v / length) +
                        0.1 * std::cos(2.0 * kPi * 3.0 * v / length));
            a.push_back(0.05 * std::cos(2.0 * kPi * 2.0 * v / length));
            s0.push_back(nrcs);
        }
        clean = vb_image_row({y, length, u, a, s0}, y, kRadar).values;
    }

    RowProblem problem(std::vector<Complex> data) const {
        return RowProblem(y, length, a, s0, std::move(data), kRadar, 5);
    }
    RowProblem problem() const { return problem(clean); }
};

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v) x = dist(gen);
    return v;
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("solver tags") {
    for (SolverTag t : {SolverTag::NL, SolverTag::FM, SolverTag::DFM, SolverTag::ATI}) {
        CHECK(parse_solver_tag(to_string(t)) == t);
    }
    CHECK(parse_solver_tag("fm") == SolverTag::FM);
    CHECK_THROWS_AS(parse_solver_tag("GN"), std::invalid_argument);
}

TEST_CASE("solver options validation") {
    SolverOptions o;
    CHECK_NOTHROW(o.validate());
    o.max_iterations = 0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = SolverOptions{};
    o.step_tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = SolverOptions{};
    o.regularization = -1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("residual stack") {
    const std::vector<Complex> r{{1.0, -2.0}, {3.5, 0.25}, {-0.5, 7.0}};
    const ResidualStack s = ResidualStack::from_complex(r);
    REQUIRE(s.values.size() == 6);
    CHECK(s.half() == 3);
    CHECK(s.values[0] == 1.0);
    CHECK(s.values[2] == -0.5);
    CHECK(s.values[3] == -2.0);
    CHECK(s.values[5] == 7.0);
    CHECK(s.to_complex() == r);
    CHECK(ResidualStack::from_complex(s.to_complex()).values == s.values);
}

TEST_CASE("residual of the generating field") {
    const SmoothRow row;
    const RowProblem p = row.problem();
    CHECK(residual(row.u, p).norm() < 1e-13 * p.data_norm());
    CHECK(residual(std::vector<double>(row.n, 0.0), p).norm() > 1e-3 * p.data_norm());

    const SmoothRow dark(0.0);
    const RowProblem q = dark.problem(std::vector<Complex>(dark.n));
    for (double v : residual(dark.u, q).values) CHECK(v == 0.0);
}

TEST_CASE("integrand derivative") {
    const RadarConfig c = RadarConfig::make(100.0, 0.25, 5000.0, 0.015, 0.03, 0.03);
    SUBCASE("symbolic oracle") {
        const Complex df = integrand_derivative(0.37, -0.21, 1.3, -35.0, -12.0, c);
        const Complex expected(0.01906656449267540355, -0.04878884283153101401);
        CHECK(std::abs(df - expected) / std::abs(expected) < 1e-12);
    }
    SUBCASE("central differences") {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> uu(-1.5, 1.5), aa(-0.5, 0.5), yy(-200.0, 200.0);
        for (int probe = 0; probe < 10; ++probe) {
            const double u = uu(gen), a = aa(gen), y = yy(gen);
            const double y_r = y + c.R / c.V * u + 0.4 * yy(gen) / 10.0;
            const double eps = 1e-6 * std::max(1.0, std::abs(u));
            const Complex fd = (vb_integrand(u + eps, a, 1.1, y, y_r, c) -
                                vb_integrand(u - eps, a, 1.1, y, y_r, c)) /
                               (2.0 * eps);
            const Complex df = integrand_derivative(u, a, 1.1, y, y_r, c);
            CHECK(std::abs(df - fd) / std::abs(df) < 1e-6);
        }
    }
    SUBCASE("at zero shift only the phase term survives") {
        const double u = 0.4, y = 10.0;
        const double y_r = y + c.R / c.V * u;
        const Complex f = vb_integrand(u, 0.1, 1.0, y, y_r, c);
        const Complex ratio = integrand_derivative(u, 0.1, 1.0, y, y_r, c) / f;
        const double rho = degraded_resolution(0.1, c);
        CHECK(std::abs(ratio.real()) < 1e-15 * std::abs(ratio.imag()));
        CHECK(ratio.imag() ==
              doctest::Approx(-4.0 * c.B * c.k_r * c.rho_a * c.rho_a / (c.V * rho * rho)));
    }
}

TEST_CASE("jacobian") {
    const SmoothRow row;
    const RowProblem p = row.problem();
    std::mt19937_64 gen(7);
    SUBCASE("directional finite differences") {
        for (int probe = 0; probe < 10; ++probe) {
            const auto u = random_vector(gen, row.n, 0.3);
            const auto h = random_vector(gen, row.n, 1.0);
            const Eigen::MatrixXd J = jacobian(u, p);
            REQUIRE(J.rows() == 2 * static_cast<Eigen::Index>(row.n));
            const Eigen::VectorXd Jh = J * Eigen::Map<const Eigen::VectorXd>(h.data(), row.n);
            const double eps = 1e-6;
            std::vector<double> up(u), um(u);
            for (std::size_t j = 0; j < row.n; ++j) {
                up[j] += eps * h[j];
                um[j] -= eps * h[j];
            }
            const auto fp = residual(up, p).values;
            const auto fm = residual(um, p).values;
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < fp.size(); ++i) {
                const double fd = (fp[i] - fm[i]) / (2.0 * eps);
                num += (Jh(static_cast<Eigen::Index>(i)) - fd) * (Jh(static_cast<Eigen::Index>(i)) - fd);
                den += fd * fd;
            }
            CHECK(std::sqrt(num / den) < 1e-5);
        }
    }
    SUBCASE("linear in the NRCS") {
        const SmoothRow dark(0.0);
        CHECK(jacobian(dark.u, dark.problem(std::vector<Complex>(dark.n))).norm() == 0.0);
        const SmoothRow bright(3.0);
        const Eigen::MatrixXd J1 = jacobian(row.u, p);
        const Eigen::MatrixXd J3 = jacobian(row.u, bright.problem());
        CHECK((J3 - 3.0 * J1).norm() < 1e-14 * J3.norm());
    }
}

TEST_CASE("tikhonov step") {
    std::mt19937_64 gen(3);
    SUBCASE("rank one") {
        Eigen::VectorXd u1 = Eigen::VectorXd::Random(6).normalized();
        Eigen::VectorXd v1 = Eigen::VectorXd::Random(4).normalized();
        const double s1 = 2.5;
        const Eigen::MatrixXd J = s1 * u1 * v1.transpose();
        const Eigen::VectorXd F = Eigen::VectorXd::Random(6);
        const Eigen::VectorXd h = tikhonov_step(J, F);
        const Eigen::VectorXd expected = -(u1.dot(F)) * v1 / (2.0 * s1);
        CHECK((h - expected).norm() < 1e-14 * expected.norm());
    }
    SUBCASE("normal equations") {
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::MatrixXd J = Eigen::MatrixXd::Random(256, 128);
            const Eigen::VectorXd F = Eigen::VectorXd::Random(256);
            const Eigen::VectorXd h = tikhonov_step(J, F);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
            const double alpha = std::pow(svd.singularValues()(0), 2);
            const Eigen::MatrixXd N =
                J.transpose() * J + alpha * Eigen::MatrixXd::Identity(128, 128);
            const Eigen::VectorXd ref = N.ldlt().solve(-J.transpose() * F);
            CHECK((h - ref).norm() / ref.norm() < 1e-10);
            // Every filter factor is at most 1 / (2 sigma_1).
            CHECK(h.norm() <= F.norm() / (2.0 * std::sqrt(alpha)) * (1.0 + 1e-12));
        }
    }
    SUBCASE("explicit regularisation and zero residual") {
        const Eigen::MatrixXd J = Eigen::MatrixXd::Random(20, 10);
        const Eigen::VectorXd F = Eigen::VectorXd::Random(20);
        const Eigen::VectorXd h = tikhonov_step(J, F, 0.3);
        const Eigen::VectorXd ref =
            (J.transpose() * J + 0.3 * Eigen::MatrixXd::Identity(10, 10)).ldlt().solve(-J.transpose() * F);
        CHECK((h - ref).norm() < 1e-12 * ref.norm());
        CHECK(tikhonov_step(J, Eigen::VectorXd::Zero(20)).norm() == 0.0);
        CHECK(tikhonov_step(Eigen::MatrixXd::Zero(20, 10), F).norm() == 0.0);
        CHECK_THROWS(tikhonov_step(J, Eigen::VectorXd::Zero(19)));
    }
}

TEST_CASE("functional gradient") {
    const SmoothRow row;
    std::vector<Complex> data = row.clean;
    std::mt19937_64 gen(11);
    std::normal_distribution<double> noise(0.0, 1e-4);
    for (Complex& d : data) d += Complex(noise(gen), noise(gen));
    const RowProblem p = row.problem(data);
    const double h = p.model().weight();

    SUBCASE("central differences per coordinate") {
        for (int probe = 0; probe < 10; ++probe) {
            const auto u = random_vector(gen, row.n, 0.3);
            const auto g = functional_gradient(u, p);
            std::size_t evaluations = 0;
            const auto fd = finite_difference_gradient(u, p, 1e-6, &evaluations);
            CHECK(evaluations == 2 * row.n);
            double scale = 0.0;
            for (double v : g) scale = std::max(scale, std::abs(v));
            for (std::size_t j = 0; j < row.n; ++j) {
                // Coordinates far below the gradient scale sit at stationary points.
                if (std::abs(g[j]) < 1e-3 * scale) continue;
                CHECK(std::abs(fd[j] / h - g[j]) / std::abs(g[j]) < 1e-5);
            }
        }
    }
    SUBCASE("adjoint consistency with the jacobian") {
        const auto u = random_vector(gen, row.n, 0.3);
        const Eigen::VectorXd JtF = jacobian(u, p).transpose() * residual(u, p).vector();
        const auto g = functional_gradient(u, p);
        const double w = p.model().image_weight() / h;
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < row.n; ++j) {
            const double ref = w * JtF(static_cast<Eigen::Index>(j));
            num += (g[j] - ref) * (g[j] - ref);
            den += ref * ref;
        }
        CHECK(std::sqrt(num / den) < 1e-10);
    }
    SUBCASE("vanishes at a root") {
        const RowProblem exact = row.problem();
        const auto g = functional_gradient(row.u, exact);
        const auto g0 = functional_gradient(std::vector<double>(row.n, 0.0), exact);
        CHECK(l2(g) < 1e-12 * l2(g0));
        CHECK(functional_value(row.u, exact) < 1e-25);
    }
}

TEST_CASE("Newton with Tikhonov steps") {
    const SmoothRow row;
    const RowProblem p = row.problem();
    const SolverOptions options;

    SUBCASE("noise-free recovery with a monotone residual") {
        const InversionResult r = newton_solve(p, options);
        CHECK(r.tag == SolverTag::NL);
        CHECK(rmse(r.u_r_est, row.u) < 5e-3);
        REQUIRE(r.residual_norms.size() == static_cast<std::size_t>(r.iterations) + 1);
        for (std::size_t k = 1; k < r.residual_norms.size(); ++k) {
            CHECK(r.residual_norms[k] <= r.residual_norms[k - 1]);
            CHECK(std::isfinite(r.residual_norms[k]));
        }
        CHECK(r.seconds > 0.0);
        const InversionResult again = newton_solve(p, options);
        CHECK(again.u_r_est == r.u_r_est);
        CHECK(again.residual_norms == r.residual_norms);
    }
    SUBCASE("dark scene terminates at once") {
        const SmoothRow dark(0.0);
        const InversionResult r = newton_solve(dark.problem(std::vector<Complex>(dark.n)), options);
        CHECK(r.converged);
        CHECK(r.iterations == 0);
        for (double v : r.u_r_est) CHECK(v == 0.0);
    }
    SUBCASE("non-finite data is a row-tagged solver error") {
        std::vector<Complex> bad = row.clean;
        bad[3] = Complex(std::nan(""), 0.0);
        CHECK_THROWS_AS(newton_solve(row.problem(bad), options), SolverError);
    }
}

TEST_CASE("BFGS on the functional") {
    const SmoothRow row;
    const RowProblem p = row.problem();

    SUBCASE("noise-free recovery with decreasing values") {
        SolverOptions options;
        options.max_iterations = 200;
        const InversionResult r = bfgs_solve(p, options);
        CHECK(r.tag == SolverTag::FM);
        CHECK(rmse(r.u_r_est, row.u) < 5e-3);
        for (std::size_t k = 1; k < r.residual_norms.size(); ++k) {
            CHECK(r.residual_norms[k] < r.residual_norms[k - 1]);
        }
    }
    SUBCASE("finite-difference variant agrees") {
        const SolverOptions options;
        const InversionResult fm = bfgs_solve(p, options);
        const InversionResult dfm = dfm_solve(p, options);
        CHECK(dfm.tag == SolverTag::DFM);
        double worst = 0.0;
        for (std::size_t j = 0; j < row.n; ++j) {
            worst = std::max(worst, std::abs(fm.u_r_est[j] - dfm.u_r_est[j]));
        }
        CHECK(worst < 10.0 * options.fd_step);
        // Each DFM gradient costs 2n value evaluations.
        CHECK(dfm.forward_evaluations >= 2 * row.n * static_cast<std::size_t>(dfm.iterations));
        CHECK(fm.forward_evaluations < dfm.forward_evaluations / row.n);
    }
}

TEST_CASE("BFGS driver") {
    SUBCASE("Rosenbrock") {
        const ValueAndGradient rosen = [](std::span<const double> x, std::span<double> g) {
            const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
            g[0] = -2.0 * a - 400.0 * x[0] * b;
            g[1] = 200.0 * b;
            return a * a + 100.0 * b * b;
        };
        BfgsOptions o;
        o.max_iterations = 200;
        const BfgsReport r = minimize_bfgs(rosen, {-1.2, 1.0}, o);
        CHECK(r.converged);
        CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
        for (std::size_t k = 1; k < r.value_trace.size(); ++k) {
            CHECK(r.value_trace[k] < r.value_trace[k - 1]);
        }
        double gnorm = std::hypot(r.gradient[0], r.gradient[1]);
        CHECK(gnorm <= o.gradient_tolerance * (1.0 + std::abs(r.value)));
    }
    SUBCASE("quadratic converges in a handful of steps") {
        const ValueAndGradient quad = [](std::span<const double> x, std::span<double> g) {
            double f = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double w = 1.0 + static_cast<double>(i);
                g[i] = w * (x[i] - 1.0);
                f += 0.5 * w * (x[i] - 1.0) * (x[i] - 1.0);
            }
            return f;
        };
        const BfgsReport r = minimize_bfgs(quad, std::vector<double>(5, 0.0), BfgsOptions{});
        INFO(r.message, " after ", r.iterations, " iterations");
        CHECK(r.converged);
        for (double v : r.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
    }
}
