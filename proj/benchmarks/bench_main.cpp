#include <benchmark/benchmark.h>

#include "vbsar/config.hpp"
#include "vbsar/inverse.hpp"
#include "vbsar/pipeline.hpp"

using namespace vbsar;

namespace {

// One simulated 128x128 scene shared by every benchmark.
struct Fixture {
    RunConfig config = parse_config("");
    SimulationProducts sim = simulate(config);
    std::vector<double> y = config.mesh.axis();
    std::size_t row = 64;

    std::span<const double> u() const { return sim.scene.u_r.row(row); }
    std::span<const double> a() const { return sim.scene.a_r.row(row); }
    std::span<const double> s0() const { return sim.scene.sigma0.row(row); }

    RowProblem problem() const {
        const auto d = sim.noisy.values.row(row);
        return RowProblem(y, config.mesh.length, {a().begin(), a().end()}, {s0().begin(), s0().end()},
                          {d.begin(), d.end()}, config.radar, row);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_ForwardRow(benchmark::State& state) {
    const auto& f = fixture();
    const SceneRow row{f.y, f.config.mesh.length, f.u(), f.a(), f.s0()};
    for (auto _ : state) benchmark::DoNotOptimize(vb_image_row(row, f.y, f.config.radar));
}
BENCHMARK(BM_ForwardRow)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
    const auto& f = fixture();
    const RowProblem p = f.problem();
    const std::vector<double> u(f.u().begin(), f.u().end());
    for (auto _ : state) benchmark::DoNotOptimize(jacobian(u, p));
}
BENCHMARK(BM_Jacobian)->Unit(benchmark::kMillisecond);

void BM_TikhonovStep(benchmark::State& state) {
    const auto& f = fixture();
    const RowProblem p = f.problem();
    const std::vector<double> u(f.u().begin(), f.u().end());
    const Eigen::MatrixXd J = jacobian(u, p);
    const Eigen::VectorXd F = residual(u, p).vector();
    for (auto _ : state) benchmark::DoNotOptimize(tikhonov_step(J, F));
}
BENCHMARK(BM_TikhonovStep)->Unit(benchmark::kMillisecond);

void BM_FunctionalGradient(benchmark::State& state) {
    const auto& f = fixture();
    const RowProblem p = f.problem();
    const std::vector<double> u(f.u().begin(), f.u().end());
    for (auto _ : state) benchmark::DoNotOptimize(functional_gradient(u, p));
}
BENCHMARK(BM_FunctionalGradient)->Unit(benchmark::kMillisecond);

void BM_FiniteDifferenceGradient(benchmark::State& state) {
    const auto& f = fixture();
    const RowProblem p = f.problem();
    const std::vector<double> u(f.u().begin(), f.u().end());
    for (auto _ : state) benchmark::DoNotOptimize(finite_difference_gradient(u, p, 1.4901161193847656e-08));
}
BENCHMARK(BM_FiniteDifferenceGradient)->Unit(benchmark::kMillisecond);

void BM_SolveRow(benchmark::State& state) {
    const auto& f = fixture();
    const RowProblem p = f.problem();
    const auto tag = static_cast<SolverTag>(state.range(0));
    const SolverOptions& o = f.config.options_for(tag);
    for (auto _ : state) {
        switch (tag) {
            case SolverTag::NL: benchmark::DoNotOptimize(newton_solve(p, o)); break;
            case SolverTag::FM: benchmark::DoNotOptimize(bfgs_solve(p, o)); break;
            default: benchmark::DoNotOptimize(dfm_solve(p, o)); break;
        }
    }
    state.SetLabel(std::string(to_string(tag)));
}
BENCHMARK(BM_SolveRow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveRow)->Arg(2)->Iterations(1)->Unit(benchmark::kMillisecond);

void BM_SimulateScene(benchmark::State& state) {
    const RunConfig c = parse_config("");
    for (auto _ : state) benchmark::DoNotOptimize(simulate(c));
}
BENCHMARK(BM_SimulateScene)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
