#include "vbsar/pipeline.hpp"

#include <tbb/parallel_for.h>
#include <tbb/global_control.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "vbsar/grid_io.hpp"
#include "vbsar/rng.hpp"

namespace vbsar {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string path_in(const RunConfig& config, const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
}

RealGrid real_part(const ComplexGrid& g) {
    RealGrid out(g.rows(), g.cols());
    for (std::size_t i = 0; i < g.size(); ++i) out.values()[i] = g.values()[i].real();
    return out;
}

RealGrid imag_part(const ComplexGrid& g) {
    RealGrid out(g.rows(), g.cols());
    for (std::size_t i = 0; i < g.size(); ++i) out.values()[i] = g.values()[i].imag();
    return out;
}

ComplexGrid combine(const RealGrid& re, const RealGrid& im) {
    if (!re.same_shape(im)) throw FormatError("real and imaginary image grids differ in shape");
    ComplexGrid out(re.rows(), re.cols());
    for (std::size_t i = 0; i < re.size(); ++i) {
        out.values()[i] = Complex(re.values()[i], im.values()[i]);
    }
    return out;
}

RealGrid read_real(const RunConfig& config, const std::string& name) {
    return read_grid(path_in(config, name)).real();
}

void write_image(const RunConfig& config, const ComplexGrid& image, const char* re,
                 const char* im) {
    write_grid(path_in(config, re), real_part(image), config.hash);
    write_grid(path_in(config, im), imag_part(image), config.hash);
}

std::vector<double> ati_row(std::span<const Complex> data, const RadarConfig& radar) {
    ComplexGrid row(1, data.size(), std::vector<Complex>(data.begin(), data.end()));
    const RealGrid u = interferometric_velocity(interferometric_phase(row).phase, radar);
    return {u.values().begin(), u.values().end()};
}

InversionResult solve_row(SolverTag tag, const RowProblem& problem, const SolverOptions& options) {
    switch (tag) {
        case SolverTag::NL: return newton_solve(problem, options);
        case SolverTag::FM: return bfgs_solve(problem, options);
        case SolverTag::DFM: return dfm_solve(problem, options);
        case SolverTag::ATI: break;
    }
    throw std::logic_error("ATI is not an iterative solver");
}

double median(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::string files::estimate(SolverTag tag) {
    std::string name(to_string(tag));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return "u_" + name + ".vbg";
}

SimulationProducts simulate(const RunConfig& config) {
    SimulationProducts out;
    const SpectrumGrid spectrum = directional_spectrum(config.mesh, config.spectrum);
    out.scene = orbital_fields(synthesize_surface(spectrum, config.seed), config.geometry);
    out.clean = vb_image(out.scene, config.radar, config.quadrature, config.parallel);
    out.noisy = add_noise(out.clean, config.snr_db, config.seed);
    out.u_ati = interferometric_velocity(interferometric_phase(out.noisy.values).phase,
                                         config.radar);
    return out;
}

void write_simulation(const SimulationProducts& products, const RunConfig& config) {
    fs::create_directories(config.output_dir);
    const auto& scene = products.scene;
    write_grid(path_in(config, files::kElevation), scene.z, config.hash);
    write_grid(path_in(config, files::kRadialVelocity), scene.u_r, config.hash);
    write_grid(path_in(config, files::kRadialAcceleration), scene.a_r, config.hash);
    write_grid(path_in(config, files::kSigma0), scene.sigma0, config.hash);
    write_image(config, products.clean.values, files::kCleanImageReal, files::kCleanImageImag);
    write_image(config, products.noisy.values, files::kNoisyImageReal, files::kNoisyImageImag);
    write_grid(path_in(config, files::estimate(SolverTag::ATI)), products.u_ati, config.hash);

    nlohmann::ordered_json meta;
    meta["config_hash"] = hash_hex(config.hash);
    meta["rows"] = products.noisy.values.rows();
    meta["cols"] = products.noisy.values.cols();
    meta["master_seed"] = config.seed;
    meta["surface_stream"] = kSurfaceStream;
    meta["noise_stream"] = kNoiseStream;
    if (products.noisy.noise) {
        meta["snr_db"] = products.noisy.noise->snr_db;
        meta["sigma_eta"] = products.noisy.noise->sigma_eta;
    }
    std::vector<std::size_t> warned;
    for (std::size_t r = 0; r < products.noisy.row_warnings.size(); ++r) {
        if (products.noisy.row_warnings[r]) warned.push_back(r);
    }
    meta["truncation_warning_rows"] = warned;
    std::ofstream os(path_in(config, files::kImageMetadata), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path_in(config, files::kImageMetadata));
    os << meta.dump(2) << '\n';

    save_config(config, path_in(config, files::kConfig));
}

SimulationProducts read_simulation(const RunConfig& config) {
    SimulationProducts out;
    auto& scene = out.scene;
    scene.x = config.mesh.axis();
    scene.y = config.mesh.axis();
    scene.seed = config.seed;
    scene.z = read_real(config, files::kElevation);
    scene.u_r = read_real(config, files::kRadialVelocity);
    scene.a_r = read_real(config, files::kRadialAcceleration);
    scene.sigma0 = read_real(config, files::kSigma0);
    const std::size_t n = config.mesh.n;
    for (const RealGrid* g : {&scene.z, &scene.u_r, &scene.a_r, &scene.sigma0}) {
        if (g->rows() != n || g->cols() != n) {
            throw FormatError("scene grid shape does not match the configured mesh");
        }
    }
    out.clean.x_r = scene.x;
    out.clean.y_r = scene.y;
    out.clean.values = combine(read_real(config, files::kCleanImageReal),
                               read_real(config, files::kCleanImageImag));
    out.noisy.x_r = scene.x;
    out.noisy.y_r = scene.y;
    out.noisy.values = combine(read_real(config, files::kNoisyImageReal),
                               read_real(config, files::kNoisyImageImag));
    if (out.noisy.values.rows() != n || out.noisy.values.cols() != n) {
        throw FormatError("image shape does not match the scene");
    }
    out.noisy.noise = NoiseInfo{config.snr_db, config.seed, noise_sigma(config.snr_db)};
    out.u_ati = read_real(config, files::estimate(SolverTag::ATI));
    return out;
}

InversionProducts invert(const RunConfig& config, const SimulationProducts& products,
                         const PipelineHooks& hooks) {
    const auto& scene = products.scene;
    const std::size_t n = scene.u_r.rows();
    const std::size_t cols = scene.u_r.cols();
    const std::vector<std::size_t> rows = config.selected_rows();
    const double period = config.mesh.length;

    InversionProducts out;
    for (SolverTag tag : config.solvers) out.estimates.emplace(tag, RealGrid(n, cols, kNaN));

    struct Task {
        std::size_t row;
        SolverTag tag;
    };
    std::vector<Task> tasks;
    for (std::size_t r : rows) {
        for (SolverTag tag : config.solvers) tasks.push_back({r, tag});
    }

    RunLedger ledger;
    std::atomic<std::size_t> failures{0};
    const auto run_task = [&](const Task& task) {
        LedgerRecord record;
        record.row = task.row;
        record.tag = task.tag;
        record.rmse = kNaN;
        RealGrid& estimate = out.estimates.at(task.tag);
        const auto truth = scene.u_r.row(task.row);
        const auto data = products.noisy.values.row(task.row);
        try {
            if (hooks.before_solve) hooks.before_solve(task.row, task.tag);
            std::vector<double> u;
            if (task.tag == SolverTag::ATI) {
                auto [values, seconds] = timed([&] { return ati_row(data, config.radar); });
                u = std::move(values);
                record.seconds = seconds;
                record.converged = true;
            } else {
                RowProblem problem(scene.y, period,
                                   {scene.a_r.row(task.row).begin(), scene.a_r.row(task.row).end()},
                                   {scene.sigma0.row(task.row).begin(),
                                    scene.sigma0.row(task.row).end()},
                                   {data.begin(), data.end()}, config.radar, task.row,
                                   config.quadrature);
                InversionResult result =
                    solve_row(task.tag, problem, config.options_for(task.tag));
                u = std::move(result.u_r_est);
                record.seconds = result.seconds;
                record.iterations = result.iterations;
                record.converged = result.converged;
            }
            record.rmse = rmse(u, truth);
            std::copy(u.begin(), u.end(), estimate.row(task.row).begin());
        } catch (const std::exception& e) {
            record.error = e.what();
            record.converged = false;
            std::fill(estimate.row(task.row).begin(), estimate.row(task.row).end(), kNaN);
            failures.fetch_add(1, std::memory_order_relaxed);
        }
        ledger.append(std::move(record));
    };

    const int workers = std::max(1, config.parallel);
    // Honour the requested degree even above the core count.
    tbb::global_control limit(tbb::global_control::max_allowed_parallelism,
                              static_cast<std::size_t>(workers));
    tbb::task_arena arena(workers);
    arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, tasks.size(), 1),
                          [&](const tbb::blocked_range<std::size_t>& range) {
                              for (std::size_t i = range.begin(); i != range.end(); ++i) {
                                  run_task(tasks[i]);
                              }
                          });
    });

    out.ledger = ledger.records();
    out.failures = failures.load();
    return out;
}

void write_inversion(const InversionProducts& products, const RunConfig& config) {
    fs::create_directories(config.output_dir);
    for (const auto& [tag, grid] : products.estimates) {
        write_grid(path_in(config, files::estimate(tag)), grid, config.hash);
    }
    RunLedger ledger;
    for (const auto& r : products.ledger) ledger.append(r);
    ledger.write_csv(path_in(config, files::kLedger));
}

std::vector<SummaryRecord> summarize(const RunConfig& config, const RealGrid& truth,
                                     const InversionProducts& products) {
    std::vector<SummaryRecord> out;
    for (SolverTag tag : config.solvers) {
        SummaryRecord s;
        s.tag = tag;
        std::vector<double> errors;
        std::vector<double> est;
        std::vector<double> ref;
        const auto grid = products.estimates.find(tag);
        for (const auto& r : products.ledger) {
            if (r.tag != tag) continue;
            ++s.rows;
            s.total_seconds += r.seconds;
            if (!r.error.empty()) {
                ++s.failures;
                continue;
            }
            errors.push_back(r.rmse);
            if (grid != products.estimates.end()) {
                const auto e = grid->second.row(r.row);
                const auto t = truth.row(r.row);
                est.insert(est.end(), e.begin(), e.end());
                ref.insert(ref.end(), t.begin(), t.end());
            }
        }
        s.median_rmse = median(errors);
        s.ke_estimate = kinetic_energy(est);
        s.ke_truth = kinetic_energy(ref);
        s.ke_relative_error = ke_relative_error(est, ref);
        out.push_back(s);
    }
    return out;
}

std::vector<SummaryRecord> report(const RunConfig& config) {
    const RealGrid truth = read_real(config, files::kRadialVelocity);
    InversionProducts products;
    products.ledger = RunLedger::read_csv(path_in(config, files::kLedger));
    for (const auto& r : products.ledger) {
        if (!r.error.empty()) ++products.failures;
    }
    for (SolverTag tag : config.solvers) {
        const std::string path = path_in(config, files::estimate(tag));
        if (fs::exists(path)) products.estimates.emplace(tag, read_grid(path).real());
    }
    auto summary = summarize(config, truth, products);
    write_summary_csv(path_in(config, files::kSummary), summary);
    return summary;
}

PipelineReport run_pipeline(const RunConfig& config, const PipelineHooks& hooks) {
    const SimulationProducts sim = simulate(config);
    write_simulation(sim, config);
    const InversionProducts inv = invert(config, sim, hooks);
    write_inversion(inv, config);
    PipelineReport report;
    report.summary = summarize(config, sim.scene.u_r, inv);
    write_summary_csv(path_in(config, files::kSummary), report.summary);
    report.failures = inv.failures;
    report.exit_code = inv.failures > 0 ? 1 : 0;
    return report;
}

}  // namespace vbsar
