#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vbsar/config.hpp"
#include "vbsar/forward.hpp"
#include "vbsar/kinematics.hpp"
#include "vbsar/metrics.hpp"
#include "vbsar/spectra.hpp"

namespace vbsar {

/// Test seam: called before every per-row estimator; may throw to simulate
/// a failing row.
struct PipelineHooks {
    std::function<void(std::size_t row, SolverTag tag)> before_solve;
};

/// Everything the inversion stage needs, produced by simulate() or read back
/// from an output directory.
struct SimulationProducts {
    SeaSceneRealization scene;
    ComplexImage clean;
    ComplexImage noisy;
    RealGrid u_ati;
};

SimulationProducts simulate(const RunConfig& config);
void write_simulation(const SimulationProducts& products, const RunConfig& config);
/// Reads the scene fields and noisy image written by write_simulation().
SimulationProducts read_simulation(const RunConfig& config);

struct InversionProducts {
    /// Estimated velocity grid per estimator; rows not selected are NaN.
    std::map<SolverTag, RealGrid> estimates;
    std::vector<LedgerRecord> ledger;
    std::size_t failures = 0;
};

/// Solves every selected row with every configured estimator on a worker
/// pool of config.parallel threads. Row failures are recorded, not thrown.
InversionProducts invert(const RunConfig& config, const SimulationProducts& products,
                         const PipelineHooks& hooks = {});
void write_inversion(const InversionProducts& products, const RunConfig& config);

std::vector<SummaryRecord> summarize(const RunConfig& config, const RealGrid& truth,
                                     const InversionProducts& products);
/// Rebuilds the summary from the grids and ledger in the output directory.
std::vector<SummaryRecord> report(const RunConfig& config);

struct PipelineReport {
    int exit_code = 0;  ///< 0 success, 1 partial row failures
    std::size_t failures = 0;
    std::vector<SummaryRecord> summary;
};

/// simulate -> invert -> report, persisting every artifact under
/// config.output_dir.
PipelineReport run_pipeline(const RunConfig& config, const PipelineHooks& hooks = {});

/// File names inside the output directory.
namespace files {
inline constexpr const char* kElevation = "z.vbg";
inline constexpr const char* kRadialVelocity = "u_r.vbg";
inline constexpr const char* kRadialAcceleration = "a_r.vbg";
inline constexpr const char* kSigma0 = "sigma0.vbg";
inline constexpr const char* kCleanImageReal = "image_clean_re.vbg";
inline constexpr const char* kCleanImageImag = "image_clean_im.vbg";
inline constexpr const char* kNoisyImageReal = "image_noisy_re.vbg";
inline constexpr const char* kNoisyImageImag = "image_noisy_im.vbg";
inline constexpr const char* kImageMetadata = "image_noisy.json";
inline constexpr const char* kLedger = "ledger.csv";
inline constexpr const char* kSummary = "summary.csv";
inline constexpr const char* kConfig = "run.cfg";
/// u_nl.vbg, u_fm.vbg, u_dfm.vbg, u_ati.vbg
std::string estimate(SolverTag tag);
}  // namespace files

}  // namespace vbsar
