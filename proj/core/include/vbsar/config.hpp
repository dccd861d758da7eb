#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbsar/forward.hpp"
#include "vbsar/inverse.hpp"
#include "vbsar/kinematics.hpp"
#include "vbsar/radar.hpp"
#include "vbsar/spectra.hpp"

namespace vbsar {

/// Parse or validation failure; carries the offending key and its line
/// (0 when the key was absent from the file).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, int line, const std::string& message);
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

struct RowRange {
    std::size_t first = 0;
    std::size_t last = 0;  ///< inclusive
};

using ConfigHash = std::array<std::uint8_t, 32>;

struct RunConfig {
    SwellSpectrumParams spectrum = SwellSpectrumParams::make(0.212e-3, 100.0, 10.0, 0.0, 2.0);
    LookGeometry geometry;
    RadarConfig radar = RadarConfig::make(100.0, 0.25, 8000.0, 0.015, 0.03, 0.03);
    Mesh mesh;
    QuadratureOptions quadrature;
    double snr_db = 174.0;
    std::uint64_t seed = 1;
    std::vector<SolverTag> solvers{SolverTag::NL, SolverTag::FM, SolverTag::DFM, SolverTag::ATI};
    SolverOptions nl;
    SolverOptions fm;
    SolverOptions dfm;
    std::optional<RowRange> rows;  ///< all rows when empty
    int parallel = 1;
    std::string output_dir = "out";
    ConfigHash hash{};

    const SolverOptions& options_for(SolverTag tag) const;
    bool runs(SolverTag tag) const;
    std::vector<std::size_t> selected_rows() const;
};

/// Parses the key-value configuration text. Unknown sections or keys are
/// rejected; missing keys keep their defaults. The hash is filled in.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

/// SHA-256 of the canonical text with the scheduling-only keys
/// (run.parallel, run.output_dir) removed.
ConfigHash config_hash(const RunConfig& config);
std::string hash_hex(const ConfigHash& hash);

/// Parses "a..b" (inclusive) or "all".
std::optional<RowRange> parse_row_range(const std::string& text);

}  // namespace vbsar
