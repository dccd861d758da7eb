#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vbsar/grid.hpp"
#include "vbsar/radar.hpp"
#include "vbsar/spectra.hpp"

namespace vbsar {

/// Integration-window controls for the azimuth quadrature.
struct QuadratureOptions {
    /// Terms with |s| > window_scale * rho'_max / pi are dropped.
    double window_scale = 6.0;
    /// Row warning when the window wraps the whole period and the Gaussian
    /// mass that cannot fit in one period exceeds this fraction.
    double max_discarded_mass = 1e-12;
};

/// rho'_a = sqrt(rho_a^2 + [(pi/2)(T0 R / V) a_r]^2 + rho_a^2 T0^2 / tau_s^2).
double degraded_resolution(double a_r, const RadarConfig& config) noexcept;

/// f_vb at a single (y, yR) pair, with s = yR - y - (R/V) u_r taken literally
/// (no periodic wrap).
Complex vb_integrand(double u_r, double a_r, double sigma0, double y, double y_r,
                     const RadarConfig& config) noexcept;

/// One cross-track line of the scene. The y axis must be a uniform periodic
/// mesh of the given period.
struct SceneRow {
    std::span<const double> y;
    double period = 0.0;
    std::span<const double> u_r;
    std::span<const double> a_r;
    std::span<const double> sigma0;
};

struct ImageRow {
    std::vector<Complex> values;
    bool truncation_warning = false;
};

/// A_const times the periodic trapezoidal quadrature of f_vb over y, for each
/// yR in `y_r`.
ImageRow vb_image_row(const SceneRow& row, std::span<const double> y_r, const RadarConfig& config,
                      const QuadratureOptions& quadrature = {});

struct NoiseInfo {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    double sigma_eta = 0.0;
};

struct ComplexImage {
    std::vector<double> x_r;
    std::vector<double> y_r;
    ComplexGrid values;
    std::vector<unsigned char> row_warnings;
    std::optional<NoiseInfo> noise;
};

/// Clean image of every row of the scene on the scene mesh. Rows are
/// evaluated on up to `parallelism` workers; the result does not depend on it.
ComplexImage vb_image(const SeaSceneRealization& scene, const RadarConfig& config,
                      const QuadratureOptions& quadrature = {}, int parallelism = 1);

/// sigma_eta = 10^(-snr_db / 20).
double noise_sigma(double snr_db) noexcept;

/// D = I + eta, eta = 2^{-1/2} (a + j b), a, b ~ N(0, sigma_eta^2). Row r draws
/// from substream r of the noise stream, so the result is independent of
/// evaluation order. Throws std::invalid_argument for NaN or -inf SNR.
ComplexImage add_noise(const ComplexImage& image, double snr_db, std::uint64_t seed);

}  // namespace vbsar
