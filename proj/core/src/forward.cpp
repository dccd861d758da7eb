#include "vbsar/forward.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <limits>
#include <stdexcept>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/global_control.h>
#include <tbb/task_arena.h>

#include "vbsar/rng.hpp"
#include "vbsar/row_model.hpp"

namespace vbsar {

double degraded_resolution(double a_r, const RadarConfig& c) noexcept {
    const double accel = 0.5 * std::numbers::pi * c.T0 * c.R / c.V * a_r;
    const double coherence = c.rho_a * c.T0 / c.tau_s;  // 0 when tau_s is infinite
    return std::sqrt(c.rho_a * c.rho_a + accel * accel + coherence * coherence);
}

Complex vb_integrand(double u_r, double a_r, double sigma0, double y, double y_r,
                     const RadarConfig& c) noexcept {
    const double pi = std::numbers::pi;
    const double rho_p = degraded_resolution(a_r, c);
    const double ratio = c.rho_a * c.rho_a / (rho_p * rho_p);
    const double s = y_r - y - c.R / c.V * u_r;
    const double vt = c.V * c.T0;
    const double magnitude = sigma0 / rho_p * std::exp(4.0 * c.B * c.B * ratio / (vt * vt)) *
                             std::exp(-pi * pi * s * s / (rho_p * rho_p));
    const double phase = -2.0 * c.k_r * c.B / c.V * u_r +
                         2.0 * c.B * c.k_r / c.R * (2.0 * ratio - 1.0) * s;
    return std::polar(magnitude, phase);
}

ImageRow vb_image_row(const SceneRow& row, std::span<const double> y_r, const RadarConfig& config,
                      const QuadratureOptions& quadrature) {
    if (row.u_r.size() != row.y.size() || row.a_r.size() != row.y.size() ||
        row.sigma0.size() != row.y.size()) {
        throw std::invalid_argument("vb_image_row: scene row fields must share the y axis");
    }
    const RowModel model({row.y.begin(), row.y.end()}, row.period,
                         {row.a_r.begin(), row.a_r.end()}, {row.sigma0.begin(), row.sigma0.end()},
                         {y_r.begin(), y_r.end()}, config, quadrature);
    ImageRow out;
    out.values = model.image(row.u_r, &out.truncation_warning);
    return out;
}

ComplexImage vb_image(const SeaSceneRealization& scene, const RadarConfig& config,
                      const QuadratureOptions& quadrature, int parallelism) {
    if (scene.u_r.empty() || scene.a_r.empty()) {
        throw std::logic_error("vb_image: scene has no radial velocity/acceleration fields");
    }
    const std::size_t rows = scene.x.size();
    const std::size_t cols = scene.y.size();
    const double period = static_cast<double>(cols) * (scene.y[1] - scene.y[0]);

    ComplexImage image;
    image.x_r = scene.x;
    image.y_r = scene.y;
    image.values = ComplexGrid(rows, cols);
    image.row_warnings.assign(rows, 0);

    auto evaluate = [&](std::size_t r) {
        const SceneRow row{scene.y, period, scene.u_r.row(r), scene.a_r.row(r),
                           scene.sigma0.row(r)};
        ImageRow result = vb_image_row(row, scene.y, config, quadrature);
        std::copy(result.values.begin(), result.values.end(), image.values.row(r).begin());
        image.row_warnings[r] = result.truncation_warning ? 1 : 0;
    };

    const int workers = std::max(1, parallelism);
    // Honour the requested degree even above the core count.
    tbb::global_control limit(tbb::global_control::max_allowed_parallelism,
                              static_cast<std::size_t>(workers));
    tbb::task_arena arena(workers);
    arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, rows, 1),
                          [&](const tbb::blocked_range<std::size_t>& range) {
                              for (std::size_t r = range.begin(); r != range.end(); ++r) evaluate(r);
                          });
    });
    return image;
}

double noise_sigma(double snr_db) noexcept { return std::pow(10.0, -snr_db / 20.0); }

ComplexImage add_noise(const ComplexImage& image, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("snr_db: must be a number > -inf");
    }
    ComplexImage out = image;
    const double sigma = noise_sigma(snr_db);
    out.noise = NoiseInfo{snr_db, seed, sigma};
    if (sigma == 0.0) return out;
    const double scale = sigma / std::sqrt(2.0);
    for (std::size_t r = 0; r < out.values.rows(); ++r) {
        CounterRng rng(seed, kNoiseStream, static_cast<std::uint32_t>(r));
        for (Complex& v : out.values.row(r)) {
            const double a = rng.normal();
            const double b = rng.normal();
            v += Complex(scale * a, scale * b);
        }
    }
    return out;
}

}  // namespace vbsar
