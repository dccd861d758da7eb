#include "vbsar/spectra.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vbsar/fft.hpp"
#include "vbsar/rng.hpp"

namespace vbsar {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

double compute_spreading_normalization(double p) {
    // |cos|^{2p} is even and pi-periodic: the full integral is 4x the quarter.
    auto integrand = [p](double phi) { return std::pow(std::cos(phi), 2.0 * p); };
    double error = 0.0;
    const double quarter = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, 0.5 * kPi, 20, 1e-15, &error);
    // (N_p / 2) * 4 * quarter == 1
    return 1.0 / (2.0 * quarter);
}

}  // namespace

SwellSpectrumParams SwellSpectrumParams::make(double alpha_s, double lambda_s, double gamma_s,
                                              double phi_w, double p) {
    SwellSpectrumParams out;
    out.alpha_s = alpha_s;
    out.lambda_s = lambda_s;
    out.k_s = 2.0 * kPi / lambda_s;
    out.gamma_s = gamma_s;
    out.phi_w = phi_w;
    out.p = p;
    out.validate();
    return out;
}

void SwellSpectrumParams::validate() const {
    require(std::isfinite(alpha_s) && alpha_s > 0.0, "alpha_s", "must be > 0");
    require(std::isfinite(lambda_s) && lambda_s > 0.0, "lambda_s", "must be > 0");
    require(std::isfinite(gamma_s) && gamma_s >= 1.0, "gamma_s", "must be >= 1");
    require(std::isfinite(p) && p > 0.0, "p", "must be > 0");
    require(std::isfinite(phi_w), "phi_w", "must be finite");
    require(k_s == 2.0 * kPi / lambda_s, "k_s", "must equal 2 pi / lambda_s");
}

double swell_peak_width(double k, double k_s) noexcept { return k <= k_s ? 0.07 : 0.09; }

double omnidirectional_swell(double k, const SwellSpectrumParams& params) {
    if (!(k > 0.0)) throw std::domain_error("omnidirectional_swell: k must be > 0");
    const double ks = params.k_s;
    const double sigma = swell_peak_width(k, ks);
    const double root_gap = std::sqrt(k) - std::sqrt(ks);
    const double peak_shape = std::exp(-0.5 * root_gap * root_gap / (sigma * sigma * ks));
    const double ratio = k / ks;
    return params.alpha_s / (2.0 * k * k * k) * std::exp(-1.25 / (ratio * ratio)) *
           std::pow(params.gamma_s, peak_shape);
}

double spreading_normalization(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("p: must be > 0");
    static std::mutex mutex;
    static std::map<double, double> cache;
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace(p, 0.0);
    if (inserted) it->second = compute_spreading_normalization(p);
    return it->second;
}

double wrap_angle(double phi) noexcept {
    double wrapped = std::remainder(phi, 2.0 * kPi);  // [-pi, pi]
    return wrapped;
}

double spreading_cp2(double phi, const SwellSpectrumParams& params) {
    const double rel = wrap_angle(phi - params.phi_w);
    return 0.5 * spreading_normalization(params.p) * std::pow(std::abs(std::cos(rel)), 2.0 * params.p);
}

std::vector<double> fft_wavenumbers(std::size_t n, double length) {
    std::vector<double> k(n);
    const double dk = 2.0 * kPi / length;
    const auto half = static_cast<long>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const long m = static_cast<long>(i) < half + static_cast<long>(n % 2)
                           ? static_cast<long>(i)
                           : static_cast<long>(i) - static_cast<long>(n);
        k[i] = dk * static_cast<double>(m);
    }
    return k;
}

double SpectrumGrid::total_variance() const {
    double sum = 0.0;
    for (double v : values.values()) sum += v;
    return sum * dkx * dky;
}

SpectrumGrid directional_spectrum(const std::vector<double>& kx, const std::vector<double>& ky,
                                  const SwellSpectrumParams& params) {
    params.validate();
    if (kx.size() < 2 || ky.size() < 2) {
        throw std::invalid_argument("directional_spectrum: axes need at least two samples");
    }
    SpectrumGrid grid;
    grid.kx = kx;
    grid.ky = ky;
    grid.dkx = std::abs(kx[1] - kx[0]);
    grid.dky = std::abs(ky[1] - ky[0]);
    grid.params = params;
    grid.values = RealGrid(kx.size(), ky.size(), 0.0);

    const double half_norm = 0.5 * spreading_normalization(params.p);
    const double exponent = 2.0 * params.p;
    for (std::size_t i = 0; i < kx.size(); ++i) {
        for (std::size_t j = 0; j < ky.size(); ++j) {
            const double k = std::hypot(kx[i], ky[j]);
            if (k == 0.0) continue;
            const double phi = std::atan2(ky[j], kx[i]);
            const double spread =
                half_norm * std::pow(std::abs(std::cos(wrap_angle(phi - params.phi_w))), exponent);
            grid.values(i, j) = omnidirectional_swell(k, params) / k * spread;
        }
    }
    return grid;
}

SpectrumGrid directional_spectrum(const Mesh& mesh, const SwellSpectrumParams& params) {
    const auto k = fft_wavenumbers(mesh.n, mesh.length);
    return directional_spectrum(k, k, params);
}

SeaSceneRealization synthesize_surface(const SpectrumGrid& grid, std::uint64_t seed) {
    const std::size_t nx = grid.kx.size();
    const std::size_t ny = grid.ky.size();
    const double cell = grid.dkx * grid.dky;

    ComplexGrid zhat(nx, ny);
    CounterRng rng(seed, kSurfaceStream);
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t mi = (nx - i) % nx;
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t mj = (ny - j) % ny;
            const std::size_t self = i * ny + j;
            const std::size_t mirror = mi * ny + mj;
            const double variance = grid.values(i, j) * cell;
            if (self == mirror) {
                zhat(i, j) = Complex(std::sqrt(variance) * rng.normal(), 0.0);
            } else if (self < mirror) {
                const double scale = std::sqrt(0.5 * variance);
                const double g1 = rng.normal();
                const double g2 = rng.normal();
                zhat(i, j) = Complex(scale * g1, scale * g2);
                zhat(mi, mj) = std::conj(zhat(i, j));
            }
        }
    }

    const ComplexGrid field = inverse_fft2(zhat);

    SeaSceneRealization scene;
    // Mesh spacing follows from the wavenumber step: h = 2 pi / (n dk).
    const Mesh mesh_x{nx, 2.0 * std::numbers::pi / grid.dkx};
    const Mesh mesh_y{ny, 2.0 * std::numbers::pi / grid.dky};
    scene.x = mesh_x.axis();
    scene.y = mesh_y.axis();
    scene.z = RealGrid(nx, ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) scene.z(i, j) = field(i, j).real();
    }
    scene.sigma0 = RealGrid(nx, ny, 1.0);
    scene.zhat = std::move(zhat);
    scene.kx = grid.kx;
    scene.ky = grid.ky;
    scene.wave_direction = grid.params.phi_w;
    scene.seed = seed;
    return scene;
}

double significant_wave_height(const RealGrid& z) {
    if (z.empty()) return 0.0;
    double mean = 0.0;
    for (double v : z.values()) mean += v;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z.values()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size());
    return 4.0 * std::sqrt(var);
}

}  // namespace vbsar
