#pragma once

#include <cstdint>
#include <vector>

#include "vbsar/grid.hpp"

namespace vbsar {

/// Swell omnidirectional spectrum and cosine-power spreading parameters.
struct SwellSpectrumParams {
    double alpha_s = 0.212e-3;  ///< energy scale
    double lambda_s = 100.0;    ///< peak wavelength [m]
    double k_s = 0.0;           ///< peak wavenumber [rad/m], always 2 pi / lambda_s
    double gamma_s = 10.0;      ///< peak enhancement factor
    double phi_w = 0.0;         ///< wind / mean propagation direction [rad]
    double p = 2.0;             ///< cosine-power exponent

    static SwellSpectrumParams make(double alpha_s, double lambda_s, double gamma_s,
                                    double phi_w, double p);
    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;
};

/// S_S(k) [m^3/rad]. Throws std::domain_error for k <= 0.
double omnidirectional_swell(double k, const SwellSpectrumParams& params);

/// Spectral width of the peak enhancement: 0.07 below the peak, 0.09 above.
double swell_peak_width(double k, double k_s) noexcept;

/// N_p such that the integral of (N_p / 2) |cos|^{2p} over [-pi, pi] is 1.
/// Computed by adaptive Gauss-Kronrod quadrature and cached per exponent.
double spreading_normalization(double p);

/// Two-sided cosine-power spreading weight [1/rad].
double spreading_cp2(double phi, const SwellSpectrumParams& params);

/// Wraps an angle into [-pi, pi].
double wrap_angle(double phi) noexcept;

/// FFT-ordered angular wavenumbers 2 pi m / length for m = 0..n/2-1, -n/2..-1.
std::vector<double> fft_wavenumbers(std::size_t n, double length);

struct SpectrumGrid {
    std::vector<double> kx;  ///< FFT-ordered, indexes rows
    std::vector<double> ky;  ///< FFT-ordered, indexes columns
    double dkx = 0.0;
    double dky = 0.0;
    RealGrid values;         ///< two-sided directional density [m^4/rad^2]
    SwellSpectrumParams params;

    /// Sum of values * dkx * dky: the expected surface variance m0.
    double total_variance() const;
};

/// Evaluates (1/k) S_S(k) Phi_cp2(phi) on FFT-conjugate axes; DC cell is 0.
SpectrumGrid directional_spectrum(const std::vector<double>& kx, const std::vector<double>& ky,
                                  const SwellSpectrumParams& params);

/// Convenience overload on the wavenumber mesh conjugate to `mesh`.
SpectrumGrid directional_spectrum(const Mesh& mesh, const SwellSpectrumParams& params);

/// One random sea state on the spatial mesh.
struct SeaSceneRealization {
    std::vector<double> x;
    std::vector<double> y;
    RealGrid z;
    RealGrid u_r;      ///< empty until orbital_fields()
    RealGrid a_r;      ///< empty until orbital_fields()
    RealGrid sigma0;
    ComplexGrid zhat;  ///< Hermitian amplitudes referenced to the first mesh vertex
    std::vector<double> kx;
    std::vector<double> ky;
    double wave_direction = 0.0;
    std::uint64_t seed = 0;

    std::size_t n() const noexcept { return x.size(); }
};

/// Draws circular-Gaussian amplitudes with E|zhat|^2 = S dkx dky, enforces
/// Hermitian symmetry and inverse transforms to a real elevation field.
/// sigma0 is initialised to the constant field 1.
SeaSceneRealization synthesize_surface(const SpectrumGrid& grid, std::uint64_t seed);

/// H_m0 = 4 sqrt(variance of z).
double significant_wave_height(const RealGrid& z);

}  // namespace vbsar
