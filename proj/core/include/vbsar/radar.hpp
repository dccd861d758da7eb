#pragma once

namespace vbsar {

/// AT-INSAR platform and geometry constants. Build through make() so the
/// derived fields (k_r, rho_a, A_const) stay consistent.
struct RadarConfig {
    double V = 0.0;         ///< platform velocity [m/s]
    double B = 0.0;         ///< antenna half-separation [m]
    double R = 0.0;         ///< slant range [m]
    double T0 = 0.0;        ///< single-look integration time [s]
    double tau_s = 0.0;     ///< scene coherence time [s]; +inf disables the term
    double lambda_r = 0.0;  ///< radar wavelength [m]
    double k_r = 0.0;       ///< 2 pi / lambda_r
    double rho_a = 0.0;     ///< lambda_r R / (2 V T0)
    double A_const = 0.0;   ///< (pi T0^2 rho_a / 2) exp(-4 B^2 / (V^2 T0^2))

    static RadarConfig make(double V, double B, double R, double T0, double tau_s,
                            double lambda_r);

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

}  // namespace vbsar
