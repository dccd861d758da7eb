#pragma once

#include <cstddef>

#include "vbsar/grid.hpp"
#include "vbsar/radar.hpp"
#include "vbsar/spectra.hpp"

namespace vbsar {

/// Radar line-of-sight geometry for projecting orbital motion.
struct LookGeometry {
    double incidence = 0.78539816339744828;  ///< theta [rad], 0 < theta < pi/2
    double look_azimuth = 0.0;               ///< horizontal look direction [rad]
    double gravity = 9.81;                   ///< [m/s^2]

    void validate() const;
};

struct RadialMotion {
    RealGrid velocity;
    RealGrid acceleration;
};

/// Linear deep-water kinematics of the realization evaluated at time t.
/// Each half-plane component (k . d_w >= 0, d_w the wave direction)
/// propagates along +k; its conjugate mirror carries the same wave.
/// Throws std::logic_error when zhat is missing.
RadialMotion radial_motion(const SeaSceneRealization& scene, const LookGeometry& geom,
                           double t);

/// Returns a copy of `scene` with u_r and a_r at t = 0.
SeaSceneRealization orbital_fields(const SeaSceneRealization& scene, const LookGeometry& geom);

struct PhaseField {
    RealGrid phase;                      ///< principal value in (-pi, pi]
    Grid<unsigned char> zero_modulus;    ///< 1 where the image was exactly 0
    std::size_t flagged = 0;
};

PhaseField interferometric_phase(const ComplexGrid& image);

/// u_ATI = -(lambda_r V / (4 pi B)) * phase.
RealGrid interferometric_velocity(const RealGrid& phase, const RadarConfig& config);

/// Velocity increment corresponding to one 2 pi phase wrap: lambda_r V / (2 B).
double ati_velocity_ambiguity(const RadarConfig& config) noexcept;

}  // namespace vbsar
