#include "vbsar/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vbsar/fft.hpp"

namespace vbsar {

void LookGeometry::validate() const {
    if (!(incidence > 0.0 && incidence < 0.5 * std::numbers::pi)) {
        throw std::invalid_argument("incidence: must lie in (0, pi/2)");
    }
    if (!std::isfinite(look_azimuth)) throw std::invalid_argument("look_azimuth: must be finite");
    if (!(gravity > 0.0) || !std::isfinite(gravity)) {
        throw std::invalid_argument("gravity: must be > 0");
    }
}

RadialMotion radial_motion(const SeaSceneRealization& scene, const LookGeometry& geom, double t) {
    geom.validate();
    if (scene.zhat.empty() || scene.kx.size() != scene.zhat.rows() ||
        scene.ky.size() != scene.zhat.cols()) {
        throw std::logic_error("radial_motion: scene has no Fourier amplitudes");
    }
    const std::size_t nx = scene.zhat.rows();
    const std::size_t ny = scene.zhat.cols();
    const double sin_t = std::sin(geom.incidence);
    const double cos_t = std::cos(geom.incidence);
    const double look_x = std::cos(geom.look_azimuth);
    const double look_y = std::sin(geom.look_azimuth);
    const double wave_x = std::cos(scene.wave_direction);
    const double wave_y = std::sin(scene.wave_direction);
    const Complex j(0.0, 1.0);

    ComplexGrid vel_hat(nx, ny);
    ComplexGrid acc_hat(nx, ny);
    for (std::size_t p = 0; p < nx; ++p) {
        for (std::size_t q = 0; q < ny; ++q) {
            const double kx = scene.kx[p];
            const double ky = scene.ky[q];
            const double k = std::hypot(kx, ky);
            if (k == 0.0) continue;
            const double omega = std::sqrt(geom.gravity * k);
            // Propagation sign: +1 on the downwind half-plane, ties broken by
            // the crosswind component so that k and -k always differ.
            const double along = kx * wave_x + ky * wave_y;
            const double across = -kx * wave_y + ky * wave_x;
            const double sign = along > 0.0 || (along == 0.0 && across > 0.0) ? 1.0 : -1.0;
            const double horizontal = (kx * look_x + ky * look_y) / k;
            // u_r = u_h . l sin(theta) + w cos(theta), w = d z / d t.
            Complex weight = sign * omega * Complex(sin_t * horizontal, -cos_t);
            const Complex evolve = std::exp(-j * sign * omega * t);
            Complex accel = -j * sign * omega * weight;
            const bool self_conjugate = (nx - p) % nx == p && (ny - q) % ny == q;
            if (self_conjugate) {
                // A real amplitude must map to a real field.
                weight = (weight * evolve).real();
                accel = (accel * evolve).real();
                vel_hat(p, q) = weight * scene.zhat(p, q);
                acc_hat(p, q) = accel * scene.zhat(p, q);
                continue;
            }
            vel_hat(p, q) = weight * evolve * scene.zhat(p, q);
            acc_hat(p, q) = accel * evolve * scene.zhat(p, q);
        }
    }
    const ComplexGrid vel = inverse_fft2(vel_hat);
    const ComplexGrid acc = inverse_fft2(acc_hat);

    RadialMotion out{RealGrid(nx, ny), RealGrid(nx, ny)};
    for (std::size_t i = 0; i < nx * ny; ++i) {
        out.velocity.values()[i] = vel.values()[i].real();
        out.acceleration.values()[i] = acc.values()[i].real();
    }
    return out;
}

SeaSceneRealization orbital_fields(const SeaSceneRealization& scene, const LookGeometry& geom) {
    RadialMotion motion = radial_motion(scene, geom, 0.0);
    SeaSceneRealization out = scene;
    out.u_r = std::move(motion.velocity);
    out.a_r = std::move(motion.acceleration);
    return out;
}

PhaseField interferometric_phase(const ComplexGrid& image) {
    PhaseField out{RealGrid(image.rows(), image.cols()),
                   Grid<unsigned char>(image.rows(), image.cols(), 0), 0};
    for (std::size_t i = 0; i < image.size(); ++i) {
        const Complex d = image.values()[i];
        if (d == Complex(0.0, 0.0)) {
            out.phase.values()[i] = 0.0;
            out.zero_modulus.values()[i] = 1;
            ++out.flagged;
            continue;
        }
        double phase = std::arg(d);
        // std::arg returns [-pi, pi]; fold -pi onto the principal value pi.
        if (phase == -std::numbers::pi) phase = std::numbers::pi;
        out.phase.values()[i] = phase;
    }
    return out;
}

RealGrid interferometric_velocity(const RealGrid& phase, const RadarConfig& config) {
    const double scale = -config.lambda_r * config.V / (4.0 * std::numbers::pi * config.B);
    RealGrid out(phase.rows(), phase.cols());
    for (std::size_t i = 0; i < phase.size(); ++i) out.values()[i] = scale * phase.values()[i];
    return out;
}

double ati_velocity_ambiguity(const RadarConfig& config) noexcept {
    return config.lambda_r * config.V / (2.0 * config.B);
}

}  // namespace vbsar
