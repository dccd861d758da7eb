#include "vbsar/radar.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vbsar {
namespace {

void require_positive(double value, const char* field, bool allow_infinite = false) {
    if (!(value > 0.0) || (!allow_infinite && std::isinf(value))) {
        throw std::invalid_argument(std::string(field) + ": must be > 0" +
                                    (allow_infinite ? "" : " and finite"));
    }
}

}  // namespace

RadarConfig RadarConfig::make(double V, double B, double R, double T0, double tau_s,
                              double lambda_r) {
    require_positive(V, "V");
    require_positive(B, "B");
    require_positive(R, "R");
    require_positive(T0, "T0");
    require_positive(tau_s, "tau_s", true);
    require_positive(lambda_r, "lambda_r");

    RadarConfig c;
    c.V = V;
    c.B = B;
    c.R = R;
    c.T0 = T0;
    c.tau_s = tau_s;
    c.lambda_r = lambda_r;
    c.k_r = 2.0 * std::numbers::pi / lambda_r;
    c.rho_a = lambda_r * R / (2.0 * V * T0);
    c.A_const = 0.5 * std::numbers::pi * T0 * T0 * c.rho_a *
                std::exp(-4.0 * B * B / (V * V * T0 * T0));
    return c;
}

void RadarConfig::validate() const {
    const RadarConfig expected = make(V, B, R, T0, tau_s, lambda_r);
    if (k_r != expected.k_r) throw std::invalid_argument("k_r: must equal 2 pi / lambda_r");
    if (rho_a != expected.rho_a) {
        throw std::invalid_argument("rho_a: inconsistent with lambda_r R / (2 V T0)");
    }
    if (A_const != expected.A_const) {
        throw std::invalid_argument("A_const: inconsistent with T0, rho_a, B and V");
    }
}

}  // namespace vbsar
