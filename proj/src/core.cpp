#include "spinring/core.hpp"

#include <cmath>

namespace spinring {

void RingParams::validate() const {
    if (!std::isfinite(refractive_index) || !std::isfinite(radius) ||
        !std::isfinite(wavelength) || !std::isfinite(angular_speed) ||
        !std::isfinite(dn_dlambda)) {
        throw std::invalid_argument("RingParams: non-finite field");
    }
    if (refractive_index <= 1.0) {
        throw std::invalid_argument("RingParams: refractive_index must exceed 1");
    }
    if (radius <= 0.0) {
        throw std::invalid_argument("RingParams: radius must be positive");
    }
    if (wavelength <= 0.0) {
        throw std::invalid_argument("RingParams: wavelength must be positive");
    }
}

double sagnac_shift(const RingParams& p) {
    p.validate();
    const double n = p.refractive_index;
    const double omega_c = p.resonance_frequency();
    const double drag = 1.0 - 1.0 / (n * n) - (p.wavelength / n) * p.dn_dlambda;
    return n * p.radius * p.angular_speed * omega_c / kSpeedOfLight * drag;
}

DirectionalPhases directional_phases(double theta_base, double delta_f, double omega_c) {
    if (!(omega_c > 0.0) || !std::isfinite(delta_f) || !std::isfinite(theta_base)) {
        throw std::invalid_argument("directional_phases: omega_c must be positive and inputs finite");
    }
    if (std::abs(delta_f) >= omega_c) {
        throw std::invalid_argument("directional_phases: |delta_f| must stay below omega_c");
    }
    if (theta_base < 0.0) {
        throw std::invalid_argument("directional_phases: theta_base must be nonnegative");
    }
    const double rho = delta_f / omega_c;
    return {theta_base * (1.0 + rho), theta_base * (1.0 - rho)};
}

double isolation_db(double t_left, double t_right) {
    if (!(t_left > 0.0) || !(t_right > 0.0)) {
        throw std::domain_error("isolation_db: transmissions must be positive");
    }
    return -10.0 * std::log10(t_left / t_right);
}

}  // namespace spinring
