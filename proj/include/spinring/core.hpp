#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinring {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Waveguide propagation direction of a travelling-wave mode.
enum class Direction { cw, ccw };

/// Which end of the waveguide carries the coherent drive.
enum class DriveSide { left, right };

/// Thrown when a transmission denominator is numerically indistinguishable
/// from a pole. Passive parameter sets cannot reach exact poles, so hitting
/// one signals bad input rather than interesting physics.
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a time-domain integration blows up.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physical description of a spinning whispering-gallery resonator.
/// All quantities in SI units; angular_speed is signed, positive for CCW
/// rotation.
struct RingParams {
    double refractive_index = 0.0;  // n, dimensionless, > 1
    double radius = 0.0;            // R, meters
    double wavelength = 0.0;        // lambda, meters (vacuum)
    double angular_speed = 0.0;     // Omega, rad/s, signed
    double dn_dlambda = 0.0;        // material dispersion, 1/m

    /// omega_c = 2*pi*c/lambda.
    double resonance_frequency() const { return 2.0 * M_PI * kSpeedOfLight / wavelength; }

    void validate() const;
};

/// Marks whether rate-like quantities are in SI rad/s or in one arbitrary
/// shared angular-frequency unit.
struct UnitSystem {
    enum class Mode { physical, dimensionless };
    Mode mode = Mode::dimensionless;
    double reference_rate = 1.0;  // rad/s in physical mode, symbolic 1 otherwise
};

/// Accumulated propagation phases between two coupling points, one per
/// travelling direction. The two differ because the rotating resonator
/// drags the CW and CCW mode frequencies apart.
struct DirectionalPhases {
    double cw = 0.0;   // radians
    double ccw = 0.0;  // radians
};

/// Sagnac-Fizeau frequency shift of the CW mode, signed with the rotation.
/// The CCW mode shifts by the opposite amount: omega_cw = omega_c + shift,
/// omega_ccw = omega_c - shift.
double sagnac_shift(const RingParams& p);

/// Scales a base phase (evaluated at omega_c) to the direction-dependent
/// phases at omega_c +/- delta_f. Throws std::invalid_argument when
/// |delta_f| >= omega_c.
DirectionalPhases directional_phases(double theta_base, double delta_f, double omega_c);

/// One spectral sample of a transmission sweep.
struct TransmissionRecord {
    double delta_c = 0.0;        // omega_c - omega_l, rate units
    double t_left = 0.0;         // left-incident power transmission
    double t_right = 0.0;        // right-incident power transmission
    double isolation_db = 0.0;   // -10*log10(t_left/t_right)
};

/// Isolation ratio in dB. Throws std::domain_error for nonpositive inputs.
double isolation_db(double t_left, double t_right);

}  // namespace spinring
