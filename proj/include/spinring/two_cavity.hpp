#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "spinring/core.hpp"

namespace spinring {

/// One spinning cavity of the two-node chain, coupled to the waveguide at
/// two points.
struct CavityParams {
    double omega = 1.0;      // stationary resonance, rate units
    double delta_f = 0.0;    // Sagnac shift, signed
    double kappa = 0.0;      // intrinsic decay
    double kappa_1e = 0.0;   // waveguide coupling at the first point
    double kappa_2e = 0.0;   // waveguide coupling at the second point
    double j = 0.0;          // cw/ccw backscatter

    /// Total decay (kappa + kappa_1e + kappa_2e)/2.
    double gamma() const { return 0.5 * (kappa + kappa_1e + kappa_2e); }
};

/// Two spinning cavities on a meandering waveguide, each coupled at two
/// points. Base phases are the clockwise-direction values; the
/// counter-clockwise phases follow from the shared frequency reference and
/// waveguide Sagnac shift.
struct TwoCavitySpec {
    double omega_ref = 1.0;      // shared reference frequency for phase scaling
    double delta_f_phase = 0.0;  // Sagnac shift entering the waveguide phases
    CavityParams a;
    CavityParams b;
    double phi_a_cw = 0.0;  // intra-cavity-a propagation phase, CW direction
    double phi_l_cw = 0.0;  // link phase between the cavities, CW direction
    double phi_b_cw = 0.0;  // intra-cavity-b propagation phase, CW direction

    static TwoCavitySpec make(double omega_ref, double delta_f, const CavityParams& a,
                              const CavityParams& b, double phi_a_cw, double phi_l_cw,
                              double phi_b_cw);

    double phi_a_ccw() const { return ccw_phase(phi_a_cw); }
    double phi_l_ccw() const { return ccw_phase(phi_l_cw); }
    double phi_b_ccw() const { return ccw_phase(phi_b_cw); }

    void validate() const;

private:
    double ccw_phase(double cw) const;
};

/// The eight steady-state coefficients plus the unidirectional inter-cavity
/// couplings F for both directions.
struct LinkCoefficients {
    std::complex<double> u_cw, u_ccw;  // cavity-a diagonal terms
    std::complex<double> v_cw, v_ccw;  // cavity-b diagonal terms
    std::complex<double> a_cw, a_ccw;  // cavity-a drive amplitudes
    std::complex<double> b_cw, b_ccw;  // cavity-b drive amplitudes
    std::complex<double> f_cw, f_ccw;  // feed-forward couplings
};

/// Evaluates all coefficients at drive detunings delta_a = omega_a - omega_l
/// and delta_b = omega_b - omega_l.
LinkCoefficients link_coefficients(const TwoCavitySpec& spec, double delta_a, double delta_b);

/// Steady-state response to a right-incident drive of unit amplitude.
struct DriveResponse {
    std::complex<double> first;   // driven-direction amplitude of cavity a
    std::complex<double> second;  // driven-direction amplitude of cavity b
    double transmission = 0.0;
};

/// Right-incident drive exciting the CW modes; returns <a_cw>, <b_cw>, T_R.
DriveResponse transmission_right_drive(const TwoCavitySpec& spec, double delta_c);

/// Left-incident drive exciting the CCW modes; returns <a_ccw>, <b_ccw>, T_L.
DriveResponse transmission_left_drive(const TwoCavitySpec& spec, double delta_c);

/// Isolation ratio in dB; see isolation_db in core.
inline double isolation(double t_left, double t_right) { return isolation_db(t_left, t_right); }

/// Direct LU solve of the full 4x4 steady-state system, ordered
/// (a_cw, a_ccw, b_cw, b_ccw). Independent cross-check of the closed forms.
Eigen::Vector4cd generic_steady_solve(const TwoCavitySpec& spec, double delta_c, DriveSide side);

/// Batch spectra over a strictly increasing detuning grid.
std::vector<TransmissionRecord> spectrum_two(const TwoCavitySpec& spec,
                                             const std::vector<double>& delta_c_grid);

// Rotating-frame dynamics d/dt x = A x + d with x = (a_cw, a_ccw, b_cw, b_ccw).
Eigen::Matrix4cd drift_matrix(const TwoCavitySpec& spec, double delta_c);
Eigen::Vector4cd drive_vector(const TwoCavitySpec& spec, DriveSide side, double amplitude);

/// Power transmission from mode amplitudes via the total input-output
/// relations.
double transmission_from_amplitudes(const TwoCavitySpec& spec, DriveSide side,
                                    const Eigen::Vector4cd& modes, double amplitude);

}  // namespace spinring
