#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "spinring/core.hpp"

namespace spinring {

/// Dimensionless model of one spinning cavity coupled to the waveguide at
/// N points. Rates share one arbitrary angular-frequency unit; phi_base
/// holds the coupling-point phases omega_c*x_m/c evaluated at the
/// nonrotating resonance, nondecreasing in m.
struct SingleCavitySpec {
    double omega_c = 1.0;   // reference frequency, rate units
    double delta_f = 0.0;   // Sagnac shift, signed
    double kappa_c = 0.0;   // intrinsic decay
    double j = 0.0;         // cw/ccw backscatter coupling
    Eigen::VectorXd kappa_e;   // per-point external decay rates, >= 0
    Eigen::VectorXd phi_base;  // per-point base phases, radians

    /// Equal couplings kappa_e at N points spaced by a common phase
    /// theta_c, i.e. phi_base[m] = m*theta_c.
    static SingleCavitySpec symmetric(int n, double theta_c, double kappa_e,
                                      double kappa_c, double j,
                                      double omega_c, double delta_f);

    int size() const { return static_cast<int>(kappa_e.size()); }
    double rho() const { return delta_f / omega_c; }

    /// Total decay rate kappa_c/2 + sum_m kappa_e[m]/2.
    double gamma_total() const { return 0.5 * (kappa_c + kappa_e.sum()); }

    /// Direction-dependent phase scale: phases accumulate as
    /// phi_base*(1 + rho) clockwise and phi_base*(1 - rho) counter-clockwise.
    double phase_scale(Direction d) const {
        return d == Direction::cw ? 1.0 + rho() : 1.0 - rho();
    }

    void validate() const;
};

/// Interference-modified frequency shifts, decay rates, and collective
/// couplings for the two travelling directions.
struct ModeRates {
    double delta_cw = 0.0;
    double delta_ccw = 0.0;
    double gamma_cw = 0.0;
    double gamma_ccw = 0.0;
    double gammap_cw = 0.0;   // |sum_m sqrt(kappa_m) e^{i phi_m}|^2, cw phases
    double gammap_ccw = 0.0;
};

/// Collective frequency shift and decay rate from the pairwise O(N^2) sums,
/// returned as {delta_j, gamma_j}.
std::pair<double, double> collective_rates_general(const SingleCavitySpec& spec, Direction dir);

/// Closed form of the symmetric-case rates for N equally spaced points with
/// phase theta_j between neighbors. Singular phases (theta_j near a multiple
/// of 2*pi) take the constructive-interference limit delta_j = 0,
/// gamma_j = kappa_c/2 + N^2*kappa_e/2.
std::pair<double, double> collective_rates_symmetric(int n, double theta_j,
                                                     double kappa_e, double kappa_c);

/// Collective coupling |sum_m sqrt(kappa_m) e^{i phi_m}|^2 from the spec's
/// coupling data.
double collective_coupling_general(const SingleCavitySpec& spec, Direction dir);

/// Symmetric-case closed form kappa_e*(1 - cos(N*theta_j))/(1 - cos(theta_j)),
/// with limit N^2*kappa_e at singular phases.
double collective_coupling_symmetric(int n, double theta_j, double kappa_e);

/// Both directions at once via the general sums.
ModeRates collective_rates(const SingleCavitySpec& spec);

/// (gamma_cw - gamma_ccw)/(gamma_cw + gamma_ccw), in [-1, 1]. Throws
/// std::domain_error when both rates vanish.
double chirality(double gamma_cw, double gamma_ccw);

/// Power transmission for a drive entering from the left (exciting the CW
/// mode). Throws PoleError near a denominator zero.
double transmission_left(const SingleCavitySpec& spec, double delta_c);

/// Mirror image for a right-incident drive (exciting the CCW mode).
double transmission_right(const SingleCavitySpec& spec, double delta_c);

/// Batch evaluation over a strictly increasing detuning grid.
std::vector<TransmissionRecord> spectrum(const SingleCavitySpec& spec,
                                         const std::vector<double>& delta_c_grid);

// Steady-state linear system in the frame rotating at the drive frequency:
// d/dt (c_cw, c_ccw) = A x + d. Shared by the time-domain integrator and the
// generic linear-solver cross-check.
Eigen::Matrix2cd drift_matrix(const SingleCavitySpec& spec, double delta_c);
Eigen::Vector2cd drive_vector(const SingleCavitySpec& spec, DriveSide side, double amplitude);

/// Output amplitude ratio <out>/amplitude from mode amplitudes via the total
/// input-output relation; returns the power transmission.
double transmission_from_amplitudes(const SingleCavitySpec& spec, DriveSide side,
                                    const Eigen::Vector2cd& modes, double amplitude);

/// Direct LU solve of the steady-state system; the generic route checked
/// against the closed forms.
Eigen::Vector2cd steady_solve(const SingleCavitySpec& spec, double delta_c, DriveSide side);

}  // namespace spinring
