#pragma once

#include <Eigen/Dense>

#include "spinring/core.hpp"
#include "spinring/single_cavity.hpp"
#include "spinring/two_cavity.hpp"

namespace spinring {

/// Fixed-step integration setup in the frame rotating at the drive
/// frequency. Time is measured in inverse rate units of the spec.
struct IntegrationConfig {
    double dt = 1e-3;
    double t_max = 100.0;
    double convergence_tol = 1e-8;  // in (0, 1e-3]
    DriveSide side = DriveSide::left;
    double delta_c = 0.0;
    double amplitude = 1.0;        // coherent drive amplitude, 0 disables
    Eigen::VectorXcd initial;      // starting amplitudes; empty means vacuum

    void validate() const;
};

/// Sampled mean-field evolution. Amplitudes are stored one mode per row,
/// one retained sample per column; the last column is the final state.
struct Trajectory {
    Eigen::VectorXd times;
    Eigen::MatrixXcd amplitudes;
    Eigen::VectorXcd final_amplitudes;
    bool converged = false;
};

/// Integrates the two-mode mean-field equations of one spinning cavity.
/// Throws DivergenceError if any amplitude exceeds 1e12.
Trajectory integrate_single(const SingleCavitySpec& spec, const IntegrationConfig& cfg);

/// Integrates the four-mode cascade of the two-cavity chain, modes ordered
/// (a_cw, a_ccw, b_cw, b_ccw).
Trajectory integrate_two(const TwoCavitySpec& spec, const IntegrationConfig& cfg);

/// Step size and horizon sized from the drift matrix: dt under the
/// stability guard, t_max long enough for the slowest decay to beat the
/// tolerance.
IntegrationConfig auto_config(const Eigen::MatrixXcd& drift, DriveSide side, double delta_c,
                              double convergence_tol);

/// Steady-state transmission through the time-domain route: integrate to
/// convergence and apply the input-output relation. Throws
/// std::runtime_error if the integration does not converge.
double steady_transmission(const SingleCavitySpec& spec, double delta_c, DriveSide side,
                           double convergence_tol = 1e-10);
double steady_transmission(const TwoCavitySpec& spec, double delta_c, DriveSide side,
                           double convergence_tol = 1e-10);

}  // namespace spinring
