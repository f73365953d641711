#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "spinring/dynamics.hpp"

using namespace spinring;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

SingleCavitySpec fig3_spec(double j, int n = 10) {
    return SingleCavitySpec::symmetric(n, 0.95 * kTwoPi, 1.0, 2.0, j, 200.0, 10.0);
}

TwoCavitySpec fig5_spec(double phi_b, double j_a = 0.0, double j_b = 0.0) {
    CavityParams a{200.0, 10.0, 0.5, 1.0, 1.0, j_a};
    CavityParams b{200.0, 10.0, 0.5, 1.0, 1.0, j_b};
    return TwoCavitySpec::make(200.0, 10.0, a, b, M_PI, M_PI, phi_b);
}

}  // namespace

TEST_CASE("config validation") {
    IntegrationConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = IntegrationConfig{};
    cfg.convergence_tol = 2e-3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = IntegrationConfig{};
    cfg.dt = 1.0;  // far above the stability guard for fig3 rates
    CHECK_THROWS_AS(integrate_single(fig3_spec(0.0), cfg), std::invalid_argument);
}

TEST_CASE("undriven passive cavity decays to vacuum") {
    const SingleCavitySpec spec = fig3_spec(5.0);
    IntegrationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 400.0;
    cfg.convergence_tol = 1e-9;
    cfg.amplitude = 0.0;
    cfg.initial = Eigen::Vector2cd(std::complex<double>(1.0, 0.5),
                                   std::complex<double>(-0.3, 0.2));
    const Trajectory traj = integrate_single(spec, cfg);
    CHECK(traj.converged);
    CHECK(traj.final_amplitudes.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(traj.amplitudes.allFinite());
}

TEST_CASE("closed lossless mode keeps its amplitude") {
    SingleCavitySpec spec;
    spec.kappa_e = Eigen::VectorXd::Zero(1);
    spec.phi_base = Eigen::VectorXd::Zero(1);
    spec.omega_c = 200.0;
    spec.delta_f = 0.3;
    spec.kappa_c = 0.0;
    IntegrationConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 10.0;
    cfg.delta_c = 1.0;
    cfg.amplitude = 0.0;
    cfg.initial = Eigen::Vector2cd(std::complex<double>(1.0, 0.0),
                                   std::complex<double>(0.0, 0.0));
    const Trajectory traj = integrate_single(spec, cfg);
    CHECK(std::abs(std::abs(traj.final_amplitudes(0)) - 1.0) <= 1e-9);
}

TEST_CASE("steady state matches the closed-form amplitude at the fig3 dip") {
    const SingleCavitySpec spec = fig3_spec(0.0);
    const double dc = -7.35;
    IntegrationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 2000.0;
    cfg.convergence_tol = 1e-10;
    cfg.delta_c = dc;
    cfg.side = DriveSide::left;
    const Trajectory traj = integrate_single(spec, cfg);
    REQUIRE(traj.converged);

    // Steady amplitude of the driven mode, written out from the collective
    // rates rather than the solver path.
    const ModeRates r = collective_rates(spec);
    const std::complex<double> num(r.gamma_ccw, dc - spec.delta_f + r.delta_ccw);
    const std::complex<double> den =
        num * std::complex<double>(r.gamma_cw, dc + spec.delta_f + r.delta_cw);
    std::complex<double> pump{0.0, 0.0};
    for (int m = 0; m < spec.size(); ++m) {
        pump += std::sqrt(spec.kappa_e[m]) *
                std::polar(1.0, (1.0 + spec.rho()) * (spec.phi_base[m] - spec.phi_base[0]));
    }
    const std::complex<double> expected = num * pump / den;
    CHECK(std::abs(traj.final_amplitudes(0) - expected) <= 1e-6 * std::abs(expected));
}

TEST_CASE("steady transmission agrees with the closed forms") {
    const SingleCavitySpec spec = fig3_spec(5.0);
    for (double dc : {-12.0, -7.35, 3.0}) {
        const double closed = transmission_left(spec, dc);
        const double timed = steady_transmission(spec, dc, DriveSide::left, 1e-10);
        CHECK(std::abs(timed - closed) <= 1e-6 * std::max(closed, 1e-3));
    }
}

TEST_CASE("two-cavity steady state matches the generic solve") {
    const TwoCavitySpec spec = fig5_spec(1.5 * M_PI, 2.0, 10.0);
    for (double dc : {-11.0, 0.0, 15.0}) {
        const Eigen::Matrix4cd a = drift_matrix(spec, dc);
        IntegrationConfig cfg = auto_config(a, DriveSide::right, dc, 1e-10);
        const Trajectory traj = integrate_two(spec, cfg);
        REQUIRE(traj.converged);
        const Eigen::Vector4cd solved = generic_steady_solve(spec, dc, DriveSide::right);
        const double scale = solved.cwiseAbs().maxCoeff();
        CHECK((traj.final_amplitudes - solved).cwiseAbs().maxCoeff() <= 1e-6 * scale);
    }
}

TEST_CASE("zero drive decays to zero in the two-cavity chain") {
    const TwoCavitySpec spec = fig5_spec(M_PI);
    IntegrationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 300.0;
    cfg.amplitude = 0.0;
    cfg.initial = Eigen::Vector4cd::Constant(std::complex<double>(0.4, -0.1));
    const Trajectory traj = integrate_two(spec, cfg);
    CHECK(traj.converged);
    CHECK(traj.final_amplitudes.cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("right drive leaves the ccw block untouched when j vanishes") {
    const TwoCavitySpec spec = fig5_spec(1.2 * M_PI);
    IntegrationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 50.0;
    cfg.side = DriveSide::right;
    cfg.delta_c = 2.0;
    const Trajectory traj = integrate_two(spec, cfg);
    for (long s = 0; s < traj.amplitudes.cols(); ++s) {
        CHECK(std::abs(traj.amplitudes(1, s)) == 0.0);
        CHECK(std::abs(traj.amplitudes(3, s)) == 0.0);
    }
}

TEST_CASE("converged trajectories satisfy the steady-state residual") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> dc_dist(-20.0, 20.0);
    std::uniform_real_distribution<double> j_dist(0.0, 5.0);
    for (int i = 0; i < 10; ++i) {
        const SingleCavitySpec spec = fig3_spec(j_dist(rng));
        const double dc = dc_dist(rng);
        const Eigen::Matrix2cd a = drift_matrix(spec, dc);
        const Eigen::Vector2cd d = drive_vector(spec, DriveSide::left, 1.0);
        IntegrationConfig cfg = auto_config(a, DriveSide::left, dc, 1e-8);
        const Trajectory traj = integrate_single(spec, cfg);
        REQUIRE(traj.converged);
        const double residual = (a * traj.final_amplitudes + d).cwiseAbs().maxCoeff();
        CHECK(residual <= 10.0 * cfg.convergence_tol * d.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("halving the step leaves the converged state unchanged") {
    const SingleCavitySpec spec = fig3_spec(0.0, 2);
    IntegrationConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_max = 3000.0;
    cfg.convergence_tol = 1e-10;
    cfg.delta_c = -9.0;
    const Trajectory coarse = integrate_single(spec, cfg);
    cfg.dt = 1e-3;
    const Trajectory fine = integrate_single(spec, cfg);
    REQUIRE(coarse.converged);
    REQUIRE(fine.converged);
    const double scale = fine.final_amplitudes.cwiseAbs().maxCoeff();
    CHECK((coarse.final_amplitudes - fine.final_amplitudes).cwiseAbs().maxCoeff() <=
          1e-8 * scale);
}

TEST_CASE("short horizons report non-convergence with a partial trajectory") {
    const SingleCavitySpec spec = fig3_spec(0.0);
    IntegrationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 0.05;
    cfg.delta_c = -7.35;
    const Trajectory traj = integrate_single(spec, cfg);
    CHECK_FALSE(traj.converged);
    CHECK(traj.amplitudes.cols() >= 2);
    CHECK(traj.amplitudes.allFinite());
}

TEST_CASE("passive specs never diverge") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dc_dist(-20.0, 20.0);
    for (int i = 0; i < 20; ++i) {
        const SingleCavitySpec spec = fig3_spec(5.0 * (i % 3));
        IntegrationConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 20.0;
        cfg.delta_c = dc_dist(rng);
        cfg.side = i % 2 ? DriveSide::left : DriveSide::right;
        CHECK_NOTHROW(integrate_single(spec, cfg));
    }
}
