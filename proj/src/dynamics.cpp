#include "spinring/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spinring {

namespace {

constexpr double kDivergenceLimit = 1e12;
constexpr double kWindowCap = 1e3;  // time units

double inf_norm(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

double row_sum_norm(const Eigen::MatrixXcd& a) {
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double slowest_diagonal_decay(const Eigen::MatrixXcd& a) {
    double gamma_min = 0.0;
    for (int k = 0; k < a.rows(); ++k) {
        const double decay = -a(k, k).real();
        if (decay > 0.0) gamma_min = (gamma_min == 0.0) ? decay : std::min(gamma_min, decay);
    }
    return gamma_min;
}

// Window for the convergence test: at least one period of the slowest beat
// among the mode detunings and several lifetimes of the slowest decay,
// capped at kWindowCap.
double convergence_window(const Eigen::MatrixXcd& a) {
    const double rate_scale = row_sum_norm(a);
    double beat = 0.0;
    for (int k = 0; k < a.rows(); ++k) {
        const double freq = std::abs(a(k, k).imag());
        if (freq > 1e-12 * rate_scale) beat = std::max(beat, 2.0 * M_PI / freq);
    }
    double window = beat;
    const double gamma_min = slowest_diagonal_decay(a);
    if (gamma_min > 0.0) window = std::max(window, 3.0 / gamma_min);
    return std::min(window, kWindowCap);
}

template <int Dim>
Trajectory integrate_linear(const Eigen::Matrix<std::complex<double>, Dim, Dim>& a,
                            const Eigen::Matrix<std::complex<double>, Dim, 1>& d,
                            const IntegrationConfig& cfg) {
    using Vec = Eigen::Matrix<std::complex<double>, Dim, 1>;
    cfg.validate();
    const double rate_scale = row_sum_norm(a);
    if (cfg.dt * rate_scale > 0.1) {
        throw std::invalid_argument("IntegrationConfig: dt too large for the spec's rates");
    }

    Vec x = Vec::Zero();
    if (cfg.initial.size() != 0) {
        if (cfg.initial.size() != Dim) {
            throw std::invalid_argument("IntegrationConfig: initial state has wrong dimension");
        }
        x = cfg.initial;
    }

    const auto rhs = [&](const Vec& y) -> Vec { return a * y + d; };

    const long total_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt));
    const long stride = std::max<long>(1, total_steps / 2000);
    const double window = std::max(convergence_window(a), 16.0 * cfg.dt);
    const long window_steps = std::max<long>(1, static_cast<long>(std::llround(window / cfg.dt)));

    const double rhs_scale = std::max(inf_norm(d), inf_norm(rhs(x)));
    double amp_scale = std::max(std::abs(cfg.amplitude), inf_norm(x));

    std::vector<double> times;
    std::vector<Vec> samples;
    times.reserve(2048);
    samples.reserve(2048);
    times.push_back(0.0);
    samples.push_back(x);

    Vec window_ref = x;
    bool converged = false;
    long step = 0;
    for (; step < total_steps; ++step) {
        const Vec k1 = rhs(x);
        const Vec k2 = rhs(x + 0.5 * cfg.dt * k1);
        const Vec k3 = rhs(x + 0.5 * cfg.dt * k2);
        const Vec k4 = rhs(x + cfg.dt * k3);
        x += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double amp = inf_norm(x);
        if (!std::isfinite(amp) || amp > kDivergenceLimit) {
            throw DivergenceError("integration diverged at t = " + std::to_string((step + 1) * cfg.dt));
        }
        amp_scale = std::max(amp_scale, amp);

        if ((step + 1) % stride == 0) {
            times.push_back((step + 1) * cfg.dt);
            samples.push_back(x);
        }
        if ((step + 1) % window_steps == 0) {
            const double change = inf_norm(x - window_ref);
            const double residual = inf_norm(rhs(x));
            if (change <= cfg.convergence_tol * amp_scale &&
                residual <= cfg.convergence_tol * rhs_scale) {
                converged = true;
                ++step;
                break;
            }
            window_ref = x;
        }
    }

    if (times.back() != step * cfg.dt) {
        times.push_back(step * cfg.dt);
        samples.push_back(x);
    }

    Trajectory traj;
    traj.converged = converged;
    traj.times = Eigen::Map<Eigen::VectorXd>(times.data(), static_cast<long>(times.size()));
    traj.amplitudes.resize(Dim, static_cast<long>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        traj.amplitudes.col(static_cast<long>(i)) = samples[i];
    }
    traj.final_amplitudes = x;
    return traj;
}

}  // namespace

void IntegrationConfig::validate() const {
    if (!(dt > 0.0) || !(t_max > 0.0)) {
        throw std::invalid_argument("IntegrationConfig: dt and t_max must be positive");
    }
    if (!(convergence_tol > 0.0) || convergence_tol > 1e-3) {
        throw std::invalid_argument("IntegrationConfig: convergence_tol must lie in (0, 1e-3]");
    }
}

Trajectory integrate_single(const SingleCavitySpec& spec, const IntegrationConfig& cfg) {
    const Eigen::Matrix2cd a = drift_matrix(spec, cfg.delta_c);
    const Eigen::Vector2cd d = drive_vector(spec, cfg.side, cfg.amplitude);
    return integrate_linear<2>(a, d, cfg);
}

Trajectory integrate_two(const TwoCavitySpec& spec, const IntegrationConfig& cfg) {
    const Eigen::Matrix4cd a = drift_matrix(spec, cfg.delta_c);
    const Eigen::Vector4cd d = drive_vector(spec, cfg.side, cfg.amplitude);
    return integrate_linear<4>(a, d, cfg);
}

IntegrationConfig auto_config(const Eigen::MatrixXcd& drift, DriveSide side, double delta_c,
                              double convergence_tol) {
    IntegrationConfig cfg;
    cfg.side = side;
    cfg.delta_c = delta_c;
    cfg.convergence_tol = std::min(convergence_tol, 1e-3);
    const double rate_scale = row_sum_norm(drift);
    cfg.dt = rate_scale > 0.0 ? 0.08 / rate_scale : 1e-3;
    const double gamma_min = slowest_diagonal_decay(drift);
    const double digits = -std::log(cfg.convergence_tol) + 10.0;
    cfg.t_max = gamma_min > 0.0 ? std::max(100.0, digits / gamma_min) : 100.0;
    // leave room for a few convergence checks even when a slow beat
    // stretches the window
    cfg.t_max = std::max(cfg.t_max, 4.0 * convergence_window(drift));
    return cfg;
}

double steady_transmission(const SingleCavitySpec& spec, double delta_c, DriveSide side,
                           double convergence_tol) {
    const Eigen::Matrix2cd a = drift_matrix(spec, delta_c);
    const IntegrationConfig cfg = auto_config(a, side, delta_c, convergence_tol);
    const Trajectory traj = integrate_single(spec, cfg);
    if (!traj.converged) {
        throw std::runtime_error("steady_transmission: integration did not converge");
    }
    return transmission_from_amplitudes(spec, side, traj.final_amplitudes, cfg.amplitude);
}

double steady_transmission(const TwoCavitySpec& spec, double delta_c, DriveSide side,
                           double convergence_tol) {
    const Eigen::Matrix4cd a = drift_matrix(spec, delta_c);
    const IntegrationConfig cfg = auto_config(a, side, delta_c, convergence_tol);
    const Trajectory traj = integrate_two(spec, cfg);
    if (!traj.converged) {
        throw std::runtime_error("steady_transmission: integration did not converge");
    }
    return transmission_from_amplitudes(spec, side, traj.final_amplitudes, cfg.amplitude);
}

}  // namespace spinring
