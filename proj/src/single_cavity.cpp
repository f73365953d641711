#include "spinring/single_cavity.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <tuple>

namespace spinring {

namespace {

using cd = std::complex<double>;

// |1 - cos(theta)| below this is treated as a constructive-interference
// point and replaced by the analytic limit of the 0/0 ratio.
constexpr double kSingularEps = 1e-9;

// Relative denominator magnitude below which a transmission evaluation is
// reported as a pole instead of returning a huge number.
constexpr double kPoleEps = 1e-14;

// sum_m sqrt(kappa_m) e^{i s (phi_m - phi_ref)}
cd phased_coupling_sum(const SingleCavitySpec& spec, double scale, double phi_ref) {
    cd sum{0.0, 0.0};
    for (int m = 0; m < spec.size(); ++m) {
        sum += std::sqrt(spec.kappa_e[m]) * std::polar(1.0, scale * (spec.phi_base[m] - phi_ref));
    }
    return sum;
}

struct Denominator {
    cd branch_ccw;  // i(delta_c - delta_f + delta_ccw) + gamma_ccw
    cd branch_cw;   // i(delta_c + delta_f + delta_cw) + gamma_cw
    cd value;       // branch_ccw * branch_cw + j^2
    double scale;   // magnitude scale for pole detection
};

Denominator transmission_denominator(const SingleCavitySpec& spec, const ModeRates& r,
                                     double delta_c) {
    Denominator den;
    den.branch_ccw = cd(r.gamma_ccw, delta_c - spec.delta_f + r.delta_ccw);
    den.branch_cw = cd(r.gamma_cw, delta_c + spec.delta_f + r.delta_cw);
    den.value = den.branch_ccw * den.branch_cw + spec.j * spec.j;
    den.scale = std::abs(den.branch_ccw) * std::abs(den.branch_cw) + spec.j * spec.j;
    return den;
}

double transmission_impl(const SingleCavitySpec& spec, double delta_c, Direction drive_dir) {
    spec.validate();
    const ModeRates r = collective_rates(spec);
    // Numerator coupling uses the drive direction's phases; an exactly
    // vanishing coupling means the waveguide never sees the cavity.
    const double gammap =
        drive_dir == Direction::cw ? r.gammap_cw : r.gammap_ccw;
    if (gammap == 0.0) return 1.0;

    const Denominator den = transmission_denominator(spec, r, delta_c);
    if (std::abs(den.value) <= kPoleEps * den.scale) {
        throw PoleError("transmission: denominator pole at delta_c = " + std::to_string(delta_c));
    }
    const cd opposite_branch =
        drive_dir == Direction::cw ? den.branch_ccw : den.branch_cw;
    const cd t = 1.0 - opposite_branch * gammap / den.value;
    return std::norm(t);
}

}  // namespace

SingleCavitySpec SingleCavitySpec::symmetric(int n, double theta_c, double kappa_e,
                                             double kappa_c, double j,
                                             double omega_c, double delta_f) {
    SingleCavitySpec spec;
    spec.omega_c = omega_c;
    spec.delta_f = delta_f;
    spec.kappa_c = kappa_c;
    spec.j = j;
    spec.kappa_e = Eigen::VectorXd::Constant(n, kappa_e);
    spec.phi_base = theta_c * Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
    spec.validate();
    return spec;
}

void SingleCavitySpec::validate() const {
    if (kappa_e.size() < 1 || kappa_e.size() != phi_base.size()) {
        throw std::invalid_argument("SingleCavitySpec: need N >= 1 couplings with matching phases");
    }
    if (!(omega_c > 0.0) || std::abs(delta_f) >= omega_c) {
        throw std::invalid_argument("SingleCavitySpec: require omega_c > 0 and |delta_f| < omega_c");
    }
    if (kappa_c < 0.0 || j < 0.0) {
        throw std::invalid_argument("SingleCavitySpec: kappa_c and j must be nonnegative");
    }
    for (int m = 0; m < size(); ++m) {
        if (!(kappa_e[m] >= 0.0) || !std::isfinite(kappa_e[m]) || !std::isfinite(phi_base[m])) {
            throw std::invalid_argument("SingleCavitySpec: invalid coupling entry");
        }
        if (m > 0 && phi_base[m] < phi_base[m - 1]) {
            throw std::invalid_argument("SingleCavitySpec: phi_base must be nondecreasing");
        }
    }
}

std::pair<double, double> collective_rates_general(const SingleCavitySpec& spec, Direction dir) {
    const double scale = spec.phase_scale(dir);
    double delta = 0.0;
    double interference = 0.0;
    for (int m = 1; m < spec.size(); ++m) {
        for (int n = 0; n < m; ++n) {
            const double amp = std::sqrt(spec.kappa_e[m] * spec.kappa_e[n]);
            const double phi = scale * (spec.phi_base[m] - spec.phi_base[n]);
            delta += amp * std::sin(phi);
            interference += amp * std::cos(phi);
        }
    }
    return {delta, spec.gamma_total() + interference};
}

std::pair<double, double> collective_rates_symmetric(int n, double theta_j,
                                                     double kappa_e, double kappa_c) {
    if (n < 1 || kappa_e < 0.0 || kappa_c < 0.0) {
        throw std::invalid_argument("collective_rates_symmetric: bad arguments");
    }
    // 1 - cos(theta) evaluated as 2 sin^2(theta/2); the subtraction loses
    // half the digits near theta = 2 pi k.
    const double half_sin = std::sin(0.5 * theta_j);
    const double den = 2.0 * half_sin * half_sin;
    if (std::abs(den) < kSingularEps) {
        return {0.0, 0.5 * kappa_c + 0.5 * static_cast<double>(n) * n * kappa_e};
    }
    const double delta = 0.5 * kappa_e * (n * std::sin(theta_j) - std::sin(n * theta_j)) / den;
    const double kernel = std::sin(0.5 * n * theta_j) / half_sin;  // Dirichlet ratio
    const double gamma = 0.5 * kappa_c + 0.5 * kappa_e * kernel * kernel;
    return {delta, gamma};
}

double collective_coupling_general(const SingleCavitySpec& spec, Direction dir) {
    return std::norm(phased_coupling_sum(spec, spec.phase_scale(dir), 0.0));
}

double collective_coupling_symmetric(int n, double theta_j, double kappa_e) {
    if (n < 1 || kappa_e < 0.0) {
        throw std::invalid_argument("collective_coupling_symmetric: bad arguments");
    }
    const double half_sin = std::sin(0.5 * theta_j);
    if (std::abs(2.0 * half_sin * half_sin) < kSingularEps) {
        return static_cast<double>(n) * n * kappa_e;
    }
    const double kernel = std::sin(0.5 * n * theta_j) / half_sin;
    return kappa_e * kernel * kernel;
}

ModeRates collective_rates(const SingleCavitySpec& spec) {
    ModeRates r;
    std::tie(r.delta_cw, r.gamma_cw) = collective_rates_general(spec, Direction::cw);
    std::tie(r.delta_ccw, r.gamma_ccw) = collective_rates_general(spec, Direction::ccw);
    r.gammap_cw = collective_coupling_general(spec, Direction::cw);
    r.gammap_ccw = collective_coupling_general(spec, Direction::ccw);
    return r;
}

double chirality(double gamma_cw, double gamma_ccw) {
    const double total = gamma_cw + gamma_ccw;
    if (total == 0.0) {
        throw std::domain_error("chirality: undefined, both decay rates vanish");
    }
    return (gamma_cw - gamma_ccw) / total;
}

double transmission_left(const SingleCavitySpec& spec, double delta_c) {
    return transmission_impl(spec, delta_c, Direction::cw);
}

double transmission_right(const SingleCavitySpec& spec, double delta_c) {
    return transmission_impl(spec, delta_c, Direction::ccw);
}

std::vector<TransmissionRecord> spectrum(const SingleCavitySpec& spec,
                                         const std::vector<double>& delta_c_grid) {
    if (delta_c_grid.empty()) {
        throw std::invalid_argument("spectrum: empty detuning grid");
    }
    for (std::size_t i = 1; i < delta_c_grid.size(); ++i) {
        if (!(delta_c_grid[i] > delta_c_grid[i - 1])) {
            throw std::invalid_argument("spectrum: grid must be strictly increasing");
        }
    }
    std::vector<TransmissionRecord> records;
    records.reserve(delta_c_grid.size());
    for (double dc : delta_c_grid) {
        TransmissionRecord rec;
        rec.delta_c = dc;
        rec.t_left = transmission_left(spec, dc);
        rec.t_right = transmission_right(spec, dc);
        rec.isolation_db = (rec.t_left > 0.0 && rec.t_right > 0.0)
                               ? isolation_db(rec.t_left, rec.t_right)
                               : std::numeric_limits<double>::quiet_NaN();
        records.push_back(rec);
    }
    return records;
}

Eigen::Matrix2cd drift_matrix(const SingleCavitySpec& spec, double delta_c) {
    spec.validate();
    const ModeRates r = collective_rates(spec);
    // Self-interference sums as one complex number per direction:
    // (gamma_j - gamma_c) + i*delta_j.
    const double gamma_c = spec.gamma_total();
    const cd self_cw(r.gamma_cw - gamma_c, r.delta_cw);
    const cd self_ccw(r.gamma_ccw - gamma_c, r.delta_ccw);
    Eigen::Matrix2cd a;
    a(0, 0) = -(cd(0.0, delta_c + spec.delta_f) + gamma_c + self_cw);
    a(0, 1) = cd(0.0, -spec.j);
    a(1, 0) = cd(0.0, -spec.j);
    a(1, 1) = -(cd(0.0, delta_c - spec.delta_f) + gamma_c + self_ccw);
    return a;
}

Eigen::Vector2cd drive_vector(const SingleCavitySpec& spec, DriveSide side, double amplitude) {
    const int n = spec.size();
    Eigen::Vector2cd d = Eigen::Vector2cd::Zero();
    if (side == DriveSide::left) {
        d(0) = amplitude * phased_coupling_sum(spec, spec.phase_scale(Direction::cw),
                                               spec.phi_base[0]);
    } else {
        // Right-incident photons accumulate phase from x_N backwards.
        d(1) = amplitude * std::conj(phased_coupling_sum(spec, spec.phase_scale(Direction::ccw),
                                                         spec.phi_base[n - 1]));
    }
    return d;
}

double transmission_from_amplitudes(const SingleCavitySpec& spec, DriveSide side,
                                    const Eigen::Vector2cd& modes, double amplitude) {
    if (amplitude == 0.0) {
        throw std::invalid_argument("transmission_from_amplitudes: zero drive amplitude");
    }
    const int n = spec.size();
    const double span = spec.phi_base[n - 1] - spec.phi_base[0];
    cd out;
    if (side == DriveSide::left) {
        const double s = spec.phase_scale(Direction::cw);
        cd emitted{0.0, 0.0};
        for (int m = 0; m < n; ++m) {
            emitted += std::sqrt(spec.kappa_e[m]) *
                       std::polar(1.0, s * (spec.phi_base[n - 1] - spec.phi_base[m]));
        }
        out = std::polar(1.0, s * span) - emitted * modes(0) / amplitude;
    } else {
        const double s = spec.phase_scale(Direction::ccw);
        cd emitted{0.0, 0.0};
        for (int m = 0; m < n; ++m) {
            emitted += std::sqrt(spec.kappa_e[m]) *
                       std::polar(1.0, s * (spec.phi_base[m] - spec.phi_base[0]));
        }
        out = std::polar(1.0, s * span) - emitted * modes(1) / amplitude;
    }
    return std::norm(out);
}

Eigen::Vector2cd steady_solve(const SingleCavitySpec& spec, double delta_c, DriveSide side) {
    const Eigen::Matrix2cd a = drift_matrix(spec, delta_c);
    const Eigen::Vector2cd d = drive_vector(spec, side, 1.0);
    Eigen::FullPivLU<Eigen::Matrix2cd> lu(a);
    if (!lu.isInvertible()) {
        throw PoleError("steady_solve: singular steady-state system");
    }
    return lu.solve((-d).eval());
}

}  // namespace spinring
