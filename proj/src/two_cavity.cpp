#include "spinring/two_cavity.hpp"

#include <cmath>
#include <limits>

namespace spinring {

namespace {

using cd = std::complex<double>;

constexpr double kPoleEps = 1e-14;

cd polar1(double phase) { return std::polar(1.0, phase); }

struct SteadyParts {
    LinkCoefficients c;
    cd ua;  // u_cw*u_ccw + j_a^2
    cd vb;  // v_cw*v_ccw + j_b^2
    cd den;
    double scale;
};

SteadyParts steady_parts(const TwoCavitySpec& spec, double delta_c) {
    // The spectral variable is referenced to omega_ref; per-cavity detunings
    // pick up the stationary offsets.
    const double delta_a = delta_c + (spec.a.omega - spec.omega_ref);
    const double delta_b = delta_c + (spec.b.omega - spec.omega_ref);
    SteadyParts p;
    p.c = link_coefficients(spec, delta_a, delta_b);
    const double ja = spec.a.j;
    const double jb = spec.b.j;
    p.ua = p.c.u_cw * p.c.u_ccw + ja * ja;
    p.vb = p.c.v_cw * p.c.v_ccw + jb * jb;
    p.den = p.ua * p.vb + ja * jb * p.c.f_cw * p.c.f_ccw;
    p.scale = (std::abs(p.c.u_cw) * std::abs(p.c.u_ccw) + ja * ja) *
                  (std::abs(p.c.v_cw) * std::abs(p.c.v_ccw) + jb * jb) +
              ja * jb * std::abs(p.c.f_cw) * std::abs(p.c.f_ccw);
    if (std::abs(p.den) <= kPoleEps * p.scale) {
        throw PoleError("two-cavity transmission: denominator pole at delta_c = " +
                        std::to_string(delta_c));
    }
    return p;
}

}  // namespace

TwoCavitySpec TwoCavitySpec::make(double omega_ref, double delta_f, const CavityParams& a,
                                  const CavityParams& b, double phi_a_cw, double phi_l_cw,
                                  double phi_b_cw) {
    TwoCavitySpec spec;
    spec.omega_ref = omega_ref;
    spec.delta_f_phase = delta_f;
    spec.a = a;
    spec.b = b;
    spec.a.delta_f = delta_f;
    spec.b.delta_f = delta_f;
    spec.phi_a_cw = phi_a_cw;
    spec.phi_l_cw = phi_l_cw;
    spec.phi_b_cw = phi_b_cw;
    spec.validate();
    return spec;
}

double TwoCavitySpec::ccw_phase(double cw) const {
    // The stored phases are CW values k_cw*d = base*(1 + rho); recover the
    // base phase at omega_ref, then rescale to the CCW wavevector.
    const double rho = delta_f_phase / omega_ref;
    return directional_phases(cw / (1.0 + rho), delta_f_phase, omega_ref).ccw;
}

void TwoCavitySpec::validate() const {
    if (!(omega_ref > 0.0) || std::abs(delta_f_phase) >= omega_ref) {
        throw std::invalid_argument("TwoCavitySpec: require omega_ref > 0 and |delta_f| < omega_ref");
    }
    for (const CavityParams* c : {&a, &b}) {
        if (!(c->omega > 0.0) || c->kappa < 0.0 || c->kappa_1e < 0.0 || c->kappa_2e < 0.0 ||
            c->j < 0.0 || !std::isfinite(c->delta_f)) {
            throw std::invalid_argument("TwoCavitySpec: invalid cavity parameters");
        }
    }
    if (phi_a_cw < 0.0 || phi_l_cw < 0.0 || phi_b_cw < 0.0) {
        throw std::invalid_argument("TwoCavitySpec: phases must be nonnegative");
    }
}

LinkCoefficients link_coefficients(const TwoCavitySpec& spec, double delta_a, double delta_b) {
    spec.validate();
    const double k1a = spec.a.kappa_1e, k2a = spec.a.kappa_2e;
    const double k1b = spec.b.kappa_1e, k2b = spec.b.kappa_2e;
    const double ga = spec.a.gamma(), gb = spec.b.gamma();
    const double pa = spec.phi_a_cw, pl = spec.phi_l_cw, pb = spec.phi_b_cw;
    const double pa2 = spec.phi_a_ccw(), pl2 = spec.phi_l_ccw(), pb2 = spec.phi_b_ccw();

    LinkCoefficients c;
    c.u_cw = cd(ga, delta_a + spec.a.delta_f) + std::sqrt(k1a * k2a) * polar1(pa);
    c.u_ccw = cd(ga, delta_a - spec.a.delta_f) + std::sqrt(k1a * k2a) * polar1(pa2);
    c.v_cw = cd(gb, delta_b + spec.b.delta_f) + std::sqrt(k1b * k2b) * polar1(pb);
    c.v_ccw = cd(gb, delta_b - spec.b.delta_f) + std::sqrt(k1b * k2b) * polar1(pb2);
    c.a_cw = std::sqrt(k1a) * polar1(pa + pl + pb) + std::sqrt(k2a) * polar1(pl + pb);
    c.a_ccw = std::sqrt(k1a) + std::sqrt(k2a) * polar1(pa2);
    c.b_cw = std::sqrt(k1b) * polar1(pb) + std::sqrt(k2b);
    c.b_ccw = std::sqrt(k1b) * polar1(pa2 + pl2) + std::sqrt(k2b) * polar1(pa2 + pl2 + pb2);
    c.f_cw = std::sqrt(k1a * k1b) * polar1(pa + pl) + std::sqrt(k1a * k2b) * polar1(pa + pl + pb) +
             std::sqrt(k2a * k1b) * polar1(pl) + std::sqrt(k2a * k2b) * polar1(pl + pb);
    c.f_ccw = std::sqrt(k1a * k1b) * polar1(pa2 + pl2) +
              std::sqrt(k1a * k2b) * polar1(pa2 + pl2 + pb2) + std::sqrt(k2a * k1b) * polar1(pl2) +
              std::sqrt(k2a * k2b) * polar1(pl2 + pb2);
    return c;
}

DriveResponse transmission_right_drive(const TwoCavitySpec& spec, double delta_c) {
    const SteadyParts p = steady_parts(spec, delta_c);
    const double ja = spec.a.j, jb = spec.b.j;
    DriveResponse r;
    r.first = (p.c.u_ccw * p.vb * p.c.a_cw - p.c.u_ccw * p.c.v_ccw * p.c.f_cw * p.c.b_cw) / p.den;
    r.second = (p.c.v_ccw * p.ua * p.c.b_cw + ja * jb * p.c.f_ccw * p.c.a_cw) / p.den;

    const double pa = spec.phi_a_cw, pl = spec.phi_l_cw, pb = spec.phi_b_cw;
    const cd out = polar1(pa + pl + pb) -
                   (std::sqrt(spec.a.kappa_1e) + std::sqrt(spec.a.kappa_2e) * polar1(pa)) * r.first -
                   (std::sqrt(spec.b.kappa_1e) * polar1(pa + pl) +
                    std::sqrt(spec.b.kappa_2e) * polar1(pa + pl + pb)) *
                       r.second;
    r.transmission = std::norm(out);
    return r;
}

DriveResponse transmission_left_drive(const TwoCavitySpec& spec, double delta_c) {
    const SteadyParts p = steady_parts(spec, delta_c);
    const double ja = spec.a.j, jb = spec.b.j;
    DriveResponse r;
    r.first = (p.c.u_cw * p.vb * p.c.a_ccw + ja * jb * p.c.f_cw * p.c.b_ccw) / p.den;
    r.second = (p.c.v_cw * p.ua * p.c.b_ccw - p.c.u_cw * p.c.v_cw * p.c.f_ccw * p.c.a_ccw) / p.den;

    const double pa = spec.phi_a_ccw(), pl = spec.phi_l_ccw(), pb = spec.phi_b_ccw();
    const cd out = polar1(pa + pl + pb) -
                   (std::sqrt(spec.b.kappa_2e) + std::sqrt(spec.b.kappa_1e) * polar1(pb)) * r.second -
                   (std::sqrt(spec.a.kappa_2e) * polar1(pl + pb) +
                    std::sqrt(spec.a.kappa_1e) * polar1(pa + pl + pb)) *
                       r.first;
    r.transmission = std::norm(out);
    return r;
}

Eigen::Matrix4cd drift_matrix(const TwoCavitySpec& spec, double delta_c) {
    const double delta_a = delta_c + (spec.a.omega - spec.omega_ref);
    const double delta_b = delta_c + (spec.b.omega - spec.omega_ref);
    const LinkCoefficients c = link_coefficients(spec, delta_a, delta_b);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    // Order: a_cw, a_ccw, b_cw, b_ccw. The F terms make the chain cascaded:
    // the CW field feeds b -> a, the CCW field feeds a -> b.
    m(0, 0) = -c.u_cw;
    m(0, 1) = cd(0.0, -spec.a.j);
    m(0, 2) = -c.f_cw;
    m(1, 0) = cd(0.0, -spec.a.j);
    m(1, 1) = -c.u_ccw;
    m(2, 2) = -c.v_cw;
    m(2, 3) = cd(0.0, -spec.b.j);
    m(3, 1) = -c.f_ccw;
    m(3, 2) = cd(0.0, -spec.b.j);
    m(3, 3) = -c.v_ccw;
    return m;
}

Eigen::Vector4cd drive_vector(const TwoCavitySpec& spec, DriveSide side, double amplitude) {
    const LinkCoefficients c = link_coefficients(spec, 0.0, 0.0);  // drive terms carry no detuning
    Eigen::Vector4cd d = Eigen::Vector4cd::Zero();
    if (side == DriveSide::right) {
        d(0) = amplitude * c.a_cw;
        d(2) = amplitude * c.b_cw;
    } else {
        d(1) = amplitude * c.a_ccw;
        d(3) = amplitude * c.b_ccw;
    }
    return d;
}

double transmission_from_amplitudes(const TwoCavitySpec& spec, DriveSide side,
                                    const Eigen::Vector4cd& modes, double amplitude) {
    if (amplitude == 0.0) {
        throw std::invalid_argument("transmission_from_amplitudes: zero drive amplitude");
    }
    cd out;
    if (side == DriveSide::right) {
        const double pa = spec.phi_a_cw, pl = spec.phi_l_cw, pb = spec.phi_b_cw;
        out = polar1(pa + pl + pb) -
              (std::sqrt(spec.a.kappa_1e) + std::sqrt(spec.a.kappa_2e) * polar1(pa)) * modes(0) /
                  amplitude -
              (std::sqrt(spec.b.kappa_1e) * polar1(pa + pl) +
               std::sqrt(spec.b.kappa_2e) * polar1(pa + pl + pb)) *
                  modes(2) / amplitude;
    } else {
        const double pa = spec.phi_a_ccw(), pl = spec.phi_l_ccw(), pb = spec.phi_b_ccw();
        out = polar1(pa + pl + pb) -
              (std::sqrt(spec.b.kappa_2e) + std::sqrt(spec.b.kappa_1e) * polar1(pb)) * modes(3) /
                  amplitude -
              (std::sqrt(spec.a.kappa_2e) * polar1(pl + pb) +
               std::sqrt(spec.a.kappa_1e) * polar1(pa + pl + pb)) *
                  modes(1) / amplitude;
    }
    return std::norm(out);
}

Eigen::Vector4cd generic_steady_solve(const TwoCavitySpec& spec, double delta_c, DriveSide side) {
    const Eigen::Matrix4cd a = drift_matrix(spec, delta_c);
    const Eigen::Vector4cd d = drive_vector(spec, side, 1.0);
    Eigen::FullPivLU<Eigen::Matrix4cd> lu(a);
    if (!lu.isInvertible()) {
        throw PoleError("generic_steady_solve: singular steady-state system");
    }
    return lu.solve((-d).eval());
}

std::vector<TransmissionRecord> spectrum_two(const TwoCavitySpec& spec,
                                             const std::vector<double>& delta_c_grid) {
    if (delta_c_grid.empty()) {
        throw std::invalid_argument("spectrum_two: empty detuning grid");
    }
    for (std::size_t i = 1; i < delta_c_grid.size(); ++i) {
        if (!(delta_c_grid[i] > delta_c_grid[i - 1])) {
            throw std::invalid_argument("spectrum_two: grid must be strictly increasing");
        }
    }
    std::vector<TransmissionRecord> records;
    records.reserve(delta_c_grid.size());
    for (double dc : delta_c_grid) {
        TransmissionRecord rec;
        rec.delta_c = dc;
        rec.t_left = transmission_left_drive(spec, dc).transmission;
        rec.t_right = transmission_right_drive(spec, dc).transmission;
        rec.isolation_db = (rec.t_left > 0.0 && rec.t_right > 0.0)
                               ? isolation_db(rec.t_left, rec.t_right)
                               : std::numeric_limits<double>::quiet_NaN();
        records.push_back(rec);
    }
    return records;
}

}  // namespace spinring
