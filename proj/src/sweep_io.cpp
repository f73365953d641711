#include "spinring/sweep_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace spinring {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

const std::set<std::string> kSingleAxes = {"delta_c", "theta_c", "n", "delta_f", "j"};
const std::set<std::string> kTwoAxes = {"delta_c", "delta_f", "phi_a_cw", "phi_l_cw",
                                        "phi_b_cw", "j_a", "j_b"};
const std::vector<std::string> kSingleOutputs = {
    "delta_cw", "delta_ccw", "gamma_cw",  "gamma_ccw", "gammap_cw",
    "gammap_ccw", "chirality", "t_left",  "t_right",   "isolation_db"};
const std::vector<std::string> kTwoOutputs = {"t_left", "t_right", "isolation_db"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

const json& expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    for (const auto& [key, value] : obj.items()) {
        if (!required.count(key) && !optional.count(key)) fail(path + "." + key, "unknown key");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) fail(path + "." + key, "missing required key");
    }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Eigen::VectorXd get_vector(const json& arr, const std::string& path) {
    if (!arr.is_array() || arr.empty()) fail(path, "expected a nonempty array of numbers");
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        v[static_cast<long>(i)] = arr[i].get<double>();
    }
    return v;
}

RingParams parse_ring(const json& obj, const std::string& path) {
    expect_object(obj, path);
    check_keys(obj, path,
               {"refractive_index", "radius_m", "wavelength_m", "angular_speed_rad_s"},
               {"dn_dlambda"});
    RingParams r;
    r.refractive_index = get_number(obj, path, "refractive_index");
    r.radius = get_number(obj, path, "radius_m");
    r.wavelength = get_number(obj, path, "wavelength_m");
    r.angular_speed = get_number(obj, path, "angular_speed_rad_s");
    r.dn_dlambda = obj.contains("dn_dlambda") ? get_number(obj, path, "dn_dlambda") : 0.0;
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return r;
}

json ring_to_json(const RingParams& r) {
    json j;
    j["refractive_index"] = r.refractive_index;
    j["radius_m"] = r.radius;
    j["wavelength_m"] = r.wavelength;
    j["angular_speed_rad_s"] = r.angular_speed;
    j["dn_dlambda"] = r.dn_dlambda;
    return j;
}

// Resolves the shared frequency block: either dimensionless {omega_c,
// delta_f} or a physical {ring} description producing them via the
// Sagnac shift.
void parse_frequencies(const json& obj, const std::string& path,
                       std::optional<RingParams>& ring, double& omega_c, double& delta_f) {
    if (obj.contains("ring")) {
        if (obj.contains("omega_c") || obj.contains("delta_f")) {
            fail(path, "give either ring (physical mode) or omega_c/delta_f (dimensionless), not both");
        }
        ring = parse_ring(obj.at("ring"), path + ".ring");
        omega_c = ring->resonance_frequency();
        delta_f = sagnac_shift(*ring);
    } else {
        if (!obj.contains("omega_c") || !obj.contains("delta_f")) {
            fail(path, "need omega_c and delta_f (or a ring block)");
        }
        omega_c = get_number(obj, path, "omega_c");
        delta_f = get_number(obj, path, "delta_f");
    }
}

SingleSpecInput parse_single_spec(const json& obj, const std::string& path) {
    expect_object(obj, path);
    check_keys(obj, path, {"kappa_c", "j", "kappa_e"},
               {"ring", "omega_c", "delta_f", "n", "theta_c", "phi_base"});
    SingleSpecInput s;
    parse_frequencies(obj, path, s.ring, s.omega_c, s.delta_f);
    s.kappa_c = get_number(obj, path, "kappa_c");
    s.j = get_number(obj, path, "j");
    if (obj.contains("n")) {
        s.symmetric = true;
        s.n = get_int(obj, path, "n");
        if (!obj.contains("theta_c")) fail(path + ".theta_c", "required with n");
        if (obj.contains("phi_base")) fail(path + ".phi_base", "not allowed with the symmetric shorthand");
        s.theta_c = get_number(obj, path, "theta_c");
        if (!obj.at("kappa_e").is_number()) fail(path + ".kappa_e", "expected a scalar with the symmetric shorthand");
        s.kappa_e_scalar = obj.at("kappa_e").get<double>();
    } else {
        s.symmetric = false;
        if (obj.contains("theta_c")) fail(path + ".theta_c", "only allowed with n");
        if (!obj.contains("phi_base")) fail(path + ".phi_base", "required without the symmetric shorthand");
        s.kappa_e = get_vector(obj.at("kappa_e"), path + ".kappa_e");
        s.phi_base = get_vector(obj.at("phi_base"), path + ".phi_base");
    }
    try {
        s.materialize();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return s;
}

CavityParams parse_cavity(const json& obj, const std::string& path) {
    expect_object(obj, path);
    check_keys(obj, path, {"omega", "delta_f", "kappa", "kappa_1e", "kappa_2e", "j"}, {});
    CavityParams c;
    c.omega = get_number(obj, path, "omega");
    c.delta_f = get_number(obj, path, "delta_f");
    c.kappa = get_number(obj, path, "kappa");
    c.kappa_1e = get_number(obj, path, "kappa_1e");
    c.kappa_2e = get_number(obj, path, "kappa_2e");
    c.j = get_number(obj, path, "j");
    return c;
}

json cavity_to_json(const CavityParams& c) {
    json j;
    j["omega"] = c.omega;
    j["delta_f"] = c.delta_f;
    j["kappa"] = c.kappa;
    j["kappa_1e"] = c.kappa_1e;
    j["kappa_2e"] = c.kappa_2e;
    j["j"] = c.j;
    return j;
}

TwoSpecInput parse_two_spec(const json& obj, const std::string& path) {
    expect_object(obj, path);
    check_keys(obj, path, {"cavity_a", "cavity_b", "phi_a_cw", "phi_l_cw", "phi_b_cw"},
               {"ring", "omega_c", "delta_f"});
    TwoSpecInput s;
    parse_frequencies(obj, path, s.ring, s.omega_c, s.delta_f);
    s.a = parse_cavity(obj.at("cavity_a"), path + ".cavity_a");
    s.b = parse_cavity(obj.at("cavity_b"), path + ".cavity_b");
    s.phi_a_cw = get_number(obj, path, "phi_a_cw");
    s.phi_l_cw = get_number(obj, path, "phi_l_cw");
    s.phi_b_cw = get_number(obj, path, "phi_b_cw");
    try {
        s.materialize();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return s;
}

std::vector<double> axis_grid(const AxisSpec& axis) {
    std::vector<double> grid(axis.count);
    if (axis.count == 1) {
        grid[0] = axis.start;
    } else {
        for (int i = 0; i < axis.count; ++i) {
            grid[i] = axis.start + (axis.stop - axis.start) * i / (axis.count - 1);
        }
    }
    return grid;
}

void validate_config(const SweepConfig& cfg) {
    const bool is_single = cfg.model == SweepModel::single_cavity;
    const auto& allowed_axes = is_single ? kSingleAxes : kTwoAxes;
    const auto& allowed_outputs = is_single ? kSingleOutputs : kTwoOutputs;

    if (cfg.axes.empty() || cfg.axes.size() > 2) {
        fail("$.axes", "need one or two axes");
    }
    bool has_delta_c = false;
    for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
        const std::string path = "$.axes[" + std::to_string(i) + "]";
        const AxisSpec& axis = cfg.axes[i];
        if (!allowed_axes.count(axis.param)) fail(path + ".param", "unknown axis parameter '" + axis.param + "' for this model");
        if (axis.count < 1) fail(path + ".count", "count must be >= 1");
        if (axis.count > 1 && !(axis.start < axis.stop)) fail(path, "start must be below stop when count > 1");
        if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) fail(path, "non-finite bounds");
        if (axis.param == "delta_c") has_delta_c = true;
        if (axis.param == "n") {
            for (double v : axis_grid(axis)) {
                if (std::abs(v - std::round(v)) > 1e-9 || v < 1.0) {
                    fail(path, "n axis must step through integers >= 1");
                }
            }
        }
        if ((axis.param == "theta_c" || axis.param == "n") && !cfg.single.symmetric) {
            fail(path + ".param", "axis requires the symmetric single-cavity shorthand");
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (cfg.axes[k].param == axis.param) fail(path + ".param", "duplicate axis parameter");
        }
    }
    if (cfg.outputs.empty()) fail("$.outputs", "need at least one output");
    for (std::size_t i = 0; i < cfg.outputs.size(); ++i) {
        const std::string path = "$.outputs[" + std::to_string(i) + "]";
        const std::string& out = cfg.outputs[i];
        if (std::find(allowed_outputs.begin(), allowed_outputs.end(), out) == allowed_outputs.end()) {
            fail(path, "unknown output '" + out + "' for this model");
        }
        const bool needs_drive = out == "t_left" || out == "t_right" || out == "isolation_db";
        if (needs_drive && !has_delta_c) {
            fail(path, "transmission outputs require a delta_c axis");
        }
    }
    // Materialization re-checks the physical invariants of the base spec.
    if (is_single) {
        cfg.single.materialize();
    } else {
        cfg.two.materialize();
    }
}

struct RowResult {
    std::vector<double> cells;
    std::vector<std::string> errors;
};

RowResult evaluate_single_row(const SweepConfig& cfg, const std::vector<double>& axis_values) {
    SingleSpecInput in = cfg.single;
    double delta_c = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
        const std::string& p = cfg.axes[i].param;
        const double v = axis_values[i];
        if (p == "delta_c") delta_c = v;
        else if (p == "theta_c") in.theta_c = v;
        else if (p == "n") in.n = static_cast<int>(std::llround(v));
        else if (p == "delta_f") in.delta_f = v;
        else if (p == "j") in.j = v;
    }

    RowResult res;
    res.cells.assign(cfg.outputs.size(), std::numeric_limits<double>::quiet_NaN());
    SingleCavitySpec spec;
    try {
        spec = in.materialize();
    } catch (const std::exception& e) {
        res.errors.emplace_back(e.what());
        return res;
    }

    std::optional<ModeRates> rates;
    const auto get_rates = [&]() -> const ModeRates& {
        if (!rates) rates = collective_rates(spec);
        return *rates;
    };
    double t_left = std::numeric_limits<double>::quiet_NaN();
    double t_right = std::numeric_limits<double>::quiet_NaN();
    bool t_left_done = false, t_right_done = false;
    const auto get_t = [&](Direction dir) -> double {
        if (dir == Direction::cw) {
            if (!t_left_done) { t_left = transmission_left(spec, delta_c); t_left_done = true; }
            return t_left;
        }
        if (!t_right_done) { t_right = transmission_right(spec, delta_c); t_right_done = true; }
        return t_right;
    };

    for (std::size_t i = 0; i < cfg.outputs.size(); ++i) {
        const std::string& out = cfg.outputs[i];
        try {
            if (out == "delta_cw") res.cells[i] = get_rates().delta_cw;
            else if (out == "delta_ccw") res.cells[i] = get_rates().delta_ccw;
            else if (out == "gamma_cw") res.cells[i] = get_rates().gamma_cw;
            else if (out == "gamma_ccw") res.cells[i] = get_rates().gamma_ccw;
            else if (out == "gammap_cw") res.cells[i] = get_rates().gammap_cw;
            else if (out == "gammap_ccw") res.cells[i] = get_rates().gammap_ccw;
            else if (out == "chirality") res.cells[i] = chirality(get_rates().gamma_cw, get_rates().gamma_ccw);
            else if (out == "t_left") res.cells[i] = get_t(Direction::cw);
            else if (out == "t_right") res.cells[i] = get_t(Direction::ccw);
            else if (out == "isolation_db") res.cells[i] = isolation_db(get_t(Direction::cw), get_t(Direction::ccw));
        } catch (const std::exception& e) {
            res.errors.push_back(out + ": " + e.what());
        }
    }
    return res;
}

RowResult evaluate_two_row(const SweepConfig& cfg, const std::vector<double>& axis_values) {
    TwoSpecInput in = cfg.two;
    double delta_c = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
        const std::string& p = cfg.axes[i].param;
        const double v = axis_values[i];
        if (p == "delta_c") delta_c = v;
        else if (p == "delta_f") { in.delta_f = v; in.a.delta_f = v; in.b.delta_f = v; }
        else if (p == "phi_a_cw") in.phi_a_cw = v;
        else if (p == "phi_l_cw") in.phi_l_cw = v;
        else if (p == "phi_b_cw") in.phi_b_cw = v;
        else if (p == "j_a") in.a.j = v;
        else if (p == "j_b") in.b.j = v;
    }

    RowResult res;
    res.cells.assign(cfg.outputs.size(), std::numeric_limits<double>::quiet_NaN());
    TwoCavitySpec spec;
    try {
        spec = in.materialize();
    } catch (const std::exception& e) {
        res.errors.emplace_back(e.what());
        return res;
    }

    double t_left = std::numeric_limits<double>::quiet_NaN();
    double t_right = std::numeric_limits<double>::quiet_NaN();
    bool t_left_done = false, t_right_done = false;
    const auto get_t = [&](DriveSide side) -> double {
        if (side == DriveSide::left) {
            if (!t_left_done) { t_left = transmission_left_drive(spec, delta_c).transmission; t_left_done = true; }
            return t_left;
        }
        if (!t_right_done) { t_right = transmission_right_drive(spec, delta_c).transmission; t_right_done = true; }
        return t_right;
    };

    for (std::size_t i = 0; i < cfg.outputs.size(); ++i) {
        const std::string& out = cfg.outputs[i];
        try {
            if (out == "t_left") res.cells[i] = get_t(DriveSide::left);
            else if (out == "t_right") res.cells[i] = get_t(DriveSide::right);
            else if (out == "isolation_db") res.cells[i] = isolation_db(get_t(DriveSide::left), get_t(DriveSide::right));
        } catch (const std::exception& e) {
            res.errors.push_back(out + ": " + e.what());
        }
    }
    return res;
}

}  // namespace

SingleCavitySpec SingleSpecInput::materialize() const {
    if (symmetric) {
        return SingleCavitySpec::symmetric(n, theta_c, kappa_e_scalar, kappa_c, j, omega_c,
                                           delta_f);
    }
    SingleCavitySpec spec;
    spec.omega_c = omega_c;
    spec.delta_f = delta_f;
    spec.kappa_c = kappa_c;
    spec.j = j;
    spec.kappa_e = kappa_e;
    spec.phi_base = phi_base;
    spec.validate();
    return spec;
}

TwoCavitySpec TwoSpecInput::materialize() const {
    TwoCavitySpec spec;
    spec.omega_ref = omega_c;
    spec.delta_f_phase = delta_f;
    spec.a = a;
    spec.b = b;
    spec.phi_a_cw = phi_a_cw;
    spec.phi_l_cw = phi_l_cw;
    spec.phi_b_cw = phi_b_cw;
    spec.validate();
    return spec;
}

SingleSpecInput load_single_spec(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_single_spec(root, "$");
}

TwoSpecInput load_two_spec(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_two_spec(root, "$");
}

SweepConfig load_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    expect_object(root, "$");
    check_keys(root, "$", {"model", "spec", "axes", "outputs"}, {});

    SweepConfig cfg;
    const std::string model = get_string(root, "$", "model");
    if (model == "single") cfg.model = SweepModel::single_cavity;
    else if (model == "two") cfg.model = SweepModel::two_cavity;
    else fail("$.model", "expected 'single' or 'two'");

    if (cfg.model == SweepModel::single_cavity) {
        cfg.single = parse_single_spec(root.at("spec"), "$.spec");
        cfg.units.mode = cfg.single.ring ? UnitSystem::Mode::physical : UnitSystem::Mode::dimensionless;
        cfg.units.reference_rate = cfg.single.ring ? cfg.single.omega_c : 1.0;
    } else {
        cfg.two = parse_two_spec(root.at("spec"), "$.spec");
        cfg.units.mode = cfg.two.ring ? UnitSystem::Mode::physical : UnitSystem::Mode::dimensionless;
        cfg.units.reference_rate = cfg.two.ring ? cfg.two.omega_c : 1.0;
    }

    const json& axes = root.at("axes");
    if (!axes.is_array()) fail("$.axes", "expected an array");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string path = "$.axes[" + std::to_string(i) + "]";
        expect_object(axes[i], path);
        check_keys(axes[i], path, {"param", "start", "stop", "count"}, {});
        AxisSpec axis;
        axis.param = get_string(axes[i], path, "param");
        axis.start = get_number(axes[i], path, "start");
        axis.stop = get_number(axes[i], path, "stop");
        axis.count = get_int(axes[i], path, "count");
        cfg.axes.push_back(axis);
    }

    const json& outputs = root.at("outputs");
    if (!outputs.is_array()) fail("$.outputs", "expected an array");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!outputs[i].is_string()) fail("$.outputs[" + std::to_string(i) + "]", "expected a string");
        cfg.outputs.push_back(outputs[i].get<std::string>());
    }

    validate_config(cfg);
    return cfg;
}

std::string serialize_config(const SweepConfig& cfg) {
    json root;
    root["model"] = cfg.model == SweepModel::single_cavity ? "single" : "two";
    json spec;
    if (cfg.model == SweepModel::single_cavity) {
        const SingleSpecInput& s = cfg.single;
        if (s.ring) {
            spec["ring"] = ring_to_json(*s.ring);
        } else {
            spec["omega_c"] = s.omega_c;
            spec["delta_f"] = s.delta_f;
        }
        spec["kappa_c"] = s.kappa_c;
        spec["j"] = s.j;
        if (s.symmetric) {
            spec["n"] = s.n;
            spec["theta_c"] = s.theta_c;
            spec["kappa_e"] = s.kappa_e_scalar;
        } else {
            spec["kappa_e"] = std::vector<double>(s.kappa_e.begin(), s.kappa_e.end());
            spec["phi_base"] = std::vector<double>(s.phi_base.begin(), s.phi_base.end());
        }
    } else {
        const TwoSpecInput& s = cfg.two;
        if (s.ring) {
            spec["ring"] = ring_to_json(*s.ring);
        } else {
            spec["omega_c"] = s.omega_c;
            spec["delta_f"] = s.delta_f;
        }
        spec["cavity_a"] = cavity_to_json(s.a);
        spec["cavity_b"] = cavity_to_json(s.b);
        spec["phi_a_cw"] = s.phi_a_cw;
        spec["phi_l_cw"] = s.phi_l_cw;
        spec["phi_b_cw"] = s.phi_b_cw;
    }
    root["spec"] = spec;
    root["axes"] = json::array();
    for (const AxisSpec& axis : cfg.axes) {
        json a;
        a["param"] = axis.param;
        a["start"] = axis.start;
        a["stop"] = axis.stop;
        a["count"] = axis.count;
        root["axes"].push_back(a);
    }
    root["outputs"] = cfg.outputs;
    return root.dump(2) + "\n";
}

SweepTable run_sweep(const SweepConfig& cfg, int n_threads) {
    validate_config(cfg);
    if (n_threads < 1 || n_threads > 64) {
        throw std::invalid_argument("run_sweep: thread count must lie in [1, 64]");
    }

    std::vector<std::vector<double>> grids;
    grids.reserve(cfg.axes.size());
    for (const AxisSpec& axis : cfg.axes) grids.push_back(axis_grid(axis));

    SweepTable table;
    table.n_axes = static_cast<int>(cfg.axes.size());
    for (const AxisSpec& axis : cfg.axes) table.columns.push_back(axis.param);
    for (const std::string& out : cfg.outputs) table.columns.push_back(out);

    long n_rows = 1;
    for (const auto& g : grids) n_rows *= static_cast<long>(g.size());
    table.n_rows = n_rows;
    const std::size_t n_cols = table.columns.size();
    table.values.assign(static_cast<std::size_t>(n_rows) * n_cols,
                        std::numeric_limits<double>::quiet_NaN());

    const long inner = cfg.axes.size() == 2 ? static_cast<long>(grids[1].size()) : 1;
    const bool is_single = cfg.model == SweepModel::single_cavity;

    std::vector<std::vector<SweepFailure>> failures(static_cast<std::size_t>(n_threads));
    const auto worker = [&](int tid) {
        std::vector<double> axis_values(cfg.axes.size());
        for (long row = tid; row < n_rows; row += n_threads) {
            axis_values[0] = grids[0][static_cast<std::size_t>(row / inner)];
            if (cfg.axes.size() == 2) {
                axis_values[1] = grids[1][static_cast<std::size_t>(row % inner)];
            }
            const RowResult res = is_single ? evaluate_single_row(cfg, axis_values)
                                            : evaluate_two_row(cfg, axis_values);
            double* cells = table.values.data() + static_cast<std::size_t>(row) * n_cols;
            for (std::size_t i = 0; i < cfg.axes.size(); ++i) cells[i] = axis_values[i];
            for (std::size_t i = 0; i < res.cells.size(); ++i) cells[cfg.axes.size() + i] = res.cells[i];
            for (const std::string& msg : res.errors) {
                failures[static_cast<std::size_t>(tid)].push_back({row, msg, axis_values});
            }
        }
    };

    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    for (auto& local : failures) {
        table.failures.insert(table.failures.end(), local.begin(), local.end());
    }
    std::stable_sort(table.failures.begin(), table.failures.end(),
                     [](const SweepFailure& a, const SweepFailure& b) { return a.row < b.row; });
    return table;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

std::string csv_string(const SweepTable& table) {
    std::string out;
    const std::size_t n_cols = table.columns.size();
    out.reserve(static_cast<std::size_t>(table.n_rows + 1) * n_cols * 20);
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (long row = 0; row < table.n_rows; ++row) {
        const double* cells = table.values.data() + static_cast<std::size_t>(row) * n_cols;
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c) out += ',';
            out += format_number(cells[c]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const SweepTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << csv_string(table);
}

bool write_diagnostics(const SweepTable& table, const std::string& path) {
    if (table.failures.empty()) return false;
    json root;
    root["failures"] = json::array();
    for (const SweepFailure& f : table.failures) {
        json entry;
        entry["row"] = f.row;
        entry["message"] = f.message;
        json at = json::object();
        for (std::size_t i = 0; i < f.axis_values.size() && i < static_cast<std::size_t>(table.n_axes); ++i) {
            at[table.columns[i]] = f.axis_values[i];
        }
        entry["at"] = at;
        root["failures"].push_back(entry);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << root.dump(2) << "\n";
    return true;
}

std::string emit_plot_script(const SweepTable& table, const std::string& csv_path,
                             const PlotHints* hints) {
    const std::size_t n_cols = table.columns.size();
    const auto label = [&](std::size_t axis) -> std::string {
        if (hints && axis < hints->axis_labels.size()) return hints->axis_labels[axis];
        return table.columns[axis];
    };
    const auto divisor = [&](std::size_t axis) -> double {
        if (hints && axis < hints->axis_divisors.size()) return hints->axis_divisors[axis];
        return 1.0;
    };
    const auto col_expr = [&](std::size_t axis) -> std::string {
        const double div = divisor(axis);
        if (div == 1.0) return std::to_string(axis + 1);
        char buf[48];
        std::snprintf(buf, sizeof(buf), "($%zu/%.17g)", axis + 1, div);
        return buf;
    };

    std::ostringstream os;
    os << "# gnuplot script; render with: gnuplot -p <this file>\n";
    if (hints && !hints->title.empty()) os << "set title '" << hints->title << "'\n";
    os << "set datafile separator ','\n";
    if (table.n_axes == 1) {
        os << "set key autotitle columnhead\n";
        os << "set xlabel '" << label(0) << "'\n";
        os << "plot";
        for (std::size_t c = 1; c < n_cols; ++c) {
            if (c > 1) os << ",";
            os << " '" << (c == 1 ? csv_path : "") << "' using " << col_expr(0) << ":" << (c + 1)
               << " with lines";
        }
        os << "\n";
    } else {
        os << "set xlabel '" << label(0) << "'\n";
        os << "set ylabel '" << label(1) << "'\n";
        os << "set cblabel '" << table.columns[2] << "'\n";
        if (n_cols > 3) {
            os << "# additional output columns:";
            for (std::size_t c = 3; c < n_cols; ++c) os << " " << table.columns[c] << "=col" << (c + 1);
            os << "\n";
        }
        os << "plot '" << csv_path << "' skip 1 using " << col_expr(0) << ":" << col_expr(1)
           << ":3 with image notitle\n";
    }
    return os.str();
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& mode_names) {
    if (static_cast<long>(mode_names.size()) != traj.amplitudes.rows()) {
        throw std::invalid_argument("trajectory_csv: one name per mode required");
    }
    std::string out = "time";
    for (const std::string& name : mode_names) {
        out += "," + name + "_re," + name + "_im";
    }
    out += '\n';
    for (long s = 0; s < traj.times.size(); ++s) {
        out += format_number(traj.times[s]);
        for (long m = 0; m < traj.amplitudes.rows(); ++m) {
            out += ',' + format_number(traj.amplitudes(m, s).real());
            out += ',' + format_number(traj.amplitudes(m, s).imag());
        }
        out += '\n';
    }
    return out;
}

namespace {

SweepConfig single_preset(double kappa_c, double j, double theta_c) {
    SweepConfig cfg;
    cfg.model = SweepModel::single_cavity;
    cfg.single.omega_c = 200.0;  // kappa_e = 5e-3 * omega_c
    cfg.single.delta_f = 10.0;   // Delta_F/omega_c = 0.05
    cfg.single.kappa_c = kappa_c;
    cfg.single.j = j;
    cfg.single.symmetric = true;
    cfg.single.n = 10;
    cfg.single.theta_c = theta_c;
    cfg.single.kappa_e_scalar = 1.0;
    return cfg;
}

SweepConfig two_preset(double j_a, double j_b, double phi_a, double phi_b) {
    SweepConfig cfg;
    cfg.model = SweepModel::two_cavity;
    cfg.two.omega_c = 200.0;  // kappa = 5e-3 * omega_c
    cfg.two.delta_f = 10.0;
    cfg.two.a = {200.0, 10.0, 0.5, 1.0, 1.0, j_a};
    cfg.two.b = {200.0, 10.0, 0.5, 1.0, 1.0, j_b};
    cfg.two.phi_a_cw = phi_a;
    cfg.two.phi_l_cw = M_PI;
    cfg.two.phi_b_cw = phi_b;
    return cfg;
}

AxisSpec axis(const std::string& param, double start, double stop, int count) {
    return {param, start, stop, count};
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d",
        "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b", "fig7"};
    return names;
}

SweepConfig expand_preset(const std::string& name) {
    SweepConfig cfg;
    if (name == "fig2a" || name == "fig2b") {
        cfg = single_preset(0.0, 0.0, 0.95 * kTwoPi);
        cfg.axes = {axis("theta_c", 0.85 * kTwoPi, 1.15 * kTwoPi, 401)};
        cfg.outputs = name == "fig2a" ? std::vector<std::string>{"delta_cw", "delta_ccw"}
                                      : std::vector<std::string>{"gamma_cw", "gamma_ccw"};
    } else if (name == "fig2c") {
        cfg = single_preset(0.0, 0.0, 0.95 * kTwoPi);
        cfg.axes = {axis("n", 1.0, 20.0, 20)};
        cfg.outputs = {"chirality"};
    } else if (name == "fig2d") {
        cfg = single_preset(0.0, 0.0, 0.95 * kTwoPi);
        cfg.axes = {axis("n", 1.0, 20.0, 20), axis("delta_f", 0.0, 20.0, 201)};
        cfg.outputs = {"chirality"};
    } else if (name == "fig3a" || name == "fig3b") {
        cfg = single_preset(2.0, name == "fig3b" ? 5.0 : 0.0, 0.95 * kTwoPi);
        cfg.axes = {axis("delta_c", -30.0, 30.0, 201), axis("theta_c", 0.8 * kTwoPi, 1.2 * kTwoPi, 201)};
        // The caption calls these panels T_R while the text discusses T_L;
        // both columns are emitted so either reading can be plotted.
        cfg.outputs = {"t_left", "t_right"};
    } else if (name == "fig3c" || name == "fig3d") {
        cfg = single_preset(2.0, name == "fig3d" ? 5.0 : 0.0, 0.95 * kTwoPi);
        cfg.axes = {axis("delta_c", -30.0, 30.0, 401)};
        cfg.outputs = {"t_left", "t_right", "isolation_db"};
    } else if (name == "fig5a" || name == "fig5b") {
        cfg = two_preset(0.0, 0.0, M_PI, M_PI);
        cfg.axes = {axis("delta_c", -30.0, 30.0, 201), axis("phi_b_cw", 0.0, kTwoPi, 201)};
        cfg.outputs = name == "fig5a" ? std::vector<std::string>{"t_right"}
                                      : std::vector<std::string>{"t_left"};
    } else if (name == "fig5c" || name == "fig5d") {
        cfg = two_preset(0.0, 0.0, M_PI, name == "fig5c" ? M_PI : 1.5 * M_PI);
        cfg.axes = {axis("delta_c", -30.0, 30.0, 401)};
        cfg.outputs = {"t_left", "t_right", "isolation_db"};
    } else if (name == "fig6a" || name == "fig6b") {
        cfg = two_preset(2.0, name == "fig6b" ? 10.0 : 0.0, 0.5 * M_PI, 1.5 * M_PI);
        cfg.axes = {axis("delta_c", -40.0, 40.0, 401)};
        cfg.outputs = {"t_left", "t_right", "isolation_db"};
    } else if (name == "fig7") {
        cfg = two_preset(2.0, 0.0, 0.5 * M_PI, 1.5 * M_PI);
        // 0.2-wide detuning steps: the isolation peak near 15 kappa is too
        // narrow for the usual 201-point heatmap axis.
        cfg.axes = {axis("delta_c", -40.0, 40.0, 401), axis("j_b", 0.0, 10.0, 201)};
        cfg.outputs = {"isolation_db"};
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    validate_config(cfg);
    return cfg;
}

PlotHints preset_plot_hints(const std::string& name) {
    PlotHints h;
    h.title = name;
    if (name == "fig2a" || name == "fig2b") {
        h.axis_labels = {"theta_c/2pi"};
        h.axis_divisors = {kTwoPi};
    } else if (name == "fig2c") {
        h.axis_labels = {"N"};
        h.axis_divisors = {1.0};
    } else if (name == "fig2d") {
        h.axis_labels = {"N", "Delta_F/kappa_e"};
        h.axis_divisors = {1.0, 1.0};
    } else if (name == "fig3a" || name == "fig3b") {
        h.axis_labels = {"Delta_c/kappa", "theta_c/2pi"};
        h.axis_divisors = {1.0, kTwoPi};
    } else if (name == "fig5a" || name == "fig5b") {
        h.axis_labels = {"Delta_c/kappa", "phi_b_cw/pi"};
        h.axis_divisors = {1.0, M_PI};
    } else if (name == "fig7") {
        h.axis_labels = {"Delta_c/kappa", "J_b/kappa"};
        h.axis_divisors = {1.0, 1.0};
    } else {
        h.axis_labels = {"Delta_c/kappa"};
        h.axis_divisors = {1.0};
    }
    return h;
}

}  // namespace spinring
