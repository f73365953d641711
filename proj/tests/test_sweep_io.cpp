#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "spinring/sweep_io.hpp"

using namespace spinring;

namespace {

const char* kMinimalSingle = R"({
  "model": "single",
  "spec": {"omega_c": 200.0, "delta_f": 10.0, "kappa_c": 2.0, "j": 0.0,
           "n": 10, "theta_c": 5.969026041820607, "kappa_e": 1.0},
  "axes": [{"param": "delta_c", "start": -30.0, "stop": 30.0, "count": 11}],
  "outputs": ["t_left", "t_right"]
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal single-cavity config parses") {
    const SweepConfig cfg = load_config(kMinimalSingle);
    CHECK(cfg.model == SweepModel::single_cavity);
    CHECK(cfg.units.mode == UnitSystem::Mode::dimensionless);
    CHECK(cfg.single.n == 10);
    CHECK(cfg.single.kappa_e_scalar == 1.0);
    CHECK(cfg.single.delta_f == 10.0);
    CHECK(cfg.axes.size() == 1);
    CHECK(cfg.axes[0].count == 11);
    const SingleCavitySpec spec = cfg.single.materialize();
    CHECK(spec.size() == 10);
    CHECK(spec.rho() == doctest::Approx(0.05));
}

TEST_CASE("validation errors carry the json path") {
    const std::string bad_kappa = replace(kMinimalSingle, "\"kappa_c\": 2.0", "\"kappa_c\": -1.0");
    CHECK_THROWS_WITH_AS(load_config(bad_kappa),
                         doctest::Contains("$.spec"), std::invalid_argument);

    const std::string unknown = replace(kMinimalSingle, "\"j\": 0.0", "\"j\": 0.0, \"bogus\": 1");
    CHECK_THROWS_WITH_AS(load_config(unknown), doctest::Contains("$.spec.bogus"),
                         std::invalid_argument);

    const std::string missing = replace(kMinimalSingle, "\"kappa_c\": 2.0, ", "");
    CHECK_THROWS_WITH_AS(load_config(missing), doctest::Contains("kappa_c"),
                         std::invalid_argument);

    const std::string mistyped = replace(kMinimalSingle, "\"kappa_c\": 2.0", "\"kappa_c\": \"two\"");
    CHECK_THROWS_WITH_AS(load_config(mistyped), doctest::Contains("$.spec.kappa_c"),
                         std::invalid_argument);

    const std::string bad_axis = replace(kMinimalSingle, "\"param\": \"delta_c\"",
                                         "\"param\": \"phi_b_cw\"");
    CHECK_THROWS_WITH_AS(load_config(bad_axis), doctest::Contains("$.axes[0].param"),
                         std::invalid_argument);

    const std::string bad_output = replace(kMinimalSingle, "\"t_right\"", "\"t_sideways\"");
    CHECK_THROWS_WITH_AS(load_config(bad_output), doctest::Contains("$.outputs[1]"),
                         std::invalid_argument);
}

TEST_CASE("transmission outputs need a detuning axis") {
    const std::string no_dc = replace(kMinimalSingle, "\"param\": \"delta_c\"",
                                      "\"param\": \"theta_c\"");
    CHECK_THROWS_WITH_AS(load_config(no_dc), doctest::Contains("delta_c"),
                         std::invalid_argument);
}

TEST_CASE("n axis must step through integers") {
    std::string cfg = replace(kMinimalSingle, "\"outputs\": [\"t_left\", \"t_right\"]",
                              "\"outputs\": [\"chirality\"]");
    cfg = replace(cfg, R"("axes": [{"param": "delta_c", "start": -30.0, "stop": 30.0, "count": 11}])",
                  R"("axes": [{"param": "n", "start": 1.0, "stop": 10.0, "count": 7}])");
    CHECK_THROWS_WITH_AS(load_config(cfg), doctest::Contains("integers"), std::invalid_argument);
}

TEST_CASE("physical mode computes the shift from the ring block") {
    const std::string cfg_text = replace(
        kMinimalSingle, "\"omega_c\": 200.0, \"delta_f\": 10.0",
        "\"ring\": {\"refractive_index\": 1.4, \"radius_m\": 4.73e-3, "
        "\"wavelength_m\": 1.55e-6, \"angular_speed_rad_s\": 0.97e9}");
    const SweepConfig cfg = load_config(cfg_text);
    CHECK(cfg.units.mode == UnitSystem::Mode::physical);
    CHECK(cfg.single.omega_c == doctest::Approx(1215259075683131.0).epsilon(1e-12));
    CHECK(cfg.single.delta_f / cfg.single.omega_c ==
          doctest::Approx(0.010494345772653537).epsilon(1e-12));
    // ring and explicit frequencies are mutually exclusive
    const std::string both = replace(
        kMinimalSingle, "\"omega_c\": 200.0",
        "\"ring\": {\"refractive_index\": 1.4, \"radius_m\": 4.73e-3, "
        "\"wavelength_m\": 1.55e-6, \"angular_speed_rad_s\": 0.97e9}, \"omega_c\": 200.0");
    CHECK_THROWS_AS(load_config(both), std::invalid_argument);
}

TEST_CASE("presets expand to valid configs and round-trip byte-identically") {
    for (const std::string& name : preset_names()) {
        const SweepConfig cfg = expand_preset(name);
        const std::string once = serialize_config(cfg);
        const std::string twice = serialize_config(load_config(once));
        CHECK(once == twice);
    }
    CHECK_THROWS_AS(expand_preset("fig99"), std::invalid_argument);
}

TEST_CASE("single-point sweep equals the direct call") {
    SweepConfig cfg = load_config(kMinimalSingle);
    cfg.axes[0] = {"delta_c", -7.35, -7.35, 1};
    const SweepTable table = run_sweep(cfg);
    REQUIRE(table.n_rows == 1);
    const SingleCavitySpec spec = cfg.single.materialize();
    CHECK(table.values[0] == -7.35);
    CHECK(table.values[1] == transmission_left(spec, -7.35));
    CHECK(table.values[2] == transmission_right(spec, -7.35));
}

TEST_CASE("fig2c chirality crosses 0.99 at ten points") {
    const SweepTable table = run_sweep(expand_preset("fig2c"));
    REQUIRE(table.n_rows == 20);
    const auto value_at = [&](int n) {
        for (long r = 0; r < table.n_rows; ++r) {
            if (std::llround(table.values[r * 2]) == n) return table.values[r * 2 + 1];
        }
        FAIL("row not found");
        return 0.0;
    };
    CHECK(value_at(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(value_at(9) < 0.99);
    CHECK(value_at(10) >= 0.99);
    CHECK(value_at(10) == doctest::Approx(0.99864411668089148).epsilon(1e-12));
}

TEST_CASE("fig7 sweep reaches the published isolation peak") {
    const SweepTable table = run_sweep(expand_preset("fig7"), 4);
    const std::size_t n_cols = table.columns.size();
    REQUIRE(n_cols == 3);
    double max_iso = -1e9;
    for (long r = 0; r < table.n_rows; ++r) {
        const double dc = table.values[r * n_cols];
        const double jb = table.values[r * n_cols + 1];
        const double iso = table.values[r * n_cols + 2];
        if (jb == 10.0 && dc >= 10.0 && dc <= 20.0 && std::isfinite(iso)) {
            max_iso = std::max(max_iso, iso);
        }
    }
    CHECK(max_iso >= 14.0);
    CHECK(max_iso <= 20.0);
}

TEST_CASE("sweeps are deterministic across worker counts") {
    const SweepConfig cfg = expand_preset("fig3c");
    const std::string one = csv_string(run_sweep(cfg, 1));
    const std::string two = csv_string(run_sweep(cfg, 2));
    const std::string eight = csv_string(run_sweep(cfg, 8));
    CHECK(one == two);
    CHECK(one == eight);
}

TEST_CASE("rerunning an emitted preset config reproduces the csv") {
    const SweepConfig cfg = expand_preset("fig3c");
    const SweepConfig reloaded = load_config(serialize_config(cfg));
    CHECK(csv_string(run_sweep(cfg)) == csv_string(run_sweep(reloaded)));
}

TEST_CASE("csv rendering uses 12 significant digits and LF endings") {
    CHECK(format_number(25.0) == "2.50000000000e+01");
    CHECK(format_number(-0.0) == "0.00000000000e+00");
    CHECK(format_number(1.0 / 3.0) == "3.33333333333e-01");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()).empty());

    SweepConfig cfg = load_config(kMinimalSingle);
    cfg.axes[0].count = 3;
    const std::string csv = csv_string(run_sweep(cfg));
    CHECK(csv.find("delta_c,t_left,t_right\n") == 0);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
}

TEST_CASE("failed cells are empty and land in the diagnostics sidecar") {
    // chirality is undefined when every decay channel is closed
    SweepConfig cfg;
    cfg.model = SweepModel::single_cavity;
    cfg.single.omega_c = 200.0;
    cfg.single.delta_f = 10.0;
    cfg.single.kappa_c = 0.0;
    cfg.single.j = 0.0;
    cfg.single.symmetric = true;
    cfg.single.n = 2;
    cfg.single.theta_c = 1.0;
    cfg.single.kappa_e_scalar = 1.0;
    cfg.axes = {{"j", 0.0, 1.0, 2}};
    cfg.outputs = {"chirality"};
    // kappa_e axis does not exist; emulate failure by zero couplings instead
    cfg.single.kappa_e_scalar = 0.0;
    const SweepTable table = run_sweep(cfg);
    REQUIRE(table.n_rows == 2);
    REQUIRE_FALSE(table.failures.empty());
    CHECK(table.failures[0].row == 0);
    const std::string csv = csv_string(table);
    CHECK(csv.find(",\n") != std::string::npos);  // empty chirality cell

    const std::string path = "/tmp/spinring_test_diag.json";
    CHECK(write_diagnostics(table, path));
    std::ifstream f(path);
    std::string contents((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(contents.find("chirality") != std::string::npos);
    std::remove(path.c_str());

    // a clean sweep writes no sidecar
    const SweepTable clean = run_sweep(expand_preset("fig2c"));
    CHECK_FALSE(write_diagnostics(clean, path));
    CHECK_FALSE(std::ifstream(path).good());
}

TEST_CASE("plot scripts follow the axis count") {
    const SweepConfig line_cfg = expand_preset("fig3c");
    const SweepTable line = run_sweep(line_cfg);
    const PlotHints line_hints = preset_plot_hints("fig3c");
    const std::string line_script = emit_plot_script(line, "fig3c.csv", &line_hints);
    CHECK(line_script.find("with lines") != std::string::npos);
    CHECK(line_script.find("set xlabel 'Delta_c/kappa'") != std::string::npos);
    CHECK(line_script.find("fig3c.csv") != std::string::npos);

    const SweepConfig map_cfg = expand_preset("fig7");
    SweepConfig small = map_cfg;
    small.axes[0].count = 5;
    small.axes[1].count = 5;
    const SweepTable heat = run_sweep(small);
    const PlotHints heat_hints = preset_plot_hints("fig7");
    const std::string heat_script = emit_plot_script(heat, "fig7.csv", &heat_hints);
    CHECK(heat_script.find("with image") != std::string::npos);
    CHECK(heat_script.find("set ylabel 'J_b/kappa'") != std::string::npos);
}

TEST_CASE("fig3a hints scale the phase axis by two pi") {
    const PlotHints hints = preset_plot_hints("fig3a");
    REQUIRE(hints.axis_labels.size() == 2);
    CHECK(hints.axis_labels[0] == "Delta_c/kappa");
    CHECK(hints.axis_labels[1] == "theta_c/2pi");
    CHECK(hints.axis_divisors[1] == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("trajectory csv carries one column pair per mode") {
    Trajectory traj;
    traj.times = Eigen::Vector2d(0.0, 1.0);
    traj.amplitudes.resize(2, 2);
    traj.amplitudes << std::complex<double>(1.0, 2.0), std::complex<double>(3.0, 4.0),
        std::complex<double>(5.0, 6.0), std::complex<double>(7.0, 8.0);
    const std::string csv = trajectory_csv(traj, {"cw", "ccw"});
    CHECK(csv.find("time,cw_re,cw_im,ccw_re,ccw_im\n") == 0);
    CHECK(csv.find("1.00000000000e+00,3.00000000000e+00,4.00000000000e+00") != std::string::npos);
    CHECK_THROWS_AS(trajectory_csv(traj, {"only_one"}), std::invalid_argument);
}

TEST_CASE("two-cavity config parses and sweeps") {
    const char* text = R"({
      "model": "two",
      "spec": {
        "omega_c": 200.0, "delta_f": 10.0,
        "cavity_a": {"omega": 200.0, "delta_f": 10.0, "kappa": 0.5,
                     "kappa_1e": 1.0, "kappa_2e": 1.0, "j": 2.0},
        "cavity_b": {"omega": 200.0, "delta_f": 10.0, "kappa": 0.5,
                     "kappa_1e": 1.0, "kappa_2e": 1.0, "j": 0.0},
        "phi_a_cw": 1.5707963267948966, "phi_l_cw": 3.141592653589793,
        "phi_b_cw": 4.71238898038469},
      "axes": [{"param": "delta_c", "start": -40.0, "stop": 40.0, "count": 5}],
      "outputs": ["t_left", "t_right", "isolation_db"]
    })";
    const SweepConfig cfg = load_config(text);
    CHECK(cfg.model == SweepModel::two_cavity);
    const SweepTable table = run_sweep(cfg);
    CHECK(table.n_rows == 5);
    const TwoCavitySpec spec = cfg.two.materialize();
    CHECK(table.values[2 * 4 + 1] == transmission_left_drive(spec, 0.0).transmission);
    // chirality is not a two-cavity output
    SweepConfig bad = cfg;
    bad.outputs = {"chirality"};
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
}
