// Command-line front end: direct evaluations, sweeps, figure presets, and
// cross-checks of the three computation routes.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinring/dynamics.hpp"
#include "spinring/sweep_io.hpp"

using namespace spinring;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << contents;
}

void print_value(const std::string& name, double v) {
    std::cout << name << " = " << format_number(v) << "\n";
}

// Writes <base>.csv, <base>.plot and, when points failed, <base>.diag.json.
void write_outputs(const SweepTable& table, const std::string& base, const PlotHints* hints) {
    write_csv(table, base + ".csv");
    const std::string csv_name = base.substr(base.find_last_of('/') + 1) + ".csv";
    write_file(base + ".plot", emit_plot_script(table, csv_name, hints));
    if (write_diagnostics(table, base + ".diag.json")) {
        std::cerr << table.failures.size() << " grid points failed; see " << base
                  << ".diag.json\n";
    }
    std::cerr << "wrote " << base << ".csv (" << table.n_rows << " rows)\n";
}

SweepConfig spectrum_config(const std::string& spec_json, SweepModel model, double lo, double hi,
                            int count) {
    SweepConfig cfg;
    cfg.model = model;
    if (model == SweepModel::single_cavity) {
        cfg.single = load_single_spec(spec_json);
    } else {
        cfg.two = load_two_spec(spec_json);
    }
    cfg.axes = {{"delta_c", lo, hi, count}};
    cfg.outputs = {"t_left", "t_right", "isolation_db"};
    return cfg;
}

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9});
}

struct TriadRow {
    double delta_c;
    double closed, solved, timed;
};

// Runs the three routes (closed form, linear solve, time integration) for
// one drive side over the chosen detunings.
std::vector<TriadRow> run_triad(const SweepConfig& cfg, DriveSide side,
                                const std::vector<double>& detunings, double time_tol) {
    std::vector<TriadRow> rows;
    for (double dc : detunings) {
        TriadRow row{dc, 0.0, 0.0, 0.0};
        if (cfg.model == SweepModel::single_cavity) {
            const SingleCavitySpec spec = cfg.single.materialize();
            row.closed = side == DriveSide::left ? transmission_left(spec, dc)
                                                 : transmission_right(spec, dc);
            row.solved = transmission_from_amplitudes(spec, side, steady_solve(spec, dc, side), 1.0);
            row.timed = steady_transmission(spec, dc, side, time_tol);
        } else {
            const TwoCavitySpec spec = cfg.two.materialize();
            row.closed = side == DriveSide::left ? transmission_left_drive(spec, dc).transmission
                                                 : transmission_right_drive(spec, dc).transmission;
            row.solved =
                transmission_from_amplitudes(spec, side, generic_steady_solve(spec, dc, side), 1.0);
            row.timed = steady_transmission(spec, dc, side, time_tol);
        }
        rows.push_back(row);
    }
    return rows;
}

int run_verify(const std::string& config_path, double tol, int points) {
    const SweepConfig cfg = load_config(read_file(config_path));
    const AxisSpec* dc_axis = nullptr;
    for (const AxisSpec& axis : cfg.axes) {
        if (axis.param == "delta_c") dc_axis = &axis;
    }
    if (!dc_axis) throw std::invalid_argument("verify: config needs a delta_c axis");

    std::vector<double> detunings;
    const int n = std::min(points, dc_axis->count);
    for (int i = 0; i < n; ++i) {
        const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        detunings.push_back(dc_axis->start + (dc_axis->stop - dc_axis->start) * frac);
    }
    const double time_tol = std::clamp(tol * 1e-4, 1e-12, 1e-3);

    double worst = 0.0;
    for (DriveSide side : {DriveSide::left, DriveSide::right}) {
        const char* tag = side == DriveSide::left ? "T_L" : "T_R";
        for (const TriadRow& row : run_triad(cfg, side, detunings, time_tol)) {
            const double d = std::max({rel_diff(row.closed, row.solved),
                                       rel_diff(row.closed, row.timed),
                                       rel_diff(row.solved, row.timed)});
            worst = std::max(worst, d);
            std::cout << tag << " delta_c=" << format_number(row.delta_c)
                      << " closed=" << format_number(row.closed)
                      << " solve=" << format_number(row.solved)
                      << " timed=" << format_number(row.timed)
                      << " reldiff=" << format_number(d) << "\n";
        }
    }
    std::cerr << "worst pairwise relative difference: " << format_number(worst) << "\n";
    if (worst <= tol) {
        std::cerr << "verify: all three routes agree within " << tol << "\n";
        return 0;
    }
    std::cerr << "verify: routes disagree beyond " << tol << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinning-resonator waveguide transmission simulator"};
    app.require_subcommand(1);

    // sagnac
    auto* sagnac_cmd = app.add_subcommand("sagnac", "Sagnac-Fizeau shift from SI ring parameters");
    double wavelength_nm = 0.0, radius_mm = 0.0, index = 0.0, omega_ghz = 0.0, dn_dlambda = 0.0;
    sagnac_cmd->add_option("--wavelength-nm", wavelength_nm, "vacuum wavelength in nm")->required();
    sagnac_cmd->add_option("--radius-mm", radius_mm, "resonator radius in mm")->required();
    sagnac_cmd->add_option("--index", index, "refractive index")->required();
    sagnac_cmd->add_option("--omega-ghz", omega_ghz, "angular speed in GHz, signed")->required();
    sagnac_cmd->add_option("--dn-dlambda", dn_dlambda, "dispersion dn/dlambda in 1/m");
    sagnac_cmd->callback([&]() {
        RingParams p;
        p.wavelength = wavelength_nm * 1e-9;
        p.radius = radius_mm * 1e-3;
        p.refractive_index = index;
        p.angular_speed = omega_ghz * 1e9;
        p.dn_dlambda = dn_dlambda;
        const double shift = sagnac_shift(p);
        print_value("omega_c_rad_s", p.resonance_frequency());
        print_value("delta_f_rad_s", shift);
        print_value("delta_f_over_omega_c", shift / p.resonance_frequency());
        print_value("r_omega_over_c", p.radius * p.angular_speed / kSpeedOfLight);
    });

    // rates / chirality
    std::string rates_config, chirality_config;
    auto* rates_cmd = app.add_subcommand("rates", "collective rates of a single-cavity spec");
    rates_cmd->add_option("--config", rates_config, "single-cavity spec JSON")->required();
    rates_cmd->callback([&]() {
        const SingleCavitySpec spec = load_single_spec(read_file(rates_config)).materialize();
        const ModeRates r = collective_rates(spec);
        print_value("delta_cw", r.delta_cw);
        print_value("delta_ccw", r.delta_ccw);
        print_value("gamma_cw", r.gamma_cw);
        print_value("gamma_ccw", r.gamma_ccw);
        print_value("gammap_cw", r.gammap_cw);
        print_value("gammap_ccw", r.gammap_ccw);
        try {
            print_value("chirality", chirality(r.gamma_cw, r.gamma_ccw));
        } catch (const std::domain_error&) {
            std::cout << "chirality = undefined (both decay rates vanish)\n";
        }
    });

    auto* chir_cmd = app.add_subcommand("chirality", "chirality factor of a single-cavity spec");
    chir_cmd->add_option("--config", chirality_config, "single-cavity spec JSON")->required();
    chir_cmd->callback([&]() {
        const SingleCavitySpec spec = load_single_spec(read_file(chirality_config)).materialize();
        const ModeRates r = collective_rates(spec);
        print_value("chirality", chirality(r.gamma_cw, r.gamma_ccw));
    });

    // spectrum-single / spectrum-two
    std::string spec_config, spec_out;
    double spec_min = -30.0, spec_max = 30.0;
    int spec_count = 401, spec_threads = 1;
    for (const char* name : {"spectrum-single", "spectrum-two"}) {
        auto* cmd = app.add_subcommand(
            name, std::string("transmission spectrum of a ") +
                      (std::string(name) == "spectrum-single" ? "single-cavity" : "two-cavity") +
                      " spec");
        cmd->add_option("--config", spec_config, "spec JSON")->required();
        cmd->add_option("--min", spec_min, "lowest detuning");
        cmd->add_option("--max", spec_max, "highest detuning");
        cmd->add_option("--count", spec_count, "grid points");
        cmd->add_option("--out", spec_out, "output base path (default: CSV on stdout)");
        cmd->add_option("--threads", spec_threads, "worker threads");
        cmd->callback([&, name]() {
            const SweepModel model = std::string(name) == "spectrum-single"
                                         ? SweepModel::single_cavity
                                         : SweepModel::two_cavity;
            const SweepConfig cfg =
                spectrum_config(read_file(spec_config), model, spec_min, spec_max, spec_count);
            const SweepTable table = run_sweep(cfg, spec_threads);
            if (spec_out.empty()) {
                std::cout << csv_string(table);
            } else {
                write_outputs(table, spec_out, nullptr);
            }
        });
    }

    // sweep
    std::string sweep_config, sweep_out;
    int sweep_threads = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a declarative sweep config");
    sweep_cmd->add_option("--config", sweep_config, "sweep config JSON")->required();
    sweep_cmd->add_option("--out", sweep_out, "output base path")->required();
    sweep_cmd->add_option("--threads", sweep_threads, "worker threads");
    sweep_cmd->callback([&]() {
        const SweepConfig cfg = load_config(read_file(sweep_config));
        const SweepTable table = run_sweep(cfg, sweep_threads);
        write_outputs(table, sweep_out, nullptr);
    });

    // preset
    std::string preset_name, preset_out;
    int preset_threads = 1;
    auto* preset_cmd = app.add_subcommand("preset", "expand and run a named figure preset");
    preset_cmd->add_option("--name", preset_name, "preset name, e.g. fig7")
        ->required()
        ->check(CLI::IsMember(preset_names()));
    preset_cmd->add_option("--out", preset_out, "output base path")->required();
    preset_cmd->add_option("--threads", preset_threads, "worker threads");
    preset_cmd->callback([&]() {
        const SweepConfig cfg = expand_preset(preset_name);
        write_file(preset_out + ".config.json", serialize_config(cfg));
        const SweepTable table = run_sweep(cfg, preset_threads);
        const PlotHints hints = preset_plot_hints(preset_name);
        write_outputs(table, preset_out, &hints);
    });

    // verify
    std::string verify_config;
    double verify_tol = 1e-6;
    int verify_points = 21;
    auto* verify_cmd =
        app.add_subcommand("verify", "cross-check closed forms, linear solve, and time domain");
    verify_cmd->add_option("--config", verify_config, "sweep config JSON with a delta_c axis")
        ->required();
    verify_cmd->add_option("--tol", verify_tol, "pairwise relative tolerance");
    verify_cmd->add_option("--points", verify_points, "detunings sampled from the axis");
    int verify_rc = 0;
    verify_cmd->callback([&]() { verify_rc = run_verify(verify_config, verify_tol, verify_points); });

    try {
        app.parse(argc, argv);
        return verify_rc;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const PoleError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
