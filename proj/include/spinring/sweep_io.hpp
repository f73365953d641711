#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinring/core.hpp"
#include "spinring/dynamics.hpp"
#include "spinring/single_cavity.hpp"
#include "spinring/two_cavity.hpp"

namespace spinring {

enum class SweepModel { single_cavity, two_cavity };

/// One linearly spaced sweep axis.
struct AxisSpec {
    std::string param;
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
};

/// Declarative form of a single-cavity spec as it appears in config files.
/// Keeps the symmetric shorthand so that axes over theta_c or N can be
/// applied; materialize() expands to the computational spec.
struct SingleSpecInput {
    std::optional<RingParams> ring;  // physical mode: omega_c, delta_f from Eq. of motion
    double omega_c = 1.0;
    double delta_f = 0.0;
    double kappa_c = 0.0;
    double j = 0.0;
    bool symmetric = true;
    int n = 1;
    double theta_c = 0.0;
    double kappa_e_scalar = 0.0;
    Eigen::VectorXd kappa_e;   // general form
    Eigen::VectorXd phi_base;  // general form

    SingleCavitySpec materialize() const;
};

/// Declarative two-cavity spec; the spec-level delta_f drives the waveguide
/// phase scaling while each cavity block carries its own Sagnac shift.
struct TwoSpecInput {
    std::optional<RingParams> ring;
    double omega_c = 1.0;
    double delta_f = 0.0;
    CavityParams a;
    CavityParams b;
    double phi_a_cw = 0.0;
    double phi_l_cw = 0.0;
    double phi_b_cw = 0.0;

    TwoCavitySpec materialize() const;
};

struct SweepConfig {
    SweepModel model = SweepModel::single_cavity;
    UnitSystem units;
    SingleSpecInput single;
    TwoSpecInput two;
    std::vector<AxisSpec> axes;
    std::vector<std::string> outputs;
};

/// Parses and validates a JSON config. Unknown keys are rejected; every
/// violation message carries the JSON path of the offending field.
SweepConfig load_config(const std::string& json_text);

/// Bare model specs (the "spec" object of a sweep config) for the direct
/// evaluation commands.
SingleSpecInput load_single_spec(const std::string& json_text);
TwoSpecInput load_two_spec(const std::string& json_text);

/// Canonical JSON rendering; load_config followed by serialize_config is
/// byte-stable.
std::string serialize_config(const SweepConfig& cfg);

struct SweepFailure {
    long row = 0;
    std::string message;
    std::vector<double> axis_values;
};

/// Row-major result table. Cells that failed to evaluate hold NaN and are
/// rendered as empty CSV cells.
struct SweepTable {
    std::vector<std::string> columns;  // axis params first, then outputs
    int n_axes = 0;
    long n_rows = 0;
    std::vector<double> values;  // n_rows * columns.size(), row-major
    std::vector<SweepFailure> failures;
};

/// Evaluates the sweep. Grid points may be computed on several worker
/// threads; the result is identical for any thread count.
SweepTable run_sweep(const SweepConfig& cfg, int n_threads = 1);

/// CSV rendering: header row, 12 significant digits, LF line endings.
std::string csv_string(const SweepTable& table);
void write_csv(const SweepTable& table, const std::string& path);

/// Writes the <name>.diag.json error sidecar; returns false (and writes
/// nothing) when the sweep had no failures.
bool write_diagnostics(const SweepTable& table, const std::string& path);

/// Axis labelling for the emitted plot script.
struct PlotHints {
    std::string title;
    std::vector<std::string> axis_labels;
    std::vector<double> axis_divisors;  // plotted value = column / divisor
};

/// Emits a gnuplot script referencing the CSV by the given (relative) path:
/// line plot for one axis, heatmap for two.
std::string emit_plot_script(const SweepTable& table, const std::string& csv_path,
                             const PlotHints* hints = nullptr);

/// Figure presets: each expands to a full SweepConfig carrying the
/// published parameter set.
const std::vector<std::string>& preset_names();
SweepConfig expand_preset(const std::string& name);
PlotHints preset_plot_hints(const std::string& name);

/// Trajectory dump in the same CSV dialect; one column of times followed by
/// re/im pairs per mode.
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& mode_names);

/// Number rendering shared by CSV output and the CLI: scientific notation,
/// 12 significant digits. NaN and infinities render as the empty string.
std::string format_number(double v);

}  // namespace spinring
