#pragma once

// Runs behind the ramansim subcommands. The run_* functions do the numerics
// and return results by value; the cmd_* functions add configuration
// loading, output files and the exit-code contract.

#include "raman/analytic_ww.hpp"
#include "raman/full_model.hpp"
#include "raman/observables.hpp"
#include "raman/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace raman {

inline constexpr const char* version = "1.0.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_invalid_config = 2,
    exit_grid_failure = 3,
    exit_numerical_failure = 4,
};

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::string> out_dir;
    int jobs = 0; // 0: machine parallelism
    bool force = false;
    bool seed_meta = false; // leave wall-clock fields out of meta.json
};

/// One scenario point, as written to summary.json and to each sweep.csv row.
struct PointSummary {
    std::string model;
    int n_atoms = 0;
    double lambda0 = 0.0;
    int n_modes = 0;
    double bandwidth = 0.0;
    double spacing = 0.0;
    double detuning2 = 0.0; // full model only
    double gamma_formula = 0.0;
    std::optional<double> gamma_fit;
    double delta = 0.0;
    bool shift_symmetric = true;
    double final_ground = 0.0;
    double final_concurrence = 0.0;
    double max_intermediate = 0.0; // full model only
    GridDiagnostics grid;
};

struct EffectiveRun {
    ModeGrid grid;
    HamiltonianMatrix h;
    Trajectory traj;
    WWParams ww;
    PointSummary summary;
};

/// Effective model over scenario.sample_times() with scenario.method.
EffectiveRun run_effective(const Scenario& sc, kernels::Exec exec = kernels::Exec::parallel);

struct FullRun {
    FullParams fp;
    ModeGrid grid;
    HamiltonianMatrix h;
    Trajectory traj;
    PointSummary summary;
};

/// Full model at `detuning2` over `times` (exact propagation).
FullRun run_full(const Scenario& sc, double detuning2, const std::vector<double>& times,
                 kernels::Exec exec = kernels::Exec::parallel);

/// Grid diagnostics for the scenario without running it.
GridDiagnostics check_grid(const Scenario& sc);

/// Summary row for the scenario's model (full when model is full or both).
PointSummary summarize_point(const Scenario& sc, kernels::Exec exec = kernels::Exec::parallel);

struct CompareResult {
    std::vector<double> times;
    Trajectory expm;
    Trajectory rk4;
    Trajectory analytic;
    double gamma = 0.0;
    double sup_rk4_expm = 0.0;      // max_t |C0_rk4 - C0_expm|
    double sup_expm_analytic = 0.0; // max_t | |C0|^2_expm - |C0|^2_analytic |
    double sup_rk4_analytic = 0.0;
    std::vector<double> ladder_dt;    // steps used for dt, dt/2, dt/4 (largest first)
    std::vector<double> ladder_error; // sup |C0_rk4 - C0_expm| per rung
    double rk4_order = 0.0;           // log2 of successive error ratios, averaged
    double max_norm_error_expm = 0.0;
    double max_norm_error_rk4 = 0.0;
};

/// expm, RK4 and the closed form on identical grids and sample times.
/// With `order_ladder`, RK4 is also run at dt/2 and dt/4 to measure its order.
CompareResult run_compare(const Scenario& sc, bool order_ladder = true,
                          kernels::Exec exec = kernels::Exec::parallel);

struct LadderPoint {
    double detuning2 = 0.0;
    FullParams fp;
    AdiabaticityReport report;
};

/// Full model vs the light-shift-corrected effective model for every ladder
/// detuning. Sample times add a window resolving the intermediate-state
/// transient to the scenario samples.
std::vector<LadderPoint> run_ladder(const Scenario& sc,
                                    kernels::Exec exec = kernels::Exec::parallel);

/// Output directory: --out, then RAMAN_OUT_DIR, then output.dir, then ./out.
std::filesystem::path output_directory(const CommandOptions& opts, const Scenario& sc);

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate_adiabatic(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);

} // namespace raman
