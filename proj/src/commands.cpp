#include "raman/commands.hpp"

#include "raman/error.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace raman {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v)
{
    if (!std::isfinite(v))
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string hex_digest(std::uint64_t d)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw OutputError("cannot write " + path.string());
    f << text;
    if (!f)
        throw OutputError("failed while writing " + path.string());
}

std::string units_comment(const Scenario& sc)
{
    return "# time in 1/(" + sc.params.unit.label + "), frequencies in " + sc.params.unit.label +
           ", amplitudes and populations dimensionless\n";
}

double max_norm_error(const Trajectory& traj)
{
    double e = 0.0;
    for (const auto& s : traj.samples)
        e = std::max(e, std::abs(s.norm2() - 1.0));
    return e;
}

// RK4 with the step shrunk so that every sample time falls on a step.
Trajectory rk4_on_samples(const HamiltonianMatrix& h, double dt, double t_max,
                          std::size_t intervals, kernels::Exec exec)
{
    const double per_sample = t_max / static_cast<double>(intervals);
    const auto sps = static_cast<std::size_t>(std::max(1.0, std::ceil(per_sample / dt - 1e-9)));
    const double step = per_sample / static_cast<double>(sps);
    Rk4Options opts;
    opts.record_every = sps;
    opts.exec = exec;
    return propagate_rk4(h, AmplitudeState::initial(h.layout), step, t_max, opts);
}

Trajectory propagate(const Scenario& sc, const HamiltonianMatrix& h,
                     const std::vector<double>& times, kernels::Exec exec)
{
    if (sc.method == Method::rk4)
        return rk4_on_samples(h, sc.dt, sc.t_max, sc.samples - 1, exec);
    return SpectralPropagator(h, exec).evolve(AmplitudeState::initial(h.layout), times);
}

std::optional<double> fitted_rate(const Trajectory& traj, double gamma)
{
    if (!(gamma > 0.0))
        return std::nullopt;
    try {
        return fit_ground_decay(traj, 0.5 / gamma, 3.0 / gamma).rate;
    } catch (const Error&) {
        return std::nullopt;
    }
}

double final_concurrence(const Trajectory& traj)
{
    const auto& last = traj.samples.back();
    return concurrence(reduced_atomic_density(last).density);
}

json to_json(const GridDiagnostics& d)
{
    return {
        {"t_max", d.t_max},
        {"recurrence_time", d.recurrence_time},
        {"bandwidth", d.bandwidth},
        {"gamma_estimate", d.gamma_estimate},
        {"bandwidth_over_gamma", d.bandwidth_ratio},
        {"recurrence_ok", d.recurrence_ok},
        {"bandwidth_ok", d.bandwidth_ok},
        {"passed", d.passed()},
    };
}

json to_json(const PointSummary& p)
{
    json j = {
        {"model", p.model},
        {"n_atoms", p.n_atoms},
        {"lambda0", p.lambda0},
        {"n_modes", p.n_modes},
        {"bandwidth", p.bandwidth},
        {"spacing", p.spacing},
        {"gamma_formula", p.gamma_formula},
        {"gamma_fit", optional_number(p.gamma_fit)},
        {"gamma_fit_over_formula",
         p.gamma_fit && p.gamma_formula > 0.0 ? json(*p.gamma_fit / p.gamma_formula)
                                              : json(nullptr)},
        {"delta", p.delta},
        {"delta_mirror_symmetric", p.shift_symmetric},
        {"final_ground_population", p.final_ground},
        {"final_concurrence", p.final_concurrence},
        {"grid", to_json(p.grid)},
    };
    if (p.model == "full") {
        j["detuning2"] = p.detuning2;
        j["max_intermediate_population"] = p.max_intermediate;
    }
    return j;
}

json to_json(const AdiabaticityReport& r)
{
    return {
        {"coupling_ratio", r.coupling_ratio},
        {"max_intermediate_population", r.max_intermediate_population},
        {"mean_intermediate_population", r.mean_intermediate_population},
        {"intermediate_bound", r.intermediate_bound},
        {"max_population_discrepancy", r.max_population_discrepancy},
        {"discrepancy_bound", r.discrepancy_bound},
        {"ground_sup_deviation", r.ground_sup_deviation},
        {"regime_ok", r.regime_ok},
        {"intermediate_ok", r.intermediate_ok},
        {"discrepancy_ok", r.discrepancy_ok},
    };
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Session {
    CommandOptions opts;
    std::string command;
    RawConfig raw;
    Scenario sc;
    fs::path dir;
    std::vector<std::string> files;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    json extra_meta = json::object();

    fs::path file(const std::string& name)
    {
        files.push_back(name);
        return dir / name;
    }

    void write_meta()
    {
        json m = {
            {"tool", "ramansim"},
            {"version", version},
            {"command", command},
            {"config", opts.config.string()},
            {"config_digest", hex_digest(raw.digest)},
            {"output_files", files},
        };
        for (auto& [k, v] : extra_meta.items())
            m[k] = v;
        if (!opts.seed_meta) {
            m["timestamp_utc"] = utc_timestamp();
            m["wall_time_s"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        } else {
            m.erase("point_runtimes_s");
        }
        write_text(dir / "meta.json", m.dump(2) + "\n");
    }
};

Session open_session(const CommandOptions& opts, const std::string& command)
{
    Session s;
    s.opts = opts;
    s.command = command;
    s.raw = load_config_file(opts.config);
    s.sc = resolve(s.raw);
    s.dir = output_directory(opts, s.sc);
    std::error_code ec;
    fs::create_directories(s.dir, ec);
    if (ec || !fs::is_directory(s.dir))
        throw OutputError("cannot create output directory " + s.dir.string() +
                          (ec ? ": " + ec.message() : ""));
    return s;
}

bool grid_gate(const Session& s, const GridDiagnostics& d, std::ostream& err)
{
    if (d.passed())
        return true;
    std::ostringstream os;
    os << "grid validation failed:";
    if (!d.recurrence_ok)
        os << " recurrence time " << d.recurrence_time << " <= 2 t_max = " << 2.0 * d.t_max << ";";
    if (!d.bandwidth_ok)
        os << " bandwidth " << d.bandwidth << " < 20 gamma = " << 20.0 * d.gamma_estimate << ";";
    if (s.opts.force) {
        err << "warning: " << os.str() << " continuing (--force)\n";
        return true;
    }
    err << "error: " << os.str() << " (use --force to run anyway)\n";
    return false;
}

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid_config;
    } catch (const OutputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid_config;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.code()) {
        case Errc::invalid_argument:
        case Errc::unphysical_grid:
        case Errc::out_of_support:
        case Errc::too_large:
        case Errc::division_by_zero:
            return exit_invalid_config;
        default:
            return exit_numerical_failure;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical_failure;
    }
}

std::string trajectory_csv(const Scenario& sc, const Trajectory& traj)
{
    const BasisLayout& layout = traj.samples.front().layout;
    std::ostringstream os;
    os << units_comment(sc);
    os << "t,re_c0,im_c0,p0,p_s,concurrence,norm,concurrence_stokes";
    if (layout.has_intermediate())
        os << ",p1";
    if (layout.has_dark())
        os << ",p_dark";
    os << "\n";
    for (const auto& s : traj.samples) {
        const PopulationSample p = populations(s);
        const double c = concurrence(reduced_atomic_density(s).density);
        std::string cs;
        if (p.stokes > 1e-9)
            cs = num(concurrence(conditional_stokes_density(s)));
        os << num(s.time) << ',' << num(s.ground().real()) << ',' << num(s.ground().imag()) << ','
           << num(p.ground) << ',' << num(p.stokes) << ',' << num(c) << ',' << num(p.norm) << ','
           << cs;
        if (layout.has_intermediate())
            os << ',' << num(p.intermediate);
        if (layout.has_dark())
            os << ',' << num(p.dark);
        os << "\n";
    }
    return os.str();
}

std::string spectrum_csv(const Scenario& sc, const SpectrumSeries& spec)
{
    std::ostringstream os;
    os << units_comment(sc);
    os << "omega,weight\n";
    for (std::size_t k = 0; k < spec.omega.size(); ++k)
        os << num(spec.omega[k]) << ',' << num(spec.weight[k]) << "\n";
    return os.str();
}

json spectrum_report(const SpectrumSeries& spec, double t, double gamma, double center_ref)
{
    json j = {{"time", t}, {"total_weight", spec.total}, {"early", spec.early}};
    j["lorentzian"] = nullptr;
    if (gamma > 0.0 && spec.omega.size() >= 20) {
        try {
            const LorentzianFit f = fit_lorentzian(spec);
            j["lorentzian"] = {
                {"center", f.center},
                {"fwhm", f.fwhm},
                {"peak", f.peak},
                {"fwhm_over_gamma", f.fwhm / gamma},
                {"center_offset_over_gamma", (f.center - center_ref) / gamma},
                {"rms_residual", f.rms_residual},
                {"iterations", f.iterations},
            };
        } catch (const Error& e) {
            j["lorentzian_error"] = e.what();
        }
    }
    return j;
}

std::vector<double> merge_times(std::vector<double> a, const std::vector<double>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double t : a)
        if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, std::abs(t)))
            out.push_back(t);
    return out;
}

} // namespace

GridDiagnostics check_grid(const Scenario& sc)
{
    const double t_end = std::max(sc.t_max, sc.spectrum_time);
    if (sc.single_mode) {
        GridDiagnostics d = validate_grid(sc.grid(), t_end, 0.0);
        d.bandwidth_ok = true; // a single mode makes no continuum claim
        return d;
    }
    return validate_grid(sc.grid(), t_end, sc.gamma);
}

EffectiveRun run_effective(const Scenario& sc, kernels::Exec exec)
{
    EffectiveRun run;
    run.grid = sc.grid();
    run.h = assemble_hamiltonian(sc.params, run.grid, sc.dark_states);
    run.ww = ww_params(sc.params, run.grid);
    run.traj = propagate(sc, run.h, sc.sample_times(), exec);

    PointSummary& p = run.summary;
    p.model = "effective";
    p.n_atoms = sc.params.n_atoms;
    p.lambda0 = coupling_at(sc.params.coupling, sc.params.resonance());
    p.n_modes = static_cast<int>(run.grid.size());
    p.bandwidth = run.grid.bandwidth();
    p.spacing = run.grid.spacing;
    p.gamma_formula = run.ww.gamma;
    p.gamma_fit = sc.single_mode ? std::nullopt : fitted_rate(run.traj, run.ww.gamma);
    const ShiftEstimate shift = frequency_shift_estimate(sc.params, run.grid);
    p.delta = shift.delta;
    p.shift_symmetric = shift.symmetric;
    p.final_ground = std::norm(run.traj.samples.back().ground());
    p.final_concurrence = final_concurrence(run.traj);
    p.grid = check_grid(sc);
    return run;
}

FullRun run_full(const Scenario& sc, double detuning2, const std::vector<double>& times,
                 kernels::Exec exec)
{
    FullRun run;
    run.fp = sc.full_params(detuning2);
    run.grid = sc.full_grid(run.fp);
    run.h = assemble_full_hamiltonian(run.fp, run.grid);
    run.traj = propagate(sc, run.h, times, exec);

    PointSummary& p = run.summary;
    p.model = "full";
    p.n_atoms = run.fp.n_atoms;
    const double w_res = shifted_resonance(run.fp);
    p.lambda0 = std::abs(effective_coupling(run.fp, w_res));
    p.n_modes = static_cast<int>(run.grid.size());
    p.bandwidth = run.grid.bandwidth();
    p.spacing = run.grid.spacing;
    p.detuning2 = detuning2;
    p.gamma_formula = two_pi * run.grid.density * p.n_atoms * p.lambda0 * p.lambda0;
    p.gamma_fit = sc.single_mode ? std::nullopt : fitted_rate(run.traj, p.gamma_formula);
    p.final_ground = std::norm(run.traj.samples.back().ground());
    p.final_concurrence = final_concurrence(run.traj);
    for (const auto& s : run.traj.samples)
        p.max_intermediate = std::max(p.max_intermediate, std::norm(s.intermediate()));
    p.grid = sc.single_mode ? check_grid(sc)
                            : validate_grid(run.grid, std::max(sc.t_max, sc.spectrum_time),
                                            p.gamma_formula);
    return run;
}

PointSummary summarize_point(const Scenario& sc, kernels::Exec exec)
{
    if (sc.model == ModelKind::effective)
        return run_effective(sc, exec).summary;
    return run_full(sc, *sc.detuning2, sc.sample_times(), exec).summary;
}

CompareResult run_compare(const Scenario& sc, bool order_ladder, kernels::Exec exec)
{
    CompareResult c;
    const ModeGrid grid = sc.grid();
    const HamiltonianMatrix h = assemble_hamiltonian(sc.params, grid, sc.dark_states);
    const WWParams ww = ww_params(sc.params, grid);
    c.gamma = ww.gamma;
    c.times = sc.sample_times();
    c.expm = SpectralPropagator(h, exec).evolve(AmplitudeState::initial(h.layout), c.times);
    c.rk4 = rk4_on_samples(h, sc.dt, sc.t_max, sc.samples - 1, exec);
    c.analytic = closed_form_trajectory(c.times, sc.params, grid, ww);

    auto sup_c0 = [&](const Trajectory& a) {
        double e = 0.0;
        for (std::size_t s = 0; s < c.times.size(); ++s)
            e = std::max(e, std::abs(a.samples[s].ground() - c.expm.samples[s].ground()));
        return e;
    };
    c.sup_rk4_expm = sup_c0(c.rk4);
    for (std::size_t s = 0; s < c.times.size(); ++s) {
        const double pa = std::norm(c.analytic.samples[s].ground());
        c.sup_expm_analytic =
            std::max(c.sup_expm_analytic, std::abs(std::norm(c.expm.samples[s].ground()) - pa));
        c.sup_rk4_analytic =
            std::max(c.sup_rk4_analytic, std::abs(std::norm(c.rk4.samples[s].ground()) - pa));
    }
    c.max_norm_error_expm = max_norm_error(c.expm);
    c.max_norm_error_rk4 = max_norm_error(c.rk4);

    c.rk4_order = std::numeric_limits<double>::quiet_NaN();
    if (order_ladder) {
        // steps snap to divide the sample interval, so rungs are only nominal halvings
        c.ladder_dt = {c.rk4.dt};
        c.ladder_error = {c.sup_rk4_expm};
        for (double nominal : {sc.dt / 2.0, sc.dt / 4.0}) {
            const Trajectory t = rk4_on_samples(h, nominal, sc.t_max, sc.samples - 1, exec);
            c.ladder_dt.push_back(t.dt);
            c.ladder_error.push_back(sup_c0(t));
        }
        double sum = 0.0;
        for (std::size_t i = 1; i < c.ladder_error.size(); ++i)
            sum += std::log(c.ladder_error[i - 1] / c.ladder_error[i]) /
                   std::log(c.ladder_dt[i - 1] / c.ladder_dt[i]);
        c.rk4_order = sum / static_cast<double>(c.ladder_error.size() - 1);
    }
    return c;
}

std::vector<LadderPoint> run_ladder(const Scenario& sc, kernels::Exec exec)
{
    Scenario exact = sc;
    exact.method = Method::expm;
    std::vector<LadderPoint> out;
    for (double d2 : sc.ladder_detunings) {
        const auto times =
            merge_times(sc.sample_times(), linspace(0.0, 2.0 * two_pi / std::abs(d2), 129));
        FullRun full = run_full(exact, d2, times, exec);
        const HamiltonianMatrix hc = assemble_comparison_hamiltonian(full.fp, full.grid);
        const Trajectory eff =
            SpectralPropagator(hc, exec).evolve(AmplitudeState::initial(hc.layout), times);
        LadderPoint p;
        p.detuning2 = d2;
        p.fp = full.fp;
        p.report = adiabaticity_report(full.traj, eff, full.fp, full.grid);
        out.push_back(std::move(p));
    }
    return out;
}

fs::path output_directory(const CommandOptions& opts, const Scenario& sc)
{
    if (opts.out_dir && !opts.out_dir->empty())
        return *opts.out_dir;
    if (const char* env = std::getenv("RAMAN_OUT_DIR"); env && *env)
        return env;
    if (!sc.output_dir.empty())
        return sc.output_dir;
    return "out";
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Session s = open_session(opts, "simulate");
        const Scenario& sc = s.sc;
        const GridDiagnostics diag = check_grid(sc);
        if (!grid_gate(s, diag, err))
            return static_cast<int>(exit_grid_failure);

        json summary = {
            {"command", "simulate"},
            {"config_digest", hex_digest(s.raw.digest)},
            {"preset", sc.preset},
            {"model", to_string(sc.model)},
            {"method", to_string(sc.method)},
            {"frequency_unit", {{"label", sc.params.unit.label}, {"rad_per_s", sc.params.unit.rad_per_s}}},
            {"grid_validation", to_json(diag)},
        };

        if (sc.model != ModelKind::full) {
            const EffectiveRun run = run_effective(sc);
            write_text(s.file("trajectory.csv"), trajectory_csv(sc, run.traj));
            const AmplitudeState late = SpectralPropagator(run.h)
                                            .evolve(AmplitudeState::initial(run.h.layout),
                                                    std::vector<double>{sc.spectrum_time})
                                            .samples.front();
            const SpectrumSeries spec = stokes_spectrum(late, run.grid, run.ww.gamma);
            write_text(s.file("spectrum.csv"), spectrum_csv(sc, spec));
            summary["effective"] = to_json(run.summary);
            summary["effective"]["max_norm_error"] = max_norm_error(run.traj);
            summary["spectrum"] = spectrum_report(spec, sc.spectrum_time, run.ww.gamma,
                                                  sc.params.resonance());
            out << "effective: gamma_formula = " << num(run.summary.gamma_formula);
            if (run.summary.gamma_fit)
                out << ", gamma_fit = " << num(*run.summary.gamma_fit) << " (ratio "
                    << num(*run.summary.gamma_fit / run.summary.gamma_formula) << ")";
            out << ", delta = " << num(run.summary.delta) << ", final concurrence = "
                << num(run.summary.final_concurrence) << "\n";
        }
        if (sc.model != ModelKind::effective) {
            const FullRun run = run_full(sc, *sc.detuning2, sc.sample_times());
            const std::string name =
                sc.model == ModelKind::full ? "trajectory.csv" : "trajectory_full.csv";
            write_text(s.file(name), trajectory_csv(sc, run.traj));
            summary["full"] = to_json(run.summary);
            summary["full"]["max_norm_error"] = max_norm_error(run.traj);
            summary["full"]["g_p"] = run.fp.g_p;
            if (sc.model == ModelKind::full) {
                const AmplitudeState late = SpectralPropagator(run.h)
                                                .evolve(AmplitudeState::initial(run.h.layout),
                                                        std::vector<double>{sc.spectrum_time})
                                                .samples.front();
                const SpectrumSeries spec =
                    stokes_spectrum(late, run.grid, run.summary.gamma_formula);
                write_text(s.file("spectrum.csv"), spectrum_csv(sc, spec));
                summary["spectrum"] = spectrum_report(spec, sc.spectrum_time,
                                                      run.summary.gamma_formula,
                                                      shifted_resonance(run.fp));
            }
            out << "full: gamma_formula = " << num(run.summary.gamma_formula)
                << ", max |b1|^2 = " << num(run.summary.max_intermediate) << "\n";
        }
        write_text(s.file("summary.json"), summary.dump(2) + "\n");
        s.write_meta();
        out << "wrote " << s.dir.string() << "\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Session s = open_session(opts, "compare");
        const Scenario& sc = s.sc;
        const GridDiagnostics diag = check_grid(sc);
        if (!grid_gate(s, diag, err))
            return static_cast<int>(exit_grid_failure);

        const CompareResult c = run_compare(sc);
        std::ostringstream csv;
        csv << units_comment(sc);
        csv << "t,p0_expm,p0_rk4,p0_analytic,dev_c0_rk4_expm,dev_p0_expm_analytic,"
               "dev_p0_rk4_analytic\n";
        for (std::size_t i = 0; i < c.times.size(); ++i) {
            const cd e = c.expm.samples[i].ground();
            const cd r = c.rk4.samples[i].ground();
            const double pe = std::norm(e), pr = std::norm(r);
            const double pa = std::norm(c.analytic.samples[i].ground());
            csv << num(c.times[i]) << ',' << num(pe) << ',' << num(pr) << ',' << num(pa) << ','
                << num(std::abs(r - e)) << ',' << num(std::abs(pe - pa)) << ','
                << num(std::abs(pr - pa)) << "\n";
        }
        write_text(s.file("compare.csv"), csv.str());

        const bool v1 = c.sup_rk4_expm < 1e-6;
        const bool v2 = std::max(c.sup_expm_analytic, c.sup_rk4_analytic) < 0.05;
        const bool v3 = c.rk4_order >= 3.8 && c.rk4_order <= 4.2;
        out << "verdict rk4_vs_expm: sup|dC0| = " << num(c.sup_rk4_expm) << " (< 1e-6) "
            << (v1 ? "PASS" : "FAIL") << "\n";
        out << "verdict numeric_vs_analytic: sup|dP0| = "
            << num(std::max(c.sup_expm_analytic, c.sup_rk4_analytic)) << " (< 0.05) "
            << (v2 ? "PASS" : "FAIL") << "\n";
        out << "verdict rk4_order: " << num(c.rk4_order) << " (in [3.8, 4.2]) "
            << (v3 ? "PASS" : "FAIL") << "\n";

        json ladder = json::array();
        for (std::size_t i = 0; i < c.ladder_dt.size(); ++i)
            ladder.push_back({{"dt", c.ladder_dt[i]}, {"sup_dev_c0", c.ladder_error[i]}});
        const json summary = {
            {"command", "compare"},
            {"config_digest", hex_digest(s.raw.digest)},
            {"gamma_formula", c.gamma},
            {"dt", sc.dt},
            {"rk4_step_used", c.rk4.dt},
            {"sup_dev_c0_rk4_expm", c.sup_rk4_expm},
            {"sup_dev_p0_expm_analytic", c.sup_expm_analytic},
            {"sup_dev_p0_rk4_analytic", c.sup_rk4_analytic},
            {"max_norm_error_expm", c.max_norm_error_expm},
            {"max_norm_error_rk4", c.max_norm_error_rk4},
            {"rk4_order", std::isfinite(c.rk4_order) ? json(c.rk4_order) : json(nullptr)},
            {"rk4_ladder", ladder},
            {"grid_validation", to_json(diag)},
            {"verdicts",
             {{"rk4_vs_expm", v1}, {"numeric_vs_analytic", v2}, {"rk4_order", v3}}},
        };
        write_text(s.file("summary.json"), summary.dump(2) + "\n");
        s.write_meta();
        out << "wrote " << s.dir.string() << "\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_validate_adiabatic(const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Session s = open_session(opts, "validate-adiabatic");
        const Scenario& sc = s.sc;
        if (sc.ladder_detunings.empty())
            throw ConfigError(s.raw.origin +
                              ": adiabatic ladder is empty (set adiabatic.detuning2, or a "
                              "non-zero light shift for adiabatic.ratios)");
        const GridDiagnostics diag = check_grid(sc);
        if (!grid_gate(s, diag, err))
            return static_cast<int>(exit_grid_failure);

        const std::vector<LadderPoint> ladder = run_ladder(sc);
        std::ostringstream csv;
        csv << units_comment(sc);
        csv << "detuning2,coupling_ratio,g_p,max_p1,bound_p1,mean_p1,discrepancy,"
               "bound_discrepancy,ground_sup_deviation,regime_ok,p1_ok,discrepancy_ok\n";
        json points = json::array();
        bool all_ok = true;
        for (const auto& p : ladder) {
            const auto& r = p.report;
            csv << num(p.detuning2) << ',' << num(r.coupling_ratio) << ',' << num(p.fp.g_p) << ','
                << num(r.max_intermediate_population) << ',' << num(r.intermediate_bound) << ','
                << num(r.mean_intermediate_population) << ','
                << num(r.max_population_discrepancy) << ',' << num(r.discrepancy_bound) << ','
                << num(r.ground_sup_deviation) << ',' << (r.regime_ok ? 1 : 0) << ','
                << (r.intermediate_ok ? 1 : 0) << ','
                << (r.discrepancy_ok ? 1 : 0) << "\n";
            json j = to_json(r);
            j["detuning2"] = p.detuning2;
            j["g_p"] = p.fp.g_p;
            points.push_back(j);
            all_ok = all_ok && r.passed();
            out << "detuning2 = " << num(p.detuning2) << ": ratio " << num(r.coupling_ratio)
                << ", max|b1|^2 " << num(r.max_intermediate_population) << " (bound "
                << num(r.intermediate_bound) << "), discrepancy "
                << num(r.max_population_discrepancy) << " " << (r.passed() ? "PASS" : "FAIL")
                << "\n";
        }
        write_text(s.file("adiabatic.csv"), csv.str());

        // Discrepancy must fall as the coupling ratio falls.
        std::vector<const LadderPoint*> by_ratio;
        for (const auto& p : ladder)
            by_ratio.push_back(&p);
        std::sort(by_ratio.begin(), by_ratio.end(), [](auto* a, auto* b) {
            return a->report.coupling_ratio > b->report.coupling_ratio;
        });
        bool monotone = true;
        for (std::size_t i = 1; i < by_ratio.size(); ++i)
            monotone = monotone && by_ratio[i]->report.max_population_discrepancy <
                                       by_ratio[i - 1]->report.max_population_discrepancy;
        const bool all_zero = std::all_of(ladder.begin(), ladder.end(), [](const auto& p) {
            return p.report.max_population_discrepancy == 0.0;
        });
        out << "verdict discrepancy_monotone: " << (monotone || all_zero ? "PASS" : "FAIL")
            << "\n";
        out << "verdict bounds: " << (all_ok ? "PASS" : "FAIL") << "\n";

        const json summary = {
            {"command", "validate-adiabatic"},
            {"config_digest", hex_digest(s.raw.digest)},
            {"light_shift", sc.light_shift},
            {"points", points},
            {"discrepancy_monotone", monotone || all_zero},
            {"all_bounds_ok", all_ok},
            {"grid_validation", to_json(diag)},
        };
        write_text(s.file("summary.json"), summary.dump(2) + "\n");
        s.write_meta();
        out << "wrote " << s.dir.string() << "\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Session s = open_session(opts, "sweep");
        const Scenario& sc = s.sc;
        if (!sc.sweep_axis)
            throw ConfigError(s.raw.origin + ": sweep needs sweep.axis and sweep.values");

        const std::size_t n = sc.sweep_values.size();
        std::vector<Scenario> points;
        points.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            try {
                points.push_back(resolve(sweep_point(s.raw, sc, sc.sweep_values[i])));
            } catch (const ConfigError& e) {
                throw ConfigError("sweep point " + std::to_string(i) + " (" +
                                  num(sc.sweep_values[i]) + "): " + e.what());
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const GridDiagnostics d = check_grid(points[i]);
            if (!d.passed()) {
                err << "sweep point " << i << ": ";
                if (!grid_gate(s, d, err))
                    return static_cast<int>(exit_grid_failure);
            }
        }

        const int jobs = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
        const kernels::Exec inner = jobs > 1 ? kernels::Exec::serial : kernels::Exec::parallel;
        std::vector<std::optional<PointSummary>> rows(n);
        std::vector<std::string> errors(n);
        std::vector<double> runtimes(n, 0.0);
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                rows[i] = summarize_point(points[i], inner);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            runtimes[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }

        std::ostringstream csv;
        csv << units_comment(sc);
        csv << "index,axis,value,model,n_atoms,lambda0,n_modes,bandwidth,spacing,detuning2,"
               "gamma_formula,gamma_fit,gamma_fit_ratio,delta,final_ground,final_concurrence,"
               "max_p1,grid_ok,status\n";
        bool failed = false;
        for (std::size_t i = 0; i < n; ++i) {
            csv << i << ',' << to_string(*sc.sweep_axis) << ',' << num(sc.sweep_values[i]) << ',';
            if (!rows[i]) {
                failed = true;
                err << "sweep point " << i << " failed: " << errors[i] << "\n";
                csv << ",,,,,,,,,,,,,,,error\n";
                continue;
            }
            const PointSummary& p = *rows[i];
            const std::string fit = p.gamma_fit ? num(*p.gamma_fit) : "";
            const std::string ratio =
                p.gamma_fit && p.gamma_formula > 0.0 ? num(*p.gamma_fit / p.gamma_formula) : "";
            csv << p.model << ',' << p.n_atoms << ',' << num(p.lambda0) << ',' << p.n_modes << ','
                << num(p.bandwidth) << ',' << num(p.spacing) << ',' << num(p.detuning2) << ','
                << num(p.gamma_formula) << ',' << fit << ',' << ratio << ',' << num(p.delta)
                << ',' << num(p.final_ground) << ',' << num(p.final_concurrence) << ','
                << num(p.max_intermediate) << ',' << (p.grid.passed() ? 1 : 0) << ",ok\n";
            out << "point " << i << " (" << to_string(*sc.sweep_axis) << " = "
                << num(sc.sweep_values[i]) << "): gamma_formula " << num(p.gamma_formula)
                << ", gamma_fit " << (fit.empty() ? "n/a" : fit) << "\n";
        }
        write_text(s.file("sweep.csv"), csv.str());
        s.extra_meta["jobs"] = jobs;
        s.extra_meta["point_runtimes_s"] = runtimes;
        s.write_meta();
        out << "wrote " << s.dir.string() << "\n";
        return static_cast<int>(failed ? exit_numerical_failure : exit_ok);
    });
}

} // namespace raman
