#include "raman/full_model.hpp"

#include "raman/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace raman {

void FullParams::validate() const
{
    require(g_p >= 0.0 && std::isfinite(g_p), Errc::invalid_argument, "g_p must be >= 0");
    require(std::isfinite(detuning2), Errc::invalid_argument, "detuning2 must be finite");
    require(omega_p > 0.0, Errc::invalid_argument, "omega_p must be > 0");
    require(omega_31 >= 0.0, Errc::invalid_argument, "omega_31 must be >= 0");
    require(omega_p - omega_31 > 0.0, Errc::invalid_argument,
            "two-photon resonance omega_p - omega_31 must be > 0");
    require(n_atoms >= 2, Errc::invalid_argument, "n_atoms must be >= 2");
    g_s_profile.validate();
}

HamiltonianMatrix assemble_full_hamiltonian(const FullParams& fp, const ModeGrid& grid,
                                            std::size_t max_dim)
{
    fp.validate();
    require(grid.size() >= 1, Errc::invalid_argument, "empty mode grid");
    HamiltonianMatrix h;
    h.layout = {BasisKind::full, grid.size()};
    const std::size_t dim = h.layout.dim();
    if (dim > max_dim) {
        std::ostringstream os;
        os << "Hamiltonian dimension " << dim << " exceeds limit " << max_dim;
        fail(Errc::too_large, os.str());
    }
    h.entries = Eigen::MatrixXd::Zero(dim, dim);
    h.entries(0, 0) = fp.omega_p;
    h.entries(1, 1) = fp.omega_p + fp.detuning2;
    h.entries(0, 1) = h.entries(1, 0) = std::sqrt(static_cast<double>(fp.n_atoms)) * fp.g_p;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 + k);
        h.entries(i, i) = grid.frequencies[k] + fp.omega_31;
        h.entries(1, i) = h.entries(i, 1) = coupling_at(fp.g_s_profile, grid.frequencies[k]);
    }
    return h;
}

double effective_coupling(const FullParams& fp, double omega_k)
{
    if (fp.detuning2 == 0.0)
        fail(Errc::division_by_zero,
             "adiabatic elimination is undefined at zero intermediate detuning");
    return fp.g_p * coupling_at(fp.g_s_profile, omega_k) / fp.detuning2;
}

double max_intermediate_coupling(const FullParams& fp, const ModeGrid& grid)
{
    double g = std::sqrt(static_cast<double>(fp.n_atoms)) * fp.g_p;
    for (double w : grid.frequencies)
        g = std::max(g, coupling_at(fp.g_s_profile, w));
    return g;
}

double pump_light_shift(const FullParams& fp)
{
    if (fp.detuning2 == 0.0)
        fail(Errc::division_by_zero, "light shift is undefined at zero intermediate detuning");
    return fp.n_atoms * fp.g_p * fp.g_p / fp.detuning2;
}

double shifted_resonance(const FullParams& fp)
{
    const double bare = fp.omega_p - fp.omega_31 - pump_light_shift(fp);
    double w = bare;
    for (int it = 0; it < 3; ++it) {
        const double gs = coupling_at(fp.g_s_profile, w);
        w = bare + gs * gs / fp.detuning2;
    }
    return w;
}

SystemParams effective_system(const FullParams& fp)
{
    fp.validate();
    if (fp.detuning2 == 0.0)
        fail(Errc::division_by_zero,
             "adiabatic elimination is undefined at zero intermediate detuning");
    SystemParams p;
    p.omega_p = fp.omega_p;
    p.omega_31 = fp.omega_31;
    p.n_atoms = fp.n_atoms;
    p.coupling = fp.g_s_profile.scaled(fp.g_p / std::abs(fp.detuning2));
    return p;
}

HamiltonianMatrix assemble_comparison_hamiltonian(const FullParams& fp, const ModeGrid& grid)
{
    fp.validate();
    require(grid.size() >= 1, Errc::invalid_argument, "empty mode grid");
    const double d2 = fp.detuning2;
    const double shift0 = pump_light_shift(fp);
    const double collective = std::sqrt(static_cast<double>(fp.n_atoms));
    HamiltonianMatrix h;
    h.layout = {BasisKind::effective, grid.size()};
    const auto dim = static_cast<Eigen::Index>(h.layout.dim());
    h.entries = Eigen::MatrixXd::Zero(dim, dim);
    h.entries(0, 0) = fp.omega_p - shift0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(1 + k);
        const double w = grid.frequencies[k];
        const double gs = coupling_at(fp.g_s_profile, w);
        h.entries(i, i) = w + fp.omega_31 - gs * gs / d2;
        h.entries(0, i) = h.entries(i, 0) = collective * std::abs(effective_coupling(fp, w));
    }
    return h;
}

FullParams raman_parameters(const SystemParams& effective, const CouplingProfile& lambda,
                            double detuning2, double light_shift)
{
    if (detuning2 == 0.0)
        fail(Errc::division_by_zero, "intermediate detuning must be non-zero");
    FullParams fp;
    fp.omega_p = effective.omega_p;
    fp.omega_31 = effective.omega_31;
    fp.n_atoms = effective.n_atoms;
    fp.detuning2 = detuning2;
    fp.g_p = std::sqrt(std::abs(light_shift * detuning2) / effective.n_atoms);
    if (fp.g_p == 0.0) {
        fp.g_s_profile = lambda.scaled(0.0);
        require(lambda.kind != ProfileKind::flat || lambda.lambda0 == 0.0, Errc::invalid_argument,
                "a non-zero Raman coupling needs a non-zero pump light shift");
    } else {
        fp.g_s_profile = lambda.scaled(std::abs(detuning2) / fp.g_p);
    }
    return fp;
}

FullParams rescale_detuning(const FullParams& base, double detuning2)
{
    if (detuning2 == 0.0 || base.detuning2 == 0.0)
        fail(Errc::division_by_zero, "intermediate detuning must be non-zero");
    const double f = std::sqrt(std::abs(detuning2 / base.detuning2));
    FullParams fp = base;
    fp.detuning2 = detuning2;
    fp.g_p *= f;
    fp.g_s_profile = base.g_s_profile.scaled(f);
    return fp;
}

AdiabaticityReport adiabaticity_report(const Trajectory& full_traj, const Trajectory& eff_traj,
                                       const FullParams& fp, const ModeGrid& grid)
{
    if (fp.detuning2 == 0.0)
        fail(Errc::division_by_zero, "adiabaticity is undefined at zero intermediate detuning");
    require(full_traj.samples.size() == eff_traj.samples.size() && !full_traj.samples.empty(),
            Errc::invalid_argument, "trajectories have different sample counts");
    for (std::size_t s = 0; s < full_traj.samples.size(); ++s) {
        const double a = full_traj.samples[s].time;
        const double b = eff_traj.samples[s].time;
        require(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)), Errc::invalid_argument,
                "trajectories are not sampled at common times");
    }
    require(full_traj.samples.front().layout.kind == BasisKind::full &&
                eff_traj.samples.front().layout.kind != BasisKind::full,
            Errc::invalid_argument, "expected a full-model and an effective-model trajectory");

    AdiabaticityReport r;
    r.coupling_ratio = max_intermediate_coupling(fp, grid) / std::abs(fp.detuning2);
    r.intermediate_bound = 4.0 * r.coupling_ratio * r.coupling_ratio;
    r.discrepancy_bound = 10.0 * r.coupling_ratio;
    r.regime_ok = r.coupling_ratio <= 0.1 * (1.0 + 1e-9);

    double b1_integral = 0.0;
    double prev_b1 = 0.0;
    for (std::size_t s = 0; s < full_traj.samples.size(); ++s) {
        const auto& f = full_traj.samples[s];
        const auto& e = eff_traj.samples[s];
        const double b0 = std::norm(f.ground());
        const double b1 = std::norm(f.intermediate());
        const double bs = f.stokes().squaredNorm();
        const double c0 = std::norm(e.ground());
        const double cs = e.stokes().squaredNorm();
        r.max_intermediate_population = std::max(r.max_intermediate_population, b1);
        if (s > 0)
            b1_integral += 0.5 * (b1 + prev_b1) * (f.time - full_traj.samples[s - 1].time);
        prev_b1 = b1;
        const double disc = std::max({std::abs(b0 - c0), std::abs(bs - cs), b1});
        r.max_population_discrepancy = std::max(r.max_population_discrepancy, disc);
        r.ground_sup_deviation = std::max(r.ground_sup_deviation, std::abs(b0 - c0));
    }
    const double span = full_traj.samples.back().time - full_traj.samples.front().time;
    r.mean_intermediate_population = span > 0.0 ? b1_integral / span : prev_b1;
    r.intermediate_ok = r.max_intermediate_population <= r.intermediate_bound;
    r.discrepancy_ok = r.max_population_discrepancy <= r.discrepancy_bound;
    return r;
}

} // namespace raman
