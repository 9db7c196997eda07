#include "raman/core_model.hpp"

#include "raman/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace raman {

CouplingProfile CouplingProfile::flat(double lambda0)
{
    CouplingProfile p;
    p.kind = ProfileKind::flat;
    p.lambda0 = lambda0;
    p.validate();
    return p;
}

CouplingProfile CouplingProfile::lorentzian_window(double lambda0, double center, double width)
{
    CouplingProfile p;
    p.kind = ProfileKind::lorentzian_window;
    p.lambda0 = lambda0;
    p.center = center;
    p.width = width;
    p.validate();
    return p;
}

CouplingProfile CouplingProfile::user_table(std::vector<std::pair<double, double>> table)
{
    CouplingProfile p;
    p.kind = ProfileKind::user_table;
    p.table = std::move(table);
    p.validate();
    return p;
}

CouplingProfile CouplingProfile::scaled(double factor) const
{
    require(factor >= 0.0 && std::isfinite(factor), Errc::invalid_argument,
            "coupling scale factor must be finite and non-negative");
    CouplingProfile p = *this;
    p.lambda0 *= factor;
    for (auto& [w, l] : p.table)
        l *= factor;
    return p;
}

void CouplingProfile::validate() const
{
    switch (kind) {
    case ProfileKind::flat:
        require(lambda0 >= 0.0 && std::isfinite(lambda0), Errc::invalid_argument,
                "lambda0 must be finite and >= 0");
        break;
    case ProfileKind::lorentzian_window:
        require(lambda0 >= 0.0 && std::isfinite(lambda0), Errc::invalid_argument,
                "lambda0 must be finite and >= 0");
        require(width > 0.0 && std::isfinite(width), Errc::invalid_argument,
                "lorentzian window width must be > 0");
        break;
    case ProfileKind::user_table:
        require(table.size() >= 2, Errc::invalid_argument, "coupling table needs >= 2 points");
        for (std::size_t i = 0; i < table.size(); ++i) {
            require(table[i].second >= 0.0 && std::isfinite(table[i].second),
                    Errc::invalid_argument, "coupling table values must be >= 0");
            if (i > 0)
                require(table[i].first > table[i - 1].first, Errc::invalid_argument,
                        "coupling table frequencies must be strictly increasing");
        }
        break;
    }
}

double coupling_at(const CouplingProfile& profile, double omega)
{
    switch (profile.kind) {
    case ProfileKind::flat:
        return profile.lambda0;
    case ProfileKind::lorentzian_window: {
        const double x = (omega - profile.center) / profile.width;
        return profile.lambda0 / std::sqrt(1.0 + x * x);
    }
    case ProfileKind::user_table: {
        const auto& t = profile.table;
        if (!(omega >= t.front().first && omega <= t.back().first)) {
            std::ostringstream os;
            os << "omega = " << omega << " outside coupling table [" << t.front().first << ", "
               << t.back().first << "]";
            fail(Errc::out_of_support, os.str());
        }
        auto hi = std::upper_bound(t.begin(), t.end(), omega,
                                   [](double w, const auto& row) { return w < row.first; });
        if (hi == t.end())
            return t.back().second;
        auto lo = hi - 1;
        const double s = (omega - lo->first) / (hi->first - lo->first);
        return lo->second + s * (hi->second - lo->second);
    }
    }
    return 0.0;
}

void SystemParams::validate() const
{
    require(omega_p > 0.0 && std::isfinite(omega_p), Errc::invalid_argument, "omega_p must be > 0");
    require(omega_31 >= 0.0 && std::isfinite(omega_31), Errc::invalid_argument,
            "omega_31 must be >= 0");
    require(n_atoms >= 2, Errc::invalid_argument, "n_atoms must be >= 2");
    require(resonance() > 0.0, Errc::invalid_argument,
            "two-photon resonance omega_p - omega_31 must be > 0");
    require(unit.rad_per_s > 0.0, Errc::invalid_argument, "frequency unit must be > 0");
    coupling.validate();
}

double ModeGrid::recurrence_time() const
{
    if (spacing <= 0.0)
        return std::numeric_limits<double>::infinity();
    return 2.0 * std::numbers::pi / spacing;
}

bool ModeGrid::contains(double omega) const
{
    if (frequencies.empty())
        return false;
    const double slack = 1e-12 * std::max(1.0, std::abs(omega));
    return omega >= frequencies.front() - slack && omega <= frequencies.back() + slack;
}

ModeGrid build_mode_grid_about(const CouplingProfile& profile, double center, double bandwidth,
                               int n_modes)
{
    require(bandwidth > 0.0 && std::isfinite(bandwidth), Errc::invalid_argument,
            "bandwidth must be > 0");
    require(n_modes >= 3, Errc::invalid_argument, "n_modes must be >= 3");
    const double lo = center - 0.5 * bandwidth;
    if (lo <= 0.0) {
        std::ostringstream os;
        os << "lowest Stokes frequency " << lo << " is not positive";
        fail(Errc::unphysical_grid, os.str());
    }

    ModeGrid g;
    g.spacing = bandwidth / (n_modes - 1);
    g.density = 1.0 / g.spacing;
    g.frequencies.resize(n_modes);
    g.couplings.resize(n_modes);
    const int half = (n_modes - 1) / 2;
    for (int k = 0; k < n_modes; ++k) {
        // Symmetric offsets about the centre so mirrored modes cancel exactly.
        const double offset = (n_modes % 2 == 1) ? (k - half) * g.spacing
                                                 : (k - half - 0.5) * g.spacing;
        g.frequencies[k] = center + offset;
    }
    for (int k = 0; k < n_modes; ++k) {
        const double c = coupling_at(profile, g.frequencies[k]);
        require(c >= 0.0, Errc::invalid_argument, "coupling profile returned a negative value");
        g.couplings[k] = c;
    }
    return g;
}

ModeGrid build_mode_grid(const SystemParams& params, double bandwidth, int n_modes)
{
    params.validate();
    return build_mode_grid_about(params.coupling, params.resonance(), bandwidth, n_modes);
}

ModeGrid single_mode_grid(double omega, double coupling)
{
    require(omega > 0.0, Errc::unphysical_grid, "mode frequency must be > 0");
    require(coupling >= 0.0, Errc::invalid_argument, "coupling must be >= 0");
    ModeGrid g;
    g.frequencies = {omega};
    g.couplings = {coupling};
    return g;
}

GridDiagnostics validate_grid(const ModeGrid& grid, double t_max, double gamma_estimate)
{
    GridDiagnostics d;
    d.t_max = t_max;
    d.recurrence_time = grid.recurrence_time();
    d.bandwidth = grid.bandwidth();
    d.gamma_estimate = gamma_estimate;
    d.bandwidth_ratio = gamma_estimate > 0.0 ? d.bandwidth / gamma_estimate
                                             : std::numeric_limits<double>::infinity();
    d.recurrence_ok = d.recurrence_time > 2.0 * t_max;
    d.bandwidth_ok = d.bandwidth >= 20.0 * gamma_estimate * (1.0 - 1e-9);
    return d;
}

Preset rb85_preset()
{
    constexpr double ghz = 2.0 * std::numbers::pi * 1e9;
    constexpr double c_light = 299792458.0;
    constexpr double stokes_wavelength = 780e-9;
    const double stokes_ghz = c_light / stokes_wavelength / 1e9;

    Preset p;
    p.name = "rb85";
    p.params.omega_31 = 3.0;
    p.params.omega_p = stokes_ghz + p.params.omega_31;
    p.params.n_atoms = 2;
    p.params.unit = {ghz, "2pi*GHz"};
    // Placeholder coupling; scenarios set the rate explicitly.
    p.params.coupling = CouplingProfile::flat(0.0);
    p.metadata = {
        {"atom", "85Rb"},
        {"level_1", "5S1/2 lower hyperfine"},
        {"level_2", "5P3/2"},
        {"level_3", "5S1/2 upper hyperfine"},
        {"omega_31", "2pi x 3 GHz"},
        {"stokes_wavelength_nm", "780"},
        {"level3_lifetime_ratio_min", "10"},
    };
    return p;
}

} // namespace raman
