#pragma once

// Physical parameters, coupling profiles and the discretized Stokes continuum.
// Units: hbar = 1, all frequencies in dimensionless multiples of a declared
// reference (FrequencyUnit).

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace raman {

struct FrequencyUnit {
    double rad_per_s = 1.0;
    std::string label = "dimensionless";
};

enum class ProfileKind { flat, lorentzian_window, user_table };

/// Effective two-photon coupling lambda(omega) for a single atom.
struct CouplingProfile {
    ProfileKind kind = ProfileKind::flat;
    double lambda0 = 0.0;
    // lorentzian_window: lambda(w)^2 = lambda0^2 / (1 + ((w - center) / width)^2)
    double center = 0.0;
    double width = 1.0;
    // user_table: (omega, lambda) pairs, strictly increasing omega, linear interpolation.
    std::vector<std::pair<double, double>> table;

    static CouplingProfile flat(double lambda0);
    static CouplingProfile lorentzian_window(double lambda0, double center, double width);
    static CouplingProfile user_table(std::vector<std::pair<double, double>> table);

    /// Same shape, every coupling value multiplied by `factor` (>= 0).
    CouplingProfile scaled(double factor) const;

    void validate() const;
};

double coupling_at(const CouplingProfile& profile, double omega);

struct SystemParams {
    double omega_p = 10.0;
    double omega_31 = 3.0;
    int n_atoms = 2;
    CouplingProfile coupling;
    FrequencyUnit unit;

    /// Two-photon (Raman) resonance omega_p - omega_31 for the Stokes photon.
    double resonance() const { return omega_p - omega_31; }

    void validate() const;
};

struct ModeGrid {
    std::vector<double> frequencies;
    std::vector<double> couplings;
    double spacing = 0.0;
    double density = 0.0; // 1 / spacing; zero for a single isolated mode

    std::size_t size() const { return frequencies.size(); }
    double bandwidth() const { return size() < 2 ? 0.0 : frequencies.back() - frequencies.front(); }
    double midpoint() const { return 0.5 * (frequencies.front() + frequencies.back()); }
    /// 2 pi / spacing; infinite for a single mode.
    double recurrence_time() const;
    bool contains(double omega) const;
};

/// Uniform grid of `n_modes` points spanning [res - bw/2, res + bw/2] with
/// res = params.resonance(); couplings sampled from params.coupling.
ModeGrid build_mode_grid(const SystemParams& params, double bandwidth, int n_modes);

/// Same construction centred on an arbitrary frequency.
ModeGrid build_mode_grid_about(const CouplingProfile& profile, double center, double bandwidth,
                               int n_modes);

/// One discrete Stokes mode and no continuum (density 0); used by the
/// two-state toy scenario.
ModeGrid single_mode_grid(double omega, double coupling);

struct GridDiagnostics {
    double t_max = 0.0;
    double recurrence_time = 0.0;
    double bandwidth = 0.0;
    double gamma_estimate = 0.0;
    double bandwidth_ratio = 0.0; // bandwidth / gamma_estimate (inf for gamma = 0)
    bool recurrence_ok = false;   // 2 pi / spacing > 2 t_max
    bool bandwidth_ok = false;    // bandwidth >= 20 gamma_estimate

    bool passed() const { return recurrence_ok && bandwidth_ok; }
};

GridDiagnostics validate_grid(const ModeGrid& grid, double t_max, double gamma_estimate);

struct Preset {
    std::string name;
    SystemParams params;
    std::map<std::string, std::string> metadata;
};

/// 85Rb Raman scheme: hyperfine splitting 2 pi x 3 GHz, Stokes line at 780 nm.
/// Dimensionless frequencies are in units of 2 pi x 1 GHz.
Preset rb85_preset();

} // namespace raman
