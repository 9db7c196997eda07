#pragma once

// Un-eliminated three-level model in the symmetric single-excitation sector:
// psi0 = |1,1>|1_P>|vac>, psi1 = (|2,1> + |1,2>)/sqrt2 |0_P>|vac>,
// psi_k = (|3,1> + |1,3>)/sqrt2 |0_P>|1_k>. For n_atoms > 2 the same states
// generalize to the symmetric W-type combinations.

#include "raman/core_model.hpp"
#include "raman/effective_dynamics.hpp"

namespace raman {

struct FullParams {
    double g_p = 0.0;           // single-atom pump coupling on 1 <-> 2
    CouplingProfile g_s_profile; // single-atom Stokes couplings on 2 <-> 3
    double detuning2 = 0.0;     // E2 - E1 - omega_p
    double omega_p = 10.0;
    double omega_31 = 3.0;
    int n_atoms = 2;

    void validate() const;
};

/// Diagonal {omega_p, omega_p + detuning2, omega_Sk + omega_31}; psi1-psi0
/// coupling sqrt(n) g_p, psi_k-psi1 coupling g_Sk, no direct psi0-psi_k term.
/// Stokes couplings come from fp.g_s_profile at the grid frequencies.
HamiltonianMatrix assemble_full_hamiltonian(const FullParams& fp, const ModeGrid& grid,
                                            std::size_t max_dim = default_max_dim);

/// Large-detuning Raman coupling g_p g_S(omega) / detuning2.
double effective_coupling(const FullParams& fp, double omega_k);

/// Largest single coupling into psi1: max(sqrt(n) g_p, max_k g_Sk).
double max_intermediate_coupling(const FullParams& fp, const ModeGrid& grid);

/// Collective light shift of psi0, n g_p^2 / detuning2 (psi0 is pushed away
/// from psi1 by this amount).
double pump_light_shift(const FullParams& fp);

/// Stokes frequency at which the light-shifted two-photon resonance sits.
double shifted_resonance(const FullParams& fp);

/// Effective-model SystemParams whose coupling profile is effective_coupling
/// (magnitude; the overall sign is a gauge choice).
SystemParams effective_system(const FullParams& fp);

/// Effective Hamiltonian used for comparisons: couplings effective_coupling,
/// diagonals corrected by the second-order light shifts
/// (-n g_p^2 / d2 on psi0, -g_Sk^2 / d2 on psi_k).
HamiltonianMatrix assemble_comparison_hamiltonian(const FullParams& fp, const ModeGrid& grid);

/// Parameters for a given detuning with the Raman coupling profile `lambda`
/// and collective light shift held fixed: g_p = sqrt(|shift d2| / n),
/// g_S = lambda |d2| / g_p. Refuses detuning2 == 0.
FullParams raman_parameters(const SystemParams& effective, const CouplingProfile& lambda,
                            double detuning2, double light_shift);

/// Rescales a parameter set to a new detuning keeping g_p g_S / d2 fixed
/// (both couplings scale as sqrt(|d2|)).
FullParams rescale_detuning(const FullParams& base, double detuning2);

struct AdiabaticityReport {
    double coupling_ratio = 0.0;          // max coupling / |detuning2|
    double max_intermediate_population = 0.0; // max_t |b1|^2
    double mean_intermediate_population = 0.0;
    double max_population_discrepancy = 0.0;  // max_t max(|P0 diff|, |PS diff|)
    double ground_sup_deviation = 0.0;        // max_t | |b0|^2 - |C0|^2 |
    double intermediate_bound = 0.0;          // 4 ratio^2
    double discrepancy_bound = 0.0;           // 10 ratio
    bool regime_ok = false;           // |detuning2| >= 10 max coupling
    bool intermediate_ok = false;
    bool discrepancy_ok = false;

    bool passed() const { return regime_ok && intermediate_ok && discrepancy_ok; }
};

AdiabaticityReport adiabaticity_report(const Trajectory& full_traj, const Trajectory& eff_traj,
                                       const FullParams& fp, const ModeGrid& grid);

} // namespace raman
