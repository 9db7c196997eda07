#pragma once

// Closed-form Wigner-Weisskopf solution of the effective model: decay rate,
// pole shift, steady Stokes amplitudes and the full time-dependent state.
// Couplings include the collective sqrt(n_atoms) factor that appears in the
// equations of motion.

#include "raman/core_model.hpp"
#include "raman/effective_dynamics.hpp"

#include <complex>
#include <span>

namespace raman {

struct WWParams {
    double gamma = 0.0;
    double delta = 0.0;
    double omega_p = 0.0;
    double omega_31 = 0.0;
    int n_atoms = 2;
};

/// gamma = 2 pi p n_atoms lambda(omega_res)^2.
double decay_rate(const SystemParams& params, const ModeGrid& grid);

struct ShiftEstimate {
    double delta = 0.0;
    bool symmetric = true; // false: grid not mirror-symmetric about omega_res,
                           // unpaired terms summed directly (lower accuracy)
};

/// Delta = -PV sum_k n_atoms lambda_k^2 / (omega_k - omega_res), evaluated by
/// pairing modes mirrored about omega_res. Only the grid window contributes.
ShiftEstimate frequency_shift_estimate(const SystemParams& params, const ModeGrid& grid);
double frequency_shift(const SystemParams& params, const ModeGrid& grid);

WWParams ww_params(const SystemParams& params, const ModeGrid& grid);

/// J_k = -i sqrt(n) lambda_k / (gamma/2 - i (omega_k + omega_31 - omega_p - Delta)).
std::complex<double> steady_amplitude(double omega_k, const WWParams& ww, double lambda_k);

/// C0(t) = exp(-gamma t / 2) exp(-i (omega_p + Delta) t),
/// C_k(t) = J_k (exp(-i (omega_k + omega_31) t) - C0(t)).
AmplitudeState closed_form_state(double t, const SystemParams& params, const ModeGrid& grid,
                                 const WWParams& ww);

Trajectory closed_form_trajectory(std::span<const double> times, const SystemParams& params,
                                  const ModeGrid& grid, const WWParams& ww);

} // namespace raman
