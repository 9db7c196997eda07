#pragma once

// Populations, atomic density matrices, concurrence, Stokes spectrum and fits.

#include "raman/core_model.hpp"
#include "raman/effective_dynamics.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace raman {

struct PopulationSample {
    double time = 0.0;
    double ground = 0.0;       // |C0|^2
    double stokes = 0.0;       // sum_k |C_k|^2: Stokes photon emitted
    double intermediate = 0.0; // |b1|^2 (full model)
    double dark = 0.0;         // phi-block weight (extended basis)
    double norm = 0.0;
};

PopulationSample populations(const AmplitudeState& state);
std::vector<PopulationSample> populations(const Trajectory& traj);

/// Two-qubit state on {|1>, |3>} x {|1>, |3>}, basis order |11>, |13>, |31>, |33>.
struct DensityMatrix {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

    void validate(double tol = 1e-12) const;
};

struct AtomicDensity {
    DensityMatrix density;
    double projection_weight = 1.0; // weight inside {1,3} x {1,3} before renormalizing
};

/// Traces out the field. Effective layouts give
/// rho = |C0|^2 |11><11| + sum_k (C_k |psi+> + D_k |psi->)(...)^dagger;
/// level-2 amplitudes (psi1, phi1) lie outside the qubit space and only reduce
/// projection_weight. The state must have norm^2 within 1e-6 of 1.
AtomicDensity reduced_atomic_density(const AmplitudeState& state);

/// Density matrix conditioned on a detected Stokes photon (C0 dropped,
/// Stokes branch renormalized). Requires a non-zero Stokes weight.
DensityMatrix conditional_stokes_density(const AmplitudeState& state);

/// Wootters concurrence. The lambda_i are obtained as singular values of
/// tau = V^T (Y x Y) V with rho = V V^dagger from the spectral decomposition.
double concurrence(const DensityMatrix& rho);

struct SpectrumSeries {
    std::vector<double> omega;
    std::vector<double> weight;
    double total = 0.0;
    bool early = false; // gamma t < 10 when gamma was supplied
};

SpectrumSeries stokes_spectrum(const AmplitudeState& state, const ModeGrid& grid,
                               double gamma = 0.0);

struct ExponentialFit {
    double rate = 0.0;
    double amplitude = 0.0;
    double rms_residual = 0.0; // in ln P
};

/// Least-squares line through (t, ln P). Needs >= 10 samples, all P > 0.
ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> p);

/// Exponential fit of |C0|^2 restricted to t in [t_lo, t_hi].
ExponentialFit fit_ground_decay(const Trajectory& traj, double t_lo, double t_hi);

struct LorentzianFit {
    double center = 0.0;
    double fwhm = 0.0;
    double peak = 0.0;
    double rms_residual = 0.0;
    int iterations = 0;
};

/// Nonlinear least squares of peak (w/2)^2 / ((w/2)^2 + (omega - center)^2),
/// started from the sample maximum and its half-maximum crossings.
LorentzianFit fit_lorentzian(const SpectrumSeries& series);

} // namespace raman
