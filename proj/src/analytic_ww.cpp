#include "raman/analytic_ww.hpp"

#include "raman/error.hpp"

#include <cmath>
#include <numbers>

namespace raman {

double decay_rate(const SystemParams& params, const ModeGrid& grid)
{
    params.validate();
    const double res = params.resonance();
    require(grid.contains(res), Errc::out_of_support,
            "two-photon resonance lies outside the mode grid");
    const double lambda = coupling_at(params.coupling, res);
    return 2.0 * std::numbers::pi * grid.density * params.n_atoms * lambda * lambda;
}

ShiftEstimate frequency_shift_estimate(const SystemParams& params, const ModeGrid& grid)
{
    params.validate();
    const std::size_t m = grid.size();
    require(m >= 1 && grid.couplings.size() == m, Errc::invalid_argument, "empty mode grid");
    const double res = params.resonance();
    const double tol = 1e-9 * (grid.spacing > 0.0 ? grid.spacing : 1.0);

    ShiftEstimate est;
    for (std::size_t k = 0; k < m / 2 && est.symmetric; ++k) {
        const double lo = grid.frequencies[k] - res;
        const double hi = grid.frequencies[m - 1 - k] - res;
        est.symmetric = std::abs(lo + hi) <= tol;
    }
    if (m % 2 == 1 && est.symmetric)
        est.symmetric = std::abs(grid.frequencies[m / 2] - res) <= tol;

    double sum = 0.0;
    if (est.symmetric) {
        // Mirror pairs: l_k^2 / x + l_m^2 / (-x); the on-resonance node has zero weight.
        for (std::size_t k = 0; k < m / 2; ++k) {
            const double x = grid.frequencies[k] - res;
            const double lk = grid.couplings[k];
            const double lm = grid.couplings[m - 1 - k];
            sum += (lk * lk - lm * lm) / x;
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            const double x = grid.frequencies[k] - res;
            if (std::abs(x) <= tol)
                continue;
            sum += grid.couplings[k] * grid.couplings[k] / x;
        }
    }
    est.delta = -static_cast<double>(params.n_atoms) * sum + 0.0;
    return est;
}

double frequency_shift(const SystemParams& params, const ModeGrid& grid)
{
    return frequency_shift_estimate(params, grid).delta;
}

WWParams ww_params(const SystemParams& params, const ModeGrid& grid)
{
    WWParams ww;
    ww.gamma = decay_rate(params, grid);
    ww.delta = frequency_shift(params, grid);
    ww.omega_p = params.omega_p;
    ww.omega_31 = params.omega_31;
    ww.n_atoms = params.n_atoms;
    return ww;
}

std::complex<double> steady_amplitude(double omega_k, const WWParams& ww, double lambda_k)
{
    require(ww.gamma > 0.0, Errc::invalid_argument, "steady amplitude needs gamma > 0");
    const double detuning = omega_k + ww.omega_31 - ww.omega_p - ww.delta;
    const std::complex<double> num(0.0, -std::sqrt(static_cast<double>(ww.n_atoms)) * lambda_k);
    return num / std::complex<double>(0.5 * ww.gamma, -detuning);
}

AmplitudeState closed_form_state(double t, const SystemParams& params, const ModeGrid& grid,
                                 const WWParams& ww)
{
    require(t >= 0.0, Errc::invalid_argument, "closed form needs t >= 0");
    (void)params;
    AmplitudeState s;
    s.time = t;
    s.layout = {BasisKind::effective, grid.size()};
    s.amplitudes.resize(static_cast<Eigen::Index>(s.layout.dim()));
    if (t == 0.0) {
        s.amplitudes.setZero();
        s.amplitudes[0] = 1.0;
        return s;
    }
    const cd c0 = std::exp(-0.5 * ww.gamma * t) * std::polar(1.0, -(ww.omega_p + ww.delta) * t);
    s.amplitudes[0] = c0;
    const auto m = static_cast<std::ptrdiff_t>(grid.size());
    if (ww.gamma <= 0.0)
        for (double l : grid.couplings)
            require(l == 0.0, Errc::invalid_argument, "closed form needs gamma > 0");
#pragma omp parallel for schedule(static) if (m > 2048)
    for (std::ptrdiff_t k = 0; k < m; ++k) {
        const double w = grid.frequencies[k];
        const cd j = grid.couplings[k] == 0.0 ? cd{} : steady_amplitude(w, ww, grid.couplings[k]);
        s.amplitudes[k + 1] = j * (std::polar(1.0, -(w + ww.omega_31) * t) - c0);
    }
    return s;
}

Trajectory closed_form_trajectory(std::span<const double> times, const SystemParams& params,
                                  const ModeGrid& grid, const WWParams& ww)
{
    Trajectory traj;
    traj.method = Method::analytic;
    traj.samples.reserve(times.size());
    for (double t : times)
        traj.samples.push_back(closed_form_state(t, params, grid, ww));
    return traj;
}

} // namespace raman
