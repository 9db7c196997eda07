#include "raman/effective_dynamics.hpp"

#include "raman/error.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace raman {

std::size_t BasisLayout::dim() const
{
    switch (kind) {
    case BasisKind::effective: return 1 + n_modes;
    case BasisKind::effective_dark: return 2 * (1 + n_modes);
    case BasisKind::full: return 2 + n_modes;
    }
    return 0;
}

std::vector<std::string> BasisLayout::labels() const
{
    std::vector<std::string> out;
    out.reserve(dim());
    out.emplace_back("psi0");
    if (kind == BasisKind::full)
        out.emplace_back("psi1");
    for (std::size_t k = 0; k < n_modes; ++k)
        out.push_back("psi_k" + std::to_string(k));
    if (kind == BasisKind::effective_dark) {
        out.emplace_back("phi1");
        for (std::size_t k = 0; k < n_modes; ++k)
            out.push_back("phi_k" + std::to_string(k));
    }
    return out;
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::expm: return "expm";
    case Method::rk4: return "rk4";
    case Method::analytic: return "analytic";
    }
    return "unknown";
}

std::vector<double> Trajectory::times() const
{
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples)
        t.push_back(s.time);
    return t;
}

HamiltonianMatrix assemble_hamiltonian(const SystemParams& params, const ModeGrid& grid,
                                       bool include_dark, std::size_t max_dim)
{
    params.validate();
    require(grid.size() >= 1 && grid.couplings.size() == grid.size(), Errc::invalid_argument,
            "mode grid is empty or inconsistent");
    require(grid.contains(params.resonance()), Errc::invalid_argument,
            "two-photon resonance lies outside the mode grid");

    HamiltonianMatrix h;
    h.layout = {include_dark ? BasisKind::effective_dark : BasisKind::effective, grid.size()};
    const std::size_t dim = h.layout.dim();
    if (dim > max_dim) {
        std::ostringstream os;
        os << "Hamiltonian dimension " << dim << " exceeds limit " << max_dim;
        fail(Errc::too_large, os.str());
    }

    const std::size_t m = grid.size();
    const double collective = std::sqrt(static_cast<double>(params.n_atoms));
    h.entries = Eigen::MatrixXd::Zero(dim, dim);
    h.entries(0, 0) = params.omega_p;
    for (std::size_t k = 0; k < m; ++k) {
        const auto i = static_cast<Eigen::Index>(1 + k);
        h.entries(i, i) = grid.frequencies[k] + params.omega_31;
        h.entries(0, i) = h.entries(i, 0) = collective * grid.couplings[k];
    }
    if (include_dark) {
        const auto off = static_cast<Eigen::Index>(h.layout.dark_offset());
        h.entries(off, off) = params.omega_p;
        for (std::size_t k = 0; k < m; ++k) {
            const auto i = off + 1 + static_cast<Eigen::Index>(k);
            h.entries(i, i) = grid.frequencies[k] + params.omega_31;
        }
    }
    return h;
}

AmplitudeState AmplitudeState::initial(const BasisLayout& layout, double time)
{
    AmplitudeState s;
    s.time = time;
    s.layout = layout;
    s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
    s.amplitudes[0] = 1.0;
    return s;
}

cd AmplitudeState::intermediate() const
{
    require(layout.has_intermediate(), Errc::invalid_argument,
            "state has no intermediate (level-2) amplitude");
    return amplitudes[1];
}

Eigen::VectorXcd AmplitudeState::stokes() const
{
    return amplitudes.segment(static_cast<Eigen::Index>(layout.stokes_offset()),
                              static_cast<Eigen::Index>(layout.n_modes));
}

Eigen::VectorXcd AmplitudeState::dark() const
{
    if (!layout.has_dark())
        return {};
    return amplitudes.segment(static_cast<Eigen::Index>(layout.dark_offset()),
                              static_cast<Eigen::Index>(layout.n_modes + 1));
}

std::uint64_t fingerprint(const HamiltonianMatrix& h)
{
    std::uint64_t hash = 1469598103934665603ull;
    auto mix = [&](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            hash ^= p[i];
            hash *= 1099511628211ull;
        }
    };
    const int kind = static_cast<int>(h.layout.kind);
    mix(&kind, sizeof kind);
    mix(&h.layout.n_modes, sizeof h.layout.n_modes);
    mix(h.entries.data(), sizeof(double) * static_cast<std::size_t>(h.entries.size()));
    return hash;
}

namespace {

void check_state(const HamiltonianMatrix& h, const AmplitudeState& s)
{
    require(s.layout == h.layout && static_cast<std::size_t>(s.amplitudes.size()) == h.dim(),
            Errc::invalid_argument, "state and Hamiltonian dimensions differ");
}

} // namespace

Eigen::VectorXcd derivative(const HamiltonianMatrix& h, const AmplitudeState& state)
{
    check_state(h, state);
    require(state.frame == Frame::lab, Errc::invalid_frame, "derivative expects a lab-frame state");
    return cd(0.0, -1.0) * (h.entries.cast<cd>() * state.amplitudes);
}

Eigen::VectorXcd derivative_explicit(const HamiltonianMatrix& h, const AmplitudeState& state)
{
    check_state(h, state);
    require(state.frame == Frame::lab, Errc::invalid_frame, "derivative expects a lab-frame state");
    require(h.layout.kind != BasisKind::full, Errc::invalid_argument,
            "explicit derivative covers the effective layouts only");
    const auto& H = h.entries;
    const auto& c = state.amplitudes;
    const auto m = static_cast<Eigen::Index>(h.layout.n_modes);
    const cd mi(0.0, -1.0);
    Eigen::VectorXcd out(c.size());
    cd acc = H(0, 0) * c[0];
    for (Eigen::Index k = 1; k <= m; ++k)
        acc += H(0, k) * c[k];
    out[0] = mi * acc;
    for (Eigen::Index k = 1; k <= m; ++k)
        out[k] = mi * (H(k, k) * c[k] + H(k, 0) * c[0]);
    for (Eigen::Index i = m + 1; i < c.size(); ++i)
        out[i] = mi * (H(i, i) * c[i]);
    return out;
}

double spectral_bound(const Eigen::MatrixXd& h)
{
    double gershgorin = 0.0;
    double max_diag = 0.0;
    double off2 = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            row += std::abs(h(i, j));
            if (i != j)
                off2 += h(i, j) * h(i, j);
        }
        gershgorin = std::max(gershgorin, row);
        max_diag = std::max(max_diag, std::abs(h(i, i)));
    }
    return std::min(gershgorin, max_diag + std::sqrt(off2));
}

SpectralPropagator::SpectralPropagator(const HamiltonianMatrix& h, kernels::Exec exec)
    : h_(h), shift_(h.entries(0, 0)), exec_(exec)
{
    Eigen::MatrixXd shifted = h.entries;
    shifted.diagonal().array() -= shift_;
    es_ = kernels::symmetric_eigensystem(shifted, exec);
}

Trajectory SpectralPropagator::evolve(const AmplitudeState& initial,
                                      std::span<const double> times) const
{
    check_state(h_, initial);
    require(initial.frame == Frame::lab, Errc::invalid_frame, "propagation expects a lab-frame state");
    require(!times.empty(), Errc::invalid_argument, "no sample times");
    require(times[0] >= initial.time, Errc::invalid_argument,
            "sample times must not precede the initial state");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], Errc::invalid_argument,
                "sample times must be strictly increasing");

    std::vector<double> rel(times.begin(), times.end());
    for (auto& t : rel)
        t -= initial.time;
    const Eigen::VectorXcd coeffs = es_.vectors.transpose().cast<cd>() * initial.amplitudes;
    Eigen::MatrixXcd out;
    kernels::evolve_samples(es_, coeffs, rel, out, exec_);

    Trajectory traj;
    traj.method = Method::expm;
    traj.params_digest = fingerprint(h_);
    traj.samples.reserve(times.size());
    for (std::size_t s = 0; s < times.size(); ++s) {
        AmplitudeState st;
        st.time = times[s];
        st.layout = h_.layout;
        st.amplitudes = out.col(static_cast<Eigen::Index>(s)) * std::polar(1.0, -shift_ * rel[s]);
        traj.samples.push_back(std::move(st));
    }
    return traj;
}

Trajectory propagate_expm(const HamiltonianMatrix& h, const AmplitudeState& initial,
                          std::span<const double> times)
{
    return SpectralPropagator(h).evolve(initial, times);
}

Trajectory propagate_rk4(const HamiltonianMatrix& h, const AmplitudeState& initial, double dt,
                         double t_max, Rk4Options options)
{
    check_state(h, initial);
    require(initial.frame == Frame::lab, Errc::invalid_frame, "propagation expects a lab-frame state");
    require(dt > 0.0 && std::isfinite(dt), Errc::invalid_argument, "dt must be > 0");
    require(t_max > initial.time, Errc::invalid_argument, "t_max must exceed the initial time");
    require(options.record_every >= 1, Errc::invalid_argument, "record_every must be >= 1");

    const double shift = h.entries(0, 0);
    Eigen::MatrixXd shifted = h.entries;
    shifted.diagonal().array() -= shift;
    const double bound = spectral_bound(shifted);

    const double span = t_max - initial.time;
    const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
    const double step = span / static_cast<double>(steps);
    if (step * bound >= 0.1) {
        std::ostringstream os;
        os << "dt * spectral bound = " << step * bound << " >= 0.1 (bound " << bound << ")";
        fail(Errc::step_too_large, os.str());
    }

    const auto a = kernels::SparseRows::from_dense(h.entries, shift);
    const auto n = static_cast<Eigen::Index>(h.dim());
    const cd mi(0.0, -1.0);
    Eigen::VectorXcd y = initial.amplitudes;
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto rhs = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& out) {
        kernels::apply(a, {x.data(), static_cast<std::size_t>(n)},
                       {out.data(), static_cast<std::size_t>(n)}, options.exec);
        out *= mi;
    };

    Trajectory traj;
    traj.method = Method::rk4;
    traj.params_digest = fingerprint(h);
    traj.dt = step;
    auto record = [&](std::size_t s) {
        const double rel = static_cast<double>(s) * step;
        AmplitudeState st;
        st.time = initial.time + rel;
        st.layout = h.layout;
        st.amplitudes = y * std::polar(1.0, -shift * rel);
        traj.samples.push_back(std::move(st));
    };

    record(0);
    for (std::size_t s = 1; s <= steps; ++s) {
        rhs(y, k1);
        tmp = y + (0.5 * step) * k1;
        rhs(tmp, k2);
        tmp = y + (0.5 * step) * k2;
        rhs(tmp, k3);
        tmp = y + step * k3;
        rhs(tmp, k4);
        y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % options.record_every == 0 || s == steps)
            record(s);
    }
    return traj;
}

namespace {

Trajectory rephase(const Trajectory& traj, const HamiltonianMatrix& h, Frame from, Frame to,
                   double sign)
{
    Trajectory out = traj;
    for (auto& s : out.samples) {
        check_state(h, s);
        require(s.frame == from, Errc::invalid_frame,
                from == Frame::lab ? "trajectory is already in the rotating frame"
                                   : "trajectory is already in the lab frame");
        for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i)
            s.amplitudes[i] *= std::polar(1.0, sign * h.entries(i, i) * s.time);
        s.frame = to;
    }
    return out;
}

} // namespace

Trajectory to_rotating_frame(const Trajectory& traj, const HamiltonianMatrix& h)
{
    return rephase(traj, h, Frame::lab, Frame::rotating, +1.0);
}

Trajectory to_lab_frame(const Trajectory& traj, const HamiltonianMatrix& h)
{
    return rephase(traj, h, Frame::rotating, Frame::lab, -1.0);
}

std::vector<double> linspace(double t0, double t1, std::size_t count)
{
    require(count >= 2 && t1 > t0, Errc::invalid_argument, "linspace needs count >= 2 and t1 > t0");
    std::vector<double> t(count);
    const double h = (t1 - t0) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = t0 + static_cast<double>(i) * h;
    t.back() = t1;
    return t;
}

} // namespace raman
