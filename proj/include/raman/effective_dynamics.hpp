#pragma once

// Single-excitation amplitude dynamics: Hamiltonian assembly over the
// symmetric basis, exact (eigendecomposition) and RK4 propagation, frames.

#include "raman/core_model.hpp"
#include "raman/kernels.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace raman {

using cd = std::complex<double>;

/// Basis layouts
///   effective:       [psi0, psi_k...]
///   effective_dark:  [psi0, psi_k..., phi1, phi_k...]
///   full:            [psi0, psi1, psi_k...]
enum class BasisKind { effective, effective_dark, full };

struct BasisLayout {
    BasisKind kind = BasisKind::effective;
    std::size_t n_modes = 0;

    std::size_t dim() const;
    std::size_t stokes_offset() const { return kind == BasisKind::full ? 2 : 1; }
    std::size_t dark_offset() const { return 1 + n_modes; } // effective_dark only
    bool has_intermediate() const { return kind == BasisKind::full; }
    bool has_dark() const { return kind == BasisKind::effective_dark; }
    std::vector<std::string> labels() const;

    friend bool operator==(const BasisLayout&, const BasisLayout&) = default;
};

inline constexpr std::size_t default_max_dim = 8192;

/// Real symmetric (hence Hermitian) Hamiltonian in a BasisLayout. Couplings
/// are real, so the matrix is stored as real.
struct HamiltonianMatrix {
    BasisLayout layout;
    Eigen::MatrixXd entries;

    std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
    std::vector<std::string> basis_labels() const { return layout.labels(); }
};

/// H[0][0] = omega_p, H[k][k] = omega_Sk + omega_31, H[0][k] = sqrt(n_atoms) lambda_k.
/// With include_dark, the antisymmetric states phi1 (diagonal omega_p) and phi_k
/// (diagonal omega_Sk + omega_31) are appended with zero coupling.
HamiltonianMatrix assemble_hamiltonian(const SystemParams& params, const ModeGrid& grid,
                                       bool include_dark = false,
                                       std::size_t max_dim = default_max_dim);

enum class Frame { lab, rotating };

struct AmplitudeState {
    double time = 0.0;
    Frame frame = Frame::lab;
    BasisLayout layout;
    Eigen::VectorXcd amplitudes;

    /// All amplitude in psi0 at t = 0.
    static AmplitudeState initial(const BasisLayout& layout, double time = 0.0);

    cd ground() const { return amplitudes[0]; }
    cd intermediate() const; // full layout only
    Eigen::VectorXcd stokes() const;
    Eigen::VectorXcd dark() const; // effective_dark only; empty otherwise
    double norm2() const { return amplitudes.squaredNorm(); }
};

enum class Method { expm, rk4, analytic };

std::string to_string(Method m);

struct Trajectory {
    std::vector<AmplitudeState> samples;
    Method method = Method::expm;
    std::uint64_t params_digest = 0;
    double dt = 0.0; // rk4 step actually used

    std::vector<double> times() const;
};

/// Stable 64-bit fingerprint of a Hamiltonian (layout and entries).
std::uint64_t fingerprint(const HamiltonianMatrix& h);

/// -i H C via the generic dense product.
Eigen::VectorXcd derivative(const HamiltonianMatrix& h, const AmplitudeState& state);

/// -i H C written out component-wise for the effective layouts (star topology).
Eigen::VectorXcd derivative_explicit(const HamiltonianMatrix& h, const AmplitudeState& state);

/// Upper bound on the spectral radius: min of the Gershgorin bound and
/// max|diag| + ||offdiag||_F (Weyl).
double spectral_bound(const Eigen::MatrixXd& h);

/// Exact propagator exp(-i H t). Diagonalizes H - shift once (shift = H[0][0]
/// for conditioning) and evaluates any number of sample times.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const HamiltonianMatrix& h,
                                kernels::Exec exec = kernels::Exec::parallel);

    const kernels::Eigensystem& eigensystem() const { return es_; }
    double shift() const { return shift_; }
    const HamiltonianMatrix& hamiltonian() const { return h_; }

    /// C(t) for every t in `times` (absolute), starting from `initial`.
    Trajectory evolve(const AmplitudeState& initial, std::span<const double> times) const;

private:
    HamiltonianMatrix h_;
    double shift_ = 0.0;
    kernels::Eigensystem es_;
    kernels::Exec exec_;
};

Trajectory propagate_expm(const HamiltonianMatrix& h, const AmplitudeState& initial,
                          std::span<const double> times);

struct Rk4Options {
    std::size_t record_every = 1; // record a sample every N steps (and the final step)
    kernels::Exec exec = kernels::Exec::parallel;
};

/// Classical fixed-step RK4 on dC/dt = -i (H - w0) C with w0 = H[0][0]; the
/// global phase exp(-i w0 t) is restored exactly at every sample. The step is
/// adjusted down so that it divides t_max - t0; dt * spectral_bound(H - w0)
/// must be < 0.1.
Trajectory propagate_rk4(const HamiltonianMatrix& h, const AmplitudeState& initial, double dt,
                         double t_max, Rk4Options options = {});

/// C_i -> C_i exp(+i H_ii t): removes the bare evolution of every basis state.
Trajectory to_rotating_frame(const Trajectory& traj, const HamiltonianMatrix& h);
Trajectory to_lab_frame(const Trajectory& traj, const HamiltonianMatrix& h);

/// Uniform sample times t0, ..., t1 (count >= 2).
std::vector<double> linspace(double t0, double t1, std::size_t count);

} // namespace raman
