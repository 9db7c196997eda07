#pragma once

// Numerical kernels behind the propagators. Each kernel has a straightforward
// serial reference and an OpenMP path; the references stay in the library so
// tests and bench_kernels can compare them.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace raman::kernels {

enum class Exec { serial, parallel };

/// Eigenpairs of a real symmetric matrix: h = vectors * diag(values) * vectors^T,
/// values ascending.
struct Eigensystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Index of the hub if every non-zero off-diagonal element lies in one row and
/// column (a star / arrowhead pattern). A diagonal matrix reports hub 0.
std::optional<std::size_t> star_hub(const Eigen::MatrixXd& h);

/// O(n^2) eigensolver for symmetric arrowhead matrices. Roots of the secular
/// equation are found per interlacing interval relative to the nearest pole;
/// eigenvectors use couplings recomputed from the roots (Loewner formula), so
/// they are orthonormal to working precision.
Eigensystem arrowhead_eigensystem(const Eigen::MatrixXd& h, std::size_t hub,
                                  Exec exec = Exec::parallel);

/// Dense LAPACK divide-and-conquer (dsyevd). Reference path; O(n^3).
Eigensystem dense_eigensystem(const Eigen::MatrixXd& h);

/// Arrowhead solver when the pattern allows it, dense otherwise.
Eigensystem symmetric_eigensystem(const Eigen::MatrixXd& h, Exec exec = Exec::parallel);

/// out.col(s) = V * (exp(-i E times[s]) .* coeffs), with coeffs expressed in the
/// eigenbasis. Naive triple loop.
void evolve_samples_serial(const Eigensystem& es, const Eigen::VectorXcd& coeffs,
                           std::span<const double> times, Eigen::MatrixXcd& out);

/// Same result, samples processed in blocks as real GEMMs, blocks in parallel.
void evolve_samples(const Eigensystem& es, const Eigen::VectorXcd& coeffs,
                    std::span<const double> times, Eigen::MatrixXcd& out,
                    Exec exec = Exec::parallel);

/// Compressed-row copy of a real symmetric matrix, optionally with the diagonal
/// shifted, used for repeated matrix-vector products.
struct SparseRows {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;

    static SparseRows from_dense(const Eigen::MatrixXd& h, double diagonal_shift = 0.0);
    std::size_t nonzeros() const { return val.size(); }
};

/// y = A x.
void apply(const SparseRows& a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y, Exec exec = Exec::parallel);

} // namespace raman::kernels
