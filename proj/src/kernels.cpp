#include "raman/kernels.hpp"

#include "raman/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace raman::kernels {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// A spoke of the arrowhead after deflation. Rotations may mix several
// original coordinates into one spoke, hence the explicit basis.
struct Spoke {
    double d = 0.0;
    double z = 0.0;
    std::vector<std::pair<std::size_t, double>> basis;
};

struct Deflated {
    double value = 0.0;
    std::vector<std::pair<std::size_t, double>> basis;
};

// Root of the secular equation stored as an offset from its nearest pole, so
// that differences mu - d_i keep full relative precision.
struct Root {
    std::size_t origin = 0;
    double tau = 0.0;
};

class Secular {
public:
    Secular(const std::vector<double>& d, const std::vector<double>& z2, double a)
        : d_(d), z2_(z2), a_(a)
    {
    }

    // F(mu) = a - mu + sum z_i^2 / (mu - d_i), mu = d_o + tau. G = tau * F has
    // the origin pole removed; Newton runs on G, the bracket on sign(F).
    void eval(std::size_t o, double tau, double& f, double& g, double& dg) const
    {
        double s = 0.0;
        double ds = 0.0;
        const double dorig = d_[o];
        for (std::size_t i = 0; i < d_.size(); ++i) {
            if (i == o)
                continue;
            const double den = (dorig - d_[i]) + tau;
            const double q = z2_[i] / den;
            s += q;
            ds -= q / den;
        }
        const double base = (a_ - dorig) - tau + s;
        g = tau * base + z2_[o];
        dg = base + tau * (ds - 1.0);
        f = base + z2_[o] / tau;
    }

    double solve(std::size_t o, double lo, double hi) const
    {
        double tau = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double f, g, dg;
            eval(o, tau, f, g, dg);
            if (f > 0.0)
                lo = tau;
            else if (f < 0.0)
                hi = tau;
            else
                return tau;
            double next = tau - g / dg;
            if (!std::isfinite(next) || next <= lo || next >= hi)
                next = 0.5 * (lo + hi);
            const bool small_step = std::abs(next - tau) <= 2.0 * eps * std::abs(next);
            const bool narrow = (hi - lo) <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi));
            tau = next;
            if (small_step || narrow)
                break;
        }
        return tau;
    }

private:
    const std::vector<double>& d_;
    const std::vector<double>& z2_;
    double a_;
};

void check_square_symmetric(const Eigen::MatrixXd& h)
{
    require(h.rows() == h.cols() && h.rows() > 0, Errc::invalid_argument,
            "eigensolver needs a non-empty square matrix");
    require((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0, Errc::numerical_error,
            "eigensolver input is not symmetric");
}

Eigensystem sorted(Eigensystem es)
{
    const auto n = es.values.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto x, auto y) { return es.values[x] < es.values[y]; });
    Eigensystem out;
    out.values.resize(n);
    out.vectors.resize(es.vectors.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = es.values[order[k]];
        out.vectors.col(k) = es.vectors.col(order[k]);
    }
    return out;
}

} // namespace

std::optional<std::size_t> star_hub(const Eigen::MatrixXd& h)
{
    const auto n = static_cast<std::size_t>(h.rows());
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i)
            if (h(i, j) != 0.0 || h(j, i) != 0.0)
                edges.emplace_back(i, j);
    if (edges.empty())
        return 0;
    for (std::size_t candidate : {edges.front().first, edges.front().second}) {
        const bool all = std::all_of(edges.begin(), edges.end(), [&](const auto& e) {
            return e.first == candidate || e.second == candidate;
        });
        if (all)
            return candidate;
    }
    return std::nullopt;
}

Eigensystem arrowhead_eigensystem(const Eigen::MatrixXd& h, std::size_t hub, Exec exec)
{
    check_square_symmetric(h);
    const auto n = static_cast<std::size_t>(h.rows());
    require(hub < n, Errc::invalid_argument, "hub index out of range");
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if (i != j && i != hub && j != hub && h(i, j) != 0.0)
                fail(Errc::invalid_argument, "matrix is not an arrowhead about the given hub");

    const double a = h(hub, hub);
    double scale = std::abs(a);
    double znorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == hub)
            continue;
        scale = std::max(scale, std::abs(h(i, i)));
        znorm2 += h(hub, i) * h(hub, i);
    }
    scale = std::max(scale, std::sqrt(znorm2));
    const double tol = 8.0 * eps * scale;

    std::vector<Deflated> deflated;
    std::vector<Spoke> spokes;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == hub)
            continue;
        const double z = h(hub, i);
        if (std::abs(z) <= tol)
            deflated.push_back({h(i, i), {{i, 1.0}}});
        else
            spokes.push_back({h(i, i), z, {{i, 1.0}}});
    }
    std::stable_sort(spokes.begin(), spokes.end(),
                     [](const Spoke& x, const Spoke& y) { return x.d < y.d; });

    // Rotate (nearly) degenerate spokes together: one combination keeps the
    // coupling, the orthogonal one decouples with eigenvalue d.
    std::vector<Spoke> merged;
    for (auto& s : spokes) {
        if (!merged.empty() && s.d - merged.back().d <= tol) {
            Spoke& u = merged.back();
            const double r = std::hypot(u.z, s.z);
            const double cu = u.z / r;
            const double cs = s.z / r;
            Deflated w;
            w.value = u.d;
            for (const auto& [idx, wt] : u.basis)
                w.basis.emplace_back(idx, -cs * wt);
            for (const auto& [idx, wt] : s.basis)
                w.basis.emplace_back(idx, cu * wt);
            deflated.push_back(std::move(w));
            for (auto& [idx, wt] : u.basis)
                wt *= cu;
            for (const auto& [idx, wt] : s.basis)
                u.basis.emplace_back(idx, cs * wt);
            u.z = r;
            u.d = s.d;
        } else {
            merged.push_back(std::move(s));
        }
    }

    const std::size_t m = merged.size();
    Eigensystem es;
    es.values.resize(n);
    es.vectors = Eigen::MatrixXd::Zero(n, n);

    std::size_t col = 0;
    for (const auto& w : deflated) {
        es.values[col] = w.value;
        for (const auto& [idx, wt] : w.basis)
            es.vectors(idx, col) = wt;
        ++col;
    }

    if (m == 0) {
        es.values[col] = a;
        es.vectors(hub, col) = 1.0;
        return sorted(std::move(es));
    }

    std::vector<double> d(m), z2(m);
    double zn2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        d[i] = merged[i].d;
        z2[i] = merged[i].z * merged[i].z;
        zn2 += z2[i];
    }
    const Secular secular(d, z2, a);
    const double zn = std::sqrt(zn2);

    std::vector<Root> roots(m + 1);
    const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (std::size_t j = 0; j <= m; ++j) {
        if (j == 0) {
            const double lower = std::min(a, d[0]) - zn;
            const double lo = (lower - d[0]) - 4.0 * eps * std::max(1.0, std::abs(lower));
            roots[j] = {0, secular.solve(0, lo, 0.0)};
        } else if (j == m) {
            const double upper = std::max(a, d[m - 1]) + zn;
            const double hi = (upper - d[m - 1]) + 4.0 * eps * std::max(1.0, std::abs(upper));
            roots[j] = {m - 1, secular.solve(m - 1, 0.0, hi)};
        } else {
            const double half = 0.5 * (d[j] - d[j - 1]);
            double f, g, dg;
            secular.eval(j - 1, half, f, g, dg);
            if (f > 0.0)
                roots[j] = {j, secular.solve(j, -half, 0.0)};
            else
                roots[j] = {j - 1, secular.solve(j - 1, 0.0, half)};
        }
    }

    auto diff = [&](std::size_t j, std::size_t i) { // mu_j - d_i
        return (d[roots[j].origin] - d[i]) + roots[j].tau;
    };

    std::vector<double> zhat(m);
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t i = 0; i < m; ++i) {
        double prod = -diff(0, i) * diff(m, i);
        for (std::size_t k = 0; k < i; ++k)
            prod *= diff(k + 1, i) / (d[k] - d[i]);
        for (std::size_t k = i + 1; k < m; ++k)
            prod *= diff(k, i) / (d[k] - d[i]);
        zhat[i] = std::copysign(std::sqrt(std::max(prod, 0.0)), merged[i].z);
    }

#pragma omp parallel for schedule(static) if (par)
    for (std::size_t j = 0; j <= m; ++j) {
        std::vector<double> x(m);
        double norm2 = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            x[i] = zhat[i] / diff(j, i);
            norm2 += x[i] * x[i];
        }
        const double inv = 1.0 / std::sqrt(norm2);
        const std::size_t c = col + j;
        es.values[c] = d[roots[j].origin] + roots[j].tau;
        es.vectors(hub, c) = inv;
        for (std::size_t i = 0; i < m; ++i)
            for (const auto& [idx, wt] : merged[i].basis)
                es.vectors(idx, c) += wt * x[i] * inv;
    }
    return sorted(std::move(es));
}

Eigensystem dense_eigensystem(const Eigen::MatrixXd& h)
{
    check_square_symmetric(h);
    const auto n = static_cast<lapack_int>(h.rows());
    Eigensystem es;
    es.vectors = h;
    es.values.resize(n);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, es.vectors.data(), n, es.values.data());
    require(info == 0, Errc::numerical_error, "dsyevd failed with info " + std::to_string(info));
    return es;
}

Eigensystem symmetric_eigensystem(const Eigen::MatrixXd& h, Exec exec)
{
    if (auto hub = star_hub(h))
        return arrowhead_eigensystem(h, *hub, exec);
    return dense_eigensystem(h);
}

void evolve_samples_serial(const Eigensystem& es, const Eigen::VectorXcd& coeffs,
                           std::span<const double> times, Eigen::MatrixXcd& out)
{
    const Eigen::Index n = es.vectors.rows();
    const Eigen::Index m = es.vectors.cols();
    out.resize(n, static_cast<Eigen::Index>(times.size()));
    std::vector<std::complex<double>> w(m);
    for (std::size_t s = 0; s < times.size(); ++s) {
        for (Eigen::Index j = 0; j < m; ++j)
            w[j] = coeffs[j] * std::polar(1.0, -es.values[j] * times[s]);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::complex<double> acc = 0.0;
            for (Eigen::Index j = 0; j < m; ++j)
                acc += es.vectors(i, j) * w[j];
            out(i, static_cast<Eigen::Index>(s)) = acc;
        }
    }
}

void evolve_samples(const Eigensystem& es, const Eigen::VectorXcd& coeffs,
                    std::span<const double> times, Eigen::MatrixXcd& out, Exec exec)
{
    constexpr Eigen::Index block = 16;
    const Eigen::Index n = es.vectors.rows();
    const Eigen::Index m = es.vectors.cols();
    const auto samples = static_cast<Eigen::Index>(times.size());
    out.resize(n, samples);
    const Eigen::Index blocks = (samples + block - 1) / block;
    const bool par = exec == Exec::parallel;

#pragma omp parallel for schedule(dynamic) if (par)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index s0 = b * block;
        const Eigen::Index cnt = std::min(block, samples - s0);
        Eigen::MatrixXd w(m, 2 * cnt);
        for (Eigen::Index s = 0; s < cnt; ++s) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto p = coeffs[j] * std::polar(1.0, -es.values[j] * times[s0 + s]);
                w(j, 2 * s) = p.real();
                w(j, 2 * s + 1) = p.imag();
            }
        }
        Eigen::MatrixXd r(n, 2 * cnt);
        r.noalias() = es.vectors * w;
        for (Eigen::Index s = 0; s < cnt; ++s)
            for (Eigen::Index i = 0; i < n; ++i)
                out(i, s0 + s) = {r(i, 2 * s), r(i, 2 * s + 1)};
    }
}

SparseRows SparseRows::from_dense(const Eigen::MatrixXd& h, double diagonal_shift)
{
    SparseRows a;
    a.n = static_cast<std::size_t>(h.rows());
    a.row_ptr.reserve(a.n + 1);
    a.row_ptr.push_back(0);
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t j = 0; j < a.n; ++j) {
            double v = h(i, j);
            if (i == j)
                v -= diagonal_shift;
            if (v != 0.0) {
                a.col.push_back(j);
                a.val.push_back(v);
            }
        }
        a.row_ptr.push_back(a.col.size());
    }
    return a;
}

void apply(const SparseRows& a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y, Exec exec)
{
    require(x.size() == a.n && y.size() == a.n, Errc::invalid_argument,
            "sparse apply dimension mismatch");
    const bool par = exec == Exec::parallel && a.n > 512;
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t i = 0; i < a.n; ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            acc += a.val[p] * x[a.col[p]];
        y[i] = acc;
    }
}

} // namespace raman::kernels
