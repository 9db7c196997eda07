#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raman/error.hpp"
#include "raman/kernels.hpp"

#include <cmath>
#include <random>

using namespace raman;
using namespace raman::kernels;

namespace {

Eigen::MatrixXd random_arrowhead(std::mt19937_64& rng, int n, int hub, double coupling_scale,
                                 bool degenerate)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        h(i, i) = degenerate ? std::round(3.0 * u(rng)) : 5.0 * u(rng);
    for (int i = 0; i < n; ++i) {
        if (i == hub)
            continue;
        const double z = coupling_scale * u(rng);
        h(hub, i) = h(i, hub) = z;
    }
    return h;
}

void check_eigensystem(const Eigen::MatrixXd& h, const Eigensystem& es, double tol)
{
    const auto n = h.rows();
    const double scale = h.cwiseAbs().maxCoeff();
    REQUIRE(es.values.size() == n);
    for (Eigen::Index i = 1; i < n; ++i)
        CHECK(es.values[i] >= es.values[i - 1]);
    const Eigen::MatrixXd ortho =
        es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(n, n);
    CHECK(ortho.cwiseAbs().maxCoeff() < tol);
    const Eigen::MatrixXd resid = h * es.vectors - es.vectors * es.values.asDiagonal();
    CHECK(resid.cwiseAbs().maxCoeff() < tol * scale);
}

} // namespace

TEST_CASE("star_hub detection")
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(4, 4);
    CHECK(star_hub(d) == std::optional<std::size_t>(0));
    d(2, 0) = d(0, 2) = 0.3;
    d(2, 3) = d(3, 2) = 0.1;
    CHECK(star_hub(d) == std::optional<std::size_t>(2));
    d(1, 3) = d(3, 1) = 0.2;
    CHECK_FALSE(star_hub(d).has_value());
}

TEST_CASE("arrowhead solver matches dense LAPACK on random arrowheads")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial * 7;
        const int hub = trial % 3 == 0 ? 0 : trial % n;
        const bool degenerate = trial % 4 == 1;
        const double zs = trial % 5 == 2 ? 1e-9 : 0.5;
        const Eigen::MatrixXd h = random_arrowhead(rng, n, hub, zs, degenerate);
        const Eigensystem a = arrowhead_eigensystem(h, static_cast<std::size_t>(hub));
        const Eigensystem d = dense_eigensystem(h);
        const double scale = h.cwiseAbs().maxCoeff();
        CHECK((a.values - d.values).cwiseAbs().maxCoeff() < 1e-13 * scale);
        check_eigensystem(h, a, 1e-12);
    }
}

TEST_CASE("arrowhead solver on the default continuum Hamiltonian")
{
    // omega_p on the hub, 1601 equally spaced modes, tiny couplings.
    const int m = 1601;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m + 1);
    h(0, 0) = 10.0;
    for (int k = 0; k < m; ++k) {
        h(k + 1, k + 1) = 10.0 - 2.0 + 4.0 * k / (m - 1);
        h(0, k + 1) = h(k + 1, 0) = std::sqrt(2.0) * 0.00446;
    }
    const Eigensystem a = arrowhead_eigensystem(h, 0);
    const Eigensystem d = dense_eigensystem(h);
    CHECK((a.values - d.values).cwiseAbs().maxCoeff() < 1e-13 * 12.0);
    check_eigensystem(h, a, 1e-12);
}

TEST_CASE("degenerate diagonal with exactly repeated entries is deflated")
{
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 6);
    h(0, 0) = 1.0;
    for (int i = 1; i < 6; ++i) {
        h(i, i) = 2.0;
        h(0, i) = h(i, 0) = 0.1 * i;
    }
    const Eigensystem a = arrowhead_eigensystem(h, 0);
    const Eigensystem d = dense_eigensystem(h);
    CHECK((a.values - d.values).cwiseAbs().maxCoeff() < 1e-14);
    check_eigensystem(h, a, 1e-13);
    int at_two = 0;
    for (int i = 0; i < 6; ++i)
        at_two += std::abs(a.values[i] - 2.0) < 1e-14;
    CHECK(at_two == 4);
}

TEST_CASE("serial and parallel arrowhead paths are bit-identical")
{
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd h = random_arrowhead(rng, 700, 0, 0.05, false);
    const Eigensystem s = arrowhead_eigensystem(h, 0, Exec::serial);
    const Eigensystem p = arrowhead_eigensystem(h, 0, Exec::parallel);
    CHECK(s.values == p.values);
    CHECK(s.vectors == p.vectors);
}

TEST_CASE("symmetric_eigensystem falls back to dense for non-star matrices")
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            a(i, j) = g(rng);
    const Eigen::MatrixXd h = a + a.transpose();
    check_eigensystem(h, symmetric_eigensystem(h), 1e-12);
}

TEST_CASE("arrowhead input checks")
{
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(3, 3);
    h(1, 2) = h(2, 1) = 0.5;
    CHECK_THROWS_AS(arrowhead_eigensystem(h, 0), Error);
    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(arrowhead_eigensystem(asym, 0), Error);
}

TEST_CASE("blocked sample evolution matches the naive triple loop")
{
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd h = random_arrowhead(rng, 300, 0, 0.1, false);
    const Eigensystem es = arrowhead_eigensystem(h, 0);
    Eigen::VectorXcd c(300);
    std::normal_distribution<double> g;
    for (int i = 0; i < 300; ++i)
        c[i] = {g(rng), g(rng)};
    std::vector<double> times;
    for (int s = 0; s < 37; ++s)
        times.push_back(0.3 * s);
    Eigen::MatrixXcd naive, blocked_serial, blocked_parallel;
    evolve_samples_serial(es, c, times, naive);
    evolve_samples(es, c, times, blocked_serial, Exec::serial);
    evolve_samples(es, c, times, blocked_parallel, Exec::parallel);
    CHECK((naive - blocked_serial).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(blocked_serial == blocked_parallel);
}

TEST_CASE("sparse rows: serial and parallel products agree with dense")
{
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd h = random_arrowhead(rng, 2000, 0, 0.2, false);
    const SparseRows a = SparseRows::from_dense(h, 1.5);
    CHECK(a.nonzeros() == 2000 + 2 * 1999);
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(2000);
    for (int i = 0; i < 2000; ++i)
        x[i] = {g(rng), g(rng)};
    Eigen::VectorXcd ys(2000), yp(2000);
    apply(a, {x.data(), 2000}, {ys.data(), 2000}, Exec::serial);
    apply(a, {x.data(), 2000}, {yp.data(), 2000}, Exec::parallel);
    Eigen::MatrixXd shifted = h;
    shifted.diagonal().array() -= 1.5;
    const Eigen::VectorXcd ref = shifted.cast<std::complex<double>>() * x;
    CHECK((ys - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ys == yp);
}
