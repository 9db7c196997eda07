#include "raman/observables.hpp"

#include "raman/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace raman {

PopulationSample populations(const AmplitudeState& state)
{
    PopulationSample p;
    p.time = state.time;
    p.ground = std::norm(state.ground());
    p.stokes = state.stokes().squaredNorm();
    if (state.layout.has_intermediate())
        p.intermediate = std::norm(state.intermediate());
    if (state.layout.has_dark())
        p.dark = state.dark().squaredNorm();
    p.norm = state.norm2();
    return p;
}

std::vector<PopulationSample> populations(const Trajectory& traj)
{
    std::vector<PopulationSample> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.push_back(populations(s));
    return out;
}

void DensityMatrix::validate(double tol) const
{
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= tol, Errc::invalid_density, "density matrix is not Hermitian");
    const double tr_err = std::abs(rho.trace() - cd(1.0, 0.0));
    require(tr_err <= tol, Errc::invalid_density, "density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -tol, Errc::invalid_density,
            "density matrix has a negative eigenvalue");
}

namespace {

constexpr Eigen::Index i11 = 0;
constexpr Eigen::Index i13 = 1;
constexpr Eigen::Index i31 = 2;

struct Branches {
    double ground = 0.0;
    double bright = 0.0; // sum |C_k|^2
    double dark = 0.0;   // sum |D_k|^2 over phi_k (not phi1)
    cd cross = 0.0;      // sum C_k conj(D_k)
};

Branches branches(const AmplitudeState& state, double scale)
{
    Branches b;
    b.ground = std::norm(state.ground()) * scale;
    const Eigen::VectorXcd c = state.stokes();
    b.bright = c.squaredNorm() * scale;
    if (state.layout.has_dark()) {
        const Eigen::VectorXcd d = state.dark().tail(static_cast<Eigen::Index>(state.layout.n_modes));
        b.dark = d.squaredNorm() * scale;
        b.cross = std::conj(c.dot(d)) * scale; // sum c_k conj(d_k)
    }
    return b;
}

// Stokes-branch block in the {|13>, |31>} subspace for a_k |psi+> + b_k |psi->.
void add_stokes_block(Eigen::Matrix4cd& rho, double s, double d, cd x)
{
    rho(i13, i13) += 0.5 * (s + d - 2.0 * x.real());
    rho(i31, i31) += 0.5 * (s + d + 2.0 * x.real());
    const cd off = 0.5 * cd(s - d, 2.0 * x.imag());
    rho(i13, i31) += off;
    rho(i31, i13) += std::conj(off);
}

} // namespace

AtomicDensity reduced_atomic_density(const AmplitudeState& state)
{
    const double n2 = state.norm2();
    if (std::abs(n2 - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "state norm^2 = " << n2 << " is outside [1 - 1e-6, 1 + 1e-6]";
        fail(Errc::not_normalized, os.str());
    }
    const Branches b = branches(state, 1.0 / n2);
    AtomicDensity out;
    out.projection_weight = b.ground + b.bright + b.dark;
    require(out.projection_weight > 0.0, Errc::invalid_density,
            "state has no weight in the {1,3} atomic subspace");
    Eigen::Matrix4cd& rho = out.density.rho;
    rho(i11, i11) = b.ground;
    add_stokes_block(rho, b.bright, b.dark, b.cross);
    rho /= out.projection_weight;
    return out;
}

DensityMatrix conditional_stokes_density(const AmplitudeState& state)
{
    const Branches b = branches(state, 1.0);
    const double w = b.bright + b.dark;
    require(w > 0.0, Errc::invalid_argument, "no Stokes photon amplitude to condition on");
    DensityMatrix out;
    add_stokes_block(out.rho, b.bright / w, b.dark / w, b.cross / w);
    return out;
}

double concurrence(const DensityMatrix& rho)
{
    rho.validate();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.rho);
    const double cutoff = 64.0 * std::numeric_limits<double>::epsilon();

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < 4; ++i)
        if (es.eigenvalues()[i] > cutoff)
            kept.push_back(i);
    const auto k = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXcd v(4, k);
    for (Eigen::Index c = 0; c < k; ++c)
        v.col(c) = es.eigenvectors().col(kept[c]) * std::sqrt(es.eigenvalues()[kept[c]]);

    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    flip(0, 3) = flip(3, 0) = -1.0;
    flip(1, 2) = flip(2, 1) = 1.0;
    const Eigen::MatrixXcd tau = v.transpose() * flip * v;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
    std::vector<double> lambda(4, 0.0);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        lambda[i] = svd.singularValues()[i];
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

SpectrumSeries stokes_spectrum(const AmplitudeState& state, const ModeGrid& grid, double gamma)
{
    require(state.layout.n_modes == grid.size(), Errc::invalid_argument,
            "state and grid have different mode counts");
    SpectrumSeries s;
    s.omega = grid.frequencies;
    const Eigen::VectorXcd c = state.stokes();
    s.weight.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        s.weight[k] = std::norm(c[static_cast<Eigen::Index>(k)]);
        s.total += s.weight[k];
    }
    s.early = gamma > 0.0 && gamma * state.time < 10.0;
    return s;
}

ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> p)
{
    require(t.size() == p.size(), Errc::invalid_series, "time and value series differ in length");
    require(t.size() >= 10, Errc::invalid_series, "exponential fit needs >= 10 samples");
    const auto n = static_cast<double>(t.size());
    double tm = 0.0, ym = 0.0;
    std::vector<double> y(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        require(p[i] > 0.0 && std::isfinite(p[i]), Errc::invalid_series,
                "exponential fit needs strictly positive values");
        y[i] = std::log(p[i]);
        tm += t[i];
        ym += y[i];
    }
    tm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - tm) * (t[i] - tm);
        sxy += (t[i] - tm) * (y[i] - ym);
    }
    require(sxx > 0.0, Errc::invalid_series, "exponential fit needs distinct times");
    const double slope = sxy / sxx;
    const double intercept = ym - slope * tm;
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - (intercept + slope * t[i]);
        ss += r * r;
    }
    ExponentialFit fit;
    fit.rate = slope == 0.0 ? 0.0 : -slope;
    fit.amplitude = std::exp(intercept);
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

ExponentialFit fit_ground_decay(const Trajectory& traj, double t_lo, double t_hi)
{
    std::vector<double> t, p;
    for (const auto& s : traj.samples) {
        if (s.time < t_lo || s.time > t_hi)
            continue;
        t.push_back(s.time);
        p.push_back(std::norm(s.ground()));
    }
    return fit_exponential(t, p);
}

namespace {

// Residuals of h s^2 / (s^2 + (u - c)^2) against scaled data; x = (c, s, h).
struct LorentzResidual {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const std::vector<double>& u;
    const std::vector<double>& y;

    int inputs() const { return 3; }
    int values() const { return static_cast<int>(u.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const
    {
        const double s2 = x[1] * x[1];
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double dx = u[i] - x[0];
            f[static_cast<Eigen::Index>(i)] = x[2] * s2 / (s2 + dx * dx) - y[i];
        }
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const
    {
        const double s2 = x[1] * x[1];
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const double dx = u[i] - x[0];
            const double den = s2 + dx * dx;
            j(r, 0) = x[2] * s2 * 2.0 * dx / (den * den);
            j(r, 1) = x[2] * 2.0 * x[1] * dx * dx / (den * den);
            j(r, 2) = s2 / den;
        }
        return 0;
    }
};

} // namespace

LorentzianFit fit_lorentzian(const SpectrumSeries& series)
{
    const std::size_t n = series.omega.size();
    require(n == series.weight.size(), Errc::invalid_series, "spectrum columns differ in length");
    require(n >= 20, Errc::invalid_series, "Lorentzian fit needs >= 20 points");

    const auto top = static_cast<std::size_t>(
        std::max_element(series.weight.begin(), series.weight.end()) - series.weight.begin());
    const double ymax = series.weight[top];
    require(ymax > 0.0, Errc::invalid_series, "spectrum has no positive weight");
    const double half = 0.5 * ymax;

    auto crossing = [&](int dir) -> double {
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(top);
             i + dir >= 0 && i + dir < static_cast<std::ptrdiff_t>(n); i += dir) {
            const double a = series.weight[i];
            const double b = series.weight[i + dir];
            if (b < half) {
                const double s = (a - half) / (a - b);
                return series.omega[i] + s * (series.omega[i + dir] - series.omega[i]);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double left = crossing(-1);
    const double right = crossing(+1);
    double hw;
    if (std::isfinite(left) && std::isfinite(right))
        hw = 0.5 * (right - left);
    else if (std::isfinite(left))
        hw = series.omega[top] - left;
    else if (std::isfinite(right))
        hw = right - series.omega[top];
    else
        fail(Errc::invalid_series, "no half-maximum crossing: window narrower than the line");
    require(hw > 0.0, Errc::fit_failed, "degenerate half width");
    require(series.omega.back() - series.omega.front() >= 5.0 * 2.0 * hw, Errc::invalid_series,
            "spectrum spans fewer than 5 estimated widths");

    const double c0 = series.omega[top];
    std::vector<double> u(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = (series.omega[i] - c0) / hw;
        y[i] = series.weight[i] / ymax;
    }
    LorentzResidual functor{u, y};
    Eigen::LevenbergMarquardt<LorentzResidual> lm(functor);
    lm.parameters.xtol = 1e-10;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 200;
    Eigen::VectorXd x(3);
    x << 0.0, 1.0, 1.0;
    const auto status = lm.minimize(x);

    using namespace Eigen::LevenbergMarquardtSpace;
    const bool ok = status != ImproperInputParameters && status != TooManyFunctionEvaluation &&
                    status != UserAsked && x.allFinite() && x[1] != 0.0;
    if (!ok) {
        std::ostringstream os;
        os << "Levenberg-Marquardt stopped with status " << static_cast<int>(status) << " after "
           << lm.nfev << " evaluations; x = (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
        fail(Errc::fit_failed, os.str());
    }

    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    functor(x, f);
    LorentzianFit fit;
    fit.center = c0 + x[0] * hw;
    fit.fwhm = 2.0 * std::abs(x[1]) * hw;
    fit.peak = x[2] * ymax;
    fit.rms_residual = std::sqrt(f.squaredNorm() / static_cast<double>(n)) * ymax;
    fit.iterations = static_cast<int>(lm.iter);
    return fit;
}

} // namespace raman
