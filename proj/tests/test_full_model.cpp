#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "raman/error.hpp"
#include "raman/full_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace raman;

namespace {

constexpr double pi = std::numbers::pi;

Errc code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return Errc::invalid_argument;
}

ModeGrid three_modes()
{
    ModeGrid g;
    g.frequencies = {6.9, 7.0, 7.2};
    g.couplings = {0.0, 0.0, 0.0};
    g.spacing = 0.1;
    g.density = 10.0;
    return g;
}

struct LadderRun {
    FullParams fp;
    AdiabaticityReport report;
};

// gamma = 0.1 Raman scenario on a 20 gamma grid, light shift 45 gamma held
// fixed, coupling ratio q set through detuning2 = shift / q^2.
LadderRun ladder_point(double q, int per_gamma = 10)
{
    const double gamma = 0.1;
    SystemParams eff;
    const double spacing = gamma / per_gamma;
    const CouplingProfile lam =
        CouplingProfile::flat(std::sqrt(gamma * spacing / (2.0 * pi * eff.n_atoms)));
    const double shift = 45.0 * gamma;
    const double d2 = shift / (q * q);
    LadderRun run;
    run.fp = raman_parameters(eff, lam, d2, shift);
    const ModeGrid g =
        build_mode_grid_about(run.fp.g_s_profile, shifted_resonance(run.fp), 20.0 * gamma,
                              20 * per_gamma + 1);
    std::vector<double> times = linspace(0.0, 5.0 / gamma, 101);
    const auto fast = linspace(0.0, 4.0 * pi / d2, 129);
    times.insert(times.end(), fast.begin(), fast.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    const HamiltonianMatrix hf = assemble_full_hamiltonian(run.fp, g);
    const HamiltonianMatrix he = assemble_comparison_hamiltonian(run.fp, g);
    const Trajectory full = propagate_expm(hf, AmplitudeState::initial(hf.layout), times);
    const Trajectory eff_traj = propagate_expm(he, AmplitudeState::initial(he.layout), times);
    run.report = adiabaticity_report(full, eff_traj, run.fp, g);
    return run;
}

} // namespace

TEST_CASE("full Hamiltonian matches the tensor-product oracle")
{
    const ModeGrid g = three_modes();
    const std::vector<double> gs = {0.03, 0.05, 0.02};
    for (int n_atoms : {2, 3}) {
        FullParams fp;
        fp.n_atoms = n_atoms;
        fp.g_p = 0.07;
        fp.detuning2 = 1.5;
        fp.g_s_profile = CouplingProfile::user_table({{6.9, 0.03}, {7.0, 0.05}, {7.2, 0.02}});
        const HamiltonianMatrix h = assemble_full_hamiltonian(fp, g);
        REQUIRE(h.dim() == 5);

        const oracle::ProductSpace sp{n_atoms, 3, 3};
        const Eigen::MatrixXd big =
            oracle::three_level_hamiltonian(sp, 10.0, 1.5, 3.0, 0.07, g.frequencies, gs);
        std::vector<Eigen::VectorXd> basis = {oracle::ground_state(sp),
                                              oracle::symmetric_state(sp, 1, 0, 0)};
        for (int k = 0; k < 3; ++k)
            basis.push_back(oracle::symmetric_state(sp, 2, 0, 1 << k));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(h.entries(i, j) ==
                      doctest::Approx(basis[i].dot(big * basis[j])).epsilon(1e-14).scale(1.0));

        // sector closure: evolving the product-space ground state never
        // populates anything outside span{psi0, psi1, psi_k}
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big);
        const Eigen::VectorXd c = es.eigenvectors().transpose() * basis[0];
        const Trajectory tr =
            propagate_expm(h, AmplitudeState::initial(h.layout), std::vector{0.0, 3.0, 40.0});
        for (std::size_t s = 0; s < 3; ++s) {
            const double t = tr.samples[s].time;
            const Eigen::VectorXcd phase =
                (es.eigenvalues().cast<cd>() * cd(0.0, -t)).array().exp();
            const Eigen::VectorXcd psi =
                es.eigenvectors().cast<cd>() * (phase.asDiagonal() * c.cast<cd>());
            double inside = 0.0;
            for (int i = 0; i < 5; ++i) {
                const cd amp = basis[i].cast<cd>().dot(psi);
                inside += std::norm(amp);
                CHECK(std::abs(amp - tr.samples[s].amplitudes[i]) < 1e-11);
            }
            CHECK(inside == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("no Stokes coupling: two-level Rabi problem on psi0, psi1")
{
    FullParams fp;
    fp.g_p = 0.2;
    fp.detuning2 = 0.5;
    fp.g_s_profile = CouplingProfile::flat(0.0);
    const ModeGrid g = three_modes();
    const HamiltonianMatrix h = assemble_full_hamiltonian(fp, g);
    const auto times = linspace(0.0, 60.0, 121);
    const Trajectory tr = propagate_expm(h, AmplitudeState::initial(h.layout), times);
    const double coupling = std::sqrt(2.0) * 0.2;
    for (std::size_t s = 0; s < times.size(); ++s) {
        const double ref = oracle::two_level_ground(10.0, 10.5, coupling, times[s]);
        CHECK(std::norm(tr.samples[s].ground()) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
        CHECK(tr.samples[s].stokes().squaredNorm() < 1e-28);
    }
    // Rabi frequency sqrt(n g_p^2 + d2^2 / 4)
    const double omega = std::sqrt(2.0 * 0.04 + 0.25 / 4.0);
    const double t_half = pi / (2.0 * omega);
    const Trajectory at = propagate_expm(h, AmplitudeState::initial(h.layout), std::vector{t_half});
    CHECK(std::norm(at.samples[0].intermediate()) ==
          doctest::Approx(2.0 * 0.04 / (omega * omega)).epsilon(1e-12));
}

TEST_CASE("no pump coupling leaves the initial state alone")
{
    FullParams fp;
    fp.g_p = 0.0;
    fp.detuning2 = 2.0;
    fp.g_s_profile = CouplingProfile::flat(0.05);
    const HamiltonianMatrix h = assemble_full_hamiltonian(fp, three_modes());
    const Trajectory tr =
        propagate_expm(h, AmplitudeState::initial(h.layout), linspace(0.0, 500.0, 11));
    for (const auto& s : tr.samples)
        CHECK(std::abs(std::abs(s.ground()) - 1.0) < 1e-15);
}

TEST_CASE("effective coupling examples")
{
    FullParams fp;
    fp.g_p = 0.1;
    fp.g_s_profile = CouplingProfile::flat(0.1);
    fp.detuning2 = 10.0;
    CHECK(effective_coupling(fp, 7.0) == doctest::Approx(0.001).epsilon(1e-15));
    fp.detuning2 = 5.0;
    CHECK(effective_coupling(fp, 7.0) == doctest::Approx(0.002).epsilon(1e-15));
    fp.detuning2 = -10.0;
    CHECK(effective_coupling(fp, 7.0) == doctest::Approx(-0.001).epsilon(1e-15));
    fp.g_p = 0.0;
    CHECK(effective_coupling(fp, 7.0) == 0.0);
    fp.detuning2 = 0.0;
    CHECK(code_of([&] { effective_coupling(fp, 7.0); }) == Errc::division_by_zero);
    CHECK(code_of([&] { effective_system(fp); }) == Errc::division_by_zero);
    SystemParams eff;
    CHECK(code_of([&] { raman_parameters(eff, CouplingProfile::flat(0.01), 0.0, 1.0); }) ==
          Errc::division_by_zero);
}

TEST_CASE("Raman parameterization holds lambda and the light shift fixed")
{
    SystemParams eff;
    eff.n_atoms = 3;
    const CouplingProfile lam = CouplingProfile::flat(0.002);
    for (double d2 : {-300.0, 50.0, 4000.0}) {
        const FullParams fp = raman_parameters(eff, lam, d2, 4.5);
        CHECK(pump_light_shift(fp) == doctest::Approx(4.5 * (d2 > 0 ? 1 : -1)).epsilon(1e-12));
        CHECK(std::abs(effective_coupling(fp, 7.0)) == doctest::Approx(0.002).epsilon(1e-12));
        const FullParams r = rescale_detuning(fp, 10.0 * d2);
        CHECK(effective_coupling(r, 7.0) ==
              doctest::Approx(effective_coupling(fp, 7.0)).epsilon(1e-12));
        CHECK(r.g_p == doctest::Approx(fp.g_p * std::sqrt(10.0)).epsilon(1e-12));
    }
}

TEST_CASE("zero couplings give exactly zero discrepancies")
{
    FullParams fp;
    fp.g_p = 0.0;
    fp.detuning2 = 5.0;
    fp.g_s_profile = CouplingProfile::flat(0.0);
    const ModeGrid g = three_modes();
    const auto times = linspace(0.0, 100.0, 21);
    const HamiltonianMatrix hf = assemble_full_hamiltonian(fp, g);
    const HamiltonianMatrix he = assemble_comparison_hamiltonian(fp, g);
    const Trajectory a = propagate_expm(hf, AmplitudeState::initial(hf.layout), times);
    const Trajectory b = propagate_expm(he, AmplitudeState::initial(he.layout), times);
    const AdiabaticityReport r = adiabaticity_report(a, b, fp, g);
    CHECK(r.max_population_discrepancy == 0.0);
    CHECK(r.max_intermediate_population == 0.0);
    CHECK(r.ground_sup_deviation == 0.0);
    CHECK(r.passed());
}

TEST_CASE("report rejects mismatched trajectories")
{
    FullParams fp;
    fp.g_p = 0.01;
    fp.detuning2 = 5.0;
    fp.g_s_profile = CouplingProfile::flat(0.01);
    const ModeGrid g = three_modes();
    const HamiltonianMatrix hf = assemble_full_hamiltonian(fp, g);
    const HamiltonianMatrix he = assemble_comparison_hamiltonian(fp, g);
    const Trajectory a = propagate_expm(hf, AmplitudeState::initial(hf.layout), linspace(0, 1, 5));
    const Trajectory b = propagate_expm(he, AmplitudeState::initial(he.layout), linspace(0, 2, 5));
    const Trajectory c = propagate_expm(he, AmplitudeState::initial(he.layout), linspace(0, 1, 6));
    CHECK(code_of([&] { adiabaticity_report(a, b, fp, g); }) == Errc::invalid_argument);
    CHECK(code_of([&] { adiabaticity_report(a, c, fp, g); }) == Errc::invalid_argument);
}

TEST_CASE("coupling ratio 0.3 is reported as outside the adiabatic regime")
{
    const LadderRun run = ladder_point(0.3);
    CHECK(run.report.coupling_ratio == doctest::Approx(0.3).epsilon(1e-9));
    CHECK_FALSE(run.report.regime_ok);
    CHECK_FALSE(run.report.passed());
    CHECK(run.report.max_intermediate_population > 0.2);
}

TEST_CASE("elimination converges along a detuning ladder")
{
    std::vector<AdiabaticityReport> reports;
    for (double q : {0.1, 0.03, 0.01})
        reports.push_back(ladder_point(q).report);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        CHECK(r.regime_ok);
        CHECK(r.max_intermediate_population <= r.intermediate_bound);
        CHECK(r.passed());
        // time-averaged intermediate weight is O(ratio^2)
        CHECK(r.mean_intermediate_population < 4.0 * r.coupling_ratio * r.coupling_ratio);
        if (i > 0)
            CHECK(r.max_population_discrepancy < reports[i - 1].max_population_discrepancy);
    }
    CHECK(reports.back().max_intermediate_population <= 4e-4);
    CHECK(reports.back().ground_sup_deviation < 0.05);
}
