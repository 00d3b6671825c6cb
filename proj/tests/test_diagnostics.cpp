#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "collar/diagnostics.hpp"

using namespace collar;

namespace {

MatterModel vac3(double Lambda = 0.0) {
    return power_law_matter(AngularAmplitude(0.0), AngularAmplitude(0.0), AngularAmplitude(0.0),
                            2.0, 4.0, Lambda, 3);
}

InitialDataFamily schwarzschild(const SphereGrid& sphere, double r0, double r_max, int count) {
    RadialGrid grid = RadialGrid::geometric(r0, r_max, count, 3, 0.0);
    RadialSolution sol = solve_spherical(vac3(), grid, {BoundaryMode::minimal, 0.0});
    return make_data_from_spherical(sol, sphere);
}

InitialDataFamily flat(const SphereGrid& sphere, double r0, double r_max, int count) {
    RadialGrid grid = RadialGrid::geometric(r0, r_max, count, 3, 0.0);
    RadialSolution sol = solve_spherical(vac3(), grid, {BoundaryMode::prescribed, 1.0});
    return make_data_from_spherical(sol, sphere);
}

}  // namespace

TEST_CASE("null expansions: flat, horizon leaf, algebraic identity") {
    SphereGrid sphere = build_grid(8, 16);
    InitialDataFamily f = flat(sphere, 2.0, 50.0, 64);
    NullExpansions ex = null_expansions(f, 0);  // r = 2
    for (std::size_t i = 0; i < ex.theta_plus.size(); ++i) {
        REQUIRE(ex.theta_plus[i] == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(ex.theta_minus[i] == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(ex.spacetime_H2[i] == Catch::Approx(1.0).margin(1e-12));
    }

    InitialDataFamily s = schwarzschild(sphere, 2.0, 50.0, 64);
    NullExpansions hex = null_expansions(s, 0);
    CHECK(hex.theta_plus.max_abs() <= 1e-12);
    CHECK(hex.theta_minus.max_abs() <= 1e-12);

    // theta+ theta- = (2/(rN))^2 - 4 p^2 pointwise on an arbitrary slice
    InitialDataFamily arb = s;
    for (std::size_t i = 0; i < arb.p.size(); ++i)
        for (std::size_t m = 0; m < arb.p[i].size(); ++m) arb.p[i][m] = 0.01 * (1.0 + double(m % 5));
    NullExpansions aex = null_expansions(arb, 3);
    const double r = arb.radius(3);
    for (std::size_t m = 0; m < aex.spacetime_H2.size(); ++m) {
        const double w = arb.inv_N[3][m], pp = arb.p[3][m];
        REQUIRE(aex.spacetime_H2[m] ==
                Catch::Approx(4.0 * w * w / (r * r) - 4.0 * pp * pp).margin(1e-14));
    }
}

TEST_CASE("hawking energy: flat zero, Schwarzschild constant m") {
    SphereGrid sphere = build_grid(8, 16);
    InitialDataFamily f = flat(sphere, 2.0, 50.0, 64);
    for (std::size_t i = 0; i < f.n_radii(); i += 9)
        REQUIRE(hawking_energy(f, i) == Catch::Approx(0.0).margin(1e-12));

    InitialDataFamily s = schwarzschild(sphere, 2.0, 100.0, 96);  // 2m = r0 = 2
    for (std::size_t i = 0; i < s.n_radii(); i += 9)
        REQUIRE(hawking_energy(s, i) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("hawking energy increases with matter and reaches E_ADM") {
    SphereGrid sphere = build_grid(8, 16);
    const double mu0 = 0.02, r0 = 2.0;
    MatterModel m = power_law_matter(AngularAmplitude(mu0), AngularAmplitude(0.0),
                                     AngularAmplitude(0.0), 2.0, 4.0, 0.0, 3);
    RadialGrid grid = RadialGrid::geometric(r0, 400.0, 400, 3, 0.0);
    RadialSolution sol = solve_spherical(m, grid, {BoundaryMode::minimal, 0.0});
    InitialDataFamily d = make_data_from_spherical(sol, sphere);
    double prev = hawking_energy(d, 0);
    for (std::size_t i = 1; i < d.n_radii(); ++i) {
        const double cur = hawking_energy(d, i);
        REQUIRE(cur >= prev - 1e-14);
        prev = cur;
    }
    AdmResult adm = adm_quantities(d);
    // closed form: E = r0/2 + 4 pi mu0 / r0
    CHECK(adm.E == Catch::Approx(0.5 * r0 + 4.0 * kPi * mu0 / r0).margin(2e-6));
    CHECK(std::abs(hawking_energy(d, d.n_radii() - 1) - adm.E) <= adm.tail_bound);
}

TEST_CASE("AH hawking energy: Schwarzschild-AdS constant, flat hyperbolic zero") {
    SphereGrid sphere = build_grid(8, 16);
    const double mass = 0.6;
    RadialGrid grid = RadialGrid::geometric(1.0, 80.0, 120, 3, -3.0);
    MatterModel vac = vac3(-3.0);
    RadialP p = solve_p(vac, grid);
    RadialF ff = solve_f(p, vac, 2.0 * mass, grid);
    RadialSolution sol;
    sol.grid = grid;
    sol.model = vac;
    sol.boundary = {BoundaryMode::prescribed, 0.0};
    sol.p = p;
    sol.f = ff;
    sol.f0 = 2.0 * mass;
    sol.inv_N = lapse_inverse_from_f(ff, grid);
    InitialDataFamily d = make_data_from_spherical(sol, sphere);
    for (std::size_t i = 0; i < d.n_radii(); i += 13)
        REQUIRE(hawking_energy_AH(d, i) == Catch::Approx(mass).margin(1e-8));

    RadialF f0f = solve_f(p, vac, 0.0, grid);
    sol.f = f0f;
    sol.f0 = 0.0;
    sol.inv_N = lapse_inverse_from_f(f0f, grid);
    InitialDataFamily h = make_data_from_spherical(sol, sphere);
    for (std::size_t i = 0; i < h.n_radii(); i += 13) {
        // the formula cancels terms of size r^3; allow their roundoff
        const double r = h.radius(i);
        REQUIRE(hawking_energy_AH(h, i) == Catch::Approx(0.0).margin(1e-12 * (1 + r * r * r)));
    }
}

TEST_CASE("hyperboloidal identity: m_H equals m_H^AH of the reduced data") {
    // Lambda = 0 data with p^2 = 1 + ptilde^2; m_H computed with p matches
    // m_H^AH computed from (g, ptilde g) slice by slice
    SphereGrid sphere = build_grid(8, 16);
    RadialGrid grid = RadialGrid::geometric(1.0, 60.0, 80, 3, 0.0);
    InitialDataFamily d;
    d.grid = grid;
    d.sphere = &sphere;
    d.family = MetricFamily::round_family(sphere);
    d.matter = vac3();
    d.boundary = BoundaryMode::prescribed;
    d.hyperboloidal = true;
    const double mass = 0.4;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.nodes[i];
        const double w2 = 1.0 + r * r - 2.0 * mass / r;  // AdS-type lapse profile
        const double ptilde = 0.3 * std::pow(r, -2.0);
        d.inv_N.emplace_back(sphere, std::sqrt(w2));
        d.p.emplace_back(sphere, std::sqrt(1.0 + ptilde * ptilde));
        d.k.emplace_back(sphere, std::sqrt(1.0 + ptilde * ptilde));
    }
    d.validate();
    for (std::size_t i = 0; i < d.n_radii(); i += 7)
        REQUIRE(hawking_energy(d, i) ==
                Catch::Approx(hawking_energy_AH(d, i, true)).margin(1e-12));
}

TEST_CASE("modified mass reduces to Hawking energy in spherical symmetry") {
    SphereGrid sphere = build_grid(8, 16);
    MatterModel m = power_law_matter(AngularAmplitude(0.05), AngularAmplitude(0.1),
                                     AngularAmplitude(0.0), 2.0, 3.0, 0.0, 3);
    RadialGrid grid = RadialGrid::geometric(1.0, 60.0, 80, 3, 0.0);
    RadialSolution sol = solve_spherical(m, grid, {BoundaryMode::generalized_horizon, 0.0});
    InitialDataFamily d = make_data_from_spherical(sol, sphere);
    for (FChoice fc : {FChoice{FChoiceKind::zero}, FChoice{FChoiceKind::eps_full, 0.5},
                       FChoice{FChoiceKind::eps_full, 1.0}, FChoice{FChoiceKind::angular_ratio}}) {
        std::vector<double> mf = modified_mass_series(d, fc);
        for (std::size_t i = 0; i < d.n_radii(); i += 11)
            REQUIRE(mf[i] == Catch::Approx(hawking_energy(d, i)).margin(1e-12));
    }
    // m_H(r0) = sqrt(|Sigma_r0|/16pi) on a generalized-horizon boundary
    CHECK(hawking_energy(d, 0) ==
          Catch::Approx(std::sqrt(d.radius(0) * d.radius(0) * kFourPi / (16.0 * kPi)))
              .margin(1e-12));
}

TEST_CASE("adm quantities: flat and Schwarzschild") {
    SphereGrid sphere = build_grid(8, 16);
    InitialDataFamily f = flat(sphere, 2.0, 100.0, 128);
    AdmResult af = adm_quantities(f);
    CHECK(af.E == Catch::Approx(0.0).margin(1e-10));
    CHECK(std::abs(af.P[0]) + std::abs(af.P[1]) + std::abs(af.P[2]) <= 1e-12);

    InitialDataFamily s = schwarzschild(sphere, 2.0, 200.0, 256);
    AdmResult as = adm_quantities(s);
    CHECK(as.E == Catch::Approx(1.0).margin(1e-6));
    CHECK(as.method == "adm_integral");
    CHECK(std::abs(as.P[0]) + std::abs(as.P[1]) + std::abs(as.P[2]) <= 1e-12);
}

TEST_CASE("untrapped scan") {
    SphereGrid sphere = build_grid(8, 16);
    InitialDataFamily f = flat(sphere, 2.0, 50.0, 64);
    CHECK(untrapped_scan(f).all_true());

    InitialDataFamily s = schwarzschild(sphere, 2.0, 50.0, 64);
    UntrappedScan scan = untrapped_scan(s);
    CHECK_FALSE(scan.flag[0]);  // boundary is marginal
    CHECK(scan.interior_true());

    InitialDataFamily bad = f;
    for (std::size_t m = 0; m < bad.p[3].size(); ++m) bad.p[3][m] = 2.0;  // r^2 p^2 > 1/N^2
    CHECK_FALSE(untrapped_scan(bad).flag[3]);
}

TEST_CASE("penrose report: Schwarzschild rigidity case") {
    SphereGrid sphere = build_grid(8, 16);
    InitialDataFamily s = schwarzschild(sphere, 2.0, 200.0, 256);
    DiagnosticsReport rep = penrose_report(s, {{FChoiceKind::zero}});
    CHECK(rep.penrose.state == VerdictState::pass);
    CHECK(std::abs(rep.penrose_gap) <= 1e-6);
    CHECK(rep.monotonicity.state == VerdictState::pass);
    CHECK(rep.dec_verdict.state == VerdictState::pass);
    CHECK(rep.boundary_mode == "minimal");
    REQUIRE_FALSE(rep.horizon_radii.empty());
    CHECK(rep.horizon_radii.front() == Catch::Approx(2.0));
    CHECK(rep.rigidity.evaluated);
    CHECK(rep.rigidity.sigma_round);
    CHECK(rep.rigidity.N_angular_constant);
    CHECK(rep.rigidity.J0_small);
    CHECK(rep.decay.pass);
    // report self-consistency
    CHECK(rep.penrose_gap ==
          Catch::Approx(rep.E_ADM - std::sqrt(rep.area_r0 / (16.0 * kPi))).margin(1e-14));
}

TEST_CASE("penrose report: matter gap matches the closed form") {
    SphereGrid sphere = build_grid(8, 16);
    const double mu0 = 0.015, r0 = 2.0;
    MatterModel m = power_law_matter(AngularAmplitude(mu0), AngularAmplitude(0.0),
                                     AngularAmplitude(0.0), 2.0, 4.0, 0.0, 3);
    RadialGrid grid = RadialGrid::geometric(r0, 400.0, 420, 3, 0.0);
    RadialSolution sol = solve_spherical(m, grid, {BoundaryMode::minimal, 0.0});
    InitialDataFamily d = make_data_from_spherical(sol, sphere);
    DiagnosticsReport rep = penrose_report(d, {{FChoiceKind::zero}});
    // gap = int_{r0}^inf int r^2 mu dA dr / (8pi) * 8pi = 4 pi mu0 / r0
    CHECK(rep.penrose_gap == Catch::Approx(4.0 * kPi * mu0 / r0).epsilon(2e-4));
    CHECK(rep.penrose.state == VerdictState::pass);
    CHECK(rep.monotonicity.state == VerdictState::pass);
}

TEST_CASE("penrose report: DEC violation gates verdicts to not-applicable") {
    SphereGrid sphere = build_grid(8, 16);
    MatterModel bad = power_law_matter(AngularAmplitude(0.01), AngularAmplitude(0.2),
                                       AngularAmplitude(0.0), 2.0, 3.0, 0.0, 3);
    RadialGrid grid = RadialGrid::geometric(1.0, 50.0, 64, 3, 0.0);
    RadialSolution sol = solve_spherical(bad, grid, {BoundaryMode::prescribed, 0.8});
    InitialDataFamily d = make_data_from_spherical(sol, sphere);
    DiagnosticsReport rep = penrose_report(d, {{FChoiceKind::zero}});
    CHECK(rep.dec_verdict.state == VerdictState::fail);
    CHECK(rep.monotonicity.state == VerdictState::not_applicable);
    CHECK(rep.penrose.state == VerdictState::not_applicable);
    CHECK(rep.refined.at("zero").state == VerdictState::not_applicable);
}

TEST_CASE("wrong dimension is rejected") {
    SphereGrid sphere = build_grid(8, 16);
    RadialGrid grid = RadialGrid::geometric(1.0, 50.0, 64, 4, 0.0);
    MatterModel vac = power_law_matter(AngularAmplitude(0.0), AngularAmplitude(0.0),
                                       AngularAmplitude(0.0), 2.5, 3.5, 0.0, 4);
    RadialSolution sol = solve_spherical(vac, grid, {BoundaryMode::prescribed, 1.0});
    InitialDataFamily d = make_data_from_spherical(sol, sphere);
    CHECK_THROWS_AS(hawking_energy(d, 0), std::invalid_argument);
    CHECK_THROWS_AS(adm_quantities(d), std::invalid_argument);
}
