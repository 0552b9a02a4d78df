#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <coadjoint/diagnostics.hpp>
#include <coadjoint/models/heavy_top.hpp>
#include <coadjoint/models/sine_euler.hpp>
#include <cstdlib>

using namespace coadjoint;

namespace {

Trajectory fake_trajectory() {
    Trajectory traj;
    traj.times = {0.0, 1.0, 2.0};
    traj.states = {Vec{1.0}, Vec{1.0}, Vec{1.0}};
    traj.hamiltonian_series = {2.0, 2.1, 1.9};
    traj.casimir_names = {"big", "tiny"};
    traj.casimir_series = {Vec{2.0, 2.2, 1.8}, Vec{5e-15, 1e-3, -2e-3}};
    return traj;
}

}  // namespace

TEST_CASE("drift series") {
    Trajectory traj = fake_trajectory();
    auto drifts = drift_series(traj);
    REQUIRE(drifts.size() == 2);

    SECTION("starts at zero and stays nonnegative") {
        for (const auto& [name, series] : drifts) {
            (void)name;
            REQUIRE(series[0] == 0.0);
            for (double d : series) REQUIRE(d >= 0.0);
        }
    }

    SECTION("references away from zero are relative") {
        const Vec& big = drifts[0].second;
        REQUIRE(std::abs(big[1] - 0.1) < 1e-14);
        REQUIRE(std::abs(big[2] - 0.1) < 1e-14);
    }

    SECTION("near-zero references switch to absolute error") {
        const Vec& tiny = drifts[1].second;
        REQUIRE(std::abs(tiny[1] - 1e-3) < 1e-14);
        REQUIRE(std::abs(tiny[2] - 2e-3) < 1e-14);
    }

    SECTION("validation") {
        Trajectory empty;
        REQUIRE_THROWS_AS(drift_series(empty), std::invalid_argument);
        Trajectory no_casimirs = fake_trajectory();
        no_casimirs.casimir_series.clear();
        REQUIRE_THROWS_AS(drift_series(no_casimirs), std::invalid_argument);
        Trajectory ragged = fake_trajectory();
        ragged.casimir_series[0].pop_back();
        REQUIRE_THROWS_AS(drift_series(ragged), std::invalid_argument);
    }
}

TEST_CASE("energy drift series") {
    Trajectory traj = fake_trajectory();
    Vec drift = energy_drift_series(traj);
    REQUIRE(drift[0] == 0.0);
    REQUIRE(std::abs(drift[1] - 0.05) < 1e-14);

    Trajectory empty;
    REQUIRE_THROWS_AS(energy_drift_series(empty), std::invalid_argument);
}

TEST_CASE("strong order estimation") {
    HeavyTopParams det_params;
    det_params.alpha = {0.0, 0.0, 0.0};
    const LiePoissonSystem det = build_heavy_top(det_params);
    const LiePoissonSystem noisy = build_heavy_top({});
    const TimeGrid base(0.0, 0.1, 10);
    StepperConfig cfg;

    SECTION("input validation") {
        Vec levels{0.1, 0.05};
        REQUIRE_THROWS_AS(strong_order(det.algebra, det.hamiltonian, det.mu0, base, {}, levels, cfg),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(
            strong_order(det.algebra, det.hamiltonian, det.mu0, base, {1}, Vec{0.1}, cfg),
            std::invalid_argument);
        REQUIRE_THROWS_AS(strong_order(det.algebra, det.hamiltonian, det.mu0, base, {1},
                                       Vec{0.1, 0.03}, cfg),
                          std::invalid_argument);  // not a dyadic refinement
        REQUIRE_THROWS_AS(strong_order(det.algebra, det.hamiltonian, det.mu0, base, {1},
                                       Vec{0.05, 0.1}, cfg),
                          std::invalid_argument);  // increasing
        REQUIRE_THROWS_AS(strong_order(det.algebra, det.hamiltonian, det.mu0,
                                       TimeGrid(0.0, 0.1, 0), {1}, Vec{0.1, 0.05}, cfg),
                          std::invalid_argument);
    }

    SECTION("deterministic trapezoidal stepper fits slope two") {
        Vec levels{std::ldexp(0.1, 0), std::ldexp(0.1, -1), std::ldexp(0.1, -2)};
        OrderFit fit =
            strong_order(det.algebra, det.hamiltonian, det.mu0, base, {1, 2}, levels, cfg);
        REQUIRE(fit.slope == Catch::Approx(2.0).margin(0.15));
        REQUIRE(fit.warnings.empty());
        REQUIRE(fit.n_samples == 6);
        REQUIRE(fit.level_counts == std::vector<int>{2, 2, 2});
        for (std::size_t l = 1; l < fit.errors.size(); ++l)
            REQUIRE(fit.errors[l] < fit.errors[l - 1]);
    }

    SECTION("driven explicit stepper fits slope one") {
        StepperConfig em = cfg;
        em.method = Method::EulerMaruyamaMk;
        Vec levels{std::ldexp(0.1, -1), std::ldexp(0.1, -2), std::ldexp(0.1, -3)};
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = 0; s < 16; ++s) seeds.push_back(s);
        OrderFit fit =
            strong_order(noisy.algebra, noisy.hamiltonian, noisy.mu0, base, seeds, levels, em);
        REQUIRE(fit.slope > 0.7);
        REQUIRE(fit.slope < 1.35);
    }

    SECTION("unattainable chord tolerance excludes everything") {
        StepperConfig strict = cfg;
        strict.chord_tol = 1e-30;
        Vec levels{0.1, 0.05};
        REQUIRE_THROWS_AS(strong_order(noisy.algebra, noisy.hamiltonian, noisy.mu0, base, {1, 2},
                                       levels, strict),
                          std::runtime_error);
    }

    SECTION("results are independent of the thread budget") {
        Vec levels{0.1, 0.05};
        OrderFit base_fit =
            strong_order(noisy.algebra, noisy.hamiltonian, noisy.mu0, base, {1, 2, 3}, levels, cfg);
        setenv("COADJOINT_THREADS", "4", 1);
        OrderFit threaded =
            strong_order(noisy.algebra, noisy.hamiltonian, noisy.mu0, base, {1, 2, 3}, levels, cfg);
        unsetenv("COADJOINT_THREADS");
        REQUIRE(base_fit.slope == threaded.slope);
        REQUIRE(base_fit.errors == threaded.errors);
    }
}

TEST_CASE("stability probe") {
    const LiePoissonSystem top = build_heavy_top({});
    StepperConfig cfg;

    SECTION("validation") {
        REQUIRE_THROWS_AS(
            stability_probe(top.algebra, top.hamiltonian, top.mu0, Vec{0.1}, 0.0, 7, cfg),
            std::invalid_argument);
        REQUIRE_THROWS_AS(
            stability_probe(top.algebra, top.hamiltonian, top.mu0, Vec{-0.1}, 10.0, 7, cfg),
            std::invalid_argument);
    }

    SECTION("separates stable from diverged step sizes") {
        // Translation flow on the Heisenberg coalgebra: orbits are planes, so the
        // second coordinate grows at rate mu0[2] and a huge step leaves the
        // divergence threshold in one move.  The compact-orbit models never do.
        CMat x(3), y(3), z(3);
        x(0, 1) = 1.0;
        y(1, 2) = 1.0;
        z(0, 2) = 1.0;
        LieAlgebra heis = algebra_from_basis({x, y, z}, Chirality::LeftInvariant);
        SemimartingaleHamiltonian ham;
        ham.drift = salt_hamiltonian({AlgebraVector{1.0, 0.0, 0.0}})[0];
        DualVector mu0{0.0, 0.0, 1.0e4};
        StabilityReport report = stability_probe(heis, ham, mu0, Vec{0.1, 1e5}, 10.0, 7, cfg);
        REQUIRE(report.verdicts.size() == 2);
        REQUIRE(report.verdicts[0].second == StabilityVerdict::Stable);
        REQUIRE(report.verdicts[1].second == StabilityVerdict::Diverged);
        REQUIRE(report.largest_stable_dt == 0.1);
    }

    SECTION("chord breakdown is reported separately") {
        SineEulerParams p;
        p.init = uniform_mode_init(1, 3);
        const LiePoissonSystem sine = build_sine_euler(p);
        StabilityReport report =
            stability_probe(sine.algebra, sine.hamiltonian, sine.mu0, Vec{500.0}, 1000.0, 42, cfg);
        REQUIRE(report.verdicts[0].second == StabilityVerdict::ChordFailed);
        REQUIRE(report.largest_stable_dt == 0.0);
    }

    SECTION("chord failure bounds the usable step before state blow-up does") {
        StabilityReport report =
            stability_probe(top.algebra, top.hamiltonian, top.mu0, Vec{0.1, 2.5}, 100.0, 7, cfg);
        REQUIRE(report.verdicts[0].second == StabilityVerdict::Stable);
        REQUIRE(report.verdicts[1].second == StabilityVerdict::ChordFailed);
        REQUIRE(report.largest_stable_dt == 0.1);
    }

    SECTION("verdict names") {
        REQUIRE(std::string(to_string(StabilityVerdict::Stable)) == "Stable");
        REQUIRE(std::string(to_string(StabilityVerdict::Diverged)) == "Diverged");
        REQUIRE(std::string(to_string(StabilityVerdict::ChordFailed)) == "ChordFailed");
    }
}
