#include "doctest.h"

#include "rdlab/errors.hpp"
#include "rdlab/evolve.hpp"
#include "rdlab/front.hpp"
#include "rdlab/kernels.hpp"

#include <cmath>
#include <numbers>

using namespace rdlab;

TEST_CASE("equilibria are fixed points") {
    auto f = ReactionTerm::cubic(0.3);
    for (double level : {0.0, 0.3, 1.0}) {
        GridField u0 = GridField::sample(10.0, 0.1, 0.0,
                                         [&](double) { return level; });
        EvolveParams prm;
        prm.T = 1.0;
        prm.snapshot_dt = 0.5;
        auto traj = evolve(u0, f, prm);
        CHECK(kernels::max_abs_diff(traj.snaps.back().u, u0.u) < 1e-12);
    }
}

TEST_CASE("translating front matches the shifted profile") {
    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    double c = p.speed();
    double X = recommended_halfwidth(p.resolved_halfspan(1e-8), c, 5.0);
    GridField u0 =
        GridField::sample(X, 0.05, 0.0, [&](double x) { return p.value(x); });
    EvolveParams prm;
    prm.T = 5.0;
    prm.snapshot_dt = 0.25;
    prm.boundary = DirichletBC{[&](double t) { return p.value(-X + c * t); },
                               [&](double t) { return p.value(X + c * t); }};
    auto traj = evolve(u0, f, prm);
    const GridField& last = traj.snaps.back();
    double worst = 0.0;
    for (std::size_t i = 0; i < last.n(); ++i) {
        double x = last.x(i);
        if (std::abs(x) > X - 5.0) continue; // interior comparison
        worst = std::max(worst, std::abs(last.u[i] - p.value(x + 5.0 * c)));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("grid refinement is second order on the translating front") {
    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    double c = p.speed();
    double X = 20.0;
    auto run = [&](double dx) {
        GridField u0 = GridField::sample(X, dx, 0.0,
                                         [&](double x) { return p.value(x); });
        EvolveParams prm;
        prm.T = 2.0;
        prm.snapshot_dt = 0.5;
        prm.dt = 0.25 * dx * dx;
        prm.boundary =
            DirichletBC{[&](double t) { return p.value(-X + c * t); },
                        [&](double t) { return p.value(X + c * t); }};
        auto traj = evolve(u0, f, prm);
        const GridField& last = traj.snaps.back();
        double worst = 0.0;
        for (std::size_t i = 0; i < last.n(); ++i) {
            double x = last.x(i);
            if (std::abs(x) > X - 4.0) continue;
            worst = std::max(worst, std::abs(last.u[i] - p.value(x + 2.0 * c)));
        }
        return worst;
    };
    double e1 = run(0.2), e2 = run(0.1), e3 = run(0.05);
    double r1 = e1 / e2, r2 = e2 / e3;
    CHECK(r1 > 2.8);
    CHECK(r1 < 6.0);
    CHECK(r2 > 2.8);
    CHECK(r2 < 6.0);
}

TEST_CASE("invariant interval") {
    auto f = ReactionTerm::cubic(0.4);
    GridField u0 = GridField::sample(15.0, 0.05, 0.0, [](double x) {
        return 0.5 + 0.5 * std::sin(0.7 * x);
    });
    EvolveParams prm;
    prm.T = 4.0;
    auto traj = evolve(u0, f, prm);
    for (const auto& s : traj.snaps) {
        auto [lo, hi] = kernels::minmax(s.u);
        CHECK(lo >= -1e-6);
        CHECK(hi <= 1.0 + 1e-6);
    }
}

TEST_CASE("comparison check") {
    auto f = ReactionTerm::cubic(0.3);
    GridField zero = GridField::sample(10.0, 0.1, 0.0, [](double) { return 0.0; });
    GridField one = GridField::sample(10.0, 0.1, 0.0, [](double) { return 1.0; });
    EvolveParams prm;
    prm.T = 2.0;

    auto rep = comparison_check(zero, one, f, prm);
    CHECK(rep.pass);
    CHECK(rep.max_violation == 0.0);

    auto same = comparison_check(zero, zero, f, prm);
    CHECK(same.pass);

    // smooth ordered pair stays ordered
    GridField lo0 = GridField::sample(10.0, 0.1, 0.0, [](double x) {
        return 0.4 * std::exp(-x * x / 8.0);
    });
    GridField hi0 = GridField::sample(10.0, 0.1, 0.0, [](double x) {
        return 0.5 + 0.4 * std::exp(-x * x / 10.0);
    });
    auto rep2 = comparison_check(lo0, hi0, f, prm);
    CHECK(rep2.pass);

    CHECK_THROWS_AS(comparison_check(one, zero, f, prm), std::invalid_argument);
}

TEST_CASE("schauder formulas and monitor") {
    using std::numbers::pi;
    CHECK(schauder_l2(1.0, 1.0, 1.0) ==
          doctest::Approx(3.0 / std::sqrt(pi)).epsilon(1e-13));
    CHECK(schauder_l4(1.0, 1.0, 1.0) ==
          doctest::Approx(schauder_l3(1.0, 1.0, 1.0) + 1.0).epsilon(1e-13));

    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    double c = p.speed();
    double X = recommended_halfwidth(p.resolved_halfspan(1e-8), c, 3.0);
    GridField u0 =
        GridField::sample(X, 0.05, 0.0, [&](double x) { return p.value(x); });
    EvolveParams prm;
    prm.T = 3.0;
    prm.snapshot_dt = 0.05;
    prm.boundary = DirichletBC{[&](double t) { return p.value(-X + c * t); },
                               [&](double t) { return p.value(X + c * t); }};
    auto traj = evolve(u0, f, prm);
    auto rep = derivative_bounds(traj, f, 1.0);
    CHECK(rep.pass);
    CHECK(rep.observed_sup_ux <= rep.L2);
    CHECK(rep.observed_sup_uxx <= rep.L3);
    CHECK(rep.observed_sup_ut <= rep.L4);
    CHECK(rep.observed_sup_ux > 0.1); // sanity: it saw the front

    // too-short trajectory
    EvolveParams shortp;
    shortp.T = 0.5;
    shortp.snapshot_dt = 0.1;
    auto short_traj = evolve(u0, f, shortp);
    CHECK_THROWS_AS(derivative_bounds(short_traj, f, 1.0),
                    std::invalid_argument);
}

TEST_CASE("blow-up and NaN guards") {
    auto bad = ReactionTerm::unchecked([](double u) { return u * u; },
                                       [](double u) { return 2.0 * u; },
                                       [](double) { return 2.0; });
    GridField u0 = GridField::sample(5.0, 0.1, 0.0, [](double) { return 3.0; });
    EvolveParams prm;
    prm.T = 10.0;
    prm.snapshot_dt = 0.05;
    CHECK_THROWS_AS(evolve(u0, bad, prm), numerical_error);

    GridField nan0 = GridField::sample(5.0, 0.1, 0.0, [](double) { return 0.5; });
    nan0.u[3] = std::nan("");
    CHECK_THROWS_AS(evolve(nan0, ReactionTerm::cubic(0.3), prm),
                    numerical_error);
}
