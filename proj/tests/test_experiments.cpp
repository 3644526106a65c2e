#include "doctest.h"

#include "rdlab/errors.hpp"
#include "rdlab/experiments.hpp"

#include <cmath>
#include <random>

using namespace rdlab;

TEST_CASE("rate_fit recovers exact exponentials") {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i < 40; ++i) {
        double t = 0.5 * i;
        series.emplace_back(t, 2.5 * std::exp(-0.37 * t));
    }
    auto fit = rate_fit(series);
    CHECK(fit.rate == doctest::Approx(-0.37).epsilon(1e-10));
    CHECK(fit.prefactor == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(fit.residual < 1e-10);
    CHECK(fit.decaying);
}

TEST_CASE("rate_fit tolerates multiplicative noise") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i < 100; ++i) {
        double t = 0.25 * i;
        series.emplace_back(t, 1.3 * std::exp(-0.42 * t) * (1.0 + noise(rng)));
    }
    auto fit = rate_fit(series);
    CHECK(std::abs(-fit.rate - 0.42) < 0.05 * 0.42);
}

TEST_CASE("rate_fit guards") {
    std::vector<std::pair<double, double>> flat;
    for (int i = 0; i < 20; ++i) flat.emplace_back(double(i), 0.7);
    auto fit = rate_fit(flat);
    CHECK(std::abs(fit.rate) < 1e-12);
    CHECK_FALSE(fit.decaying);

    std::vector<std::pair<double, double>> few = {{0, 1}, {1, 0.5}, {2, 0.25}};
    CHECK_THROWS_AS(rate_fit(few), std::invalid_argument);
    std::vector<std::pair<double, double>> neg = {
        {0, 1}, {1, -0.5}, {2, 0.25}, {3, 0.1}};
    CHECK_THROWS_AS(rate_fit(neg), std::invalid_argument);
}

TEST_CASE("constant convergence patterns 2 and 4") {
    auto f = ReactionTerm::cubic(0.3);
    GridField above = GridField::sample(8.0, 0.1, 0.0, [](double) { return 0.35; });
    auto rep2 = constant_convergence(f, above, 2);
    CHECK(rep2.pass);
    CHECK(rep2.predicted_rate == doctest::Approx(0.7)); // |f'(1)| = 1 - alpha
    CHECK(std::abs(-rep2.fitted_rate - 0.7) < 0.21);

    GridField below = GridField::sample(8.0, 0.1, 0.0, [](double) { return 0.25; });
    auto rep4 = constant_convergence(f, below, 4);
    CHECK(rep4.pass);
    CHECK(rep4.predicted_rate == doctest::Approx(0.3)); // |f'(0)| = alpha

    // hypothesis guards
    CHECK_THROWS_AS(constant_convergence(f, below, 2), std::invalid_argument);
    CHECK_THROWS_AS(constant_convergence(f, above, 4), std::invalid_argument);
}

TEST_CASE("front stability with zero perturbation is exact") {
    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    auto rep = front_stability(f, p, [](double) { return 0.0; }, 0.0, 4.0, 0.1);
    CHECK(rep.pass);
    CHECK(rep.final_deviation < 2e-4); // grid-level error only
    for (double s : rep.shift_estimates) CHECK(std::abs(s) < 5e-3);
}

TEST_CASE("front stability absorbs a bump") {
    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    auto bump = [](double x) { return std::exp(-x * x / 4.0); };
    auto rep = front_stability(f, p, bump, 0.05, 25.0, 0.1);
    CHECK(rep.pass);
    CHECK(rep.final_deviation < 1e-3);
    CHECK(rep.fitted_rate < 0.0);
}

TEST_CASE("narrow bump collapses") {
    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    DivergingPairSpec spec;
    spec.halfwidth = 0.5; // width 1
    spec.edge = 0.5;
    auto rep = diverging_pair(f, p, spec, 25.0, 0.1);
    CHECK_FALSE(rep.two_fronts);
    CHECK(rep.collapsed);
}

TEST_CASE("lower bound L1 formulas") {
    auto f = ReactionTerm::cubic(0.3);
    auto p = solve_front_bistable(f);
    auto e = edge_eigenvalues(f, p.speed());
    auto tb = fit_tail_constants(p, e);
    auto sc = compute_constants(f);

    LowerBoundInputs in;
    in.alpha = 0.3;
    in.beta1 = 0.1;
    in.q0 = 0.65; // 1 - q0 < alpha + beta1 = 0.4
    in.q1 = 0.8;
    in.beta = 0.5;
    in.M3 = tb.M3;
    in.M4 = tb.M4;
    in.b = sc.b;
    in.w = sc.w;
    in.c = p.speed();
    in.mu2 = e.mu2;
    in.lambda1 = e.lambda1;

    double L1 = lower_bound_L1(in);
    CHECK(L1 > 0.0);

    // the max includes -phi0
    double mu1t = 0.5 * std::abs(in.mu2);
    double mu2t = 0.5 * std::min(-in.mu2 * in.c, mu1t);
    double Mbar = (in.w + in.b) / (in.c * in.beta * in.mu2) * in.M3 -
                  (in.w + mu2t) / (in.beta * mu2t) * in.q0;
    double phi0 = std::min(
        {Mbar, Mbar - std::log((in.q1 - in.q0) / in.M3) / in.mu2,
         Mbar - std::log((mu1t - mu2t) * in.q0 / (in.b * in.M3)) / in.mu2});
    CHECK(L1 >= -phi0 - 1e-12);

    // monotone increasing in beta1, diverging as beta1 -> (1-alpha)
    double prev = 0.0;
    for (double b1 : {0.1, 0.3, 0.5, 0.65, 0.69, 0.699}) {
        LowerBoundInputs j = in;
        j.beta1 = b1;
        j.q0 = std::max(in.q0, 1.0 - in.alpha - b1 + 1e-3);
        double v = lower_bound_L1(j);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev > 10.0);

    // admissibility violations name the inequality
    LowerBoundInputs bad = in;
    bad.q1 = 0.6; // q1 < q0
    CHECK_THROWS_WITH_AS(lower_bound_L1(bad),
                         doctest::Contains("1 - q1 < 1 - q0"),
                         std::invalid_argument);
    bad = in;
    bad.beta1 = 0.8; // alpha + beta1 > 1
    CHECK_THROWS_WITH_AS(lower_bound_L1(bad),
                         doctest::Contains("alpha + beta1 < 1"),
                         std::invalid_argument);
}

TEST_CASE("lower bound L2 mirrors L1") {
    auto f = ReactionTerm::cubic(0.7);
    auto p = solve_front_bistable(f);
    REQUIRE(p.speed() < 0.0);
    auto e = edge_eigenvalues(f, p.speed());
    auto tb = fit_tail_constants(p, e);
    auto sc = compute_constants(f);

    LowerBoundInputs in;
    in.alpha = 0.7;
    in.beta1 = 0.1; // beta2
    in.q0 = 0.65;   // alpha - beta2 = 0.6 < q0 < q1 < alpha
    in.q1 = 0.68;
    in.beta = 0.5;
    in.M3 = tb.M3;
    in.M4 = tb.M4;
    in.b = sc.b;
    in.w = sc.w;
    in.c = p.speed();
    in.mu2 = e.mu2;
    in.lambda1 = e.lambda1;
    double L2 = lower_bound_L2(in);
    CHECK(L2 > 0.0);

    LowerBoundInputs bad = in;
    bad.q1 = 0.75; // q1 >= alpha
    CHECK_THROWS_WITH_AS(lower_bound_L2(bad), doctest::Contains("q1 < alpha"),
                         std::invalid_argument);
}
