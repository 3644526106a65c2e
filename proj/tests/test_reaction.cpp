#include "doctest.h"

#include "rdlab/errors.hpp"
#include "rdlab/reaction.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace rdlab;

namespace {

// u(1-u)(u-alpha)(a+bu) expanded into coefficients; the quartic family
// reaches the C2/C3 cases that cubics cannot.
std::vector<double> quartic_coeffs(double alpha, double a, double b) {
    // u(1-u)(u-alpha) = -u^3 + (1+alpha)u^2 - alpha u
    std::vector<double> cubic{0.0, -alpha, 1.0 + alpha, -1.0};
    std::vector<double> out(cubic.size() + 1, 0.0);
    for (std::size_t i = 0; i < cubic.size(); ++i) {
        out[i] += a * cubic[i];
        out[i + 1] += b * cubic[i];
    }
    return out;
}

} // namespace

TEST_CASE("cubic construction and exact values") {
    auto f = ReactionTerm::cubic(0.25);
    CHECK(f(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f(0.25) == doctest::Approx(0.0).epsilon(1e-14));
    // f'(0) = -alpha
    CHECK(f.prime(0.0) == doctest::Approx(-0.25).epsilon(1e-14));
    // int_0^1 f = (1-2 alpha)/12 = 1/24
    CHECK(f.integral01() == doctest::Approx(1.0 / 24.0).epsilon(1e-9));
    CHECK(f.alpha() == doctest::Approx(0.25).epsilon(1e-9));

    CHECK_THROWS_AS(ReactionTerm::cubic(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ReactionTerm::cubic(1.2), std::invalid_argument);
}

TEST_CASE("classification of the standard cases") {
    CHECK(ReactionTerm::cubic(0.25).case_tag() == CaseTag::C1);
    CHECK(ReactionTerm::cubic(0.75).case_tag() == CaseTag::C4);
    CHECK(ReactionTerm::cubic(0.5).case_tag() == CaseTag::Balanced);
    CHECK(ReactionTerm::fisher().case_tag() == CaseTag::Monostable);

    // quartic with int f > 0 and f'(0) <= f'(1)
    auto c2 = ReactionTerm::polynomial(quartic_coeffs(0.4, 1.0, -0.4));
    CHECK(c2.case_tag() == CaseTag::C2);
    CHECK(c2.integral01() == doctest::Approx(0.01).epsilon(1e-8));
    CHECK(c2.prime(0.0) <= c2.prime(1.0));

    // quartic with int f < 0 and f'(0) > f'(1)
    auto c3 = ReactionTerm::polynomial(quartic_coeffs(0.6, 1.0, 0.6));
    CHECK(c3.case_tag() == CaseTag::C3);
    CHECK(c3.integral01() < 0.0);
    CHECK(c3.prime(0.0) > c3.prime(1.0));
}

TEST_CASE("classify returns C1 iff alpha < 1/2 for cubics") {
    for (double alpha : {0.1, 0.3, 0.45}) {
        CHECK(ReactionTerm::cubic(alpha).case_tag() == CaseTag::C1);
        CHECK(ReactionTerm::cubic(1.0 - alpha).case_tag() == CaseTag::C4);
    }
}

TEST_CASE("stability constants of the cubic") {
    auto f = ReactionTerm::cubic(0.25);
    auto sc = compute_constants(f);
    // closed-form oracle: max of f' at u = (1+alpha)/3 is (1 - a + a^2)/3
    double w_exact = (1.0 - 0.25 + 0.0625) / 3.0;
    CHECK(sc.w == doctest::Approx(w_exact).epsilon(1e-9));
    CHECK(sc.v < 0.0);
    CHECK(sc.theta > 0.0);
    CHECK(sc.b >= std::abs(f.prime(0.0)) - 1e-9);
    CHECK(sc.b >= std::abs(f.prime(1.0)) - 1e-9);

    auto f5 = ReactionTerm::cubic(0.5);
    auto sc5 = compute_constants(f5);
    CHECK(sc5.w == doctest::Approx((1.0 - 0.5 + 0.25) / 3.0).epsilon(1e-9));
}

TEST_CASE("constants invariants over random admissible terms") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> ua(0.15, 0.85);
    std::uniform_real_distribution<double> ub(-0.6, 1.5);
    for (int k = 0; k < 12; ++k) {
        ReactionTerm f = (k % 2 == 0)
                             ? ReactionTerm::cubic(ua(rng))
                             : ReactionTerm::polynomial(
                                   quartic_coeffs(ua(rng), 1.0, ub(rng)));
        auto sc = compute_constants(f);
        CHECK(sc.w > 0.0);
        CHECK(sc.v < 0.0);
        CHECK(sc.theta > 0.0);
        // collar sign condition on a fine sample
        for (int i = 0; i <= 300; ++i) {
            double u1 = -sc.theta + 3.0 * sc.theta * i / 300.0;
            double u2 = 1.0 - 2.0 * sc.theta + 3.0 * sc.theta * i / 300.0;
            CHECK(f.prime(u1) < 0.0);
            CHECK(f.prime(u2) < 0.0);
        }
        // linear domination |f| <= b u, b(1-u) on [0,1]
        for (int i = 0; i <= 200; ++i) {
            double u = i / 200.0;
            CHECK(std::abs(f(u)) <= sc.b * u + 1e-12);
            CHECK(std::abs(f(u)) <= sc.b * (1.0 - u) + 1e-12);
        }
    }
}

TEST_CASE("validation rejects inadmissible terms") {
    // f(1) != 0
    CHECK_THROWS_AS(ReactionTerm::polynomial({0.0, 1.0}), assumption_error);
    // two interior zeros
    CHECK_THROWS_AS(
        ReactionTerm::polynomial(quartic_coeffs(0.4, 1.0, -2.6)),
        assumption_error);
}

TEST_CASE("parse round trip") {
    CHECK(ReactionTerm::parse("cubic:0.3").alpha() == doctest::Approx(0.3));
    CHECK(ReactionTerm::parse("cubic(0.3)").alpha() == doctest::Approx(0.3));
    CHECK(ReactionTerm::parse("fisher").case_tag() == CaseTag::Monostable);
    auto p = ReactionTerm::parse("poly:0,-0.25,1.25,-1");
    CHECK(p.case_tag() == CaseTag::C1);
    CHECK_THROWS(ReactionTerm::parse("nope"));
}
