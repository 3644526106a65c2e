#include "doctest.h"

#include "rdlab/kernels.hpp"
#include "rdlab/reaction.hpp"

#include <random>
#include <vector>

using namespace rdlab;

namespace {
std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.2, 1.8);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}
} // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
    auto f = ReactionTerm::cubic(0.3);
    auto u = random_vec(10007, 1);
    auto w = random_vec(10007, 2);

    std::vector<double> a(u.size()), b(u.size());
    kernels::serial::eval_reaction(f, u, a);
    kernels::omp::eval_reaction(f, u, b);
    CHECK(a == b);

    std::vector<double> ra(u.size(), 0.0), rb(u.size(), 0.0);
    kernels::serial::cn_rhs(u, a, b, 0.4, 1e-3, ra);
    kernels::omp::cn_rhs(u, a, b, 0.4, 1e-3, rb);
    CHECK(ra == rb);

    CHECK(kernels::serial::max_abs(u) == kernels::omp::max_abs(u));
    CHECK(kernels::serial::max_abs_diff(u, w) == kernels::omp::max_abs_diff(u, w));
    CHECK(kernels::serial::max_lower_excess(u, w) ==
          kernels::omp::max_lower_excess(u, w));
    CHECK(kernels::serial::minmax(u) == kernels::omp::minmax(u));

    std::vector<double> xs = random_vec(4001, 3), sa(4001), sb(4001);
    auto g = [](double x) { return x * x - 0.25 * x; };
    kernels::serial::sample(g, xs, sa);
    kernels::omp::sample(g, xs, sb);
    CHECK(sa == sb);
}

TEST_CASE("policy dispatch is switchable") {
    auto saved = kernels::exec_policy();
    kernels::exec_policy() = kernels::Exec::Serial;
    CHECK_FALSE(kernels::parallel_enabled());
    kernels::exec_policy() = saved;
}

TEST_CASE("thomas solve against dense elimination") {
    // (I - r/2 D) x = d with known x
    std::size_t n = 64;
    double r = 0.7;
    kernels::ThomasFactors tf;
    tf.factor(n, r);
    auto x_true = random_vec(n, 7);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        double xm = i > 0 ? x_true[i - 1] : 0.0;
        double xp = i + 1 < n ? x_true[i + 1] : 0.0;
        d[i] = (1.0 + r) * x_true[i] - 0.5 * r * (xm + xp);
    }
    tf.solve(d);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(d[i] == doctest::Approx(x_true[i]).epsilon(1e-12));
}
