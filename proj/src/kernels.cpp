#include "rdlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rdlab::kernels {

Exec& exec_policy() {
#ifdef _OPENMP
    static Exec policy = Exec::Parallel;
#else
    static Exec policy = Exec::Serial;
#endif
    return policy;
}

bool parallel_enabled() { return exec_policy() == Exec::Parallel; }

namespace {

// Horner evaluation shared by both paths; the polynomial fast path avoids
// the std::function dispatch in the hot loop.
inline double poly_eval(const std::vector<double>& c, double u) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * u + c[i];
    return r;
}

} // namespace

namespace serial {

void eval_reaction(const ReactionTerm& f, std::span<const double> u,
                   std::span<double> out) {
    if (const auto* c = f.poly()) {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = poly_eval(*c, u[i]);
    } else {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(u[i]);
    }
}

void cn_rhs(std::span<const double> u, std::span<const double> fu,
            std::span<const double> fu_prev, double r, double dt,
            std::span<double> rhs) {
    const std::size_t n = u.size();
    for (std::size_t i = 1; i + 1 < n; ++i)
        rhs[i] = u[i] + 0.5 * r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) +
                 dt * (1.5 * fu[i] - 0.5 * fu_prev[i]);
}

double max_abs(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_lower_excess(std::span<const double> lo, std::span<const double> hi) {
    double m = -1e300;
    for (std::size_t i = 0; i < lo.size(); ++i)
        m = std::max(m, lo[i] - hi[i]);
    return m;
}

std::pair<double, double> minmax(std::span<const double> u) {
    double lo = 1e300, hi = -1e300;
    for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

bool all_finite(std::span<const double> u) {
    for (double v : u)
        if (!std::isfinite(v)) return false;
    return true;
}

void sample(const std::function<double(double)>& g, std::span<const double> xs,
            std::span<double> out) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = g(xs[i]);
}

} // namespace serial

namespace omp {

void eval_reaction(const ReactionTerm& f, std::span<const double> u,
                   std::span<double> out) {
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
    if (const auto* c = f.poly()) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = poly_eval(*c, u[i]);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(u[i]);
    }
}

void cn_rhs(std::span<const double> u, std::span<const double> fu,
            std::span<const double> fu_prev, double r, double dt,
            std::span<double> rhs) {
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 1; i < n - 1; ++i)
        rhs[i] = u[i] + 0.5 * r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) +
                 dt * (1.5 * fu[i] - 0.5 * fu_prev[i]);
}

double max_abs(std::span<const double> u) {
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
    return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::ptrdiff_t n = std::ptrdiff_t(a.size());
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_lower_excess(std::span<const double> lo, std::span<const double> hi) {
    const std::ptrdiff_t n = std::ptrdiff_t(lo.size());
    double m = -1e300;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, lo[i] - hi[i]);
    return m;
}

std::pair<double, double> minmax(std::span<const double> u) {
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
    double lo = 1e300, hi = -1e300;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
    }
    return {lo, hi};
}

bool all_finite(std::span<const double> u) {
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
    int ok = 1;
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (std::ptrdiff_t i = 0; i < n; ++i) ok = ok && std::isfinite(u[i]);
    return ok != 0;
}

void sample(const std::function<double(double)>& g, std::span<const double> xs,
            std::span<double> out) {
    const std::ptrdiff_t n = std::ptrdiff_t(xs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = g(xs[i]);
}

} // namespace omp

void eval_reaction(const ReactionTerm& f, std::span<const double> u,
                   std::span<double> out) {
    parallel_enabled() ? omp::eval_reaction(f, u, out)
                       : serial::eval_reaction(f, u, out);
}
void cn_rhs(std::span<const double> u, std::span<const double> fu,
            std::span<const double> fu_prev, double r, double dt,
            std::span<double> rhs) {
    parallel_enabled() ? omp::cn_rhs(u, fu, fu_prev, r, dt, rhs)
                       : serial::cn_rhs(u, fu, fu_prev, r, dt, rhs);
}
double max_abs(std::span<const double> u) {
    return parallel_enabled() ? omp::max_abs(u) : serial::max_abs(u);
}
double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return parallel_enabled() ? omp::max_abs_diff(a, b)
                              : serial::max_abs_diff(a, b);
}
double max_lower_excess(std::span<const double> lo, std::span<const double> hi) {
    return parallel_enabled() ? omp::max_lower_excess(lo, hi)
                              : serial::max_lower_excess(lo, hi);
}
std::pair<double, double> minmax(std::span<const double> u) {
    return parallel_enabled() ? omp::minmax(u) : serial::minmax(u);
}
bool all_finite(std::span<const double> u) {
    return parallel_enabled() ? omp::all_finite(u) : serial::all_finite(u);
}
void sample(const std::function<double(double)>& g, std::span<const double> xs,
            std::span<double> out) {
    parallel_enabled() ? omp::sample(g, xs, out) : serial::sample(g, xs, out);
}

void ThomasFactors::factor(std::size_t n_interior, double r) {
    n = n_interior;
    diag = 1.0 + r;
    off = -0.5 * r;
    cprime.assign(n, 0.0);
    if (n == 0) return;
    cprime[0] = off / diag;
    for (std::size_t i = 1; i < n; ++i)
        cprime[i] = off / (diag - off * cprime[i - 1]);
}

void ThomasFactors::solve(std::span<double> d) const {
    if (n == 0) return;
    d[0] /= diag;
    for (std::size_t i = 1; i < n; ++i)
        d[i] = (d[i] - off * d[i - 1]) / (diag - off * cprime[i - 1]);
    for (std::size_t i = n - 1; i-- > 0;)
        d[i] -= cprime[i] * d[i + 1];
    return;
}

} // namespace rdlab::kernels
