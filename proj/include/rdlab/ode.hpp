#ifndef RDLAB_ODE_HPP
#define RDLAB_ODE_HPP

#include "rdlab/errors.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace rdlab::ode {

// Adaptive Dormand-Prince 5(4) for small fixed-size systems. Integration
// direction follows sign(t1 - t0). An optional stop event g(t, y) is located
// to high accuracy by bisection on cubic Hermite dense output.
template <std::size_t N> struct Result {
    double t = 0;
    std::array<double, N> y{};
    bool event = false;
    std::size_t steps = 0;
};

template <std::size_t N> struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
    // Stop when this changes sign from its value at t0 (if set).
    std::function<double(double, const std::array<double, N>&)> event;
    // Called after every accepted step (and at the located event point).
    std::function<void(double, const std::array<double, N>&)> observer;
};

namespace detail {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, const State<N>& d) {
    State<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + h * d[i];
    return r;
}

} // namespace detail

template <std::size_t N>
Result<N> integrate(
    const std::function<void(double, const std::array<double, N>&,
                             std::array<double, N>&)>& rhs,
    double t0, std::array<double, N> y0, double t1, Options<N> opt = {}) {
    using S = detail::State<N>;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    S y = y0;
    S k1;
    rhs(t, y, k1);

    double ev_prev = 0.0;
    bool have_event = bool(opt.event);
    if (have_event) ev_prev = opt.event(t, y);

    double h = dir * std::min(opt.max_step, std::abs(t1 - t0) / 16.0 + 1e-12);
    if (h == 0.0) h = dir * 1e-8;

    Result<N> res;
    std::size_t steps = 0;

    auto err_norm = [&](const S& yn, const S& e) {
        double m = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = opt.abs_tol +
                        opt.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            m = std::max(m, std::abs(e[i]) / sc);
        }
        return m;
    };

    while (dir * (t1 - t) > 0.0) {
        if (steps++ > opt.max_steps)
            throw solver_error("ode: step limit exceeded");
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        // Dormand-Prince coefficients
        S k2, k3, k4, k5, k6, k7;
        S tmp;
        tmp = detail::axpy(y, h * (1.0 / 5), k1);
        rhs(t + h / 5, tmp, k2);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (3.0 / 40 * k1[i] + 9.0 / 40 * k2[i]);
        rhs(t + 3.0 * h / 10, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] +
                                 32.0 / 9 * k3[i]);
        rhs(t + 4.0 * h / 5, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] +
                                 64448.0 / 6561 * k3[i] - 212.0 / 729 * k4[i]);
        rhs(t + 8.0 * h / 9, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] +
                                 46732.0 / 5247 * k3[i] + 49.0 / 176 * k4[i] -
                                 5103.0 / 18656 * k5[i]);
        rhs(t + h, tmp, k6);
        S ynew;
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                                  125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                                  11.0 / 84 * k6[i]);
        rhs(t + h, ynew, k7);
        S err;
        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] +
                          71.0 / 1920 * k4[i] - 17253.0 / 339200 * k5[i] +
                          22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);

        double e = err_norm(ynew, err);
        if (e > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(e, -0.25));
            continue;
        }

        // Hermite dense output on the accepted step.
        auto dense = [&](double s, S& out) {
            double s2 = s * s, s3 = s2 * s;
            double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
            double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
            for (std::size_t i = 0; i < N; ++i)
                out[i] = h00 * y[i] + h10 * h * k1[i] + h01 * ynew[i] +
                         h11 * h * k7[i];
        };

        if (have_event) {
            double ev_new = opt.event(t + h, ynew);
            if (ev_prev != 0.0 && ev_new * ev_prev < 0.0) {
                double lo = 0.0, hi = 1.0;
                S ymid;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    dense(mid, ymid);
                    double em = opt.event(t + mid * h, ymid);
                    if (em * ev_prev < 0.0) hi = mid; else lo = mid;
                }
                dense(hi, ymid);
                res.t = t + hi * h;
                res.y = ymid;
                res.event = true;
                res.steps = steps;
                if (opt.observer) opt.observer(res.t, res.y);
                return res;
            }
            ev_prev = ev_new;
        }

        t += h;
        y = ynew;
        k1 = k7;
        if (opt.observer) opt.observer(t, y);
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(e, 1e-16), -0.2)));
        if (std::abs(h) > opt.max_step) h = dir * opt.max_step;
    }

    res.t = t;
    res.y = y;
    res.steps = steps;
    return res;
}

} // namespace rdlab::ode

#endif
