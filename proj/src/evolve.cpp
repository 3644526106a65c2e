#include "rdlab/evolve.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace rdlab {

GridField GridField::sample(double halfwidth, double dx, double t,
                            const std::function<double(double)>& g) {
    GridField gf;
    gf.dx = dx;
    gf.t = t;
    std::size_t n = std::size_t(std::llround(2.0 * halfwidth / dx)) + 1;
    gf.x0 = -dx * double(n - 1) / 2.0;
    gf.u.resize(n);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = gf.x(i);
    kernels::sample(g, xs, gf.u);
    return gf;
}

double Trajectory::snapshot_dt() const {
    return snaps.size() > 1 ? snaps[1].t - snaps[0].t : 0.0;
}

namespace {

// Catmull-Rom value on a uniform table; clamps to the valid range.
double catmull_rom(const std::vector<double>& v, double s) {
    if (v.size() == 1) return v[0];
    double smax = double(v.size() - 1);
    s = std::clamp(s, 0.0, smax);
    std::size_t i = std::min(std::size_t(s), v.size() - 2);
    double u = s - double(i);
    double p0 = v[i > 0 ? i - 1 : 0];
    double p1 = v[i];
    double p2 = v[i + 1];
    double p3 = v[std::min(i + 2, v.size() - 1)];
    if (i == 0) p0 = 3.0 * p1 - 3.0 * p2 + p3;           // quadratic end cell
    if (i + 2 > v.size() - 1) p3 = 3.0 * p2 - 3.0 * p1 + p0;
    double u2 = u * u, u3 = u2 * u;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * u +
                  (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3);
}

} // namespace

double Trajectory::eval(double x, double t) const {
    if (snaps.empty()) throw std::invalid_argument("empty trajectory");
    const GridField& g0 = snaps.front();
    double sx = (x - g0.x0) / g0.dx;
    if (snaps.size() == 1) return catmull_rom(g0.u, sx);
    double dts = snapshot_dt();
    double st = (t - g0.t) / dts;
    st = std::clamp(st, 0.0, double(snaps.size() - 1));
    std::size_t k = std::min(std::size_t(st), snaps.size() - 2);
    // Interpolate in x on the four bracketing snapshots, then in t.
    std::vector<double> vals;
    std::size_t klo = k > 0 ? k - 1 : k;
    std::size_t khi = std::min(k + 2, snaps.size() - 1);
    std::vector<double> times;
    for (std::size_t j = klo; j <= khi; ++j) {
        vals.push_back(catmull_rom(snaps[j].u, sx));
        times.push_back(snaps[j].t);
    }
    // Cubic Lagrange in t over the collected nodes (2 to 4 of them).
    double result = 0.0;
    for (std::size_t a = 0; a < vals.size(); ++a) {
        double w = 1.0;
        for (std::size_t b = 0; b < vals.size(); ++b)
            if (a != b) w *= (t - times[b]) / (times[a] - times[b]);
        result += w * vals[a];
    }
    return result;
}

const GridField& Trajectory::nearest(double t) const {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        double d = std::abs(snaps[i].t - t);
        if (d < bd) { bd = d; best = i; }
    }
    return snaps[best];
}

Trajectory evolve(const GridField& u0, const ReactionTerm& f,
                  const EvolveParams& params) {
    if (u0.n() < 3) throw std::invalid_argument("grid too small");
    if (u0.dx <= 0.0) throw std::invalid_argument("dx must be positive");
    const double dx = u0.dx;
    double dt_req = params.dt > 0.0 ? params.dt
                                    : std::min(0.25 * dx * dx, 0.01);
    // Align dt so that snapshots land exactly on multiples of snapshot_dt.
    std::size_t per_snap =
        std::max<std::size_t>(1, std::size_t(std::ceil(params.snapshot_dt / dt_req - 1e-12)));
    double dt = params.snapshot_dt / double(per_snap);
    double r = dt / (dx * dx);

    const std::size_t n = u0.n();
    const bool dirichlet = std::holds_alternative<DirichletBC>(params.boundary);
    const DirichletBC* dbc =
        dirichlet ? &std::get<DirichletBC>(params.boundary) : nullptr;

    kernels::ThomasFactors thomas;
    // Interior unknowns: Dirichlet pins both ends; Neumann keeps them with a
    // mirrored ghost handled through a modified first/last row, solved by
    // folding into the interior system of size n (simplest: treat all nodes
    // as unknowns for Neumann).
    std::vector<double> u = u0.u, fu(n), fu_prev(n), rhs(n);

    // Neumann uses a full-size tridiagonal system with modified end rows;
    // factor on the fly below (coefficients constant in time).
    std::vector<double> nm_cprime;
    double nm_diag = 1.0 + r, nm_off = -0.5 * r;
    if (!dirichlet) {
        nm_cprime.assign(n, 0.0);
        // first row: 1+r, -r (mirror ghost)
        nm_cprime[0] = (-r) / nm_diag;
        for (std::size_t i = 1; i + 1 < n; ++i)
            nm_cprime[i] = nm_off / (nm_diag - nm_off * nm_cprime[i - 1]);
    } else {
        thomas.factor(n - 2, r);
    }

    Trajectory traj;
    GridField cur = u0;
    traj.snaps.push_back(cur);

    kernels::eval_reaction(f, u, fu_prev); // bootstrap: f at the initial data

    double t = u0.t;
    const double T = params.T;
    std::size_t total_steps =
        std::size_t(std::llround((T - u0.t) / dt));
    bool first_step = true;

    auto apply_step = [&](const std::vector<double>& fu_now,
                          const std::vector<double>& fu_old,
                          std::vector<double>& out, double t_new) {
        kernels::cn_rhs(u, fu_now, fu_old, r, dt, rhs);
        if (dirichlet) {
            double gl = dbc->left(t_new), gr = dbc->right(t_new);
            // move known boundary values to the right-hand side
            rhs[1] += 0.5 * r * gl;
            rhs[n - 2] += 0.5 * r * gr;
            std::span<double> interior(rhs.data() + 1, n - 2);
            thomas.solve(interior);
            out.assign(rhs.begin(), rhs.end());
            out[0] = gl;
            out[n - 1] = gr;
        } else {
            // Neumann end rows: u0 + r(u1 - u0)/1 ... mirrored ghost gives
            // rhs0 = u0 + r (u1 - u0) /?  CN: (1+r)u0^{n+1} - r u1^{n+1}
            //       = u0 + r(u1 - u0) + dt f-terms
            rhs[0] = u[0] + r * (u[1] - u[0]) +
                     dt * (1.5 * fu_now[0] - 0.5 * fu_old[0]);
            rhs[n - 1] = u[n - 1] + r * (u[n - 2] - u[n - 1]) +
                         dt * (1.5 * fu_now[n - 1] - 0.5 * fu_old[n - 1]);
            // Thomas with modified first/last rows (off-diagonal -r at ends).
            std::vector<double>& d = rhs;
            d[0] /= nm_diag;
            for (std::size_t i = 1; i < n; ++i) {
                double off_i = (i == n - 1) ? -r : nm_off;
                double denom = nm_diag - off_i * nm_cprime[i - 1];
                d[i] = (d[i] - off_i * d[i - 1]) / denom;
            }
            for (std::size_t i = n - 1; i-- > 0;)
                d[i] -= nm_cprime[i] * d[i + 1];
            out.assign(d.begin(), d.end());
        }
    };

    std::vector<double> unew(n), fu_half(n);
    for (std::size_t step = 0; step < total_steps; ++step) {
        double t_new = u0.t + dt * double(step + 1);
        kernels::eval_reaction(f, u, fu);
        if (first_step) {
            // Heun bootstrap: predict with f(u0), correct with the average.
            apply_step(fu, fu, unew, t_new); // AB2 with equal slopes = Euler
            std::vector<double> upred = unew;
            kernels::eval_reaction(f, upred, fu_half);
            for (std::size_t i = 0; i < n; ++i)
                fu_half[i] = 0.5 * (fu[i] + fu_half[i]);
            apply_step(fu_half, fu_half, unew, t_new);
            first_step = false;
        } else {
            apply_step(fu, fu_prev, unew, t_new);
        }
        fu_prev.swap(fu);
        u.swap(unew);
        t = t_new;

        if (!kernels::all_finite(u))
            throw numerical_error("evolve: NaN encountered");
        double m = kernels::max_abs(u);
        if (m > params.blowup_limit) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "evolve: |u| exceeded %g at t=%.6g",
                          params.blowup_limit, t);
            throw numerical_error(buf);
        }

        if ((step + 1) % per_snap == 0) {
            cur.u = u;
            cur.t = t;
            traj.snaps.push_back(cur);
            if (params.stop_when && params.stop_when(cur)) break;
        }
    }
    return traj;
}

OrderingReport comparison_check(const GridField& lower0,
                                const GridField& upper0, const ReactionTerm& f,
                                EvolveParams params, double tol) {
    if (lower0.n() != upper0.n())
        throw std::invalid_argument("comparison_check: mismatched grids");
    double init = kernels::max_lower_excess(lower0.u, upper0.u);
    if (init > 1e-12)
        throw std::invalid_argument(
            "comparison_check: initial ordering violated");
    Trajectory lo = evolve(lower0, f, params);
    Trajectory hi = evolve(upper0, f, params);
    OrderingReport rep;
    rep.max_violation = 0.0;
    std::size_t m = std::min(lo.snaps.size(), hi.snaps.size());
    for (std::size_t k = 0; k < m; ++k) {
        double v = kernels::max_lower_excess(lo.snaps[k].u, hi.snaps[k].u);
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.worst_time = lo.snaps[k].t;
        }
    }
    rep.max_violation = std::max(rep.max_violation, 0.0);
    rep.pass = rep.max_violation <= tol;
    return rep;
}

double schauder_l2(double L0, double L1, double r) {
    using std::numbers::pi;
    return L0 / std::sqrt(pi) + 2.0 * L1 * std::sqrt(r) / std::sqrt(pi);
}
double schauder_l3(double L0, double L1, double r) {
    using std::numbers::pi;
    return L0 + 2.0 * L1 * schauder_l2(L0, L1, r) * std::sqrt(r) / std::sqrt(pi);
}
double schauder_l4(double L0, double L1, double r) {
    return schauder_l3(L0, L1, r) + L1;
}

SchauderReport derivative_bounds(const Trajectory& traj, const ReactionTerm& f,
                                 double r) {
    if (traj.snaps.size() < 3)
        throw std::invalid_argument("derivative_bounds: too few snapshots");
    double t0 = traj.t_front();
    if (traj.t_back() - t0 < 1.0 + r - 1e-9)
        throw std::invalid_argument(
            "derivative_bounds: trajectory must cover t in [0, 1+r]");

    SchauderReport rep;
    rep.r = r;

    // L0: sup norm over the whole run.
    double L0 = 0.0;
    for (const auto& s : traj.snaps) L0 = std::max(L0, kernels::max_abs(s.u));
    rep.L0 = L0;

    // L1: bound of |f|, |f'|, |f''| on [-L0, L0] by dense sampling.
    double L1 = 0.0;
    const int ns = 4000;
    for (int i = 0; i <= ns; ++i) {
        double uu = -L0 + 2.0 * L0 * i / ns;
        L1 = std::max({L1, std::abs(f(uu)), std::abs(f.prime(uu)),
                       std::abs(f.second(uu))});
    }
    rep.L1 = L1;
    rep.L2 = schauder_l2(L0, L1, r);
    rep.L3 = schauder_l3(L0, L1, r);
    rep.L4 = schauder_l4(L0, L1, r);

    double dts = traj.snapshot_dt();
    for (std::size_t k = 0; k < traj.snaps.size(); ++k) {
        const GridField& g = traj.snaps[k];
        if (g.t < t0 + 1.0 - 1e-12) continue;
        double dx = g.dx;
        for (std::size_t i = 1; i + 1 < g.n(); ++i) {
            double ux = (g.u[i + 1] - g.u[i - 1]) / (2.0 * dx);
            double uxx = (g.u[i + 1] - 2.0 * g.u[i] + g.u[i - 1]) / (dx * dx);
            rep.observed_sup_ux = std::max(rep.observed_sup_ux, std::abs(ux));
            rep.observed_sup_uxx = std::max(rep.observed_sup_uxx, std::abs(uxx));
        }
        // one-sided second-order du/dt at snapshot resolution
        if (k >= 2) {
            const auto& um1 = traj.snaps[k - 1].u;
            const auto& um2 = traj.snaps[k - 2].u;
            for (std::size_t i = 0; i < g.n(); ++i) {
                double ut = (3.0 * g.u[i] - 4.0 * um1[i] + um2[i]) / (2.0 * dts);
                rep.observed_sup_ut = std::max(rep.observed_sup_ut, std::abs(ut));
            }
        }
    }
    rep.pass = rep.observed_sup_ux <= rep.L2 && rep.observed_sup_uxx <= rep.L3 &&
               rep.observed_sup_ut <= rep.L4;
    return rep;
}

double recommended_halfwidth(double profile_halfspan, double c, double T,
                             double extra_shift) {
    return 1.2 * (std::abs(c) * T + profile_halfspan + std::abs(extra_shift));
}

} // namespace rdlab
