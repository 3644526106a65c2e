#ifndef RDLAB_EVOLVE_HPP
#define RDLAB_EVOLVE_HPP

#include "rdlab/reaction.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace rdlab {

// Uniform spatial grid with values u(x_i, t).
struct GridField {
    double x0 = 0.0;
    double dx = 1.0;
    double t = 0.0;
    std::vector<double> u;

    std::size_t n() const { return u.size(); }
    double x(std::size_t i) const { return x0 + dx * double(i); }
    double x_end() const { return x(n() - 1); }

    static GridField sample(double halfwidth, double dx, double t,
                            const std::function<double(double)>& g);
};

struct NeumannBC {};
struct DirichletBC {
    std::function<double(double)> left, right; // values as functions of t
};
using Boundary = std::variant<NeumannBC, DirichletBC>;

struct EvolveParams {
    double T = 1.0;            // end time (absolute)
    double dt = 0.0;           // 0 -> min(0.25 dx^2, 0.01)
    double snapshot_dt = 0.25; // spacing of stored fields
    Boundary boundary = NeumannBC{};
    double blowup_limit = 10.0;
    // Optional early exit, checked at snapshot times.
    std::function<bool(const GridField&)> stop_when;
};

// Stored snapshots at uniform time spacing; evaluation between snapshots
// and between grid nodes uses Catmull-Rom interpolation.
struct Trajectory {
    std::vector<GridField> snaps;

    double t_front() const { return snaps.front().t; }
    double t_back() const { return snaps.back().t; }
    double snapshot_dt() const;
    double eval(double x, double t) const;
    const GridField& nearest(double t) const;
};

// Diffusion handled by Crank-Nicolson (tridiagonal solve), reaction kept
// explicit via two-step Adams-Bashforth extrapolation; second order in
// space and time. Throws numerical_error on blow-up or NaN.
Trajectory evolve(const GridField& u0, const ReactionTerm& f,
                  const EvolveParams& params);

struct OrderingReport {
    double max_violation = 0.0; // max over time of max(lower-upper, 0)
    double worst_time = 0.0;
    bool pass = false;
};

// Evolves both fields with the same scheme and reports how far the initial
// ordering lower <= upper is ever violated.
OrderingReport comparison_check(const GridField& lower0,
                                const GridField& upper0, const ReactionTerm& f,
                                EvolveParams params, double tol = 1e-6);

// Interior derivative-bound monitor. L2..L4 are computed from L0, L1 and the
// window parameter r; observed sup norms are measured on t >= 1.
struct SchauderReport {
    double L0 = 0, L1 = 0, L2 = 0, L3 = 0, L4 = 0;
    double observed_sup_ut = 0, observed_sup_ux = 0, observed_sup_uxx = 0;
    double r = 1.0;
    bool pass = false;
};

double schauder_l2(double L0, double L1, double r);
double schauder_l3(double L0, double L1, double r);
double schauder_l4(double L0, double L1, double r);

SchauderReport derivative_bounds(const Trajectory& traj, const ReactionTerm& f,
                                 double r);

// Truncation helper: halfwidth covering translated profiles of the given
// halfspan over a horizon T at speed c, with 20% margin.
double recommended_halfwidth(double profile_halfspan, double c, double T,
                             double extra_shift = 0.0);

} // namespace rdlab

#endif
