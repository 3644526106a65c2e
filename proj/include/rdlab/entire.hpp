#ifndef RDLAB_ENTIRE_HPP
#define RDLAB_ENTIRE_HPP

#include "rdlab/evolve.hpp"
#include "rdlab/front.hpp"
#include "rdlab/supersub.hpp"

#include <limits>
#include <vector>

namespace rdlab {

struct EntireParams {
    std::vector<double> n_list{10.0, 20.0, 30.0};
    double dx = 0.05;
    double dt = 0.0;        // 0 -> min(0.25 dx^2, 0.01)
    double snapshot_dt = 0.25;
    double halfwidth = 0.0; // 0 -> sized from the profile and horizons
    double t_end_cap = 60.0;
    double min_t_end = 1.0;   // do not stop before this time
    double settle_tol = 1e-3; // ||u - limit|| target that ends the run
    double confinement_tol = 1e-6;
};

// Ordering of each member against the envelope pair. The binding check is
// the comparison oracle: envelope initial data (branch-wise for min/max
// structures) evolved by the same scheme, which isolates the ordering
// property from the scheme's own front-speed truncation error. Deviations
// against the analytic evaluators are reported alongside.
struct ConfinementReport {
    double below_sub = 0.0;    // max over members of max(sub_oracle - u)
    double above_super = 0.0;  // max over members of max(u - super_oracle)
    double below_sub_analytic = 0.0;
    double above_super_analytic = 0.0;
    double tol = 1e-6;
    bool pass = false;
};

class EntireSolutionApprox {
  public:
    std::vector<double> n_list;
    std::vector<Trajectory> members; // member k starts at t = -n_list[k]
    std::vector<double> cauchy_gaps; // sup difference of consecutive members
    ConfinementReport confinement;
    CaseTag tag = CaseTag::C1;
    double limit = 1.0;       // t -> +infinity limit (1 merging, 0 annihilating)
    double settle_time = std::numeric_limits<double>::infinity();
    double t_end = 0.0;
    double halfwidth = 0.0;

    const Trajectory& principal() const { return members.back(); }
    double eval(double x, double t) const { return principal().eval(x, t); }
};

// Backward Cauchy construction: for each n, evolve from u(x,-n) = sub(x,-n)
// forward to the settle time (cap t_end_cap), with Dirichlet boundary data
// taken from the envelope that carries the far-field limit.
EntireSolutionApprox construct_entire(const ReactionTerm& f,
                                      const EnvelopePair& env,
                                      const FrontProfile& profile,
                                      const EntireParams& params);

struct MonotonicityReport {
    double worst_signed = 0.0; // min du/dt (expected positive) or -max (neg.)
    double b_bar = 0.0;        // min du/dt on the mid-range (increasing case)
    double b_tilde = 0.0;      // max du/dt on the mid-range (decreasing case)
    bool pass = false;
};

// Discrete time monotonicity with the case-appropriate sign; also measures
// b_bar (or b_tilde) over the region where u lies in [theta, 1-theta].
MonotonicityReport check_time_monotonicity(const EntireSolutionApprox& a,
                                           int expected_sign, double theta,
                                           double tol = 1e-6);

struct AsymptoticsReport {
    double y1 = 0.0, y2 = 0.0;   // fitted half-line shifts (zero for the
                                 // symmetric annihilating normalization)
    double dev_early = 0.0;      // half-line deviation at the early time
    double dev_late = 0.0;       // same at the later reference time
    double final_gap = 0.0;      // ||u(.,T_end) - limit||
    bool decay_ok = false;       // dev_early < dev_late
    bool pass = false;
};

AsymptoticsReport check_asymptotics(const EntireSolutionApprox& a,
                                    const FrontProfile& p, double t_early,
                                    double t_late);

struct MConditionReport {
    bool m_plus = true;
    double alpha1 = 0.0, alpha2 = 0.0;
    double d = 0.0;
    double T = 0.0;
    double x_anchor = 0.0; // x-tilde or x-hat
    bool pass = false;
};

// Backward-in-time spatial structure used by the uniqueness argument:
// levels alpha1 < alpha < alpha2 and boundaries l(t), m(t) such that the
// solution is above alpha2 outside and below alpha1 inside (M+), or the
// mirror image (M-). Searches d and T over snapshots.
MConditionReport check_M_condition(const EntireSolutionApprox& a,
                                   const ReactionTerm& f,
                                   const FrontProfile& p, bool m_plus,
                                   double x6 = 0.0);

// max over snapshots and grid points of |u(x) - u(-x)|.
double check_symmetry(const EntireSolutionApprox& a);
double field_asymmetry(const GridField& g);

// Theorem-band check for the annihilating solution:
//   u(x, t+h1(t)) < Phi(x,t) < u(x, t-h1(t)),  h1(t) = 4 B phi(ct),
// at sampled (x,t) with t <= -4 B phi(0).
struct BandReport {
    double B = 0.0;
    double worst_left = 0.0;  // max of u(x,t+h1) - Phi  (want < 0)
    double worst_right = 0.0; // max of Phi - u(x,t-h1)  (want < 0)
    bool pass = false;
};

BandReport check_band(const EntireSolutionApprox& a, const FrontProfile& p,
                      double B, double tol = 1e-9);

// Smallest B (within factor 1.1) whose band encloses the constructed
// solution at the sampled points.
double calibrate_band_B(const EntireSolutionApprox& a, const FrontProfile& p);

} // namespace rdlab

#endif
