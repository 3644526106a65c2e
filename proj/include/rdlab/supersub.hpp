#ifndef RDLAB_SUPERSUB_HPP
#define RDLAB_SUPERSUB_HPP

#include "rdlab/front.hpp"
#include "rdlab/reaction.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace rdlab {

// Time-dependent translation of front profiles inside the envelopes.
//   Plus:  p' = c_eff + M e^{rate p}      (P1, P2, P4; P5 slaved to P4)
//   Minus: p' = c_eff - M e^{rate p}      (P3)
// Closed forms are exact; a Runge-Kutta fallback provides the independent
// numeric route.
enum class ShiftKind { P1, P2, P3, P4, P5 };
enum class ShiftSign { Plus, Minus };

class ShiftFunction {
  public:
    ShiftFunction(ShiftKind kind, double c_eff, double rate, double amplitude,
                  double initial);
    // P5 drives with the companion P4 trajectory: p5' = c2 + M e^{rate p4}.
    static ShiftFunction p5(double c2, const ShiftFunction& p4, double initial);

    ShiftKind kind() const { return kind_; }
    ShiftSign sign() const { return sign_; }
    double c_eff() const { return c_; }
    double rate() const { return rate_; }
    double amplitude() const { return M_; }
    double initial() const { return p0_; }

    double value(double t) const;      // closed form
    double derivative(double t) const; // from the ODE right-hand side
    double value_numeric(double t) const;

    // Constants of the backward asymptote p(t) - c_eff t -> x8 (Minus sign).
    double x7() const;
    double x8() const;
    // Backward asymptote of a Plus shift: p(t) - c t -> this limit.
    double backward_shift_limit() const;

  private:
    ShiftKind kind_;
    ShiftSign sign_;
    double c_, rate_, M_, p0_;
    // P5 companion data
    double companion_c_ = 0, companion_p0_ = 0;
    bool slaved_ = false;
};

enum class EnvelopeRole { Super, Sub };
enum class EnvelopeCombine { Min, Max, Single };

struct EnvelopeBranch {
    std::string name;
    std::function<double(double, double)> value; // smooth on R x validity
};

// A super- or subsolution evaluator, represented branch-wise so the
// differential inequality can be checked away from min/max switch loci.
struct Envelope {
    EnvelopeRole role = EnvelopeRole::Super;
    EnvelopeCombine combine = EnvelopeCombine::Min;
    std::string label;
    std::vector<EnvelopeBranch> branches;
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();

    double operator()(double x, double t) const;
    std::size_t active_branch(double x, double t) const;
    void require_valid(double t) const; // throws std::domain_error outside
};

// ---- constructions ----

struct EnvelopePair {
    Envelope super, sub;
};

// Case C1 (int f > 0, f'(0) > f'(1)):
//   super = min{ phi(x+p1(t)) + phi(-x+p1(t)), 1 }
//   sub   = max{ phi(x+ct+x6), phi(-x+ct+x6) },
//   x6 = p1(0) - ln(1 + M7/c)/lambda1.
EnvelopePair build_envelope_C1(const FrontProfile& p, double m7, double p1_0);
double c1_sub_shift(const FrontProfile& p, double m7, double p1_0); // x6

// Case C2 (int f > 0, f'(0) <= f'(1)): sums of two fronts driven by p2 / p3.
EnvelopePair build_envelope_C2(const FrontProfile& p, double m8, double p2_0,
                               double p3_0);
// A p3(0) satisfying the admissibility constraint and keeping the sub's
// backward asymptote below the super's, so the pair stays ordered.
double default_c2_p3_initial(double c, double lam1, double m8, double p2_0);

// Annihilating case (int f < 0, c < 0):
//   super = min{ phi(x+ct), phi(-x+ct) }
//   sub   = product phi(x+c s)phi(-x+c s) advanced through the band
//           h1(t) = 4 B phi(ct); valid for t <= -4 B phi(0).
EnvelopePair build_envelope_annihilating(const FrontProfile& p, double B);

enum class MonostableVariant { U3, U10, U01, U11 };

struct MonostableEnvelopeParams {
    double m9 = 1.0;
    double alpha_tilde = 0.25;
    double p4_0 = 0.0;
    double p5_0 = 0.0;
    MonostableVariant variant = MonostableVariant::U3;
    double rho0 = 3e-4; // rho(0); time-translation normalization of rho
    double nu0 = 0.0;   // 0 -> rho0 (1 - rho0)
};

// Monostable entire-solution envelopes from two fronts (speeds c1 <= c2),
// the spatially homogeneous solution rho' = f(rho), and nu = nu0 e^{f'(0)t}.
EnvelopePair build_envelope_monostable(const FrontProfile& p1,
                                       const FrontProfile& p2,
                                       const ReactionTerm& f,
                                       MonostableEnvelopeParams params);

// rho' = f(rho) with rho(0) = rho0, evaluated at t (numeric route).
double homogeneous_solution(const ReactionTerm& f, double rho0, double t);

// Perturbation sandwich around an entire solution u(x,t):
//   increasing:   super = min{1, u(x, t+gamma(t)) + q(t)}
//   decreasing:   super = min{1, u(x, t-gamma(t)) + q(t)}
// with q = q0 e^{vt}, gamma = q0 (1 + g0 - g0 e^{vt}).
struct SandwichParams {
    double q0_bar = 0;
    double v = 0, w = 0;
    double b_slope = 0; // b_bar > 0 (increasing) or b_tilde < 0 (decreasing)
    bool increasing = true;

    double gamma0() const;
    double q(double t) const;
    double gamma(double t) const;
};

EnvelopePair build_sandwich(const std::function<double(double, double)>& u,
                            const StabilityConstants& sc, double q0_bar,
                            bool increasing);

// ---- certification ----

struct VerifyGrid {
    double x0 = -40, x1 = 40;
    double t0 = -30, t1 = 0;
    double dx = 0.1;  // spatial sample and FD step
    double dt = 0.25; // temporal sample spacing
    double eps_t = 0.05; // FD step in t
};

struct VerifyReport {
    bool pass = false;
    // Most violating value of (super ? N : -N); nonnegative means the sign
    // condition held with margin everywhere.
    double worst = 0.0;
    double worst_x = 0, worst_t = 0;
    std::string worst_branch;
    double tol = 0.0;
    std::size_t checked = 0, skipped_kink = 0;
    // max |N| seen per branch (exact-solution branches should sit at the
    // discretization level)
    std::vector<std::pair<std::string, double>> branch_max_absN;
};

// Computes N[u] = u_t - u_xx - f(u) branch-wise with centered differences,
// skipping a 2 dx neighborhood of branch switches. Passes when N >= -tol
// (super) or N <= tol (sub) at every sampled point, tol = 10 dx^2.
VerifyReport verify_inequality(const Envelope& e, const ReactionTerm& f,
                               const VerifyGrid& grid);

// Smallest passing amplitude within factor 1.1: start at 1, double on
// failure, then bisect down in log space.
double calibrate_amplitude(
    const std::function<bool(double)>& passes, double start = 1.0,
    double floor = 1e-6, double cap = 1e9);

} // namespace rdlab

#endif
