#ifndef RDLAB_EXPERIMENTS_HPP
#define RDLAB_EXPERIMENTS_HPP

#include "rdlab/entire.hpp"
#include "rdlab/evolve.hpp"
#include "rdlab/front.hpp"
#include "rdlab/supersub.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rdlab {

// ---- rate fitting ----

struct RateFit {
    double rate = 0.0;      // slope of ln(value) vs t, negative for decay
    double prefactor = 0.0; // exp(intercept)
    double residual = 0.0;  // rms of the log-linear fit
    bool decaying = false;
};

// Least squares on (t, ln value). Throws std::invalid_argument for fewer
// than 4 points or non-positive values.
RateFit rate_fit(std::span<const std::pair<double, double>> series);

// Default fit window: last half of the series, excluding the final 5%.
std::vector<std::pair<double, double>>
fit_window(std::span<const std::pair<double, double>> series);

// ---- experiment reports ----

struct StabilityReport {
    std::string experiment;
    double perturbation_size = 0.0;
    double fitted_rate = 0.0;
    double fitted_prefactor = 0.0;
    double fit_residual = 0.0;
    double predicted_rate = 0.0;
    std::vector<double> shift_estimates;
    double final_deviation = 0.0;
    double first_hit_time = -1.0; // first time the deviation dropped below 1e-3
    bool pass = false;
    std::string note;
};

// ---- constant-state convergence ----

enum class ConstantTarget { To0, To1 };

// Hypothesis patterns for convergence to a constant state:
//   1  liminf_{x->+-inf} u0 > alpha and int f >= 0          -> 1
//   2  inf u0 > alpha                                       -> 1
//   3  limsup_{x->+-inf} u0 < alpha and int f <= 0          -> 0
//   4  sup u0 < alpha                                       -> 0
StabilityReport constant_convergence(const ReactionTerm& f,
                                     const GridField& u0, int pattern,
                                     double T_cap = 60.0);

// ---- front stability ----

// u0 = phi + perturbation; fits the shift x0(t) at each snapshot, then the
// decay rate of the remaining deviation on the tail window.
StabilityReport front_stability(const ReactionTerm& f, const FrontProfile& p,
                                const std::function<double(double)>& perturbation,
                                double delta, double T = 20.0,
                                double dx = 0.05);

// ---- diverging pairs ----

struct DivergingPairSpec {
    double beta = 0.1;      // bump height margin above (or below) alpha
    double halfwidth = 30.0; // bump half-width
    double edge = 2.0;       // smoothing length of the bump shoulders
    double low = 0.02;       // far-field level
    bool expand_to_1 = true; // bump above alpha (int f > 0 side)
};

struct DivergingPairReport {
    bool two_fronts = false;  // crossings survived to the end
    double speed_left = 0.0, speed_right = 0.0;
    double speed_rel_err = 0.0; // against -c / +c
    double half_deviation = 0.0; // sup on |x|>=2 against shifted fronts
    bool collapsed = false;
    bool pass = false;
};

DivergingPairReport diverging_pair(const ReactionTerm& f,
                                   const FrontProfile& p,
                                   const DivergingPairSpec& spec,
                                   double T = 60.0, double dx = 0.05);

// ---- lower bounds for the bump half-widths ----

struct LowerBoundInputs {
    double beta1 = 0.1;  // or beta2 for the mirrored bound
    double q0 = 0.0, q1 = 0.0;
    double mu_tilde_1 = 0.0; // defaults to |mu2|/2 when 0
    double beta = 0.5;       // proof-internal constant
    double M3 = 0.0, M4 = 0.0;
    double b = 0.0, w = 0.0;
    double c = 0.0;
    double mu2 = 0.0, lambda1 = 0.0;
    double alpha = 0.0;
};

// L1 bound (int f > 0, c > 0). Throws std::invalid_argument naming the
// violated admissibility inequality.
double lower_bound_L1(const LowerBoundInputs& in);
// Mirrored bound (int f < 0, c < 0) with the primed constants.
double lower_bound_L2(const LowerBoundInputs& in);

// ---- sandwich stability around an entire solution ----

struct SandwichStabilityReport {
    double delta = 0.0;
    double worst_below = 0.0;  // max(sub - u) over the sampled sandwich
    double worst_above = 0.0;  // max(u - super)
    double sandwich_tol = 0.0;
    bool sandwich_pass = false;
    double fitted_rate = 0.0;
    double fit_residual = 0.0;
    double predicted_rate = 0.0; // min(|v|, |mu2 c|) or the mirrored pair
    bool rate_pass = false;      // fitted <= -0.8 predicted
    double bound_excess = 0.0;   // max over late t of ||u-u1|| - theory bound
    double bound_from = 0.0;     // first time the super clamp is inactive
    bool bound_pass = false;
    bool pass = false;
};

// Perturbs u1(.,0) by delta * bump, evolves, and checks the two-sided
// sandwich, the exponential bound with the fitted tail constants, and the
// decay rate of ||u - u1||.
SandwichStabilityReport sandwich_stability(
    const EntireSolutionApprox& a, const ReactionTerm& f,
    const StabilityConstants& sc, const FrontProfile& p,
    const TailBounds& tails, double delta, double T = 45.0);

} // namespace rdlab

#endif
