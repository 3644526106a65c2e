#ifndef RDLAB_KERNELS_HPP
#define RDLAB_KERNELS_HPP

#include "rdlab/reaction.hpp"

#include <functional>
#include <span>
#include <utility>

// Grid kernels used by the time stepper and the envelope sweeps. Each kernel
// has a serial reference implementation and an OpenMP one; the serial path
// is kept as the correctness baseline for tests and for the benchmark
// target. Reductions are min/max only, so both paths produce bitwise
// identical results.
namespace rdlab::kernels {

enum class Exec { Serial, Parallel };

// Process-wide execution policy; Parallel when built with OpenMP.
Exec& exec_policy();
bool parallel_enabled();

namespace serial {
void eval_reaction(const ReactionTerm& f, std::span<const double> u,
                   std::span<double> out);
// rhs[i] = u[i] + r/2 (u[i-1] - 2u[i] + u[i+1]) + dt (1.5 fu[i] - 0.5 fup[i])
// for interior nodes; boundary entries are left untouched.
void cn_rhs(std::span<const double> u, std::span<const double> fu,
            std::span<const double> fu_prev, double r, double dt,
            std::span<double> rhs);
double max_abs(std::span<const double> u);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
// max over i of (lo[i] - hi[i]); negative when ordered.
double max_lower_excess(std::span<const double> lo, std::span<const double> hi);
std::pair<double, double> minmax(std::span<const double> u);
bool all_finite(std::span<const double> u);
void sample(const std::function<double(double)>& g, std::span<const double> xs,
            std::span<double> out);
} // namespace serial

namespace omp {
void eval_reaction(const ReactionTerm& f, std::span<const double> u,
                   std::span<double> out);
void cn_rhs(std::span<const double> u, std::span<const double> fu,
            std::span<const double> fu_prev, double r, double dt,
            std::span<double> rhs);
double max_abs(std::span<const double> u);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_lower_excess(std::span<const double> lo, std::span<const double> hi);
std::pair<double, double> minmax(std::span<const double> u);
bool all_finite(std::span<const double> u);
void sample(const std::function<double(double)>& g, std::span<const double> xs,
            std::span<double> out);
} // namespace omp

// Dispatch on the current policy.
void eval_reaction(const ReactionTerm& f, std::span<const double> u,
                   std::span<double> out);
void cn_rhs(std::span<const double> u, std::span<const double> fu,
            std::span<const double> fu_prev, double r, double dt,
            std::span<double> rhs);
double max_abs(std::span<const double> u);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_lower_excess(std::span<const double> lo, std::span<const double> hi);
std::pair<double, double> minmax(std::span<const double> u);
bool all_finite(std::span<const double> u);
void sample(const std::function<double(double)>& g, std::span<const double> xs,
            std::span<double> out);

// Tridiagonal solve for the constant-coefficient Crank-Nicolson system
// (I - r/2 D) x = rhs on interior nodes [i0, i1); inherently sequential.
// Coefficients are prefactored once per grid.
struct ThomasFactors {
    std::vector<double> cprime; // forward-elimination coefficients
    double diag = 0, off = 0;
    std::size_t n = 0;
    void factor(std::size_t n_interior, double r);
    void solve(std::span<double> rhs_to_x) const;
};

} // namespace rdlab::kernels

#endif
