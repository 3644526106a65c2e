#ifndef RDLAB_FRONT_HPP
#define RDLAB_FRONT_HPP

#include "rdlab/reaction.hpp"

#include <vector>

namespace rdlab {

// Roots of the linearizations at u=0 (lambda) and u=1 (mu):
//   lambda^2 - c*lambda + f'(0) = 0,   mu^2 - c*mu + f'(1) = 0.
struct EdgeEigenvalues {
    double lambda1 = 0, lambda2 = 0;
    double mu1 = 0, mu2 = 0;
};

EdgeEigenvalues edge_eigenvalues(const ReactionTerm& f, double c);

// Envelope constants for the profile tails:
//   M4t * e^{lambda1 xi} <= phi(xi)   <= M4 * e^{lambda1 xi},  xi <= 0
//   M3t * e^{mu2 xi}     <= 1-phi(xi) <= M3 * e^{mu2 xi},      xi >= 0
struct TailBounds {
    double M3 = 0, M3_tilde = 0;
    double M4 = 0, M4_tilde = 0;
};

enum class Direction { Increasing, DecreasingReflect };

// Tabulated traveling front phi(xi), xi = x + c t, normalized so that
// phi(0) = 1/2. Evaluation off the tabulated range extrapolates with the
// linearized exponential tails, so the evaluator is usable on all of R.
class FrontProfile {
  public:
    FrontProfile(std::vector<double> phi, std::vector<double> dphi, double xi0,
                 double dxi, double c, Direction dir, double rate_left,
                 double limit_left, double rate_right, double limit_right);

    double value(double xi) const;
    double deriv(double xi) const;

    double speed() const { return c_; }
    Direction direction() const { return dir_; }
    double xi_min() const { return xi0_; }
    double xi_max() const { return xi0_ + dxi_ * double(phi_.size() - 1); }
    double dxi() const { return dxi_; }
    std::size_t size() const { return phi_.size(); }
    double phi_at(std::size_t i) const { return phi_[i]; }
    double dphi_at(std::size_t i) const { return dphi_[i]; }
    double xi_at(std::size_t i) const { return xi0_ + dxi_ * double(i); }
    // Exponential rates used for off-grid extrapolation. For an increasing
    // bistable profile these are lambda1 (left) and mu2 (right).
    double tail_rate_left() const { return rate_left_; }
    double tail_rate_right() const { return rate_right_; }

    // Mirror profile phi(-xi): monotone decreasing, speed -c.
    FrontProfile reflect() const;
    // Same shape translated by s: value(xi) = old(xi - s). Normalization
    // moves with it; used by tail-fit tests.
    FrontProfile translate(double s) const;

    // Half-width of the xi-range where the profile differs from its limits
    // by more than `tail_level`.
    double resolved_halfspan(double tail_level = 1e-6) const;

  private:
    std::vector<double> phi_, dphi_;
    double xi0_, dxi_, c_;
    Direction dir_;
    double rate_left_, limit_left_, rate_right_, limit_right_;
};

// Unique bistable front connecting 0 to 1. Phase-plane shooting from the
// unstable manifold of (0,0), wave speed by bisection to `ctol`.
FrontProfile solve_front_bistable(const ReactionTerm& f, double ctol = 1e-10);

double minimal_speed(const ReactionTerm& f); // 2 sqrt(f'(0)), monostable

// Monostable front for a requested speed c >= c_min, computed by shooting
// backward from the u=1 saddle.
FrontProfile solve_front_monostable(const ReactionTerm& f, double c);

TailBounds fit_tail_constants(const FrontProfile& p, const EdgeEigenvalues& e);

// max over interior nodes of |phi'' - c phi' + f(phi)| by centered
// differences on the tabulation.
double profile_residual(const FrontProfile& p, const ReactionTerm& f);

} // namespace rdlab

#endif
