#include "rdlab/front.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rdlab {

EdgeEigenvalues edge_eigenvalues(const ReactionTerm& f, double c) {
    double fp0 = f.prime(0.0), fp1 = f.prime(1.0);
    double d0 = c * c - 4.0 * fp0;
    double d1 = c * c - 4.0 * fp1;
    if (d0 < 0.0 || d1 < 0.0)
        throw std::domain_error(
            "edge eigenvalues are complex (speed below the minimal speed)");
    EdgeEigenvalues e;
    e.lambda1 = 0.5 * (c + std::sqrt(d0));
    e.lambda2 = 0.5 * (c - std::sqrt(d0));
    e.mu1 = 0.5 * (c + std::sqrt(d1));
    e.mu2 = 0.5 * (c - std::sqrt(d1));
    return e;
}

FrontProfile::FrontProfile(std::vector<double> phi, std::vector<double> dphi,
                           double xi0, double dxi, double c, Direction dir,
                           double rate_left, double limit_left,
                           double rate_right, double limit_right)
    : phi_(std::move(phi)), dphi_(std::move(dphi)), xi0_(xi0), dxi_(dxi),
      c_(c), dir_(dir), rate_left_(rate_left), limit_left_(limit_left),
      rate_right_(rate_right), limit_right_(limit_right) {}

double FrontProfile::value(double xi) const {
    const double xe = xi_max();
    if (xi <= xi0_)
        return limit_left_ + (phi_.front() - limit_left_) *
                                 std::exp(rate_left_ * (xi - xi0_));
    if (xi >= xe)
        return limit_right_ + (phi_.back() - limit_right_) *
                                  std::exp(rate_right_ * (xi - xe));
    double s = (xi - xi0_) / dxi_;
    std::size_t i = std::min(std::size_t(s), phi_.size() - 2);
    s -= double(i);
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * phi_[i] + (s3 - 2 * s2 + s) * dxi_ * dphi_[i] +
           (-2 * s3 + 3 * s2) * phi_[i + 1] + (s3 - s2) * dxi_ * dphi_[i + 1];
}

double FrontProfile::deriv(double xi) const {
    const double xe = xi_max();
    if (xi <= xi0_)
        return (phi_.front() - limit_left_) * rate_left_ *
               std::exp(rate_left_ * (xi - xi0_));
    if (xi >= xe)
        return (phi_.back() - limit_right_) * rate_right_ *
               std::exp(rate_right_ * (xi - xe));
    double s = (xi - xi0_) / dxi_;
    std::size_t i = std::min(std::size_t(s), phi_.size() - 2);
    s -= double(i);
    double s2 = s * s;
    return ((6 * s2 - 6 * s) * phi_[i] + (3 * s2 - 4 * s + 1) * dxi_ * dphi_[i] +
            (-6 * s2 + 6 * s) * phi_[i + 1] + (3 * s2 - 2 * s) * dxi_ * dphi_[i + 1]) /
           dxi_;
}

FrontProfile FrontProfile::reflect() const {
    std::vector<double> phi(phi_.rbegin(), phi_.rend());
    std::vector<double> dphi(dphi_.size());
    for (std::size_t i = 0; i < dphi_.size(); ++i)
        dphi[i] = -dphi_[dphi_.size() - 1 - i];
    Direction nd = dir_ == Direction::Increasing ? Direction::DecreasingReflect
                                                 : Direction::Increasing;
    return FrontProfile(std::move(phi), std::move(dphi), -xi_max(), dxi_, -c_,
                        nd, -rate_right_, limit_right_, -rate_left_,
                        limit_left_);
}

FrontProfile FrontProfile::translate(double s) const {
    FrontProfile p = *this;
    p.xi0_ += s;
    return p;
}

double FrontProfile::resolved_halfspan(double tail_level) const {
    double lo = xi0_, hi = xi_max();
    for (std::size_t i = 0; i < phi_.size(); ++i) {
        if (std::abs(phi_[i] - limit_left_) > tail_level) {
            lo = xi_at(i);
            break;
        }
    }
    for (std::size_t i = phi_.size(); i-- > 0;) {
        if (std::abs(phi_[i] - limit_right_) > tail_level) {
            hi = xi_at(i);
            break;
        }
    }
    return std::max(std::abs(lo), std::abs(hi));
}

namespace {

using State2 = std::array<double, 2>;

struct PieceResult {
    bool reached = false;  // hit the target level
    double psi = 0.0;      // phi' at the target level
    double phi_extreme = 0.0;
};

// Integrate the phase plane (phi, psi) from `start` until phi crosses
// `target` or psi drops to zero. dir=+1 integrates forward in xi.
PieceResult run_piece(const ReactionTerm& f, double c, State2 start,
                      double target, double dir, double span_cap) {
    auto rhs = [&](double, const State2& y, State2& dy) {
        dy[0] = y[1];
        dy[1] = c * y[1] - f(y[0]);
    };
    PieceResult out;
    ode::Options<2> opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-14;
    opt.max_step = 1.0;
    bool upward = target > start[0];
    opt.event = [&](double, const State2& y) {
        bool hit = upward ? (y[0] >= target) : (y[0] <= target);
        bool turned = y[1] <= 0.0; // the orbit turned back
        return (hit || turned) ? 1.0 : -1.0;
    };
    double extreme = start[0];
    opt.observer = [&](double, const State2& y) {
        extreme = upward ? std::max(extreme, y[0]) : std::min(extreme, y[0]);
    };
    auto r = ode::integrate<2>(rhs, 0.0, start, dir * span_cap, opt);
    out.phi_extreme = extreme;
    bool hit = upward ? (r.y[0] >= target - 1e-12) : (r.y[0] <= target + 1e-12);
    if (r.event && hit && r.y[1] > 0.0) {
        out.reached = true;
        out.psi = r.y[1];
    }
    return out;
}

// Signed shooting functional, increasing in c: positive when the orbit from
// the 0-saddle carries more "energy" through the matching level than the
// orbit arriving at the 1-saddle.
double shooting_functional(const ReactionTerm& f, double c, double match_level,
                           double eps) {
    EdgeEigenvalues e = edge_eigenvalues(f, c);
    State2 left0{eps, e.lambda1 * eps};
    PieceResult left = run_piece(f, c, left0, match_level, +1.0, 400.0);
    if (!left.reached) return -1.0 - (match_level - left.phi_extreme);
    State2 right0{1.0 - eps, -e.mu2 * eps};
    PieceResult right = run_piece(f, c, right0, match_level, -1.0, 400.0);
    if (!right.reached) return 1.0 + (right.phi_extreme - match_level);
    return left.psi - right.psi;
}

struct Tabulated {
    std::vector<double> phi, dphi;
    double xi0 = 0, h = 0;
};

// Put the half level exactly at xi = 0 (Newton on the interpolant).
FrontProfile normalize_half_level(const FrontProfile& p) {
    double xs = 0.0;
    for (int k = 0; k < 4; ++k) xs -= (p.value(xs) - 0.5) / p.deriv(xs);
    return p.translate(-xs);
}

// One classical RK4 step of the phase plane.
void rk4_step(const ReactionTerm& f, double c, double h, State2& y) {
    auto deriv = [&](const State2& s) {
        return State2{s[1], c * s[1] - f(s[0])};
    };
    State2 k1 = deriv(y);
    State2 k2 = deriv({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    State2 k3 = deriv({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    State2 k4 = deriv({y[0] + h * k3[0], y[1] + h * k3[1]});
    y[0] += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    y[1] += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
}

// Fixed-step tabulation from `start`, direction dir, recording every
// node until `stop(phi)` holds or the span cap is reached.
Tabulated tabulate(const ReactionTerm& f, double c, State2 start, double dir,
                   double h_out, const std::function<bool(double)>& stop,
                   double span_cap) {
    const int sub = 4;
    Tabulated tab;
    tab.h = h_out;
    tab.phi.push_back(start[0]);
    tab.dphi.push_back(start[1]);
    State2 y = start;
    double span = 0.0;
    while (!stop(y[0]) && span < span_cap) {
        for (int s = 0; s < sub; ++s) rk4_step(f, c, dir * h_out / sub, y);
        span += h_out;
        tab.phi.push_back(y[0]);
        tab.dphi.push_back(y[1]);
    }
    if (span >= span_cap)
        throw solver_error("front tabulation exceeded span cap");
    return tab;
}

// Locate phi = level between two tabulation nodes by Hermite bisection;
// returns the offset in [0,1] from node i.
double locate_level(const Tabulated& t, std::size_t i, double level,
                    double dir) {
    double h = dir * t.h;
    auto eval = [&](double s) {
        double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * t.phi[i] +
               (s3 - 2 * s2 + s) * h * t.dphi[i] +
               (-2 * s3 + 3 * s2) * t.phi[i + 1] + (s3 - s2) * h * t.dphi[i + 1];
    };
    double lo = 0.0, hi = 1.0;
    double flo = eval(lo) - level;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = eval(mid) - level;
        if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
    }
    return 0.5 * (lo + hi);
}

FrontProfile assemble_bistable(const ReactionTerm& f, double c, double eps,
                               double h_out) {
    EdgeEigenvalues e = edge_eigenvalues(f, c);

    // Left piece: forward from the unstable manifold of (0,0).
    Tabulated left = tabulate(
        f, c, {eps, e.lambda1 * eps}, +1.0, h_out,
        [](double phi) { return phi >= 0.5; }, 1000.0);
    // Right piece: backward from the stable manifold of (1,0).
    Tabulated right = tabulate(
        f, c, {1.0 - eps, -e.mu2 * eps}, -1.0, h_out,
        [](double phi) { return phi <= 0.5; }, 1000.0);

    // Crossing offsets inside the final cell of each piece.
    std::size_t li = left.phi.size() - 2;
    double ls = locate_level(left, li, 0.5, +1.0);
    std::size_t ri = right.phi.size() - 2;
    double rs = locate_level(right, ri, 0.5, -1.0);

    // Re-run both pieces so that a node lands exactly on the crossing: a
    // single fractional first step aligns the rest of the grid.
    auto realign = [&](Tabulated& tab, State2 start, double dir, double frac,
                       const std::function<bool(double)>& stop) {
        State2 y = start;
        if (frac > 1e-14) {
            const int sub = 4;
            for (int s = 0; s < sub; ++s)
                rk4_step(f, c, dir * frac * tab.h / sub, y);
        }
        Tabulated out = tabulate(f, c, y, dir, tab.h, stop, 1000.0);
        return out;
    };
    // Offset so later nodes land on the crossing: advance by the fractional
    // remainder of the distance to the crossing.
    double lfrac = (double(li) + ls) - std::floor(double(li) + ls);
    Tabulated left2 = realign(left, {eps, e.lambda1 * eps}, +1.0, lfrac,
                              [](double phi) { return phi >= 0.5; });
    double rfrac = (double(ri) + rs) - std::floor(double(ri) + rs);
    Tabulated right2 = realign(right, {1.0 - eps, -e.mu2 * eps}, -1.0, rfrac,
                               [](double phi) { return phi <= 0.5; });

    // Nearest node to the half level in each realigned piece.
    auto nearest_half = [](const Tabulated& t) {
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t i = 0; i < t.phi.size(); ++i) {
            double d = std::abs(t.phi[i] - 0.5);
            if (d < bd) { bd = d; best = i; }
        }
        return best;
    };
    std::size_t lc = nearest_half(left2);
    std::size_t rc = nearest_half(right2);

    // Glue: xi < 0 from the left piece, xi >= 0 from the right piece.
    std::vector<double> phi, dphi;
    for (std::size_t i = 0; i < lc; ++i) {
        phi.push_back(left2.phi[i]);
        dphi.push_back(left2.dphi[i]);
    }
    for (std::size_t i = rc + 1; i-- > 0;) {
        phi.push_back(right2.phi[i]);
        dphi.push_back(right2.dphi[i]);
    }
    double xi0 = -h_out * double(lc);
    FrontProfile prof(std::move(phi), std::move(dphi), xi0, h_out, c,
                      Direction::Increasing, e.lambda1, 0.0, e.mu2, 1.0);
    return normalize_half_level(prof);
}

} // namespace

FrontProfile solve_front_bistable(const ReactionTerm& f, double ctol) {
    if (f.assumption() != AssumptionClass::Bistable)
        throw assumption_error("solve_front_bistable requires a bistable term");
    if (!(ctol > 0.0)) throw std::invalid_argument("ctol must be positive");

    const double eps = 1e-8;
    double fmax = 0.0;
    for (int i = 0; i <= 400; ++i)
        fmax = std::max(fmax, std::abs(f.prime(i / 400.0)));
    double clo = -2.0 * std::sqrt(fmax), chi = 2.0 * std::sqrt(fmax);
    const double match = 0.5;

    double slo = shooting_functional(f, clo, match, eps);
    double shi = shooting_functional(f, chi, match, eps);
    if (slo >= 0.0 || shi <= 0.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "front shooting: no sign change on [%g, %g] "
                      "(S(lo)=%g, S(hi)=%g)",
                      clo, chi, slo, shi);
        throw solver_error(buf);
    }
    double width_goal = std::max(1e-14, std::min(ctol, 1e-10));
    while (chi - clo > width_goal) {
        double mid = 0.5 * (clo + chi);
        if (mid == clo || mid == chi) break;
        double sm = shooting_functional(f, mid, match, eps);
        if (sm <= 0.0) clo = mid; else chi = mid;
    }
    double c = 0.5 * (clo + chi);
    return assemble_bistable(f, c, eps, 0.01);
}

double minimal_speed(const ReactionTerm& f) {
    if (f.assumption() != AssumptionClass::Monostable)
        throw assumption_error("minimal_speed requires a monostable term");
    return 2.0 * std::sqrt(f.prime(0.0));
}

FrontProfile solve_front_monostable(const ReactionTerm& f, double c) {
    double cmin = minimal_speed(f);
    if (c < cmin - 1e-12) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "no monostable front for c=%.6g below c_min=%.6g", c,
                      cmin);
        throw std::domain_error(buf);
    }
    c = std::max(c, cmin);
    EdgeEigenvalues e = edge_eigenvalues(f, c);
    const double eps = 1e-8;

    // Backward from the saddle at u=1; the backward flow contracts onto the
    // connection all the way into the node at 0.
    Tabulated tab = tabulate(
        f, c, {1.0 - eps, -e.mu2 * eps}, -1.0, 0.01,
        [&](double phi) { return phi <= eps; }, 4000.0);

    // Node alignment at the half level.
    std::size_t ci = 0;
    for (std::size_t i = 0; i + 1 < tab.phi.size(); ++i)
        if (tab.phi[i] >= 0.5 && tab.phi[i + 1] < 0.5) { ci = i; break; }
    double cs = locate_level(tab, ci, 0.5, -1.0);
    double frac = (double(ci) + cs) - std::floor(double(ci) + cs);
    State2 y{1.0 - eps, -e.mu2 * eps};
    if (frac > 1e-14) {
        const int sub = 4;
        for (int s = 0; s < sub; ++s) rk4_step(f, c, -frac * 0.01 / sub, y);
    }
    Tabulated tab2 = tabulate(f, c, y, -1.0, 0.01,
                              [&](double phi) { return phi <= eps; }, 4000.0);

    std::size_t half = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < tab2.phi.size(); ++i) {
        double d = std::abs(tab2.phi[i] - 0.5);
        if (d < bd) { bd = d; half = i; }
    }
    // tab2 runs from xi=0 (phi near 1) down to negative xi; reverse it.
    std::vector<double> phi(tab2.phi.rbegin(), tab2.phi.rend());
    std::vector<double> dphi(tab2.dphi.rbegin(), tab2.dphi.rend());
    double xi0 = -0.01 * double(phi.size() - 1 - half);
    // Decay toward 0 follows the slow root lambda2 (both roots positive).
    FrontProfile prof(std::move(phi), std::move(dphi), xi0, 0.01, c,
                      Direction::Increasing, e.lambda2, 0.0, e.mu2, 1.0);
    return normalize_half_level(prof);
}

TailBounds fit_tail_constants(const FrontProfile& p, const EdgeEigenvalues& e) {
    if (p.direction() != Direction::Increasing)
        throw assumption_error("tail constants are fitted on the increasing branch");
    double end_lo = p.value(p.xi_min()), end_hi = p.value(p.xi_max());
    if (end_lo > 1e-3 || 1.0 - end_hi > 1e-3)
        throw solver_error("profile tails are not resolved far enough for a fit");

    TailBounds tb;
    tb.M4 = 0.0; tb.M4_tilde = 1e300;
    tb.M3 = 0.0; tb.M3_tilde = 1e300;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double xi = p.xi_at(i);
        if (xi <= 0.0) {
            double r = p.phi_at(i) * std::exp(-e.lambda1 * xi);
            if (!std::isfinite(r) || r <= 0.0)
                throw solver_error("tail fit: non-positive or unbounded ratio");
            tb.M4 = std::max(tb.M4, r);
            tb.M4_tilde = std::min(tb.M4_tilde, r);
        }
        if (xi >= 0.0) {
            double r = (1.0 - p.phi_at(i)) * std::exp(-e.mu2 * xi);
            if (!std::isfinite(r) || r <= 0.0)
                throw solver_error("tail fit: non-positive or unbounded ratio");
            tb.M3 = std::max(tb.M3, r);
            tb.M3_tilde = std::min(tb.M3_tilde, r);
        }
    }
    return tb;
}

double profile_residual(const FrontProfile& p, const ReactionTerm& f) {
    double worst = 0.0;
    double h = p.dxi(), c = p.speed();
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        double second = (p.phi_at(i + 1) - 2.0 * p.phi_at(i) + p.phi_at(i - 1)) / (h * h);
        double first = (p.phi_at(i + 1) - p.phi_at(i - 1)) / (2.0 * h);
        worst = std::max(worst, std::abs(second - c * first + f(p.phi_at(i))));
    }
    return worst;
}

} // namespace rdlab
