#include "rdlab/supersub.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/kernels.hpp"
#include "rdlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace rdlab {

ShiftFunction::ShiftFunction(ShiftKind kind, double c_eff, double rate,
                             double amplitude, double initial)
    : kind_(kind), sign_(kind == ShiftKind::P3 ? ShiftSign::Minus
                                               : ShiftSign::Plus),
      c_(c_eff), rate_(rate), M_(amplitude), p0_(initial) {
    if (M_ <= 0.0) throw std::invalid_argument("shift amplitude must be > 0");
    if (rate_ <= 0.0) throw std::invalid_argument("shift rate must be > 0");
    if (kind_ == ShiftKind::P5)
        throw std::invalid_argument("use ShiftFunction::p5 for P5");
    if (c_ <= 0.0)
        throw std::invalid_argument("shift drift speed must be positive");
    if (sign_ == ShiftSign::Plus) {
        if (p0_ > 0.0)
            throw std::invalid_argument("plus-sign shift needs p(0) <= 0");
    } else {
        double bound = std::min(0.0, std::log(c_ / M_) / rate_);
        if (p0_ > bound + 1e-12)
            throw std::invalid_argument(
                "p3 initial value violates p3(0) <= min(0, ln(c/M8)/lambda1)");
        if (M_ / c_ * std::exp(rate_ * p0_) >= 1.0)
            throw std::invalid_argument("p3: logarithm argument <= 0");
    }
}

ShiftFunction ShiftFunction::p5(double c2, const ShiftFunction& p4,
                                double initial) {
    if (p4.kind_ != ShiftKind::P4)
        throw std::invalid_argument("p5 must be slaved to a P4 shift");
    if (initial > p4.initial())
        throw std::invalid_argument("monostable shifts need p5(0) <= p4(0)");
    ShiftFunction s(ShiftKind::P4, p4.c_, p4.rate_, p4.M_, p4.p0_);
    s.kind_ = ShiftKind::P5;
    s.companion_c_ = c2;
    s.companion_p0_ = initial;
    s.slaved_ = true;
    return s;
}

namespace {

// p' = c + sgn * M e^{lam p} in closed form via z = e^{-lam p}:
//   p(t) = p0 + c t - ln(1 - sgn (M/c) e^{lam p0} (1 - e^{c lam t})) / lam
// with sgn = +1 for the minus-sign equation and -1 for the plus sign.
double shift_closed(double p0, double c, double lam, double M, double sgn,
                    double t) {
    double q = sgn * (M / c) * std::exp(lam * p0);
    double arg = 1.0 - q * (1.0 - std::exp(c * lam * t));
    if (!(arg > 0.0))
        throw std::domain_error("shift closed form: logarithm argument <= 0");
    return p0 + c * t - std::log(arg) / lam;
}

} // namespace

double ShiftFunction::value(double t) const {
    if (slaved_) {
        double p4t = shift_closed(p0_, c_, rate_, M_, -1.0, t);
        return companion_p0_ + (companion_c_ - c_) * t + (p4t - p0_);
    }
    double sgn = sign_ == ShiftSign::Plus ? -1.0 : +1.0;
    return shift_closed(p0_, c_, rate_, M_, sgn, t);
}

double ShiftFunction::derivative(double t) const {
    if (slaved_) {
        double p4t = shift_closed(p0_, c_, rate_, M_, -1.0, t);
        return companion_c_ + M_ * std::exp(rate_ * p4t);
    }
    double p = value(t);
    double drift = M_ * std::exp(rate_ * p);
    return sign_ == ShiftSign::Plus ? c_ + drift : c_ - drift;
}

double ShiftFunction::value_numeric(double t) const {
    if (t == 0.0) return slaved_ ? companion_p0_ : p0_;
    if (slaved_) {
        auto rhs = [&](double, const std::array<double, 2>& y,
                       std::array<double, 2>& dy) {
            dy[0] = c_ + M_ * std::exp(rate_ * y[0]);
            dy[1] = companion_c_ + M_ * std::exp(rate_ * y[0]);
        };
        ode::Options<2> opt;
        opt.rel_tol = 1e-11;
        opt.abs_tol = 1e-13;
        auto r = ode::integrate<2>(rhs, 0.0, {p0_, companion_p0_}, t, opt);
        return r.y[1];
    }
    double sgn = sign_ == ShiftSign::Plus ? 1.0 : -1.0;
    auto rhs = [&](double, const std::array<double, 1>& y,
                   std::array<double, 1>& dy) {
        dy[0] = c_ + sgn * M_ * std::exp(rate_ * y[0]);
    };
    ode::Options<1> opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-13;
    auto r = ode::integrate<1>(rhs, 0.0, {p0_}, t, opt);
    return r.y[0];
}

double ShiftFunction::x7() const {
    if (sign_ != ShiftSign::Minus)
        throw std::invalid_argument("x7 is defined for the minus-sign shift");
    double arg = 1.0 - (M_ / c_) * std::exp(rate_ * p0_);
    if (!(arg > 0.0)) throw std::domain_error("x7: logarithm argument <= 0");
    return std::log(arg) / rate_;
}

double ShiftFunction::x8() const { return p0_ - x7(); }

double ShiftFunction::backward_shift_limit() const {
    if (slaved_) {
        ShiftFunction p4(ShiftKind::P4, c_, rate_, M_, p0_);
        return companion_p0_ - p0_ + p4.backward_shift_limit();
    }
    if (sign_ == ShiftSign::Plus)
        return p0_ - std::log(1.0 + (M_ / c_) * std::exp(rate_ * p0_)) / rate_;
    return x8();
}

double Envelope::operator()(double x, double t) const {
    require_valid(t);
    double v = branches[0].value(x, t);
    for (std::size_t i = 1; i < branches.size(); ++i) {
        double b = branches[i].value(x, t);
        v = combine == EnvelopeCombine::Min ? std::min(v, b)
            : combine == EnvelopeCombine::Max ? std::max(v, b)
                                              : b;
    }
    return v;
}

std::size_t Envelope::active_branch(double x, double t) const {
    std::size_t best = 0;
    double v = branches[0].value(x, t);
    for (std::size_t i = 1; i < branches.size(); ++i) {
        double b = branches[i].value(x, t);
        bool better = combine == EnvelopeCombine::Min ? b < v : b > v;
        if (better) { best = i; v = b; }
    }
    return best;
}

void Envelope::require_valid(double t) const {
    if (t < t_min - 1e-9 || t > t_max + 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "envelope '%s' evaluated at t=%.6g outside [%.6g, %.6g]",
                      label.c_str(), t, t_min, t_max);
        throw std::domain_error(buf);
    }
}

EnvelopePair build_envelope_C1(const FrontProfile& p, double m7, double p1_0) {
    double c = p.speed();
    if (c <= 0.0)
        throw assumption_error("C1 envelopes need a positive wave speed");
    auto prof = std::make_shared<FrontProfile>(p);
    double lam1 = p.tail_rate_left();
    ShiftFunction p1(ShiftKind::P1, c, lam1, m7, p1_0);
    double x6 = p1_0 - std::log(1.0 + m7 / c) / lam1;

    EnvelopePair out;
    out.super.role = EnvelopeRole::Super;
    out.super.combine = EnvelopeCombine::Min;
    out.super.label = "C1 super";
    out.super.t_max = 0.0;
    out.super.branches.push_back(
        {"sum", [prof, p1](double x, double t) {
             double s = p1.value(t);
             return prof->value(x + s) + prof->value(-x + s);
         }});
    out.super.branches.push_back({"one", [](double, double) { return 1.0; }});

    out.sub.role = EnvelopeRole::Sub;
    out.sub.combine = EnvelopeCombine::Max;
    out.sub.label = "C1 sub";
    out.sub.branches.push_back({"left", [prof, c, x6](double x, double t) {
                                    return prof->value(x + c * t + x6);
                                }});
    out.sub.branches.push_back({"right", [prof, c, x6](double x, double t) {
                                    return prof->value(-x + c * t + x6);
                                }});
    return out;
}

double c1_sub_shift(const FrontProfile& p, double m7, double p1_0) {
    return p1_0 - std::log(1.0 + m7 / p.speed()) / p.tail_rate_left();
}

double default_c2_p3_initial(double c, double lam1, double m8, double p2_0) {
    // Largest admissible start, then lowered until the backward asymptote of
    // the sub stays below the super's.
    double p3_0 = std::min(0.0, std::log(c / m8) / lam1) - 1.0;
    auto sub_limit = [&](double p0) {
        return p0 - std::log(1.0 - (m8 / c) * std::exp(lam1 * p0)) / lam1;
    };
    double super_limit =
        p2_0 - std::log(1.0 + (m8 / c) * std::exp(lam1 * p2_0)) / lam1;
    int guard = 0;
    while (sub_limit(p3_0) > super_limit - 1e-6 && guard++ < 200) p3_0 -= 0.5;
    if (guard >= 200)
        throw solver_error("could not order the C2 shift asymptotes");
    return p3_0;
}

EnvelopePair build_envelope_C2(const FrontProfile& p, double m8, double p2_0,
                               double p3_0) {
    double c = p.speed();
    if (c <= 0.0)
        throw assumption_error("C2 envelopes need a positive wave speed");
    auto prof = std::make_shared<FrontProfile>(p);
    double lam1 = p.tail_rate_left();
    ShiftFunction p2(ShiftKind::P2, c, lam1, m8, p2_0);
    ShiftFunction p3(ShiftKind::P3, c, lam1, m8, p3_0);

    EnvelopePair out;
    out.super.role = EnvelopeRole::Super;
    out.super.combine = EnvelopeCombine::Single;
    out.super.label = "C2 super";
    out.super.t_max = 0.0;
    out.super.branches.push_back(
        {"sum-p2", [prof, p2](double x, double t) {
             double s = p2.value(t);
             return prof->value(x + s) + prof->value(-x + s);
         }});

    out.sub.role = EnvelopeRole::Sub;
    out.sub.combine = EnvelopeCombine::Single;
    out.sub.label = "C2 sub";
    out.sub.t_max = 0.0;
    out.sub.branches.push_back(
        {"sum-p3", [prof, p3](double x, double t) {
             double s = p3.value(t);
             return prof->value(x + s) + prof->value(-x + s);
         }});
    return out;
}

EnvelopePair build_envelope_annihilating(const FrontProfile& p, double B) {
    double c = p.speed();
    if (c >= 0.0)
        throw assumption_error(
            "annihilating envelopes need a negative wave speed");
    if (B <= 0.0) throw std::invalid_argument("B must be positive");
    auto prof = std::make_shared<FrontProfile>(p);
    double t_band = -4.0 * B * prof->value(0.0); // = -2B with phi(0)=1/2

    EnvelopePair out;
    out.super.role = EnvelopeRole::Super;
    out.super.combine = EnvelopeCombine::Min;
    out.super.label = "annihilating super";
    out.super.branches.push_back({"left-front", [prof, c](double x, double t) {
                                      return prof->value(x + c * t);
                                  }});
    out.super.branches.push_back({"right-front", [prof, c](double x, double t) {
                                      return prof->value(-x + c * t);
                                  }});

    // Product advanced through the band: Sub(x,t) = Phi(x, s) where
    // s - h1(s) = t, h1(s) = 4 B phi(c s). F' = 1 - h1' >= 1, Newton is safe.
    auto advance = [prof, c, B](double t) {
        double s = t;
        for (int it = 0; it < 100; ++it) {
            double h1 = 4.0 * B * prof->value(c * s);
            double F = s - h1 - t;
            double Fp = 1.0 - 4.0 * B * c * prof->deriv(c * s);
            double step = F / Fp;
            s -= step;
            if (std::abs(step) < 1e-13) break;
        }
        return s;
    };
    out.sub.role = EnvelopeRole::Sub;
    out.sub.combine = EnvelopeCombine::Single;
    out.sub.label = "annihilating sub";
    out.sub.t_max = t_band;
    out.sub.branches.push_back(
        {"product-band", [prof, c, advance](double x, double t) {
             double s = advance(t);
             return prof->value(x + c * s) * prof->value(-x + c * s);
         }});
    return out;
}

double homogeneous_solution(const ReactionTerm& f, double rho0, double t) {
    if (!(rho0 > 0.0 && rho0 < 1.0))
        throw std::invalid_argument("rho0 must lie in (0,1)");
    if (t == 0.0) return rho0;
    auto rhs = [&](double, const std::array<double, 1>& y,
                   std::array<double, 1>& dy) { dy[0] = f(y[0]); };
    ode::Options<1> opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-30; // rho decays through many orders backward in time
    auto r = ode::integrate<1>(rhs, 0.0, {rho0}, t, opt);
    return r.y[0];
}

namespace {

// Dense table of rho(t) on [t_lo, t_hi]; evaluation by Catmull-Rom. The
// deep-past tail below the table range uses the linearized decay e^{f'(0)t}.
struct RhoTable {
    std::vector<double> vals;
    double t_lo = 0, dt = 0, fp0 = 0;

    static RhoTable build(const ReactionTerm& f, double rho0, double t_lo,
                          double t_hi, double dt) {
        RhoTable tab;
        tab.t_lo = t_lo;
        tab.dt = dt;
        tab.fp0 = f.prime(0.0);
        std::size_t n = std::size_t(std::llround((t_hi - t_lo) / dt)) + 1;
        tab.vals.resize(n);
        // integrate backward from 0 with fixed RK4, then forward
        auto deriv = [&](double y) { return f(y); };
        auto rk4 = [&](double y, double h) {
            double k1 = deriv(y);
            double k2 = deriv(y + 0.5 * h * k1);
            double k3 = deriv(y + 0.5 * h * k2);
            double k4 = deriv(y + h * k3);
            return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        };
        std::size_t i0 = std::size_t(std::llround((0.0 - t_lo) / dt));
        const int sub = 10;
        double y = rho0;
        tab.vals[i0] = y;
        for (std::size_t i = i0; i-- > 0;) {
            for (int s = 0; s < sub; ++s) y = rk4(y, -dt / sub);
            tab.vals[i] = y;
        }
        y = rho0;
        for (std::size_t i = i0 + 1; i < n; ++i) {
            for (int s = 0; s < sub; ++s) y = rk4(y, dt / sub);
            tab.vals[i] = y;
        }
        return tab;
    }

    double operator()(double t) const {
        double t_hi = t_lo + dt * double(vals.size() - 1);
        if (t < t_lo) return vals.front() * std::exp(fp0 * (t - t_lo));
        if (t > t_hi) return vals.back();
        double s = (t - t_lo) / dt;
        std::size_t i = std::min(std::size_t(s), vals.size() - 2);
        double u = s - double(i);
        double p0 = vals[i > 0 ? i - 1 : 0];
        double p1 = vals[i], p2 = vals[i + 1];
        double p3 = vals[std::min(i + 2, vals.size() - 1)];
        if (i == 0) p0 = 3 * p1 - 3 * p2 + p3;
        if (i + 2 > vals.size() - 1) p3 = 3 * p2 - 3 * p1 + p0;
        double u2 = u * u, u3 = u2 * u;
        return 0.5 * ((2 * p1) + (-p0 + p2) * u +
                      (2 * p0 - 5 * p1 + 4 * p2 - p3) * u2 +
                      (-p0 + 3 * p1 - 3 * p2 + p3) * u3);
    }
};

} // namespace

EnvelopePair build_envelope_monostable(const FrontProfile& f1,
                                       const FrontProfile& f2,
                                       const ReactionTerm& f,
                                       MonostableEnvelopeParams prm) {
    if (f.assumption() != AssumptionClass::Monostable)
        throw assumption_error("monostable envelopes need a monostable term");
    double c1 = f1.speed(), c2 = f2.speed();
    if (c1 > c2) throw std::invalid_argument("need c1 <= c2");
    if (prm.p5_0 > prm.p4_0 || prm.p4_0 > 0.0)
        throw std::invalid_argument("need p5(0) <= p4(0) <= 0");

    auto pr1 = std::make_shared<FrontProfile>(f1);
    auto pr2 = std::make_shared<FrontProfile>(f2);
    ShiftFunction p4(ShiftKind::P4, c1, prm.alpha_tilde, prm.m9, prm.p4_0);
    ShiftFunction p5 = ShiftFunction::p5(c2, p4, prm.p5_0);
    double y6 = p4.backward_shift_limit();
    double y7 = p5.backward_shift_limit();

    bool chi_i = prm.variant != MonostableVariant::U01;
    bool chi_j = prm.variant != MonostableVariant::U10;
    bool with_rho = prm.variant != MonostableVariant::U3;

    double nu0 = prm.nu0 > 0.0 ? prm.nu0 : prm.rho0 * (1.0 - prm.rho0);
    if (nu0 >= prm.rho0)
        throw std::invalid_argument("need nu0 < rho(0) so that rho - nu > 0");
    double fp0 = f.prime(0.0);

    std::shared_ptr<RhoTable> rho;
    if (with_rho)
        rho = std::make_shared<RhoTable>(
            RhoTable::build(f, prm.rho0, -80.0, 10.0, 0.01));

    EnvelopePair out;
    out.sub.role = EnvelopeRole::Sub;
    out.sub.combine = EnvelopeCombine::Max;
    out.sub.label = "monostable lower";
    out.sub.t_max = 0.0;
    if (chi_i)
        out.sub.branches.push_back(
            {"front1", [pr1, c1, y6](double x, double t) {
                 return pr1->value(x + c1 * t + y6);
             }});
    if (chi_j)
        out.sub.branches.push_back(
            {"front2", [pr2, c2, y7](double x, double t) {
                 return pr2->value(-x + c2 * t + y7);
             }});
    if (with_rho)
        out.sub.branches.push_back(
            {"rho", [rho](double, double t) { return (*rho)(t); }});

    out.super.role = EnvelopeRole::Super;
    out.super.combine = EnvelopeCombine::Min;
    out.super.label = "monostable upper";
    out.super.t_max = 0.0;
    out.super.branches.push_back({"one", [](double, double) { return 1.0; }});
    out.super.branches.push_back(
        {"sum", [pr1, pr2, p4, p5, chi_i, chi_j, with_rho, nu0,
                 fp0](double x, double t) {
             double v = 0.0;
             double s4 = p4.value(t);
             double s5 = p5.value(t);
             if (chi_i) v += pr1->value(x + s4);
             if (chi_j) v += pr2->value(-x + s5);
             if (with_rho) v += nu0 * std::exp(fp0 * t);
             return v;
         }});
    return out;
}

double SandwichParams::gamma0() const {
    double g = increasing ? (v - w) / (b_slope * v) : (w - v) / (b_slope * v);
    return g;
}
double SandwichParams::q(double t) const { return q0_bar * std::exp(v * t); }
double SandwichParams::gamma(double t) const {
    double g0 = gamma0();
    return q0_bar * (1.0 + g0 - g0 * std::exp(v * t));
}

EnvelopePair build_sandwich(const std::function<double(double, double)>& u,
                            const StabilityConstants& sc, double q0_bar,
                            bool increasing) {
    if (q0_bar < 0.0 || q0_bar > sc.theta)
        throw std::invalid_argument(
            "sandwich amplitude must satisfy 0 <= q0 <= theta");
    SandwichParams sp;
    sp.q0_bar = q0_bar;
    sp.v = sc.v;
    sp.w = sc.w;
    sp.increasing = increasing;
    if (increasing) {
        if (!sc.b_bar || *sc.b_bar <= 0.0)
            throw std::invalid_argument("sandwich needs a measured b_bar > 0");
        sp.b_slope = *sc.b_bar;
    } else {
        if (!sc.b_tilde || *sc.b_tilde >= 0.0)
            throw std::invalid_argument("sandwich needs a measured b_tilde < 0");
        sp.b_slope = *sc.b_tilde;
    }
    double sgn = increasing ? +1.0 : -1.0;

    EnvelopePair out;
    out.super.role = EnvelopeRole::Super;
    out.super.combine = EnvelopeCombine::Min;
    out.super.label = increasing ? "sandwich super (inc)" : "sandwich super (dec)";
    out.super.t_min = 0.0;
    out.super.branches.push_back({"one", [](double, double) { return 1.0; }});
    out.super.branches.push_back(
        {"shifted+q", [u, sp, sgn](double x, double t) {
             return u(x, t + sgn * sp.gamma(t)) + sp.q(t);
         }});

    out.sub.role = EnvelopeRole::Sub;
    out.sub.combine = EnvelopeCombine::Max;
    out.sub.label = increasing ? "sandwich sub (inc)" : "sandwich sub (dec)";
    out.sub.t_min = 0.0;
    out.sub.branches.push_back({"zero", [](double, double) { return 0.0; }});
    out.sub.branches.push_back(
        {"shifted-q", [u, sp, sgn](double x, double t) {
             return u(x, t - sgn * sp.gamma(t)) - sp.q(t);
         }});
    return out;
}

VerifyReport verify_inequality(const Envelope& e, const ReactionTerm& f,
                               const VerifyGrid& grid) {
    VerifyReport rep;
    rep.tol = 10.0 * grid.dx * grid.dx;
    const double h = grid.dx, et = grid.eps_t;

    double t_lo = std::max(grid.t0, e.t_min + 2.0 * et);
    double t_hi = std::min(grid.t1, e.t_max - 2.0 * et);
    if (t_hi < t_lo)
        throw std::invalid_argument("verify grid misses the validity window");
    std::size_t nt = std::size_t((t_hi - t_lo) / grid.dt) + 1;
    std::size_t nx = std::size_t((grid.x1 - grid.x0) / grid.dx) + 1;

    const bool is_super = e.role == EnvelopeRole::Super;
    struct Row {
        double worst = 0;
        double wx = 0, wt = 0;
        std::size_t branch = 0;
        std::size_t checked = 0, skipped = 0;
        bool any = false;
        std::vector<double> branch_absN;
    };
    std::vector<Row> rows(nt);
    for (auto& row : rows) row.branch_absN.assign(e.branches.size(), 0.0);

#pragma omp parallel for schedule(dynamic) if (kernels::parallel_enabled())
    for (std::ptrdiff_t it = 0; it < std::ptrdiff_t(nt); ++it) {
        double t = t_lo + grid.dt * double(it);
        Row& row = rows[it];
        for (std::size_t ix = 0; ix < nx; ++ix) {
            double x = grid.x0 + grid.dx * double(ix);
            std::size_t b = e.active_branch(x, t);
            bool clean = true;
            for (int k = -2; k <= 2 && clean; ++k)
                if (e.active_branch(x + k * h, t) != b) clean = false;
            if (clean && (e.active_branch(x, t - et) != b ||
                          e.active_branch(x, t + et) != b))
                clean = false;
            if (!clean) {
                ++row.skipped;
                continue;
            }
            const auto& bi = e.branches[b].value;
            double ut = (bi(x, t + et) - bi(x, t - et)) / (2.0 * et);
            double uxx =
                (bi(x + h, t) - 2.0 * bi(x, t) + bi(x - h, t)) / (h * h);
            double val = bi(x, t);
            double N = ut - uxx - f(val);
            double signed_res = is_super ? N : -N; // violation when negative
            row.branch_absN[b] = std::max(row.branch_absN[b], std::abs(N));
            ++row.checked;
            if (!row.any || signed_res < row.worst) {
                row.any = true;
                row.worst = signed_res;
                row.wx = x;
                row.wt = t;
                row.branch = b;
            }
        }
    }

    std::vector<double> branch_absN(e.branches.size(), 0.0);
    bool any = false;
    for (const auto& row : rows) {
        rep.checked += row.checked;
        rep.skipped_kink += row.skipped;
        for (std::size_t b = 0; b < branch_absN.size(); ++b)
            branch_absN[b] = std::max(branch_absN[b], row.branch_absN[b]);
        if (row.any && (!any || row.worst < rep.worst)) {
            any = true;
            rep.worst = row.worst;
            rep.worst_x = row.wx;
            rep.worst_t = row.wt;
            rep.worst_branch = e.branches[row.branch].name;
        }
    }
    for (std::size_t b = 0; b < branch_absN.size(); ++b)
        rep.branch_max_absN.emplace_back(e.branches[b].name, branch_absN[b]);
    if (!any) throw solver_error("verify_inequality: kink locus covered every sample");
    // rep.worst is the most violating value of (super ? N : -N)
    rep.pass = rep.worst >= -rep.tol;
    return rep;
}

double calibrate_amplitude(const std::function<bool(double)>& passes,
                           double start, double floor, double cap) {
    double hi = start;
    double lo;
    if (passes(hi)) {
        double probe = hi / 2.0;
        while (probe >= floor && passes(probe)) {
            hi = probe;
            probe /= 2.0;
        }
        if (probe < floor) return hi;
        lo = probe;
    } else {
        while (!passes(hi)) {
            hi *= 2.0;
            if (hi > cap)
                throw solver_error(
                    "amplitude calibration failed below the cap");
        }
        lo = hi / 2.0;
    }
    while (hi / lo > 1.1) {
        double mid = std::sqrt(lo * hi);
        if (passes(mid)) hi = mid; else lo = mid;
    }
    return hi;
}

} // namespace rdlab
