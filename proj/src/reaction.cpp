#include "rdlab/reaction.hpp"
#include "rdlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rdlab {

std::string to_string(CaseTag tag) {
    switch (tag) {
    case CaseTag::C1: return "C1";
    case CaseTag::C2: return "C2";
    case CaseTag::C3: return "C3";
    case CaseTag::C4: return "C4";
    case CaseTag::Balanced: return "balanced";
    case CaseTag::Monostable: return "monostable";
    }
    return "?";
}

namespace {

double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double fa, double m, double fm, double b, double fb,
                        double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = g(lm), frm = g(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(g, a, fa, lm, flm, m, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(g, m, fm, rm, frm, b, fb, right, tol / 2, depth - 1);
}

double poly_eval(const std::vector<double>& c, double u) {
    double r = 0.0;
    for (size_t i = c.size(); i-- > 0;) r = r * u + c[i];
    return r;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * double(i));
    if (d.empty()) d.push_back(0.0);
    return d;
}

// Zeros of a polynomial inside (lo, hi) by sign-scan plus bisection.
std::vector<double> poly_roots_in(const std::vector<double>& c, double lo,
                                  double hi) {
    std::vector<double> roots;
    const int n = 4000;
    double prev = poly_eval(c, lo);
    for (int i = 1; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        double cur = poly_eval(c, x);
        if (prev == 0.0) {
            roots.push_back(lo + (hi - lo) * (i - 1) / n);
        } else if (prev * cur < 0.0) {
            double a = lo + (hi - lo) * (i - 1) / n, b = x;
            double fa = prev;
            for (int it = 0; it < 100; ++it) {
                double m = 0.5 * (a + b), fm = poly_eval(c, m);
                if (fa * fm <= 0.0) b = m; else { a = m; fa = fm; }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    return roots;
}

// Largest value of g on [a,b]: coarse scan then golden-section refinement.
double max_on_interval(const std::function<double(double)>& g, double a,
                       double b, double* argmax = nullptr) {
    const int n = 400;
    double best = g(a), xb = a;
    for (int i = 1; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        double v = g(x);
        if (v > best) { best = v; xb = x; }
    }
    double lo = std::max(a, xb - (b - a) / n);
    double hi = std::min(b, xb + (b - a) / n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = g(c1), f2 = g(c2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = c1; c1 = c2; f1 = f2;
            c2 = lo + gr * (hi - lo); f2 = g(c2);
        } else {
            hi = c2; c2 = c1; f2 = f1;
            c1 = hi - gr * (hi - lo); f1 = g(c1);
        }
    }
    double xm = 0.5 * (lo + hi), vm = g(xm);
    if (vm < best) { vm = best; xm = xb; }
    if (argmax) *argmax = xm;
    return vm;
}

} // namespace

double integrate(const std::function<double(double)>& g, double a, double b,
                 double abs_tol) {
    double fa = g(a), fb = g(b), m = 0.5 * (a + b), fm = g(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(g, a, fa, m, fm, b, fb, whole, abs_tol, 40);
}

double ReactionTerm::alpha() const {
    if (assumption_ != AssumptionClass::Bistable)
        throw assumption_error("alpha() requires a bistable reaction term");
    return alpha_;
}

ReactionTerm ReactionTerm::cubic(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("cubic reaction: alpha must lie in (0,1)");
    // u(1-u)(u-alpha) = -u^3 + (1+alpha)u^2 - alpha*u
    ReactionTerm r = polynomial({0.0, -alpha, 1.0 + alpha, -1.0});
    char buf[64];
    std::snprintf(buf, sizeof buf, "cubic(%.17g)", alpha);
    r.spec_ = buf;
    return r;
}

ReactionTerm ReactionTerm::fisher() {
    ReactionTerm r = polynomial({0.0, 1.0, -1.0});
    r.spec_ = "fisher";
    return r;
}

ReactionTerm ReactionTerm::polynomial(std::vector<double> coeffs) {
    ReactionTerm r;
    r.coeffs_ = std::move(coeffs);
    auto d1 = poly_derivative(r.coeffs_);
    auto d2 = poly_derivative(d1);
    auto c0 = r.coeffs_;
    r.f_ = [c0](double u) { return poly_eval(c0, u); };
    r.fp_ = [d1](double u) { return poly_eval(d1, u); };
    r.fpp_ = [d2](double u) { return poly_eval(d2, u); };
    {
        std::ostringstream os;
        os << "poly:";
        for (size_t i = 0; i < r.coeffs_.size(); ++i) {
            if (i) os << ",";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", r.coeffs_[i]);
            os << buf;
        }
        r.spec_ = os.str();
    }
    r.validate_and_classify();
    return r;
}

ReactionTerm ReactionTerm::unchecked(std::function<double(double)> f,
                                     std::function<double(double)> fp,
                                     std::function<double(double)> fpp) {
    ReactionTerm r;
    r.f_ = std::move(f);
    r.fp_ = std::move(fp);
    r.fpp_ = std::move(fpp);
    r.spec_ = "unchecked";
    r.integral01_ = integrate(r.f_, 0.0, 1.0);
    return r;
}

ReactionTerm ReactionTerm::parse(const std::string& spec) {
    auto num = [](const std::string& s) {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
        return v;
    };
    if (spec == "fisher") return fisher();
    if (spec.rfind("cubic", 0) == 0) {
        std::string arg;
        if (spec.size() > 6 && spec[5] == ':') arg = spec.substr(6);
        else if (spec.size() > 7 && spec[5] == '(' && spec.back() == ')')
            arg = spec.substr(6, spec.size() - 7);
        else throw std::invalid_argument("bad reaction spec: " + spec);
        return cubic(num(arg));
    }
    if (spec.rfind("poly:", 0) == 0) {
        std::vector<double> c;
        std::stringstream ss(spec.substr(5));
        std::string tok;
        while (std::getline(ss, tok, ',')) c.push_back(num(tok));
        if (c.empty()) throw std::invalid_argument("empty polynomial spec");
        return polynomial(std::move(c));
    }
    throw std::invalid_argument("bad reaction spec: " + spec);
}

void ReactionTerm::validate_and_classify() {
    const double tol = 1e-9;
    if (std::abs(f_(0.0)) > tol || std::abs(f_(1.0)) > tol)
        throw assumption_error("reaction term must vanish at u=0 and u=1");

    integral01_ = integrate(f_, 0.0, 1.0);

    double fp0 = fp_(0.0), fp1 = fp_(1.0);
    if (fp1 >= 0.0)
        throw assumption_error("reaction term requires f'(1) < 0");

    // Interior zeros decide bistable vs monostable.
    std::vector<double> zeros =
        coeffs_.empty() ? std::vector<double>{}
                        : poly_roots_in(coeffs_, 1e-9, 1.0 - 1e-9);
    if (fp0 > 0.0) {
        if (!zeros.empty())
            throw assumption_error(
                "monostable reaction term must be positive on (0,1)");
        for (int i = 1; i < 200; ++i) {
            double u = i / 200.0;
            if (f_(u) <= 0.0)
                throw assumption_error(
                    "monostable reaction term must be positive on (0,1)");
        }
        assumption_ = AssumptionClass::Monostable;
        case_tag_ = CaseTag::Monostable;
        return;
    }
    if (fp0 == 0.0)
        throw assumption_error("degenerate f'(0) = 0 is not supported");

    if (zeros.size() != 1)
        throw assumption_error(
            "bistable reaction term needs a unique zero in (0,1)");
    assumption_ = AssumptionClass::Bistable;
    alpha_ = zeros[0];
    case_tag_ = classify(*this);
}

CaseTag classify(const ReactionTerm& f) {
    if (f.assumption() == AssumptionClass::Monostable)
        return CaseTag::Monostable;
    const double sign_tol = 1e-8;
    double I = f.integral01();
    if (std::abs(I) <= sign_tol) return CaseTag::Balanced;
    bool pos = I > 0.0;
    bool steeper0 = f.prime(0.0) > f.prime(1.0);
    if (pos) return steeper0 ? CaseTag::C1 : CaseTag::C2;
    return steeper0 ? CaseTag::C3 : CaseTag::C4;
}

StabilityConstants compute_constants(const ReactionTerm& f) {
    StabilityConstants sc;
    auto fp = [&](double u) { return f.prime(u); };

    sc.w = max_on_interval(fp, 0.0, 1.0);

    // Collar half-width. Start from the distance to the nearest point where
    // f' changes sign, then halve until f' < 0 holds on a 1e-3-spaced sample
    // of both collars. One extra halving keeps v away from zero.
    const bool monostable = f.assumption() == AssumptionClass::Monostable;
    auto collar_ok = [&](double th) {
        if (th <= 0.0) return false;
        auto neg_on = [&](double a, double b) {
            int n = std::max(4, int(std::ceil((b - a) / 1e-3)));
            for (int i = 0; i <= n; ++i)
                if (fp(a + (b - a) * i / n) >= 0.0) return false;
            return true;
        };
        if (!neg_on(1.0 - 2.0 * th, 1.0 + th)) return false;
        if (monostable) {
            // Monostable: f' > 0 on [0, 2 theta''], f' < 0 near 1.
            int n = std::max(4, int(std::ceil(2.0 * th / 1e-3)));
            for (int i = 0; i <= n; ++i)
                if (fp(2.0 * th * i / n) <= 0.0) return false;
            return true;
        }
        return neg_on(-th, 2.0 * th);
    };

    // sign changes of f' on (0,1) bound the first collar guess
    double nearest0 = 1.0, nearest1 = 1.0;
    {
        double prev = fp(0.0);
        for (int i = 1; i <= 4000; ++i) {
            double u = i / 4000.0;
            double cur = fp(u);
            if (prev * cur <= 0.0 && prev != cur) {
                nearest0 = std::min(nearest0, u);
                nearest1 = std::min(nearest1, 1.0 - u);
            }
            prev = cur;
        }
    }
    double theta0 = std::min({0.25, nearest0 / 2.0, nearest1 / 2.0});
    double theta = theta0;
    int guard = 0;
    while (!collar_ok(theta) && guard++ < 60) theta *= 0.5;
    if (guard >= 60)
        throw assumption_error("no positive collar half-width found");
    if (theta < theta0) {
        // bisect for the largest passing collar between the halving steps
        double lo = theta, hi = 2.0 * theta;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            if (collar_ok(mid)) lo = mid; else hi = mid;
        }
        theta = lo;
    }
    theta *= 0.5; // margin: keeps max f' on the collars strictly negative
    sc.theta = theta;

    if (monostable) {
        sc.v = max_on_interval(fp, 1.0 - 2.0 * theta, 1.0 + theta);
    } else {
        double v_lo = max_on_interval(fp, -theta, 2.0 * theta);
        double v_hi = max_on_interval(fp, 1.0 - 2.0 * theta, 1.0 + theta);
        sc.v = std::max(v_lo, v_hi);
    }
    if (sc.v >= 0.0)
        throw assumption_error("collar maximum of f' is not negative");

    auto ratio0 = [&](double u) {
        return u > 0.0 ? std::abs(f(u)) / u : std::abs(f.prime(0.0));
    };
    auto ratio1 = [&](double u) {
        return u < 1.0 ? std::abs(f(u)) / (1.0 - u) : std::abs(f.prime(1.0));
    };
    sc.b = std::max(max_on_interval(ratio0, 0.0, 1.0),
                    max_on_interval(ratio1, 0.0, 1.0));
    return sc;
}

} // namespace rdlab
