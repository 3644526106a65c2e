#ifndef RDLAB_REACTION_HPP
#define RDLAB_REACTION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rdlab {

enum class AssumptionClass { Bistable, Monostable };

// C1..C4 split a bistable term by sign(int_0^1 f) and by f'(0) vs f'(1).
// Balanced flags |int_0^1 f| below tolerance instead of guessing a side.
enum class CaseTag { C1, C2, C3, C4, Balanced, Monostable };

std::string to_string(CaseTag tag);

// A reaction term f together with exact first and second derivatives.
// Validated on construction against the bistable or monostable assumption
// class on a neighborhood of [0,1].
class ReactionTerm {
  public:
    // f(u) = u(1-u)(u-alpha), 0 < alpha < 1.
    static ReactionTerm cubic(double alpha);
    // f(u) = u(1-u).
    static ReactionTerm fisher();
    // Coefficients in increasing degree; assumption class detected.
    static ReactionTerm polynomial(std::vector<double> coeffs);
    // No validation, no case tag. For synthetic tests only.
    static ReactionTerm unchecked(std::function<double(double)> f,
                                  std::function<double(double)> fp,
                                  std::function<double(double)> fpp);
    // Parse "cubic(0.3)", "cubic:0.3", "fisher", or "poly:c0,c1,..."
    static ReactionTerm parse(const std::string& spec);

    double operator()(double u) const { return f_(u); }
    double prime(double u) const { return fp_(u); }
    double second(double u) const { return fpp_(u); }

    AssumptionClass assumption() const { return assumption_; }
    CaseTag case_tag() const { return case_tag_; }
    // Interior zero of a bistable term.
    double alpha() const;
    // Adaptive quadrature of f over [0,1], abs tol 1e-10.
    double integral01() const { return integral01_; }
    // Polynomial coefficients when available (fast path for grid kernels).
    const std::vector<double>* poly() const {
        return coeffs_.empty() ? nullptr : &coeffs_;
    }
    const std::string& spec() const { return spec_; }

  private:
    ReactionTerm() = default;

    std::function<double(double)> f_, fp_, fpp_;
    std::vector<double> coeffs_; // empty for non-polynomial terms
    double alpha_ = -1.0;
    double integral01_ = 0.0;
    AssumptionClass assumption_ = AssumptionClass::Bistable;
    CaseTag case_tag_ = CaseTag::Balanced;
    std::string spec_;

    void validate_and_classify();
};

// Classify a validated term. Balanced when |int_0^1 f| <= 1e-8.
CaseTag classify(const ReactionTerm& f);

// Global constants controlling the comparison and collar arguments.
//   w     max of f' over [0,1]
//   v     max of f' over the two collars [-theta,2theta] u [1-2theta,1+theta]
//   b     |f(u)| <= b*u and |f(u)| <= b*(1-u) on [0,1]
//   theta collar half-width with f' < 0 on both collars
// b_bar / b_tilde are measured from a constructed entire solution later.
struct StabilityConstants {
    double w = 0;
    double v = 0;
    double b = 0;
    double theta = 0;
    std::optional<double> b_bar;   // min of du/dt on the mid-range, > 0
    std::optional<double> b_tilde; // max of du/dt on the mid-range, < 0
};

StabilityConstants compute_constants(const ReactionTerm& f);

// Adaptive Simpson quadrature, absolute tolerance.
double integrate(const std::function<double(double)>& g, double a, double b,
                 double abs_tol = 1e-10);

} // namespace rdlab

#endif
