#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ckn {

/// Absolute tolerance used to decide s == 0 and r == p, r == 1.
inline constexpr double kCriticalTol = 1e-12;
/// Relative tolerance for validating an externally supplied gamma.
inline constexpr double kBalanceTol = 1e-12;

/// gamma forced by dilation invariance of the inequality.
inline double derive_gamma(int n, double p, double r, double alpha, double beta) {
    (void)n;
    if (!(p > 1.0)) throw std::invalid_argument("derive_gamma: p must exceed 1");
    if (!(r > 0.0)) throw std::invalid_argument("derive_gamma: r must be positive");
    return (1.0 + alpha) / r + ((p - 1.0) / (p * r)) * beta;
}

/// Parameter tuple (n, p, r, alpha, beta, gamma) of a CKN inequality
///
///   int |f|^r d^{-gamma r} <= C (int |f'|^p d^{-alpha p})^{1/p}
///                              (int_{supp f} |f|^q d^{-beta})^{(p-1)/p}.
///
/// gamma is always derived from the other five entries, so the balance
/// relation holds by construction. Admissibility (the integrability
/// conditions) is a queryable property, not a construction invariant, so
/// that inadmissible tuples can be reported on.
class CknParams {
public:
    static CknParams make(int n, double p, double r, double alpha, double beta) {
        if (n < 2) throw std::invalid_argument("CknParams: dimension n must be >= 2");
        if (!std::isfinite(alpha) || !std::isfinite(beta))
            throw std::invalid_argument("CknParams: alpha and beta must be finite");
        CknParams out;
        out.n_ = n;
        out.p_ = p;
        out.r_ = r;
        out.alpha_ = alpha;
        out.beta_ = beta;
        out.gamma_ = derive_gamma(n, p, r, alpha, beta);
        return out;
    }

    /// Same as make(), but checks a caller-supplied gamma against balance.
    static CknParams with_gamma(int n, double p, double r, double alpha, double beta, double gamma) {
        CknParams out = make(n, p, r, alpha, beta);
        double scale = std::max(1.0, std::abs(out.gamma_));
        if (!(std::abs(gamma - out.gamma_) <= kBalanceTol * scale)) {
            std::ostringstream msg;
            msg << "CknParams: supplied gamma " << gamma << " violates balance (expected "
                << out.gamma_ << ")";
            throw std::invalid_argument(msg.str());
        }
        return out;
    }

    int n() const { return n_; }
    double p() const { return p_; }
    double r() const { return r_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

    /// Exponent of the lower-order term, p(r-1)/(p-1).
    double q() const { return p_ * (r_ - 1.0) / (p_ - 1.0); }
    /// Homogeneity exponent 1 + alpha - beta/p of the extremal families.
    double s() const { return 1.0 + alpha_ - beta_ / p_; }
    double p_conj() const { return p_ / (p_ - 1.0); }
    /// n - gamma r; positive exactly when the lhs weight is integrable at 0.
    double lhs_homogeneity() const { return static_cast<double>(n_) - gamma_ * r_; }

    friend bool operator==(const CknParams&, const CknParams&) = default;

private:
    CknParams() = default;
    int n_ = 2;
    double p_ = 2.0;
    double r_ = 2.0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double gamma_ = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, const CknParams& c) {
    return os << "(n=" << c.n() << ", p=" << c.p() << ", r=" << c.r() << ", alpha=" << c.alpha()
              << ", beta=" << c.beta() << ", gamma=" << c.gamma() << ")";
}

struct DerivedExponents {
    double q;
    double s;
    double p_conj;
    double c_sharp;
};

/// r / (n - gamma r).
inline double sharp_constant(const CknParams& c) {
    double denom = c.lhs_homogeneity();
    if (!(denom > 0.0)) throw std::domain_error("sharp_constant: n - gamma r must be positive");
    return c.r() / denom;
}

inline DerivedExponents derive_exponents(const CknParams& c) {
    return {c.q(), c.s(), c.p_conj(), sharp_constant(c)};
}

struct IntegrabilityReport {
    bool lhs_weight;       // 1/r - gamma/n > 0
    bool gradient_weight;  // 1/p - alpha/n > 0
    bool q_weight;         // 1 - beta/n > 0

    bool all() const { return lhs_weight && gradient_weight && q_weight; }
};

inline IntegrabilityReport check_integrability(const CknParams& c) {
    double n = c.n();
    return {1.0 / c.r() - c.gamma() / n > 0.0, 1.0 / c.p() - c.alpha() / n > 0.0,
            1.0 - c.beta() / n > 0.0};
}

inline bool is_admissible(const CknParams& c) { return check_integrability(c).all(); }

/// n - beta < s p (r-1)/(r-p); only meaningful for r > p.
inline bool check_xia_condition(const CknParams& c) {
    if (!(c.r() > c.p())) throw std::invalid_argument("check_xia_condition: requires r > p");
    return c.n() - c.beta() < c.s() * c.p() * (c.r() - 1.0) / (c.r() - c.p());
}

enum class SharpnessCase { CaseI, CaseII, CaseIII, CaseIV, CaseV, NotCovered };

inline std::string_view to_string(SharpnessCase k) {
    switch (k) {
        case SharpnessCase::CaseI: return "CaseI";
        case SharpnessCase::CaseII: return "CaseII";
        case SharpnessCase::CaseIII: return "CaseIII";
        case SharpnessCase::CaseIV: return "CaseIV";
        case SharpnessCase::CaseV: return "CaseV";
        case SharpnessCase::NotCovered: return "NotCovered";
    }
    return "NotCovered";
}

inline SharpnessCase parse_sharpness_case(std::string_view s) {
    for (auto k : {SharpnessCase::CaseI, SharpnessCase::CaseII, SharpnessCase::CaseIII,
                   SharpnessCase::CaseIV, SharpnessCase::CaseV, SharpnessCase::NotCovered}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown sharpness case '" + std::string(s) + "'");
}

inline std::ostream& operator<<(std::ostream& os, SharpnessCase k) { return os << to_string(k); }

/// Which of the five sharp regimes (if any) the tuple falls into.
inline SharpnessCase classify_sharpness_case(const CknParams& c) {
    const double p = c.p(), r = c.r(), s = c.s();
    const bool r_is_p = std::abs(r - p) <= kCriticalTol;
    const bool r_is_one = std::abs(r - 1.0) <= kCriticalTol;
    const bool s_is_zero = std::abs(s) <= kCriticalTol;

    if (r_is_p) return s > kCriticalTol ? SharpnessCase::CaseV : SharpnessCase::NotCovered;
    if (r > p) return check_xia_condition(c) ? SharpnessCase::CaseI : SharpnessCase::NotCovered;
    // 0 < r < p
    if (r_is_one) return SharpnessCase::NotCovered;
    if (s_is_zero) return SharpnessCase::CaseIII;
    if (s > 0.0) return SharpnessCase::CaseII;
    if (c.n() - c.beta() + s * p * (r - 1.0) / (p - r) > 0.0) return SharpnessCase::CaseIV;
    return SharpnessCase::NotCovered;
}

/// Extra hypothesis of the attainability dichotomy for r >= p.
inline bool check_rigidity_hypotheses(const CknParams& c) {
    const double p = c.p(), r = c.r();
    if (r < p - kCriticalTol) throw std::invalid_argument("check_rigidity_hypotheses: requires r >= p");
    if (std::abs(r - p) <= kCriticalTol) return c.s() > 0.0;
    return c.n() - c.beta() + c.s() * p * (r - 1.0) / (p - r) < 0.0;
}

// ---------------------------------------------------------------------------
// Classical two-exponent CKN admissibility (validator only).

struct ClassicalCknParams {
    int n = 1;
    double p = 1.0;
    double q = 1.0;
    double r = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    double delta_weight = 0.0;
};

struct ClassicalAdmissibility {
    bool admissible;
    /// Empty when admissible; otherwise one of "range", "positivity",
    /// "balance", "interpolation", "alpha_minus_sigma_lower",
    /// "alpha_minus_sigma_upper".
    std::string reason;
};

inline ClassicalAdmissibility check_classical_admissibility(const ClassicalCknParams& cp,
                                                           double tol = 1e-12) {
    const double n = cp.n;
    const double d = cp.delta_weight;
    if (cp.n < 1 || !(cp.p >= 1.0) || !(cp.q >= 1.0) || !(cp.r > 0.0) || !(d >= 0.0) || !(d <= 1.0))
        return {false, "range"};
    if (!(1.0 / cp.p + cp.alpha / n > 0.0) || !(1.0 / cp.q + cp.beta / n > 0.0) ||
        !(1.0 / cp.r + cp.gamma / n > 0.0))
        return {false, "positivity"};

    const double lhs = 1.0 / cp.r + cp.gamma / n;
    const double grad_side = 1.0 / cp.p + (cp.alpha - 1.0) / n;
    const double rhs = d * grad_side + (1.0 - d) * (1.0 / cp.q + cp.beta / n);
    if (std::abs(lhs - rhs) > tol) return {false, "balance"};
    if (std::abs(cp.gamma - (d * cp.sigma + (1.0 - d) * cp.beta)) > tol)
        return {false, "interpolation"};
    if (d > 0.0) {
        if (cp.alpha - cp.sigma < -tol) return {false, "alpha_minus_sigma_lower"};
        bool critical = std::abs(lhs - grad_side) <= tol;
        if (critical && cp.alpha - cp.sigma > 1.0 + tol) return {false, "alpha_minus_sigma_upper"};
    }
    return {true, ""};
}

}  // namespace ckn
