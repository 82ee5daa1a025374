#pragma once

// Closed-form Euclidean integrals T(lambda) of the extremal families, their
// model-space counterparts F(lambda), and the level-set derivative formula
// used to differentiate F.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/geometry.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"
#include "ckn/quadrature.hpp"
#include "ckn/radial.hpp"
#include "ckn/specfun.hpp"

namespace ckn {

/// exp_case: u = exp(-lambda d^s), r = p.  compact_case: u = (lambda - d^s)_+^{(p-1)/(p-r)}, r < p.
enum class RigidityCase { Exp, Compact };

inline std::string_view to_string(RigidityCase k) { return k == RigidityCase::Exp ? "exp" : "compact"; }

inline RigidityCase parse_rigidity_case(std::string_view s) {
    if (s == "exp") return RigidityCase::Exp;
    if (s == "compact") return RigidityCase::Compact;
    throw std::invalid_argument("unknown rigidity case '" + std::string(s) + "'");
}

namespace detail {
inline void require_exp_case(const CknParams& c) {
    if (std::abs(c.r() - c.p()) > kCriticalTol) throw std::invalid_argument("exp case requires r = p");
    if (!(c.s() > 0.0)) throw std::invalid_argument("exp case requires s > 0");
    if (!(c.n() - c.gamma() * c.p() > 0.0)) throw std::invalid_argument("exp case requires n - gamma p > 0");
}
inline void require_compact_case(const CknParams& c) {
    if (!(c.r() > 0.0 && c.r() < c.p() - kCriticalTol)) throw std::invalid_argument("compact case requires 0 < r < p");
    if (!(c.s() > 0.0)) throw std::invalid_argument("compact case requires s > 0");
    if (!(c.lhs_homogeneity() > 0.0)) throw std::invalid_argument("compact case requires n - gamma r > 0");
}
}  // namespace detail

/// int_{R^n} exp(-p lambda |x|^s) |x|^{-gamma p} dx
///   = (p lambda)^{-(n-gamma p)/s} (n omega_n / s) Gamma((n-gamma p)/s).
inline double t_lambda_exp(const CknParams& c, double lambda) {
    detail::require_exp_case(c);
    if (!(lambda > 0.0)) throw std::invalid_argument("t_lambda_exp: lambda must be positive");
    const double a = (c.n() - c.gamma() * c.p()) / c.s();
    return std::exp(-a * std::log(c.p() * lambda) + log_gamma_fn(a)) * unit_sphere_area(c.n()) / c.s();
}

/// (n - r gamma)/s + r(p-1)/(p-r).
inline double delta_exponent(const CknParams& c) {
    if (std::abs(c.r() - c.p()) <= kCriticalTol) throw std::invalid_argument("delta_exponent: requires r != p");
    if (std::abs(c.s()) <= kCriticalTol) throw std::invalid_argument("delta_exponent: requires s != 0");
    return c.lhs_homogeneity() / c.s() + c.r() * (c.p() - 1.0) / (c.p() - c.r());
}

/// int_{R^n} (lambda - |x|^s)_+^{r(p-1)/(p-r)} |x|^{-gamma r} dx
///   = lambda^delta (n omega_n / s) B(r(p-1)/(p-r) + 1, (n - gamma r)/s).
inline double t_lambda_compact(const CknParams& c, double lambda) {
    detail::require_compact_case(c);
    if (!(lambda > 0.0)) throw std::invalid_argument("t_lambda_compact: lambda must be positive");
    const double a = c.r() * (c.p() - 1.0) / (c.p() - c.r());
    const double b = c.lhs_homogeneity() / c.s();
    const double log_beta = log_gamma_fn(a + 1.0) + log_gamma_fn(b) - log_gamma_fn(a + 1.0 + b);
    return std::exp(delta_exponent(c) * std::log(lambda) + log_beta) * unit_sphere_area(c.n()) / c.s();
}

inline double t_lambda(const CknParams& c, double lambda, RigidityCase which) {
    return which == RigidityCase::Exp ? t_lambda_exp(c, lambda) : t_lambda_compact(c, lambda);
}

/// Relative residual of the first-order ODE satisfied by T, with T'
/// from a central difference of step 1e-4 lambda:
///   exp case      (lambda T' + ((n - gamma p)/s) T) / T
///   compact case  (lambda T' - delta T) / T
inline double ode_t_residual(const CknParams& c, double lambda, RigidityCase which) {
    const double h = 1e-4 * lambda;
    const double T = t_lambda(c, lambda, which);
    const double dT = (t_lambda(c, lambda + h, which) - t_lambda(c, lambda - h, which)) / (2.0 * h);
    const double k = which == RigidityCase::Exp ? -(c.n() - c.gamma() * c.p()) / c.s() : delta_exponent(c);
    return (lambda * dT - k * T) / T;
}

/// The profile whose weighted power is integrated in F(lambda): for the
/// exp case exp(-lambda t^s) (raised to p), for the compact case
/// (lambda - t^s)_+ (raised to r(p-1)/(p-r)).
inline RadialProfile rigidity_base_profile(const CknParams& c, double lambda, RigidityCase which) {
    const double s = c.s();
    const double inf = std::numeric_limits<double>::infinity();
    RadialProfile phi;
    phi.kind = ProfileKind::Custom;
    phi.params_used = {lambda, 0.0, s};
    if (which == RigidityCase::Exp) {
        phi.eval = [=](double t) { return std::exp(-lambda * std::pow(t, s)); };
        phi.deriv = [=](double t) { return -lambda * s * std::pow(t, s - 1.0) * std::exp(-lambda * std::pow(t, s)); };
        phi.log_eval = [=](double t) { return -lambda * std::pow(t, s); };
        phi.log_deriv = [=](double t) { return std::log(lambda * s) + (s - 1.0) * std::log(t) - lambda * std::pow(t, s); };
        phi.asymptotics = {0.0, s - 1.0, TailKind::Exponential, lambda, s, 0.0, inf};
        phi.scale = std::pow(lambda, -1.0 / s);
        phi.label = "exp_family";
    } else {
        const double R = std::pow(lambda, 1.0 / s);
        phi.eval = [=](double t) { return t < R ? std::max(lambda - std::pow(t, s), 0.0) : 0.0; };
        phi.deriv = [=](double t) { return t < R ? -s * std::pow(t, s - 1.0) : 0.0; };
        phi.eval_edge = [=](double d) { return d < R ? std::max(-lambda * std::expm1(s * std::log1p(-d / R)), 0.0) : lambda; };
        phi.deriv_edge = [=](double d) { return d < R ? -s * std::pow(R - d, s - 1.0) : 0.0; };
        phi.support_radius = R;
        phi.asymptotics = {0.0, s - 1.0, TailKind::Compact, 0.0, 1.0, 0.0, 1.0};
        phi.scale = R;
        phi.label = "compact_family";
    }
    return phi;
}

/// F(lambda): the same integral as T(lambda) on the model space, with J_b.
/// NonIntegrable when the volume growth beats the decay (b > 0, exp case,
/// s < 1, or s = 1 with p lambda <= (n-1) sqrt(b)).
inline IntegralResult f_lambda(const CknParams& c, const ModelSpace& space, double lambda, RigidityCase which,
                               const RadialOptions& opt = {1e-12, 0.0, true, 2000}) {
    if (space.n() != c.n()) throw std::invalid_argument("f_lambda: dimension mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("f_lambda: lambda must be positive");
    if (which == RigidityCase::Exp)
        detail::require_exp_case(c);
    else
        detail::require_compact_case(c);
    RadialProfile phi = rigidity_base_profile(c, lambda, which);
    RadialTerm term = which == RigidityCase::Exp
                          ? RadialTerm::value(c.p(), -c.gamma() * c.p(), "F(lambda)")
                          : RadialTerm::value(c.r() * (c.p() - 1.0) / (c.p() - c.r()), -c.gamma() * c.r(), "F(lambda)");
    return integrate_term(space, term, phi, opt);
}

// ---------------------------------------------------------------------------
// Level-set derivative

/// A measure on an interval with a density; f is integrated against it.
struct LevelMeasure {
    double lower = 0.0;
    double upper = 1.0;
    std::function<double(double)> density = [](double) { return 1.0; };
    /// density ~ (x - lower)^sigma near lower.
    double singular_power_at_lower = 0.0;
};

/// Lebesgue measure on [a, b].
inline LevelMeasure interval_measure(double a, double b) { return {a, b, [](double) { return 1.0; }, 0.0}; }

/// Radial measure n omega_n t^{n-1+w} J_b(t) dt on [0, R].
inline LevelMeasure radial_measure(const ModelSpace& space, double w, double R) {
    return {0.0, R, [space, w](double t) { return unit_sphere_area(space.n()) * radial_weight(space, t, w); },
            space.n() - 1.0 + w};
}

struct LevelDerivative {
    double g_minus, g_plus;
    double finite_difference;
    double formula;
    double residual;
};

/// G(lambda) = int (lambda - f)_+^q dmu for increasing f; compares a central
/// difference of G with q int_{f < lambda} (lambda - f)^{q-1} dmu.
inline LevelDerivative g_derivative_terms(double q, const std::function<double(double)>& f, const LevelMeasure& mu,
                                          double lambda) {
    if (!(q > 0.0) || std::abs(q - 1.0) < 1e-14) throw std::invalid_argument("g_derivative_check: q must be in (0,1) or (1,inf)");
    if (!(mu.upper > mu.lower)) throw std::invalid_argument("g_derivative_check: empty measure support");

    // Right end of the sublevel set {f < level}, found by bisection.
    auto crossing = [&](double level) {
        if (!(f(mu.lower) < level)) return mu.lower;
        if (f(mu.upper) < level) return mu.upper;
        double a = mu.lower, b = mu.upper;
        for (int i = 0; i < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b); ++i) {
            double m = 0.5 * (a + b);
            (f(m) < level ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    auto level_integral = [&](double level, double power) {
        double x = crossing(level);
        if (!(x > mu.lower)) return 0.0;
        QuadSpec spec;
        spec.lower = mu.lower;
        spec.upper = x;
        // Near the crossing level - f(t) is only known to rounding, which
        // caps the attainable accuracy for q < 1.
        spec.rel_tol = 1e-11;
        spec.abs_tol = 0.0;
        spec.strict = false;
        spec.singular_power_at_lower = std::min(mu.singular_power_at_lower, 1.0);
        if (x < mu.upper) spec.singular_power_at_upper = std::min(power, 1.0);
        auto integrand = [&](double t) {
            double d = level - f(t);
            return d > 0.0 ? std::pow(d, power) * mu.density(t) : 0.0;
        };
        if (!(power < 0.0 && x < mu.upper)) return integrate(integrand, spec).value;
        // level - f(t) carries a rounding error of order eps * level, which a
        // negative power turns into an O(eps^{1+power}) error next to the
        // crossing. The last sliver of width tau is integrated with the
        // secant slope frozen: (g (x - t))^power rho, g = (level - f)/(x - t).
        const double tau = 1e-8 * (x - mu.lower);
        const double t0 = x - tau;
        const double g = (level - f(t0)) / tau;
        spec.upper = t0;
        spec.singular_power_at_upper = 0.0;
        const double sliver = std::pow(g, power) * mu.density(t0) * std::pow(tau, power + 1.0) / (power + 1.0);
        return integrate(integrand, spec).value + sliver;
    };
    // Central differences at h and h/2 combined by Richardson extrapolation;
    // a smaller step would amplify the quadrature error of G instead.
    const double h = 1e-3 * lambda;
    LevelDerivative out;
    out.g_minus = level_integral(lambda - h, q);
    out.g_plus = level_integral(lambda + h, q);
    const double d1 = (out.g_plus - out.g_minus) / (2.0 * h);
    const double d2 = (level_integral(lambda + 0.5 * h, q) - level_integral(lambda - 0.5 * h, q)) / h;
    out.finite_difference = (4.0 * d2 - d1) / 3.0;
    out.formula = q * level_integral(lambda, q - 1.0);
    out.residual = out.finite_difference - out.formula;
    return out;
}

inline double g_derivative_check(double q, const std::function<double(double)>& f, const LevelMeasure& mu,
                                 double lambda) {
    return g_derivative_terms(q, f, mu, lambda).residual;
}

// ---------------------------------------------------------------------------
// F/T scans

struct RigidityProbe {
    CknParams params;
    ModelSpace space;
    RigidityCase which;
    std::vector<double> lambda_grid;
    std::vector<double> t_values;
    std::vector<double> f_values;
    std::vector<double> ratio_values;
    /// "ok" or the error message for grid points that could not be computed.
    std::vector<std::string> status;

    bool all_ok() const {
        for (const auto& s : status)
            if (s != "ok") return false;
        return true;
    }
    /// F >= T (1 - tol) at every computed point.
    bool ratios_at_least_one(double tol) const {
        for (std::size_t i = 0; i < ratio_values.size(); ++i)
            if (status[i] == "ok" && !(ratio_values[i] >= 1.0 - tol)) return false;
        return true;
    }
    /// |F/T - 1| <= tol at every computed point.
    bool ratios_equal_one(double tol) const {
        for (std::size_t i = 0; i < ratio_values.size(); ++i)
            if (status[i] == "ok" && !(std::abs(ratio_values[i] - 1.0) <= tol)) return false;
        return true;
    }
    bool ratios_monotone(bool increasing) const {
        double prev = increasing ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ratio_values.size(); ++i) {
            if (status[i] != "ok") continue;
            if (increasing ? ratio_values[i] < prev : ratio_values[i] > prev) return false;
            prev = ratio_values[i];
        }
        return true;
    }
};

/// Tabulates T, F and F/T on an increasing grid. Points where F is not
/// finite carry a status message and NaN values instead of aborting.
inline RigidityProbe ft_ratio_scan(const CknParams& c, const ModelSpace& space, const std::vector<double>& grid,
                                   RigidityCase which) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("ft_ratio_scan: grid must be increasing");
    RigidityProbe out{c, space, which, grid, {}, {}, {}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double lambda : grid) {
        double T = t_lambda(c, lambda, which);
        out.t_values.push_back(T);
        try {
            double F = f_lambda(c, space, lambda, which).value;
            out.f_values.push_back(F);
            out.ratio_values.push_back(F / T);
            out.status.push_back("ok");
        } catch (const NumericalError& e) {
            out.f_values.push_back(nan);
            out.ratio_values.push_back(nan);
            out.status.push_back(e.what());
        }
    }
    return out;
}

/// n points log-spaced on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, n >= 2");
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}

}  // namespace ckn
