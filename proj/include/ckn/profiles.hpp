#pragma once

// Radial profiles: the five extremal families, a small library of test
// bumps, and the Euler-Lagrange residual of the extremal ODE
//
//     phi'(t) = -c phi(t)^{(r-1)/(p-1)} t^{alpha - beta/p}.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/params.hpp"

namespace ckn {

enum class ProfileKind { ExtremalI, ExtremalII, ExtremalIII, ExtremalIV, ExtremalV, Bump, Custom };

inline std::string_view to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::ExtremalI: return "ExtremalI";
        case ProfileKind::ExtremalII: return "ExtremalII";
        case ProfileKind::ExtremalIII: return "ExtremalIII";
        case ProfileKind::ExtremalIV: return "ExtremalIV";
        case ProfileKind::ExtremalV: return "ExtremalV";
        case ProfileKind::Bump: return "Bump";
        case ProfileKind::Custom: return "Custom";
    }
    return "Custom";
}

enum class TailKind { Compact, Exponential, Power };

/// Leading-order behaviour of a profile at the origin, at the edge of a
/// compact support, and at infinity. Integrability of every weighted
/// integral is decided from these exponents instead of from quadrature.
struct Asymptotics {
    /// phi(t) ~ t^origin_exponent as t -> 0 (logarithmic factors ignored).
    double origin_exponent = 0.0;
    /// |phi'(t)| ~ t^origin_deriv_exponent; +inf when phi' vanishes near 0.
    double origin_deriv_exponent = 0.0;
    TailKind tail = TailKind::Compact;
    /// Exponential tail: phi ~ exp(-tail_rate t^tail_shape).
    double tail_rate = 0.0;
    double tail_shape = 1.0;
    /// Power tail: phi ~ t^{-tail_power}.
    double tail_power = 0.0;
    /// Compact support: phi ~ (R - t)^edge_order; +inf for a flat edge.
    double edge_order = std::numeric_limits<double>::infinity();
};

struct ProfileParams {
    double lambda = 0.0;
    double c = 0.0;
    double s = 0.0;
};

/// A nonnegative radial function phi on [0, inf) with its exact derivative.
struct RadialProfile {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    /// Optional forms in terms of the distance d = support_radius - t to the
    /// edge, accurate where t itself no longer resolves d.
    std::function<double(double)> eval_edge;
    std::function<double(double)> deriv_edge;
    /// Optional log phi and log|phi'| (and their edge forms). Weighted
    /// integrals raise phi to large powers against a growing density, so
    /// they are evaluated in log space where phi itself would underflow.
    std::function<double(double)> log_eval;
    std::function<double(double)> log_deriv;
    std::function<double(double)> log_eval_edge;
    std::function<double(double)> log_deriv_edge;
    double support_radius = std::numeric_limits<double>::infinity();
    ProfileKind kind = ProfileKind::Custom;
    ProfileParams params_used{};
    Asymptotics asymptotics{};
    /// Natural length scale; anchors the semi-infinite quadrature map.
    double scale = 1.0;
    /// Interior points where phi is not smooth.
    std::vector<double> breakpoints;
    std::string label = "custom";

    double operator()(double t) const { return eval(t); }
    bool compact() const { return std::isfinite(support_radius); }
    bool has_edge_form() const { return compact() && eval_edge && deriv_edge; }
    /// phi at t = support_radius - d; uses the edge form when d > 0 is given.
    double value_at(double t, double d) const { return (d > 0.0 && eval_edge) ? eval_edge(d) : eval(t); }
    double deriv_at(double t, double d) const { return (d > 0.0 && deriv_edge) ? deriv_edge(d) : deriv(t); }
    /// log phi and log|phi'| at the same point; -inf where they vanish.
    double log_value_at(double t, double d) const {
        if (d > 0.0 && eval_edge) return log_eval_edge ? log_eval_edge(d) : std::log(eval_edge(d));
        return log_eval ? log_eval(t) : std::log(eval(t));
    }
    double log_deriv_at(double t, double d) const {
        if (d > 0.0 && deriv_edge) return log_deriv_edge ? log_deriv_edge(d) : std::log(std::abs(deriv_edge(d)));
        return log_deriv ? log_deriv(t) : std::log(std::abs(deriv(t)));
    }
};

/// t -> phi(t / delta). Integrals against t^{-gamma r} etc. pick up pure
/// powers of delta on Euclidean space, so the CKN ratio is unchanged.
inline RadialProfile dilate(const RadialProfile& phi, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("dilate: delta must be positive");
    RadialProfile out = phi;
    out.eval = [f = phi.eval, delta](double t) { return f(t / delta); };
    out.deriv = [g = phi.deriv, delta](double t) { return g(t / delta) / delta; };
    if (phi.eval_edge) out.eval_edge = [f = phi.eval_edge, delta](double d) { return f(d / delta); };
    if (phi.deriv_edge) out.deriv_edge = [g = phi.deriv_edge, delta](double d) { return g(d / delta) / delta; };
    const double log_delta = std::log(delta);
    if (phi.log_eval) out.log_eval = [f = phi.log_eval, delta](double t) { return f(t / delta); };
    if (phi.log_deriv)
        out.log_deriv = [g = phi.log_deriv, delta, log_delta](double t) { return g(t / delta) - log_delta; };
    if (phi.log_eval_edge) out.log_eval_edge = [f = phi.log_eval_edge, delta](double d) { return f(d / delta); };
    if (phi.log_deriv_edge)
        out.log_deriv_edge = [g = phi.log_deriv_edge, delta, log_delta](double d) { return g(d / delta) - log_delta; };
    out.support_radius = phi.support_radius * delta;
    out.scale = phi.scale * delta;
    for (double& bp : out.breakpoints) bp *= delta;
    if (out.asymptotics.tail == TailKind::Exponential)
        out.asymptotics.tail_rate = phi.asymptotics.tail_rate * std::pow(delta, -phi.asymptotics.tail_shape);
    return out;
}

namespace detail {

// Smooth step: 1 on (-inf, 1/2], 0 on [1, inf), C-infinity in between.
// eta(x) = 1 / (1 + exp(1/(1-x) - 1/(x-1/2))).
inline double smooth_step(double x) {
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    double z = 1.0 / (1.0 - x) - 1.0 / (x - 0.5);
    if (z > 0.0) {
        double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

inline double smooth_step_deriv(double x) {
    if (x <= 0.5 || x >= 1.0) return 0.0;
    double a = 1.0 - x, b = x - 0.5;
    double z = 1.0 / a - 1.0 / b;
    if (std::abs(z) > 1400.0) return 0.0;
    double ch = std::cosh(0.5 * z);
    return -(1.0 / (a * a) + 1.0 / (b * b)) * 0.25 / (ch * ch);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Extremal families

/// Exponent of the (.)_+ power in cases I-IV, (p-1)/(p-r).
inline double extremal_exponent(const CknParams& c) { return (c.p() - 1.0) / (c.p() - c.r()); }

/// Builds the extremal of the given sharp case with constant angular weight.
/// Cases I-IV: amplitude `c`, shift `lambda`. Case V: amplitude `lambda`,
/// rate `c`, i.e. lambda * exp(-c t^s).
inline RadialProfile make_extremal(const CknParams& params, SharpnessCase which, double lambda, double c) {
    const SharpnessCase actual = classify_sharpness_case(params);
    if (actual != which) {
        std::ostringstream msg;
        msg << "make_extremal: parameters " << params << " classify as " << actual << ", not " << which;
        throw CaseMismatch(msg.str());
    }
    if (!std::isfinite(lambda) || !std::isfinite(c)) throw std::invalid_argument("make_extremal: non-finite input");
    const double s = params.s();
    const double m = (which == SharpnessCase::CaseV) ? 0.0 : extremal_exponent(params);
    const double inf = std::numeric_limits<double>::infinity();

    RadialProfile out;
    out.params_used = {lambda, c, s};
    switch (which) {
        case SharpnessCase::CaseI: {
            if (!(lambda > 0.0)) throw std::invalid_argument("make_extremal: case I needs lambda > 0");
            if (!(c > 0.0)) throw std::invalid_argument("make_extremal: amplitude c must be positive");
            if (!check_xia_condition(params)) throw NonIntegrable("make_extremal: case I integrals diverge");
            out.kind = ProfileKind::ExtremalI;
            out.eval = [=](double t) { return c * std::pow(lambda + std::pow(t, s), m); };
            out.deriv = [=](double t) {
                return c * m * s * std::pow(t, s - 1.0) * std::pow(lambda + std::pow(t, s), m - 1.0);
            };
            // log(lambda + t^s) without overflow of t^s
            auto log_base = [=](double t) {
                double ls = s * std::log(t), ll = std::log(lambda);
                return ls > ll ? ls + std::log1p(std::exp(ll - ls)) : ll + std::log1p(std::exp(ls - ll));
            };
            out.log_eval = [=](double t) { return std::log(c) + m * log_base(t); };
            out.log_deriv = [=](double t) {
                return std::log(std::abs(c * m * s)) + (s - 1.0) * std::log(t) + (m - 1.0) * log_base(t);
            };
            out.support_radius = inf;
            out.asymptotics = {0.0, s - 1.0, TailKind::Power, 0.0, 1.0, -s * m, inf};
            out.scale = std::pow(lambda, 1.0 / s);
            break;
        }
        case SharpnessCase::CaseII: {
            if (!(lambda > 0.0)) throw std::invalid_argument("make_extremal: case II needs lambda > 0");
            if (!(c > 0.0)) throw std::invalid_argument("make_extremal: amplitude c must be positive");
            const double radius = std::pow(lambda, 1.0 / s);
            out.kind = ProfileKind::ExtremalII;
            out.eval = [=](double t) {
                if (t >= radius) return 0.0;
                double base = lambda - std::pow(t, s);
                return base > 0.0 ? c * std::pow(base, m) : 0.0;
            };
            out.deriv = [=](double t) {
                if (t >= radius) return 0.0;
                double base = lambda - std::pow(t, s);
                return base > 0.0 ? -c * m * s * std::pow(t, s - 1.0) * std::pow(base, m - 1.0) : 0.0;
            };
            // lambda - t^s = -lambda expm1(s log1p(-d/R))
            out.eval_edge = [=](double d) {
                double base = -lambda * std::expm1(s * std::log1p(-d / radius));
                return base > 0.0 ? c * std::pow(base, m) : 0.0;
            };
            out.deriv_edge = [=](double d) {
                double t = radius - d;
                double base = -lambda * std::expm1(s * std::log1p(-d / radius));
                return base > 0.0 ? -c * m * s * std::pow(t, s - 1.0) * std::pow(base, m - 1.0) : 0.0;
            };
            out.log_eval_edge = [=](double d) {
                double base = -lambda * std::expm1(s * std::log1p(-d / radius));
                return std::log(c) + m * std::log(base);
            };
            out.log_deriv_edge = [=](double d) {
                double base = -lambda * std::expm1(s * std::log1p(-d / radius));
                return std::log(c * m * s) + (s - 1.0) * std::log(radius - d) + (m - 1.0) * std::log(base);
            };
            out.support_radius = radius;
            out.asymptotics = {0.0, s - 1.0, TailKind::Compact, 0.0, 1.0, 0.0, m};
            out.scale = radius;
            break;
        }
        case SharpnessCase::CaseIII: {
            if (!(c > 0.0)) throw std::invalid_argument("make_extremal: amplitude c must be positive");
            const double radius = std::exp(lambda);
            out.kind = ProfileKind::ExtremalIII;
            out.eval = [=](double t) {
                if (t >= radius) return 0.0;
                double base = lambda - std::log(t);
                return base > 0.0 ? c * std::pow(base, m) : 0.0;
            };
            out.deriv = [=](double t) {
                if (t >= radius) return 0.0;
                double base = lambda - std::log(t);
                return base > 0.0 ? -c * m * std::pow(base, m - 1.0) / t : 0.0;
            };
            // lambda - log t = -log1p(-d/R)
            out.eval_edge = [=](double d) {
                double base = -std::log1p(-d / radius);
                return base > 0.0 ? c * std::pow(base, m) : 0.0;
            };
            out.deriv_edge = [=](double d) {
                double base = -std::log1p(-d / radius);
                return base > 0.0 ? -c * m * std::pow(base, m - 1.0) / (radius - d) : 0.0;
            };
            out.log_eval_edge = [=](double d) { return std::log(c) + m * std::log(-std::log1p(-d / radius)); };
            out.log_deriv_edge = [=](double d) {
                return std::log(c * m) + (m - 1.0) * std::log(-std::log1p(-d / radius)) - std::log(radius - d);
            };
            out.support_radius = radius;
            out.asymptotics = {0.0, -1.0, TailKind::Compact, 0.0, 1.0, 0.0, m};
            out.scale = radius;
            break;
        }
        case SharpnessCase::CaseIV: {
            if (!(lambda > 0.0)) throw std::invalid_argument("make_extremal: case IV needs lambda > 0");
            if (!(c > 0.0)) throw std::invalid_argument("make_extremal: amplitude c must be positive");
            const double radius = std::pow(lambda, 1.0 / s);
            out.kind = ProfileKind::ExtremalIV;
            out.eval = [=](double t) {
                if (t >= radius) return 0.0;
                double base = std::pow(t, s) - lambda;
                return base > 0.0 ? c * std::pow(base, m) : 0.0;
            };
            out.deriv = [=](double t) {
                if (t >= radius) return 0.0;
                double base = std::pow(t, s) - lambda;
                return base > 0.0 ? c * m * s * std::pow(t, s - 1.0) * std::pow(base, m - 1.0) : 0.0;
            };
            // t^s - lambda = lambda expm1(s log1p(-d/R))
            out.eval_edge = [=](double d) {
                double base = lambda * std::expm1(s * std::log1p(-d / radius));
                return base > 0.0 ? c * std::pow(base, m) : 0.0;
            };
            out.deriv_edge = [=](double d) {
                double t = radius - d;
                double base = lambda * std::expm1(s * std::log1p(-d / radius));
                return base > 0.0 ? c * m * s * std::pow(t, s - 1.0) * std::pow(base, m - 1.0) : 0.0;
            };
            out.log_eval_edge = [=](double d) {
                double base = lambda * std::expm1(s * std::log1p(-d / radius));
                return std::log(c) + m * std::log(base);
            };
            out.log_deriv_edge = [=](double d) {
                double base = lambda * std::expm1(s * std::log1p(-d / radius));
                return std::log(-c * m * s) + (s - 1.0) * std::log(radius - d) + (m - 1.0) * std::log(base);
            };
            out.support_radius = radius;
            out.asymptotics = {s * m, s * m - 1.0, TailKind::Compact, 0.0, 1.0, 0.0, m};
            out.scale = radius;
            break;
        }
        case SharpnessCase::CaseV: {
            if (!(c > 0.0)) throw std::invalid_argument("make_extremal: case V needs c > 0");
            if (!(lambda > 0.0)) throw std::invalid_argument("make_extremal: amplitude lambda must be positive");
            out.kind = ProfileKind::ExtremalV;
            out.eval = [=](double t) { return lambda * std::exp(-c * std::pow(t, s)); };
            out.deriv = [=](double t) {
                return -lambda * c * s * std::pow(t, s - 1.0) * std::exp(-c * std::pow(t, s));
            };
            out.log_eval = [=](double t) { return std::log(lambda) - c * std::pow(t, s); };
            out.log_deriv = [=](double t) {
                return std::log(lambda * c * s) + (s - 1.0) * std::log(t) - c * std::pow(t, s);
            };
            out.support_radius = inf;
            out.asymptotics = {0.0, s - 1.0, TailKind::Exponential, c, s, 0.0, inf};
            out.scale = std::pow(c, -1.0 / s);
            break;
        }
        case SharpnessCase::NotCovered:
            throw CaseMismatch("make_extremal: no extremal family for uncovered parameters");
    }
    out.label = std::string("extremal_") + std::string(to_string(which));
    return out;
}

/// The constant c for which the extremal solves phi' = -c phi^{(r-1)/(p-1)} t^{s-1}.
inline double ode_constant(const CknParams& params, const RadialProfile& phi) {
    const double s = params.s();
    const double amp_power = (params.p() - params.r()) / (params.p() - 1.0);
    const auto& pu = phi.params_used;
    switch (phi.kind) {
        case ProfileKind::ExtremalI:
            return -extremal_exponent(params) * s * std::pow(pu.c, amp_power);
        case ProfileKind::ExtremalII:
            return extremal_exponent(params) * s * std::pow(pu.c, amp_power);
        case ProfileKind::ExtremalIII:
            return extremal_exponent(params) * std::pow(pu.c, amp_power);
        case ProfileKind::ExtremalIV:
            return -extremal_exponent(params) * s * std::pow(pu.c, amp_power);
        case ProfileKind::ExtremalV:
            return pu.c * s;
        default:
            throw std::invalid_argument("ode_constant: profile is not an extremal");
    }
}

/// phi'(t) + c phi(t)^{(r-1)/(p-1)} t^{alpha - beta/p}; zero on {phi > 0}
/// exactly for solutions of the extremal ODE.
inline double ode_residual(const CknParams& params, const RadialProfile& phi, double c, double t) {
    if (!(t > 0.0)) throw std::domain_error("ode_residual: t must be positive");
    const double value = phi.eval(t);
    if (!(value > 0.0) || t >= phi.support_radius)
        throw std::domain_error("ode_residual: t lies outside the positivity set");
    const double power = (params.r() - 1.0) / (params.p() - 1.0);
    return phi.deriv(t) + c * std::pow(value, power) * std::pow(t, params.s() - 1.0);
}

// ---------------------------------------------------------------------------
// Test profiles

enum class TestProfileKind { Gaussian, Exp, PolyBump, PlateauBump };

inline std::string_view to_string(TestProfileKind k) {
    switch (k) {
        case TestProfileKind::Gaussian: return "gaussian";
        case TestProfileKind::Exp: return "exp";
        case TestProfileKind::PolyBump: return "poly_bump";
        case TestProfileKind::PlateauBump: return "plateau_bump";
    }
    return "gaussian";
}

inline TestProfileKind parse_test_profile(std::string_view s) {
    for (auto k : {TestProfileKind::Gaussian, TestProfileKind::Exp, TestProfileKind::PolyBump,
                   TestProfileKind::PlateauBump})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown profile '" + std::string(s) + "'");
}

inline RadialProfile make_test_profile(TestProfileKind kind, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("make_test_profile: scale must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const double L = scale;
    RadialProfile out;
    out.kind = ProfileKind::Bump;
    out.scale = L;
    out.label = std::string(to_string(kind));
    out.params_used = {0.0, 0.0, 0.0};
    switch (kind) {
        case TestProfileKind::Gaussian:
            out.eval = [L](double t) { return std::exp(-(t / L) * (t / L)); };
            out.deriv = [L](double t) { return -2.0 * t / (L * L) * std::exp(-(t / L) * (t / L)); };
            out.log_eval = [L](double t) { return -(t / L) * (t / L); };
            out.log_deriv = [L](double t) { return std::log(2.0 * t / (L * L)) - (t / L) * (t / L); };
            out.asymptotics = {0.0, 1.0, TailKind::Exponential, 1.0 / (L * L), 2.0, 0.0, inf};
            break;
        case TestProfileKind::Exp:
            out.eval = [L](double t) { return std::exp(-t / L); };
            out.deriv = [L](double t) { return -std::exp(-t / L) / L; };
            out.log_eval = [L](double t) { return -t / L; };
            out.log_deriv = [L](double t) { return -t / L - std::log(L); };
            out.asymptotics = {0.0, 0.0, TailKind::Exponential, 1.0 / L, 1.0, 0.0, inf};
            break;
        case TestProfileKind::PolyBump:
            out.eval = [L](double t) {
                double u = t / L;
                return u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
            };
            out.deriv = [L](double t) {
                double u = t / L;
                return u < 1.0 ? -4.0 * u * (1.0 - u * u) / L : 0.0;
            };
            out.eval_edge = [L](double d) {
                double a = d / L, u = 1.0 - a;
                return d < L ? a * a * (1.0 + u) * (1.0 + u) : 1.0;
            };
            out.deriv_edge = [L](double d) {
                double a = d / L, u = 1.0 - a;
                return d < L ? -4.0 * u * a * (1.0 + u) / L : 0.0;
            };
            out.log_eval_edge = [L](double d) {
                double a = d / L;
                return d < L ? 2.0 * std::log(a) + 2.0 * std::log(2.0 - a) : 0.0;
            };
            out.log_deriv_edge = [L](double d) {
                double a = d / L;
                return std::log(4.0 * (1.0 - a) * (2.0 - a) / L) + std::log(a);
            };
            out.support_radius = L;
            out.asymptotics = {0.0, 1.0, TailKind::Compact, 0.0, 1.0, 0.0, 2.0};
            break;
        case TestProfileKind::PlateauBump:
            out.eval = [L](double t) { return detail::smooth_step(t / L); };
            out.deriv = [L](double t) { return detail::smooth_step_deriv(t / L) / L; };
            out.support_radius = L;
            out.asymptotics = {0.0, inf, TailKind::Compact, 0.0, 1.0, 0.0, inf};
            out.breakpoints = {0.5 * L};
            break;
    }
    return out;
}

/// phi(t) * eta(t / radius) with the smooth plateau cutoff eta, which is 1
/// on [0, radius/2] and 0 beyond radius. Produces a compactly supported
/// competitor from any profile.
inline RadialProfile truncate(const RadialProfile& phi, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("truncate: radius must be positive");
    if (radius >= phi.support_radius) return phi;
    RadialProfile out = phi;
    out.eval = [f = phi.eval, radius](double t) {
        double eta = detail::smooth_step(t / radius);
        return eta == 0.0 ? 0.0 : f(t) * eta;
    };
    out.deriv = [f = phi.eval, g = phi.deriv, radius](double t) {
        double x = t / radius;
        double eta = detail::smooth_step(x);
        if (eta == 0.0) return 0.0;
        double d = g(t) * eta;
        double deta = detail::smooth_step_deriv(x);
        if (deta != 0.0) d += f(t) * deta / radius;
        return d;
    };
    out.eval_edge = nullptr;
    out.deriv_edge = nullptr;
    out.log_eval = nullptr;
    out.log_deriv = nullptr;
    out.log_eval_edge = nullptr;
    out.log_deriv_edge = nullptr;
    out.support_radius = radius;
    out.kind = ProfileKind::Custom;
    out.asymptotics.tail = TailKind::Compact;
    out.asymptotics.edge_order = std::numeric_limits<double>::infinity();
    out.breakpoints.push_back(0.5 * radius);
    out.label = phi.label + "_truncated";
    return out;
}

}  // namespace ckn
