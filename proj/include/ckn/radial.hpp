#pragma once

// Radial reduction: for g(x) = G(d(x)) on a model space,
//     int_M g dV = n omega_n int_0^R G(t) t^{n-1} J_b(t) dt.
//
// Every weighted integral of a profile is one of two shapes,
//     value term     phi(t)^k   t^w J_b(t) t^{n-1}
//     gradient term  |phi'(t)|^p t^w J_b(t) t^{n-1}
// possibly times a bounded-growth factor h(t). Finiteness is decided from
// the profile's asymptotics before any quadrature runs, and the same
// exponents become the endpoint hints of the quadrature spec.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "ckn/errors.hpp"
#include "ckn/geometry.hpp"
#include "ckn/profiles.hpp"
#include "ckn/quadrature.hpp"
#include "ckn/specfun.hpp"

namespace ckn {

struct RadialTerm {
    enum class Kind { Value, Gradient };
    Kind kind = Kind::Value;
    /// Power of phi (Value) or of |phi'| (Gradient).
    double exponent = 1.0;
    /// Power of the distance t.
    double weight = 0.0;
    std::string name = "term";

    static RadialTerm value(double k, double w, std::string name = "value") {
        return {Kind::Value, k, w, std::move(name)};
    }
    static RadialTerm gradient(double p, double w, std::string name = "gradient") {
        return {Kind::Gradient, p, w, std::move(name)};
    }
};

struct RadialOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    bool strict = true;
    int max_subdivisions = 2000;
};

namespace detail {

[[noreturn]] inline void non_integrable(const RadialTerm& term, const RadialProfile& phi, const char* where) {
    std::ostringstream msg;
    msg << term.name << " of profile '" << phi.label << "' diverges " << where;
    throw NonIntegrable(msg.str());
}

}  // namespace detail

/// Checks finiteness of the term and returns the matching quadrature spec.
/// Throws NonIntegrable when the integral is infinite.
inline QuadSpec radial_quad_spec(const ModelSpace& space, const RadialTerm& term, const RadialProfile& phi,
                                 const RadialOptions& opt = {}) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto& a = phi.asymptotics;
    const double n = space.n();
    const bool grad = term.kind == RadialTerm::Kind::Gradient;
    const double k = term.exponent;

    QuadSpec spec;
    spec.rel_tol = opt.rel_tol;
    spec.abs_tol = opt.abs_tol;
    spec.strict = opt.strict;
    spec.max_subdivisions = opt.max_subdivisions;
    spec.breakpoints = phi.breakpoints;

    // Origin.
    double origin = grad ? (std::isinf(a.origin_deriv_exponent) ? inf : n - 1.0 + term.weight + k * a.origin_deriv_exponent)
                         : n - 1.0 + term.weight + k * a.origin_exponent;
    if (!(origin > -1.0)) detail::non_integrable(term, phi, "at the origin");
    spec.singular_power_at_lower = std::min(origin, 1.0);

    if (phi.compact()) {
        spec.upper = phi.support_radius;
        spec.decay = DecayHint::Compact;
        const double m = a.edge_order;
        double edge = 0.0;
        if (std::isinf(m)) {
            if (!grad && k < 0.0) detail::non_integrable(term, phi, "at the edge of the support");
            edge = 1.0;
        } else {
            edge = grad ? k * (m - 1.0) : k * m;
            if (!(edge > -1.0)) detail::non_integrable(term, phi, "at the edge of the support");
        }
        spec.singular_power_at_upper = std::min(edge, 1.0);
        return spec;
    }

    spec.upper = inf;
    const double sqrt_b = std::sqrt(space.b());
    switch (a.tail) {
        case TailKind::Exponential: {
            if (!(k > 0.0)) detail::non_integrable(term, phi, "at infinity");
            double rate = k * a.tail_rate;
            if (!space.flat()) {
                if (a.tail_shape < 1.0) detail::non_integrable(term, phi, "at infinity against the volume growth");
                if (a.tail_shape == 1.0) {
                    double growth = (n - 1.0) * sqrt_b;
                    if (!(rate > growth)) detail::non_integrable(term, phi, "at infinity against the volume growth");
                    rate -= growth;
                }
            }
            spec.decay = DecayHint::StretchedExponential;
            spec.decay_rate = rate;
            spec.decay_shape = a.tail_shape;
            // Anchor the tail map where the decay has set in, but not closer
            // in than the profile's own scale.
            spec.scale = std::max(std::pow(rate, -1.0 / a.tail_shape), phi.scale);
            return spec;
        }
        case TailKind::Power: {
            if (!space.flat()) detail::non_integrable(term, phi, "at infinity against the volume growth");
            double expo = grad ? n - 1.0 + term.weight - k * (a.tail_power + 1.0)
                               : n - 1.0 + term.weight - k * a.tail_power;
            if (!(expo < -1.0)) detail::non_integrable(term, phi, "at infinity");
            spec.decay = DecayHint::Power;
            spec.decay_power = -expo;
            spec.scale = phi.scale;
            return spec;
        }
        case TailKind::Compact:
            break;
    }
    throw std::invalid_argument("radial_quad_spec: profile '" + phi.label +
                                "' has infinite support but no tail description");
}

/// Widest hints of two specs over the same range; used for integrands that
/// are dominated by a combination of two terms.
inline QuadSpec merge_quad_specs(QuadSpec a, const QuadSpec& b) {
    a.singular_power_at_lower = std::min(a.singular_power_at_lower, b.singular_power_at_lower);
    a.singular_power_at_upper = std::min(a.singular_power_at_upper, b.singular_power_at_upper);
    if (!std::isfinite(a.upper)) {
        if (b.decay == DecayHint::Power) {
            a.decay_power = a.decay == DecayHint::Power ? std::min(a.decay_power, b.decay_power) : b.decay_power;
            a.decay = DecayHint::Power;
        } else if (a.decay != DecayHint::Power) {
            a.decay_rate = std::min(a.decay_rate, b.decay_rate);
            a.decay_shape = std::min(a.decay_shape, b.decay_shape);
        }
        a.scale = std::max(a.scale, b.scale);
    }
    return a;
}

/// Integrates g(t, d) over the range of `spec`, where d = R - t is the
/// distance to the edge of a compact support (or -1 where not tracked).
/// For profiles with an edge form the outer half of the support is
/// integrated in the variable d, so the edge singularity is resolved in
/// d rather than in t = R - d, which cannot represent small d.
template <std::size_t N, class G>
VectorIntegral<N> integrate_profile_vector(const RadialProfile& phi, const QuadSpec& spec, G&& g) {
    if (!phi.has_edge_form() || spec.upper != phi.support_radius)
        return integrate_vector<N>([&](double t) { return g(t, -1.0); }, spec);
    const double R = phi.support_radius;
    const double mid = 0.5 * (spec.lower + R);
    QuadSpec inner = spec, outer = spec;
    inner.upper = mid;
    inner.singular_power_at_upper = 0.0;
    inner.breakpoints.clear();
    outer.lower = 0.0;
    outer.upper = R - mid;
    outer.singular_power_at_lower = spec.singular_power_at_upper;
    outer.singular_power_at_upper = 0.0;
    outer.breakpoints.clear();
    for (double bp : spec.breakpoints) {
        if (bp < mid) inner.breakpoints.push_back(bp);
        else if (bp < R) outer.breakpoints.push_back(R - bp);
    }
    VectorIntegral<N> a = integrate_vector<N>([&](double t) { return g(t, -1.0); }, inner);
    VectorIntegral<N> b = integrate_vector<N>([&](double d) { return g(R - d, d); }, outer);
    VectorIntegral<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out.value[i] = a.value[i] + b.value[i];
        out.abs_error_estimate[i] = a.abs_error_estimate[i] + b.abs_error_estimate[i];
    }
    out.converged = a.converged && b.converged;
    out.subdivisions = a.subdivisions + b.subdivisions;
    return out;
}

template <class G>
IntegralResult integrate_profile(const RadialProfile& phi, const QuadSpec& spec, G&& g) {
    auto r = integrate_profile_vector<1>(phi, spec, [&](double t, double d) { return std::array<double, 1>{g(t, d)}; });
    return {r.value[0], r.abs_error_estimate[0], r.converged, r.subdivisions};
}

/// Pointwise integrand of the term (without the sphere area), evaluated in
/// log space so that large J_b and small phi do not overflow separately.
inline double radial_term_integrand(const ModelSpace& space, const RadialTerm& term, const RadialProfile& phi,
                                    double t, double d = -1.0) {
    if (d < 0.0 && t >= phi.support_radius) return 0.0;
    double lb = term.kind == RadialTerm::Kind::Value ? phi.log_value_at(t, d) : phi.log_deriv_at(t, d);
    if (!(lb > -std::numeric_limits<double>::infinity())) return 0.0;
    return std::exp(term.exponent * lb + (space.n() - 1.0 + term.weight) * std::log(t) + log_density_jb(space, t));
}

/// n omega_n int phi^k (or |phi'|^p) t^w h(t) dV. `extra` multiplies the
/// integrand and must not change its asymptotic class (e.g. D_b).
inline IntegralResult integrate_term(const ModelSpace& space, const RadialTerm& term, const RadialProfile& phi,
                                     const RadialOptions& opt = {},
                                     const std::function<double(double)>& extra = nullptr) {
    QuadSpec spec = radial_quad_spec(space, term, phi, opt);
    IntegralResult res = integrate_profile(phi, spec, [&](double t, double d) {
        double v = radial_term_integrand(space, term, phi, t, d);
        return (extra && v != 0.0) ? v * extra(t) : v;
    });
    const double area = unit_sphere_area(space.n());
    res.value *= area;
    res.abs_error_estimate *= area;
    return res;
}

/// n omega_n int transform(phi(t)) t^{n-1+power} J_b(t) dt over the support
/// of phi. `transform_power` is the k with transform(u) ~ u^k, used for the
/// integrability analysis and the endpoint hints.
template <class Transform>
IntegralResult integrate_radial(const ModelSpace& space, double power, const RadialProfile& phi,
                                Transform&& transform, double transform_power = 1.0,
                                const RadialOptions& opt = {}) {
    RadialTerm term = RadialTerm::value(transform_power, power, "radial integral");
    QuadSpec spec = radial_quad_spec(space, term, phi, opt);
    IntegralResult res = integrate_profile(phi, spec, [&](double t, double d) {
        if (d < 0.0 && t >= phi.support_radius) return 0.0;
        double g = transform(phi.value_at(t, d));
        if (g == 0.0) return 0.0;
        return g * std::exp((space.n() - 1.0 + power) * std::log(t) + log_density_jb(space, t));
    });
    const double area = unit_sphere_area(space.n());
    res.value *= area;
    res.abs_error_estimate *= area;
    return res;
}

}  // namespace ckn
