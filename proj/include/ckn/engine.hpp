#pragma once

// CKN functionals of radial profiles, the R_p remainder and the D_p map,
// the refined Hoelder identity, the main equality and the quantitative
// inequalities derived from it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/geometry.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"
#include "ckn/quadrature.hpp"
#include "ckn/radial.hpp"

namespace ckn {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Pointwise algebra on R^d

namespace detail {
inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
}  // namespace detail

/// R_p(xi, eta) = |eta|^p / p + (p-1)/p |xi|^p - |xi|^{p-2} <xi, eta>.
inline double remainder_rp(double p, const Vec& xi, const Vec& eta) {
    if (!(p > 1.0)) throw std::invalid_argument("remainder_rp: p must exceed 1");
    const double nx = detail::norm(xi), ne = detail::norm(eta);
    const double cross = nx > 0.0 ? std::pow(nx, p - 2.0) * detail::dot(xi, eta) : 0.0;
    const double r = std::pow(ne, p) / p + (p - 1.0) / p * std::pow(nx, p) - cross;
    return std::max(r, 0.0);
}

inline double remainder_rp(double p, double xi, double eta) { return remainder_rp(p, Vec{xi}, Vec{eta}); }

/// Taylor form of R_p by quadrature: with z = t xi + (1-t) eta, h = xi - eta,
///   int_0^1 t |z|^{p-2} (|h|^2 + (p-2) <z/|z|, h>^2) dt.
/// For scalars the bracket is (p-1) h^2, giving
///   (p-1) |xi - eta|^2 int_0^1 |t xi + (1-t) eta|^{p-2} t dt;
/// in higher dimension that shorter form is not exact unless p = 2.
inline double rp_integral_form(double p, const Vec& xi, const Vec& eta) {
    if (!(p > 1.0)) throw std::invalid_argument("rp_integral_form: p must exceed 1");
    if (xi.size() != eta.size()) throw std::invalid_argument("rp_integral_form: vector length mismatch");
    Vec diff(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) diff[i] = xi[i] - eta[i];
    const double d2 = detail::dot(diff, diff);
    if (d2 == 0.0) return 0.0;

    // Where the segment passes closest to 0, |.|^{p-2} may be singular (p < 2).
    const double ee = detail::dot(eta, eta);
    const double t_star = std::clamp(-(detail::dot(eta, diff)) / d2, 0.0, 1.0);
    QuadSpec spec;
    spec.lower = 0.0;
    spec.upper = 1.0;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 0.0;
    if (t_star > 0.0 && t_star < 1.0) spec.breakpoints = {t_star};
    if (p < 2.0) {
        if (ee == 0.0) spec.singular_power_at_lower = p - 2.0 + 1.0;
        if (detail::dot(xi, xi) == 0.0) spec.singular_power_at_upper = p - 2.0;
    }
    auto integrand = [&](double t) {
        double zz = 0.0, zh = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            double z = t * xi[i] + (1.0 - t) * eta[i];
            zz += z * z;
            zh += z * diff[i];
        }
        if (zz == 0.0) return 0.0;
        return t * std::pow(zz, 0.5 * (p - 2.0)) * (d2 + (p - 2.0) * zh * zh / zz);
    };
    return integrate(integrand, spec).value;
}

inline double rp_integral_form(double p, double xi, double eta) { return rp_integral_form(p, Vec{xi}, Vec{eta}); }

/// D_p(g) = |g|^{(2-p)/(p-1)} g, i.e. g/|g| * |g|^{1/(p-1)}.
inline Vec dp_map(double p, const Vec& g) {
    if (!(p > 1.0)) throw std::invalid_argument("dp_map: p must exceed 1");
    const double ng = detail::norm(g);
    Vec out(g.size(), 0.0);
    if (ng == 0.0) return out;
    const double scale = std::pow(ng, 1.0 / (p - 1.0)) / ng;
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] * scale;
    return out;
}

inline double dp_map(double p, double g) { return dp_map(p, Vec{g})[0]; }

struct HolderTerms {
    double pairing;     // sum <f, g> w
    double norm_f;      // ||f||_p
    double norm_g;      // ||g||_{p'}
    double remainder;   // sum R_p(...) w
    double residual;    // pairing - norm_f norm_g (1 - remainder)
};

/// Both sides of the refined Hoelder identity for vector fields f, g on a
/// weighted finite set. The D_p(g) term sits in the first slot of R_p; with
/// that order the identity is exact for every p > 1.
inline HolderTerms refined_holder_terms(double p, const std::vector<Vec>& f, const std::vector<Vec>& g,
                                        const Vec& weights) {
    if (!(p > 1.0)) throw std::invalid_argument("refined_holder: p must exceed 1");
    if (f.size() != g.size() || f.size() != weights.size())
        throw std::invalid_argument("refined_holder: f, g and weights must have equal length");
    const double pc = p / (p - 1.0);
    double pairing = 0.0, sf = 0.0, sg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("refined_holder: weights must be positive");
        pairing += detail::dot(f[i], g[i]) * weights[i];
        sf += std::pow(detail::norm(f[i]), p) * weights[i];
        sg += std::pow(detail::norm(g[i]), pc) * weights[i];
    }
    if (sf == 0.0 || sg == 0.0) throw std::invalid_argument("refined_holder: f and g must not vanish identically");
    const double nf = std::pow(sf, 1.0 / p), ng = std::pow(sg, 1.0 / pc);
    const double g_scale = std::pow(ng, 1.0 / (p - 1.0));
    double rem = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        Vec x = dp_map(p, g[i]);
        for (double& v : x) v /= g_scale;
        Vec y = f[i];
        for (double& v : y) v /= nf;
        rem += remainder_rp(p, x, y) * weights[i];
    }
    return {pairing, nf, ng, rem, pairing - nf * ng * (1.0 - rem)};
}

inline double refined_holder_residual(double p, const std::vector<Vec>& f, const std::vector<Vec>& g,
                                      const Vec& weights) {
    return refined_holder_terms(p, f, g, weights).residual;
}

/// Scalar-valued convenience overload.
inline double refined_holder_residual(double p, const Vec& f, const Vec& g, const Vec& weights) {
    std::vector<Vec> fv, gv;
    for (double v : f) fv.push_back({v});
    for (double v : g) gv.push_back({v});
    return refined_holder_residual(p, fv, gv, weights);
}

// ---------------------------------------------------------------------------
// Functionals

struct EngineOptions {
    RadialOptions quad{};
    /// Absolute tolerance for the normalized R_p integral, which is O(1) at
    /// most and exactly 0 at extremals.
    double remainder_abs_tol = 1e-13;
};

inline EngineOptions default_engine_options() {
    EngineOptions o;
    if (const char* env = std::getenv("CKN_REL_TOL")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0.0 && std::isfinite(v)) o.quad.rel_tol = v;
    }
    return o;
}

struct CknFunctionals {
    IntegralResult lhs;        // int phi^r d^{-gamma r}
    IntegralResult grad_term;  // int |phi'|^p d^{-alpha p}
    IntegralResult q_term;     // int_{supp} phi^q d^{-beta}
};

inline RadialTerm lhs_term(const CknParams& c) {
    return RadialTerm::value(c.r(), -c.gamma() * c.r(), "lhs integral");
}
inline RadialTerm grad_term(const CknParams& c) {
    return RadialTerm::gradient(c.p(), -c.alpha() * c.p(), "gradient integral");
}
inline RadialTerm q_term(const CknParams& c) { return RadialTerm::value(c.q(), -c.beta(), "support integral"); }

inline CknFunctionals ckn_functionals(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                                      const EngineOptions& opt = default_engine_options()) {
    if (space.n() != c.n()) throw std::invalid_argument("ckn_functionals: dimension mismatch");
    if (!(phi.eval(0.5 * std::min(phi.scale, phi.support_radius)) >= 0.0))
        throw std::invalid_argument("ckn_functionals: profile must be nonnegative");
    CknFunctionals out;
    out.lhs = integrate_term(space, lhs_term(c), phi, opt.quad);
    out.grad_term = integrate_term(space, grad_term(c), phi, opt.quad);
    out.q_term = integrate_term(space, q_term(c), phi, opt.quad);
    if (out.lhs.value == 0.0 && out.grad_term.value == 0.0)
        throw std::invalid_argument("ckn_functionals: profile vanishes on its support");
    return out;
}

/// A^{1/p} B^{(p-1)/p}, the right-hand side without the constant.
inline double ckn_denominator(const CknParams& c, const CknFunctionals& f) {
    if (!(f.grad_term.value > 0.0)) throw DivisionDegenerate("gradient integral vanishes");
    if (!(f.q_term.value > 0.0)) throw DivisionDegenerate("support integral vanishes");
    return std::pow(f.grad_term.value, 1.0 / c.p()) * std::pow(f.q_term.value, (c.p() - 1.0) / c.p());
}

inline double ckn_ratio(const CknFunctionals& f, const CknParams& c) {
    return f.lhs.value / ckn_denominator(c, f);
}

inline double ckn_ratio(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                        const EngineOptions& opt = default_engine_options()) {
    return ckn_ratio(ckn_functionals(c, space, phi, opt), c);
}

/// Pieces of the main equality
///   lhs = C* A^{1/p} B^{1/p'} (1 - remainder) - curvature.
struct MainIdentityTerms {
    CknFunctionals functionals;
    double remainder = 0.0;  // int R_p(x, y) dV, (x, y) normalized on the quadrature measure
    // 1 - remainder, taken from int x^{p-1} y dV so that it keeps its
    // digits when the remainder is close to 1.
    double complement = 1.0;
    // (a/p + b/p' - int R_p) / norms - complement; zero up to rounding.
    double holder_gap = 0.0;
    double curvature = 0.0;  // (n-1)/(n-gamma r) int phi^r d^{-gamma r} D_b dV
    double rhs = 0.0;
    double residual = 0.0;   // lhs - rhs
};

inline MainIdentityTerms main_identity_terms(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                                             const EngineOptions& opt = default_engine_options()) {
    MainIdentityTerms out;
    out.functionals = ckn_functionals(c, space, phi, opt);
    const auto& F = out.functionals;
    const double p = c.p();
    const double A = F.grad_term.value, B = F.q_term.value;
    const double denom = ckn_denominator(c, F);
    const double cstar = sharp_constant(c);

    // x = d^{-beta/p} phi^{(r-1)/(p-1)} / B^{1/p}   (D_p of the lower-order factor)
    // y = -d^{-alpha} phi' / A^{1/p}
    const double a_norm = std::pow(A, 1.0 / p), b_norm = std::pow(B, 1.0 / p);
    const double xpow = (c.r() - 1.0) / (p - 1.0);
    RadialOptions ropt = opt.quad;
    ropt.strict = false;
    QuadSpec spec = merge_quad_specs(radial_quad_spec(space, grad_term(c), phi, ropt),
                                     radial_quad_spec(space, q_term(c), phi, ropt));
    // Relative accuracy on every component except R_p, which vanishes at extremals.
    const double area = unit_sphere_area(space.n());
    spec.component_abs_tol = {1e-300, 1e-300, opt.remainder_abs_tol / area, 1e-300};
    // Components on one shared partition: |y|^p, x^p, R_p(x, y), x^{p-1} y.
    auto rp_integrand = [&](double t, double d) {
        std::array<double, 4> v{};
        if (d < 0.0 && t >= phi.support_radius) return v;
        double lv = phi.log_value_at(t, d);
        if (!(lv > -std::numeric_limits<double>::infinity())) return v;
        double lt = std::log(t);
        // R_p is p-homogeneous in (x, y): fold the volume weight into both
        // so that neither the weight nor the remainder over/underflows.
        double lw = ((space.n() - 1.0) * lt + log_density_jb(space, t)) / p;
        double x = std::exp(-c.beta() / p * lt + xpow * lv + lw) / b_norm;
        // Magnitude of phi' from the log form, sign from the direct one
        // (taken as decreasing where the direct form underflows).
        double sign = phi.deriv_at(t, d) > 0.0 ? -1.0 : 1.0;
        double y = sign * std::exp(-c.alpha() * lt + phi.log_deriv_at(t, d) + lw) / a_norm;
        double yp = std::pow(std::abs(y), p), xp = std::pow(x, p), cross = std::pow(x, p - 1.0) * y;
        v[0] = yp;
        v[1] = xp;
        v[2] = std::max(yp / p + (p - 1.0) / p * xp - cross, 0.0);
        v[3] = cross;
        return v;
    };
    VectorIntegral<4> rem = integrate_profile_vector<4>(phi, spec, rp_integrand);
    // On the quadrature measure x and y have norms a^{1/p}, b^{1/p} rather
    // than exactly 1; the refined Hoelder identity holds with these norms.
    const double a = area * rem.value[0], b = area * rem.value[1], rp = area * rem.value[2];
    const double pairing = area * rem.value[3];
    const double norms = std::pow(a, 1.0 / p) * std::pow(b, (p - 1.0) / p);
    out.complement = pairing / norms;
    out.remainder = 1.0 - out.complement;
    out.holder_gap = (a / p + (p - 1.0) / p * b - rp) / norms - out.complement;

    if (!space.flat()) {
        const double b = space.b();
        IntegralResult curv = integrate_term(space, lhs_term(c), phi, opt.quad, [b](double t) { return db(b, t); });
        out.curvature = (space.n() - 1.0) / c.lhs_homogeneity() * curv.value;
    }
    out.rhs = cstar * denom * pairing - out.curvature;
    out.residual = F.lhs.value - out.rhs;
    return out;
}

inline double main_identity_residual(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                                     const EngineOptions& opt = default_engine_options()) {
    return main_identity_terms(c, space, phi, opt).residual;
}

/// C* A^{1/p} B^{1/p'} - int phi^r d^{-gamma r} (1 + (n-1)/(n-gamma r) D_b) dV.
/// Nonnegative; equal to C* A^{1/p} B^{1/p'} times the R_p integral.
inline double quantitative_ckn_margin(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                                      const EngineOptions& opt = default_engine_options()) {
    CknFunctionals F = ckn_functionals(c, space, phi, opt);
    double weighted = F.lhs.value;
    if (!space.flat()) {
        const double b = space.b();
        IntegralResult curv = integrate_term(space, lhs_term(c), phi, opt.quad, [b](double t) { return db(b, t); });
        weighted += (space.n() - 1.0) / c.lhs_homogeneity() * curv.value;
    }
    return sharp_constant(c) * ckn_denominator(c, F) - weighted;
}

/// C* A^{1/p} B^{1/p'} - lhs: the deficit in the plain inequality.
inline double ckn_margin(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                         const EngineOptions& opt = default_engine_options()) {
    CknFunctionals F = ckn_functionals(c, space, phi, opt);
    return sharp_constant(c) * ckn_denominator(c, F) - F.lhs.value;
}

/// (p/(n-p-delta))^p int |phi'|^p d^{-delta} dV
///   - int phi^p d^{-p-delta} (1 + p(n-1)/(n-p-delta) D_b) dV.
inline double hardy_margin(int n, double p, double delta, const ModelSpace& space, const RadialProfile& phi,
                           const EngineOptions& opt = default_engine_options()) {
    if (space.n() != n) throw std::invalid_argument("hardy_margin: dimension mismatch");
    if (!(p > 1.0)) throw std::invalid_argument("hardy_margin: p must exceed 1");
    const double h = n - p - delta;
    if (!(h > 0.0)) throw std::invalid_argument("hardy_margin: requires delta < n - p");
    const double b = space.b();
    IntegralResult grad = integrate_term(space, RadialTerm::gradient(p, -delta, "Hardy gradient"), phi, opt.quad);
    IntegralResult lower = integrate_term(space, RadialTerm::value(p, -p - delta, "Hardy potential"), phi, opt.quad,
                                          [&](double t) { return 1.0 + p * (n - 1.0) / h * db(b, t); });
    return std::pow(p / h, p) * grad.value - lower.value;
}

// ---------------------------------------------------------------------------
// Verification report

struct NamedCheck {
    std::string name;
    double value;
    double tol;
    bool pass;
};

struct VerificationReport {
    CknParams params_echo;
    ModelSpace space_echo;
    std::string profile;
    double ratio = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    double identity_residual = 0.0;
    double quantitative_margin = 0.0;
    std::vector<NamedCheck> residuals;
    bool passed = false;
};

/// Runs the inequality, the main identity and the quantitative inequality
/// on one profile. `check_tol` scales all pass thresholds.
inline VerificationReport verify(const CknParams& c, const ModelSpace& space, const RadialProfile& phi,
                                 const EngineOptions& opt = default_engine_options(),
                                 double check_tol = 1e-8) {
    MainIdentityTerms mi = main_identity_terms(c, space, phi, opt);
    const CknFunctionals& F = mi.functionals;
    const double denom = ckn_denominator(c, F);
    VerificationReport rep{c, space, phi.label, 0.0, 0.0, 0.0, 0.0, 0.0, {}, false};
    rep.bound = sharp_constant(c);
    rep.ratio = F.lhs.value / denom;
    rep.margin = rep.bound - rep.ratio;
    rep.identity_residual = mi.residual;
    rep.quantitative_margin = rep.bound * denom - F.lhs.value - mi.curvature;

    const double lhs = F.lhs.value;
    rep.residuals.push_back({"ratio_le_bound", rep.ratio - rep.bound, check_tol * rep.bound,
                             rep.ratio <= rep.bound * (1.0 + check_tol)});
    const double id_tol = std::max(10.0 * check_tol, 1e-7) * lhs;
    rep.residuals.push_back({"main_identity", mi.residual, id_tol, std::abs(mi.residual) <= id_tol});
    const double q_tol = std::max(10.0 * check_tol, 1e-7) * (lhs + std::abs(mi.curvature));
    rep.residuals.push_back({"quantitative_margin_nonnegative", rep.quantitative_margin, q_tol,
                             rep.quantitative_margin >= -q_tol});
    rep.passed = std::all_of(rep.residuals.begin(), rep.residuals.end(), [](const NamedCheck& x) { return x.pass; });
    return rep;
}

}  // namespace ckn
