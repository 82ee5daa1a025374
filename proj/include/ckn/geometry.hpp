#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ckn/quadrature.hpp"
#include "ckn/specfun.hpp"

namespace ckn {

/// Simply connected space form of dimension n with sectional curvature -b.
/// b = 0 is Euclidean space; b > 0 is a rescaled hyperbolic space.
class ModelSpace {
public:
    ModelSpace(int n, double b) : n_(n), b_(b) {
        if (n < 2) throw std::invalid_argument("ModelSpace: n must be >= 2");
        if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("ModelSpace: b must be finite and >= 0");
    }
    static ModelSpace euclidean(int n) { return {n, 0.0}; }

    int n() const { return n_; }
    double b() const { return b_; }
    bool flat() const { return b_ == 0.0; }

    friend bool operator==(const ModelSpace&, const ModelSpace&) = default;

private:
    int n_;
    double b_;
};

inline std::ostream& operator<<(std::ostream& os, const ModelSpace& m) {
    return os << "ModelSpace(n=" << m.n() << ", b=" << m.b() << ")";
}

namespace detail {
// Below this value of sqrt(b) t the closed forms lose digits; use series.
inline constexpr double kSeriesCutoff = 1e-4;

// sinh(x)/x
inline double sinhc(double x) {
    if (x < kSeriesCutoff) {
        double x2 = x * x;
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
    }
    return std::sinh(x) / x;
}

// log(sinh(x)/x), stable for large x
inline double log_sinhc(double x) {
    if (x < 20.0) return std::log(sinhc(x));
    return x - std::log(2.0 * x) + std::log1p(-std::exp(-2.0 * x));
}

// x coth(x) - 1
inline double xcoth_minus_one(double x) {
    if (x < kSeriesCutoff) {
        double x2 = x * x;
        return x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0 - x2 * x2 * x2 * x2 / 4725.0;
    }
    return x / std::tanh(x) - 1.0;
}
}  // namespace detail

/// Volume density J_b(t) in geodesic polar coordinates.
inline double density_jb(const ModelSpace& m, double t) {
    if (!(t >= 0.0)) throw std::domain_error("density_jb: t must be nonnegative");
    if (m.flat() || t == 0.0) return 1.0;
    return std::pow(detail::sinhc(std::sqrt(m.b()) * t), m.n() - 1);
}

/// log J_b(t); finite where J_b itself would overflow.
inline double log_density_jb(const ModelSpace& m, double t) {
    if (!(t >= 0.0)) throw std::domain_error("log_density_jb: t must be nonnegative");
    if (m.flat() || t == 0.0) return 0.0;
    return (m.n() - 1) * detail::log_sinhc(std::sqrt(m.b()) * t);
}

/// ct_b(t) = 1/t (b = 0) or sqrt(b) coth(sqrt(b) t).
inline double ctb(double b, double t) {
    if (!(t > 0.0)) throw std::domain_error("ctb: t must be positive");
    if (b < 0.0) throw std::domain_error("ctb: b must be nonnegative");
    if (b == 0.0) return 1.0 / t;
    double x = std::sqrt(b) * t;
    return (detail::xcoth_minus_one(x) + 1.0) / t;
}

/// D_b(t) = t ct_b(t) - 1, with D_b(0) = 0.
inline double db(double b, double t) {
    if (!(t >= 0.0)) throw std::domain_error("db: t must be nonnegative");
    if (b < 0.0) throw std::domain_error("db: b must be nonnegative");
    if (b == 0.0 || t == 0.0) return 0.0;
    return detail::xcoth_minus_one(std::sqrt(b) * t);
}

/// d/dt log J_b(t) = ((n-1)/t) D_b(t).
inline double log_derivative_jb(const ModelSpace& m, double t) {
    if (!(t > 0.0)) throw std::domain_error("log_derivative_jb: t must be positive");
    return (m.n() - 1) / t * db(m.b(), t);
}

/// t^{n-1+power} J_b(t): the one-dimensional weight of int_M g(d) d^power dV
/// (up to the sphere area n omega_n).
inline double radial_weight(const ModelSpace& m, double t, double power) {
    if (!(t > 0.0)) throw std::domain_error("radial_weight: t must be positive");
    return std::exp((m.n() - 1 + power) * std::log(t) + log_density_jb(m, t));
}

/// Volume of a geodesic ball of radius rho.
inline double ball_volume(const ModelSpace& m, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("ball_volume: rho must be positive");
    const double area = unit_sphere_area(m.n());
    if (m.flat()) return unit_ball_volume(m.n()) * std::pow(rho, m.n());
    QuadSpec spec;
    spec.lower = 0.0;
    spec.upper = rho;
    spec.singular_power_at_lower = m.n() - 1;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 0.0;
    auto res = integrate([&](double t) { return radial_weight(m, t, 0.0); }, spec);
    return area * res.value;
}

}  // namespace ckn
