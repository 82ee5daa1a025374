#pragma once

// Shared generators and oracles for the test suites. The oracles use
// Boost.Math so that closed forms and quadratures are checked against code
// that shares nothing with the library.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "ckn/params.hpp"

namespace ckn::testing {

inline constexpr double kPi = std::numbers::pi;

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Deterministic uniform/integer draws on top of mt19937_64.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
    bool coin() { return std::bernoulli_distribution(0.5)(rng_); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Random admissible tuple with every integrability margin >= `margin`:
/// n in {2..6}, p in (1.1, 4), r in (0.3, 6) away from 1.
inline CknParams random_admissible(Gen& g, double margin = 0.1) {
    for (;;) {
        int n = g.integer(2, 6);
        double p = g.uniform(1.1, 4.0);
        double r = g.uniform(0.3, 6.0);
        if (std::abs(r - 1.0) < 0.05) continue;
        double alpha_max = n * (1.0 / p - margin);
        double beta_max = n * (1.0 - margin);
        double alpha = g.uniform(-1.0, alpha_max);
        double beta = g.uniform(-2.0, beta_max);
        CknParams c = CknParams::make(n, p, r, alpha, beta);
        if (1.0 / r - c.gamma() / n < margin) continue;
        return c;
    }
}

/// Draws random admissible tuples until one classifies as `want`. The draw
/// keeps the extremals of moderate size on their natural scale: |s| >= 0.2
/// away from the critical case, and for case IV the blow-up t^{s m} at the
/// origin is at most t^{-3}. Case III keeps (p-1)/(p-r) <= 5 so that
/// (lambda - log t)^m stays within a range where absolute residuals of
/// 1e-10 are representable.
inline std::optional<CknParams> random_in_case(Gen& g, SharpnessCase want, int attempts = 200000) {
    for (int i = 0; i < attempts; ++i) {
        int n = g.integer(2, 6);
        double p = g.uniform(1.2, 4.0);
        double r = 0.0, alpha = g.uniform(-0.5, 1.0), beta = 0.0;
        switch (want) {
            case SharpnessCase::CaseI: r = g.uniform(p + 0.2, p + 4.0); beta = g.uniform(-2.0, 0.9 * n); break;
            case SharpnessCase::CaseII: r = g.uniform(0.3, p - 0.2); beta = g.uniform(-2.0, 0.9 * n); break;
            case SharpnessCase::CaseIII: r = g.uniform(0.3, p - 0.2); beta = p * (1.0 + alpha); break;
            case SharpnessCase::CaseIV: r = g.uniform(0.3, p - 0.2); beta = g.uniform(p * (1.0 + alpha), 0.95 * n); break;
            case SharpnessCase::CaseV: r = p; beta = g.uniform(-2.0, 0.9 * n); break;
            case SharpnessCase::NotCovered: return std::nullopt;
        }
        if (std::abs(r - 1.0) < 0.05) continue;
        CknParams c = CknParams::make(n, p, r, alpha, beta);
        if (!is_admissible(c) || classify_sharpness_case(c) != want) continue;
        if (want != SharpnessCase::CaseIII && std::abs(c.s()) < 0.2) continue;
        if (want == SharpnessCase::CaseIV && c.s() * (p - 1.0) / (p - r) < -3.0) continue;
        if (want == SharpnessCase::CaseIII && (p - 1.0) / (p - r) > 5.0) continue;
        return c;
    }
    return std::nullopt;
}

/// int_a^b f by tanh-sinh (Boost), for finite ranges with endpoint singularities.
template <class F>
double oracle_finite(F f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b, 1e-13);
}

/// int_a^inf f by exp-sinh (Boost).
template <class F>
double oracle_semi_infinite(F f, double a = 0.0) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate([&](double t) { return f(a + t); }, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

}  // namespace ckn::testing
