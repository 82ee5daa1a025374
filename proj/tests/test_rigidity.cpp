#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ckn/rigidity.hpp"
#include "support.hpp"

using namespace ckn;
using ckn::testing::Gen;
using ckn::testing::kPi;
using ckn::testing::rel_err;

namespace {
const CknParams kHpw = CknParams::make(3, 2, 2, 0, -2);
const CknParams kCaseII = CknParams::make(3, 2, 0.5, 0, 0);

double sphere_area(int n) { return 2.0 * std::pow(kPi, n / 2.0) / boost::math::tgamma(n / 2.0); }

// n omega_n int_0^inf e^{-p lambda t^s} t^{n-1-gamma p} dt
double t_exp_oracle(const CknParams& c, double lambda) {
    const double k = c.n() - 1.0 - c.gamma() * c.p();
    return sphere_area(c.n()) * ckn::testing::oracle_semi_infinite([&](double t) {
               return t == 0.0 ? 0.0 : std::exp(-c.p() * lambda * std::pow(t, c.s()) + k * std::log(t));
           });
}

// n omega_n int_0^{lambda^{1/s}} (lambda - t^s)^{r(p-1)/(p-r)} t^{n-1-gamma r} dt
double t_compact_oracle(const CknParams& c, double lambda) {
    const double e = c.r() * (c.p() - 1.0) / (c.p() - c.r());
    const double k = c.n() - 1.0 - c.gamma() * c.r();
    const double R = std::pow(lambda, 1.0 / c.s());
    return sphere_area(c.n()) * ckn::testing::oracle_finite(
                                    [&](double t) {
                                        double base = lambda - std::pow(t, c.s());
                                        return base > 0.0 && t > 0.0 ? std::pow(base, e) * std::pow(t, k) : 0.0;
                                    },
                                    0.0, R);
}
}  // namespace

TEST(TLambdaExp, Examples) {
    EXPECT_LT(rel_err(t_lambda_exp(kHpw, 1.0), std::pow(kPi / 2.0, 1.5)), 1e-13);
    EXPECT_NEAR(t_lambda_exp(kHpw, 1.0), 1.9687012, 1e-7);
    EXPECT_LT(rel_err(t_lambda_exp(kHpw, 4.0), std::pow(kPi / 8.0, 1.5)), 1e-13);
    EXPECT_LT(rel_err(t_lambda_exp(kHpw, 0.37), t_exp_oracle(kHpw, 0.37)), 1e-9);
}

TEST(TLambdaExp, Rejects) {
    EXPECT_THROW(t_lambda_exp(kCaseII, 1.0), std::invalid_argument);                       // r != p
    EXPECT_THROW(t_lambda_exp(CknParams::make(3, 2, 2, -0.5, 2), 1.0), std::invalid_argument);  // s < 0
    EXPECT_THROW(t_lambda_exp(kHpw, 0.0), std::invalid_argument);
}

TEST(TLambdaCompact, Examples) {
    const double want = 4.0 * kPi * boost::math::beta(4.0 / 3.0, 2.0);
    EXPECT_LT(rel_err(t_lambda_compact(kCaseII, 1.0), want), 1e-13);
    EXPECT_LT(rel_err(t_lambda_compact(kCaseII, 1.0), 4.0 * kPi * 9.0 / 28.0), 1e-13);
    EXPECT_LT(rel_err(t_compact_oracle(kCaseII, 1.0), want), 1e-9);
    EXPECT_LT(rel_err(t_lambda_compact(kCaseII, 2.0) / t_lambda_compact(kCaseII, 1.0), std::pow(2.0, 7.0 / 3.0)), 1e-13);
    EXPECT_LT(t_lambda_compact(kCaseII, 1e-6), 1e-12);
    EXPECT_THROW(t_lambda_compact(kHpw, 1.0), std::invalid_argument);
    EXPECT_THROW(t_lambda_compact(CknParams::make(3, 2, 0.5, 0, 2.5), 1.0), std::invalid_argument);  // s < 0
}

TEST(TLambda, ClosedFormsAgainstOracleOnRandomParameters) {
    Gen g(81);
    for (int i = 0; i < 40; ++i) {
        int n = g.integer(2, 6);
        double p = g.uniform(1.2, 4.0), alpha = g.uniform(-0.5, 1.0);
        double beta = g.uniform(-2.0, p * (1.0 + alpha) - 0.3);  // s >= 0.3 / p
        double lambda = g.log_uniform(0.05, 20.0);
        auto ce = CknParams::make(n, p, p, alpha, beta);
        if (n - ce.gamma() * p > 0.2) {
            EXPECT_LT(rel_err(t_lambda_exp(ce, lambda), t_exp_oracle(ce, lambda)), 1e-9) << ce;
        }
        auto cc = CknParams::make(n, p, g.uniform(0.3, p - 0.2), alpha, beta);
        if (cc.lhs_homogeneity() > 0.2 && cc.s() > 0.0) {
            EXPECT_LT(rel_err(t_lambda_compact(cc, lambda), t_compact_oracle(cc, lambda)), 1e-9) << cc;
        }
    }
}

TEST(DeltaExponent, Examples) {
    EXPECT_NEAR(delta_exponent(kCaseII), 7.0 / 3.0, 1e-14);
    // (3 - 1)/1 + 3 * 1/(2 - 3)
    EXPECT_NEAR(delta_exponent(CknParams::make(3, 2, 3, 0, 0)), -1.0, 1e-14);
    EXPECT_THROW(delta_exponent(CknParams::make(3, 2, 0.5, 0, 2)), std::invalid_argument);  // s = 0
    EXPECT_THROW(delta_exponent(kHpw), std::invalid_argument);                             // r = p
}

TEST(OdeT, Examples) {
    EXPECT_LE(std::abs(ode_t_residual(kHpw, 1.0, RigidityCase::Exp)), 1e-6);
    EXPECT_LE(std::abs(ode_t_residual(kCaseII, 2.0, RigidityCase::Compact)), 1e-6);
    double a = ode_t_residual(kHpw, 10.0, RigidityCase::Exp), b = ode_t_residual(kHpw, 0.1, RigidityCase::Exp);
    EXPECT_LE(std::abs(a), 1e-6);
    EXPECT_LE(std::abs(b), 1e-6);
    // relative residual of a pure power law does not depend on the scale
    EXPECT_NEAR(a, b, 1e-9);
}

TEST(OdeT, SmallOnLogGrids) {
    for (double lambda : log_grid(1e-2, 1e2, 20)) {
        EXPECT_LE(std::abs(ode_t_residual(kHpw, lambda, RigidityCase::Exp)), 1e-6) << lambda;
        EXPECT_LE(std::abs(ode_t_residual(kCaseII, lambda, RigidityCase::Compact)), 1e-6) << lambda;
    }
}

TEST(FLambda, EqualsTOnEuclideanSpace) {
    for (double lambda : log_grid(1e-2, 1e2, 20)) {
        EXPECT_LT(rel_err(f_lambda(kHpw, ModelSpace(3, 0.0), lambda, RigidityCase::Exp).value,
                          t_lambda_exp(kHpw, lambda)),
                  1e-9)
            << lambda;
        EXPECT_LT(rel_err(f_lambda(kCaseII, ModelSpace(3, 0.0), lambda, RigidityCase::Compact).value,
                          t_lambda_compact(kCaseII, lambda)),
                  1e-9)
            << lambda;
    }
}

TEST(FLambda, HyperbolicGaussianClosedForm) {
    // 4 pi int e^{-2 t^2} sinh^2 t dt = pi sqrt(pi/2) (sqrt(e) - 1)
    const double want = kPi * std::sqrt(kPi / 2.0) * (std::sqrt(std::exp(1.0)) - 1.0);
    auto F = f_lambda(kHpw, ModelSpace(3, 1.0), 1.0, RigidityCase::Exp);
    EXPECT_LT(rel_err(F.value, want), 1e-10);
    EXPECT_GT(F.value, t_lambda_exp(kHpw, 1.0));
    EXPECT_NEAR(F.value / t_lambda_exp(kHpw, 1.0), 2.0 * (std::sqrt(std::exp(1.0)) - 1.0), 1e-10);
}

TEST(FLambda, VolumeGrowthGuard) {
    // s = 1/2: e^{-2 lambda sqrt t} never beats e^{2t}
    auto slow = CknParams::make(3, 2, 2, 0, 1);
    ASSERT_NEAR(slow.s(), 0.5, 1e-15);
    EXPECT_THROW(f_lambda(slow, ModelSpace(3, 1.0), 5.0, RigidityCase::Exp), NonIntegrable);
    EXPECT_NO_THROW(f_lambda(slow, ModelSpace(3, 0.0), 5.0, RigidityCase::Exp));
    // s = 1: needs p lambda > (n - 1) sqrt(b) = 2
    auto lin = CknParams::make(3, 2, 2, 0, 0);
    EXPECT_THROW(f_lambda(lin, ModelSpace(3, 1.0), 0.9, RigidityCase::Exp), NonIntegrable);
    EXPECT_THROW(f_lambda(lin, ModelSpace(3, 1.0), 1.0, RigidityCase::Exp), NonIntegrable);
    EXPECT_NO_THROW(f_lambda(lin, ModelSpace(3, 1.0), 1.5, RigidityCase::Exp));
    EXPECT_THROW(f_lambda(kHpw, ModelSpace(4, 1.0), 1.0, RigidityCase::Exp), std::invalid_argument);
}

TEST(FLambda, AboveTOnCurvedSpaces) {
    Gen g(82);
    for (int i = 0; i < 30; ++i) {
        double b = g.uniform(0.1, 4.0), lambda = g.log_uniform(0.05, 20.0);
        EXPECT_GE(f_lambda(kCaseII, ModelSpace(3, b), lambda, RigidityCase::Compact).value,
                  t_lambda_compact(kCaseII, lambda))
            << b << " " << lambda;
        EXPECT_GE(f_lambda(kHpw, ModelSpace(3, b), lambda, RigidityCase::Exp).value, t_lambda_exp(kHpw, lambda))
            << b << " " << lambda;
    }
}

TEST(GDerivative, ToyExamples) {
    auto id = [](double x) { return x; };
    auto mu = interval_measure(0.0, 1.0);
    auto d = g_derivative_terms(2.0, id, mu, 0.5);
    EXPECT_NEAR(d.formula, 0.25, 1e-12);
    EXPECT_LE(std::abs(d.residual), 1e-7);
    // G = (2/3) lambda^{3/2}, G' = sqrt(lambda)
    auto h = g_derivative_terms(0.5, id, mu, 0.5);
    EXPECT_NEAR(h.formula, std::sqrt(0.5), 1e-10);
    EXPECT_LE(std::abs(h.residual), 1e-6);
    EXPECT_THROW(g_derivative_check(1.0, id, mu, 0.5), std::invalid_argument);
    EXPECT_THROW(g_derivative_check(0.0, id, mu, 0.5), std::invalid_argument);
}

TEST(GDerivative, AllExponentsOnToyAndRadialMeasures) {
    auto sq = [](double x) { return x * x; };
    for (double q : {1.0 / 3.0, 0.5, 2.0, 3.0}) {
        for (double lambda : {0.1, 0.5, 0.9})
            EXPECT_LE(std::abs(g_derivative_check(q, sq, interval_measure(0.0, 1.0), lambda)), 1e-6) << q;
        for (double b : {0.0, 1.0}) {
            auto mu = radial_measure(ModelSpace(3, b), -0.5, 4.0);
            double res = g_derivative_check(q, [](double t) { return std::pow(t, 1.5); }, mu, 2.0);
            double scale = g_derivative_terms(q, [](double t) { return std::pow(t, 1.5); }, mu, 2.0).formula;
            EXPECT_LE(std::abs(res), 1e-6 * std::max(1.0, scale)) << q << " b=" << b;
        }
    }
}

TEST(GDerivative, IsTheDerivativeOfF) {
    // F(lambda) in the compact case is G with q = r(p-1)/(p-r), f = t^s and
    // the radial measure with weight t^{-gamma r}.
    const double q = 1.0 / 3.0, lambda = 1.0, h = 1e-4;
    for (double b : {0.0, 1.0}) {
        ModelSpace m(3, b);
        auto mu = radial_measure(m, -kCaseII.gamma() * kCaseII.r(), 10.0);
        auto d = g_derivative_terms(q, [](double t) { return t; }, mu, lambda);
        double fd = (f_lambda(kCaseII, m, lambda + h, RigidityCase::Compact).value -
                     f_lambda(kCaseII, m, lambda - h, RigidityCase::Compact).value) /
                    (2.0 * h);
        EXPECT_LT(rel_err(d.formula, fd), 1e-7) << b;
    }
}

TEST(Scan, EuclideanRatiosAreOne) {
    auto e = ft_ratio_scan(kHpw, ModelSpace(3, 0.0), log_grid(0.1, 10.0, 8), RigidityCase::Exp);
    auto c = ft_ratio_scan(kCaseII, ModelSpace(3, 0.0), log_grid(0.1, 10.0, 8), RigidityCase::Compact);
    for (const auto* s : {&e, &c}) {
        EXPECT_TRUE(s->all_ok());
        EXPECT_TRUE(s->ratios_equal_one(1e-9));
        ASSERT_EQ(s->t_values.size(), 8u);
        ASSERT_EQ(s->f_values.size(), 8u);
        ASSERT_EQ(s->ratio_values.size(), 8u);
    }
    EXPECT_THROW(ft_ratio_scan(kHpw, ModelSpace(3, 0.0), {1.0, 0.5}, RigidityCase::Exp), std::invalid_argument);
}

TEST(Scan, CompactCaseOnHyperbolicSpace) {
    auto s = ft_ratio_scan(kCaseII, ModelSpace(3, 1.0), log_grid(1e-2, 10.0, 16), RigidityCase::Compact);
    EXPECT_TRUE(s.all_ok());
    EXPECT_TRUE(s.ratios_at_least_one(0.0));
    EXPECT_FALSE(s.ratios_equal_one(1e-6));
    EXPECT_TRUE(s.ratios_monotone(true));
    // F/T - 1 = O(lambda^{2/s}) as lambda -> 0
    EXPECT_LT(s.ratio_values.front() - 1.0, 1e-4);
}

TEST(Scan, ExpCaseOnHyperbolicSpace) {
    auto s = ft_ratio_scan(kHpw, ModelSpace(3, 1.0), log_grid(0.5, 50.0, 12), RigidityCase::Exp);
    EXPECT_TRUE(s.all_ok());
    EXPECT_TRUE(s.ratios_at_least_one(0.0));
    EXPECT_LT(s.ratio_values.back(), s.ratio_values.front());
    EXPECT_LT(s.ratio_values.back() - 1.0, 0.05);
}

TEST(Scan, MarksNonIntegrablePoints) {
    auto lin = CknParams::make(3, 2, 2, 0, 0);
    auto s = ft_ratio_scan(lin, ModelSpace(3, 1.0), {0.5, 2.0}, RigidityCase::Exp);
    EXPECT_FALSE(s.all_ok());
    EXPECT_NE(s.status[0], "ok");
    EXPECT_TRUE(std::isnan(s.ratio_values[0]));
    EXPECT_EQ(s.status[1], "ok");
    EXPECT_GT(s.ratio_values[1], 1.0);
}
