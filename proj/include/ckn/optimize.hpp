#pragma once

// Independent sharpness oracle: maximize the CKN ratio over a finite family
// of radial profiles without using the extremal formulas.
//
// A candidate is log phi, piecewise linear in log t on log-spaced knots
// t_1 < ... < t_K: constant on [0, t_1], a power law on each
// [t_i, t_{i+1}], and past t_K either the last power law continued to
// infinity or, when r < p, a cutoff (t_K' - t)_+^{(p-1)/(p-r)}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "ckn/engine.hpp"
#include "ckn/errors.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"

namespace ckn {

/// Optimization budget ran out before the simplex converged; carries the
/// best point found so far.
class BudgetExhausted : public NumericalError {
public:
    BudgetExhausted(const std::string& what, double best_value, std::vector<double> best_x)
        : NumericalError(what), best_value(best_value), best_x(std::move(best_x)) {}
    double best_value;
    std::vector<double> best_x;
};

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double initial_step = 0.5;
    double f_tol = 1e-10;
    int restarts = 3;
    std::uint64_t seed = 1;
    /// Throw BudgetExhausted instead of returning the best point.
    bool strict = false;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f by the Nelder-Mead simplex method (standard coefficients).
/// Each restart rebuilds the simplex around the incumbent with randomly
/// signed steps drawn from a seeded generator, so runs are reproducible.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    const std::size_t d = x0.size();
    if (d == 0) throw std::invalid_argument("nelder_mead: empty starting point");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    std::bernoulli_distribution coin(0.5);

    NelderMeadResult best{x0, f(x0), 1, false};
    int evals = 1;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        if (!std::isfinite(v)) v = std::numeric_limits<double>::max();
        if (v < best.value) {
            best.value = v;
            best.x = x;
        }
        return v;
    };

    for (int round = 0; round <= opt.restarts && evals < opt.max_evaluations; ++round) {
        double step = opt.initial_step / (1.0 + round);
        std::vector<std::vector<double>> simplex(d + 1, best.x);
        std::vector<double> vals(d + 1, best.value);
        for (std::size_t i = 0; i < d; ++i) {
            double h = step * (round == 0 ? 1.0 : unif(rng)) * (round > 0 && coin(rng) ? -1.0 : 1.0);
            simplex[i + 1][i] += h;
            vals[i + 1] = eval(simplex[i + 1]);
        }
        std::vector<std::size_t> idx(d + 1);
        bool converged = false;
        while (evals < opt.max_evaluations) {
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
            const std::size_t lo = idx.front(), hi = idx.back(), nh = idx[d - 1];
            if (std::abs(vals[hi] - vals[lo]) <= opt.f_tol * (std::abs(vals[lo]) + opt.f_tol)) {
                converged = true;
                break;
            }
            std::vector<double> centroid(d, 0.0);
            for (std::size_t j = 0; j <= d; ++j)
                if (j != hi)
                    for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[j][i] / d;
            auto along = [&](double coef) {
                std::vector<double> x(d);
                for (std::size_t i = 0; i < d; ++i) x[i] = centroid[i] + coef * (simplex[hi][i] - centroid[i]);
                return x;
            };
            auto xr = along(-1.0);
            double fr = eval(xr);
            if (fr < vals[lo]) {
                auto xe = along(-2.0);
                double fe = eval(xe);
                if (fe < fr) {
                    simplex[hi] = xe;
                    vals[hi] = fe;
                } else {
                    simplex[hi] = xr;
                    vals[hi] = fr;
                }
            } else if (fr < vals[nh]) {
                simplex[hi] = xr;
                vals[hi] = fr;
            } else {
                bool outside = fr < vals[hi];
                auto xc = along(outside ? -0.5 : 0.5);
                double fc = eval(xc);
                if (fc < (outside ? fr : vals[hi])) {
                    simplex[hi] = xc;
                    vals[hi] = fc;
                } else {
                    for (std::size_t j = 0; j <= d; ++j) {
                        if (j == lo) continue;
                        for (std::size_t i = 0; i < d; ++i)
                            simplex[j][i] = simplex[lo][i] + 0.5 * (simplex[j][i] - simplex[lo][i]);
                        vals[j] = eval(simplex[j]);
                    }
                }
            }
        }
        best.converged = converged;
    }
    best.evaluations = evals;
    if (opt.strict && !best.converged)
        throw BudgetExhausted("nelder_mead: evaluation budget exhausted", best.value, best.x);
    return best;
}

// ---------------------------------------------------------------------------
// Piecewise power-law profiles

struct KnotProfileShape {
    std::vector<double> knots;  // increasing, positive
    /// true: compact cutoff past the last knot; false: power-law tail.
    bool compact = false;
    /// Exponent of the cutoff (R - t)_+^e.
    double cutoff_exponent = 1.0;
    /// Cutoff radius as a multiple of the last knot.
    double cutoff_factor = 2.0;
};

/// log phi(t_i) = y_i. A non-decreasing power tail is representable but
/// fails the integrability analysis downstream.
inline RadialProfile make_knot_profile(const KnotProfileShape& shape, const std::vector<double>& y) {
    const std::size_t K = shape.knots.size();
    if (y.size() != K || K < 2) throw std::invalid_argument("make_knot_profile: need one value per knot, K >= 2");
    auto data = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>();
    auto& lt = data->first;
    auto& ly = data->second;
    for (std::size_t i = 0; i < K; ++i) {
        lt.push_back(std::log(shape.knots[i]));
        ly.push_back(y[i]);
    }
    const double tail_slope = (ly[K - 1] - ly[K - 2]) / (lt[K - 1] - lt[K - 2]);
    const double tK = shape.knots.back();
    const double R = shape.compact ? shape.cutoff_factor * tK : std::numeric_limits<double>::infinity();
    const double e = shape.cutoff_exponent;
    const double yK = ly[K - 1];

    // Segment index and slope for log t.
    auto locate = [data](double x, double& slope) -> double {
        const auto& lt = data->first;
        const auto& ly = data->second;
        auto it = std::upper_bound(lt.begin(), lt.end(), x);
        std::size_t j = static_cast<std::size_t>(it - lt.begin());
        if (j == 0) {
            slope = 0.0;
            return ly[0];
        }
        if (j >= lt.size()) j = lt.size() - 1;
        slope = (ly[j] - ly[j - 1]) / (lt[j] - lt[j - 1]);
        return ly[j - 1] + slope * (x - lt[j - 1]);
    };

    RadialProfile out;
    out.kind = ProfileKind::Custom;
    out.label = "knot_profile";
    out.support_radius = R;
    out.scale = std::exp(0.5 * (lt.front() + lt.back()));
    out.breakpoints = shape.knots;
    if (shape.compact) {
        out.eval = [=](double t) {
            if (t >= R) return 0.0;
            if (t <= tK) {
                double s;
                return std::exp(locate(std::log(t), s));
            }
            return std::exp(yK) * std::pow((R - t) / (R - tK), e);
        };
        out.deriv = [=](double t) {
            if (t >= R) return 0.0;
            if (t <= tK) {
                double s;
                double v = std::exp(locate(std::log(t), s));
                return v * s / t;
            }
            return -std::exp(yK) * e * std::pow((R - t) / (R - tK), e - 1.0) / (R - tK);
        };
        const double eval_inner = std::exp(yK);
        auto inner_eval = out.eval;
        auto inner_deriv = out.deriv;
        out.eval_edge = [=](double d) {
            return d < R - tK ? eval_inner * std::pow(d / (R - tK), e) : inner_eval(R - d);
        };
        out.deriv_edge = [=](double d) {
            return d < R - tK ? -eval_inner * e * std::pow(d / (R - tK), e - 1.0) / (R - tK) : inner_deriv(R - d);
        };
        out.asymptotics = {0.0, std::numeric_limits<double>::infinity(), TailKind::Compact, 0.0, 1.0, 0.0, e};
    } else {
        out.eval = [=](double t) {
            double s;
            return std::exp(locate(std::log(t), s));
        };
        out.deriv = [=](double t) {
            double s;
            double v = std::exp(locate(std::log(t), s));
            return v * s / t;
        };
        out.log_eval = [=](double t) {
            double s;
            return locate(std::log(t), s);
        };
        out.log_deriv = [=](double t) {
            double s;
            double lv = locate(std::log(t), s);
            return lv + std::log(std::abs(s)) - std::log(t);
        };
        out.asymptotics = {0.0, std::numeric_limits<double>::infinity(), TailKind::Power, 0.0, 1.0, -tail_slope,
                           std::numeric_limits<double>::infinity()};
    }
    return out;
}

/// Characteristic radius of the extremal family for the parameters, when
/// one exists (lambda = 1, amplitude 1).
inline double extremal_scale(const CknParams& c) {
    SharpnessCase k = classify_sharpness_case(c);
    switch (k) {
        case SharpnessCase::CaseI:
        case SharpnessCase::CaseII:
        case SharpnessCase::CaseIV:
        case SharpnessCase::CaseV: return 1.0;
        case SharpnessCase::CaseIII: return std::exp(1.0);
        case SharpnessCase::NotCovered: break;
    }
    return 0.0;
}

struct OptimizeResult {
    double best_ratio = 0.0;
    RadialProfile best_profile;
    std::vector<double> best_values;
    KnotProfileShape shape;
    int evaluations = 0;
};

struct OptimizeOptions {
    int n_knots = 16;
    int budget = 20000;
    std::uint64_t seed = 1;
    int restarts = 10;
    double rel_tol = 1e-8;
    bool strict = false;
};

/// Knot layout: log-spaced on a window around the extremal scale L; the
/// window reaches further out for families with a power-law tail.
inline KnotProfileShape default_knot_shape(const CknParams& c, int n_knots) {
    if (n_knots < 4) throw std::invalid_argument("optimize_ratio: n_knots must be >= 4");
    const double L = extremal_scale(c);
    double lo = 1e-3, hi = 10.0;
    KnotProfileShape shape;
    const bool below = c.r() < c.p() - kCriticalTol;
    if (L > 0.0) {
        const bool power_tail = c.r() > c.p() + kCriticalTol;
        lo = (power_tail ? 1e-2 : 1e-1) * L;
        hi = (power_tail ? 1e2 : 3.0) * L;
    }
    if (below) {
        shape.compact = true;
        shape.cutoff_exponent = (c.p() - 1.0) / (c.p() - c.r());
        shape.cutoff_factor = 1.25;
        if (L > 0.0) hi = 0.8 * L;
    }
    for (int i = 0; i < n_knots; ++i)
        shape.knots.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n_knots - 1)));
    return shape;
}

/// Maximizes the CKN ratio over knot profiles. The start is a generic
/// decreasing profile, log phi = -t / L, not the extremal.
inline OptimizeResult optimize_ratio(const CknParams& c, const ModelSpace& space, const OptimizeOptions& opt = {}) {
    OptimizeResult out;
    out.shape = default_knot_shape(c, opt.n_knots);
    if (!space.flat() && !out.shape.compact) {
        // A power tail never integrates against exponential volume growth.
        out.shape.compact = true;
        out.shape.cutoff_exponent = 2.0;
        out.shape.cutoff_factor = 1.25;
    }
    const double L = std::max(extremal_scale(c), 1.0);
    std::vector<double> y0;
    for (double t : out.shape.knots) y0.push_back(-t / L);

    EngineOptions eopt;
    eopt.quad.rel_tol = opt.rel_tol;
    eopt.quad.abs_tol = 0.0;
    eopt.quad.strict = false;
    const double worst = 1e6;
    auto objective = [&](const std::vector<double>& y) {
        try {
            RadialProfile phi = make_knot_profile(out.shape, y);
            double r = ckn_ratio(c, space, phi, eopt);
            return std::isfinite(r) ? -r : worst;
        } catch (const NumericalError&) {
            return worst;
        }
    };
    NelderMeadOptions nm;
    nm.max_evaluations = opt.budget;
    nm.seed = opt.seed;
    nm.restarts = opt.restarts;
    nm.strict = false;
    NelderMeadResult res = nelder_mead(objective, y0, nm);
    out.best_values = res.x;
    out.best_ratio = -res.value;
    out.best_profile = make_knot_profile(out.shape, res.x);
    out.evaluations = res.evaluations;
    if (opt.strict && !res.converged)
        throw BudgetExhausted("optimize_ratio: evaluation budget exhausted", out.best_ratio, res.x);
    return out;
}

/// Ratios of phi(t / 2^k), k = 0..levels-1, on the given space.
inline std::vector<double> shrinking_support_ratios(const CknParams& c, const ModelSpace& space,
                                                    const RadialProfile& base, int levels = 7,
                                                    const EngineOptions& opt = default_engine_options()) {
    std::vector<double> ratios;
    for (int k = 0; k < levels; ++k) ratios.push_back(ckn_ratio(c, space, dilate(base, std::ldexp(1.0, -k)), opt));
    return ratios;
}

}  // namespace ckn
