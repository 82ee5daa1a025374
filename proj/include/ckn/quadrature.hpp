#pragma once

// Adaptive Gauss-Kronrod (7/15) integration on [lower, upper] with
// algebraic endpoint singularities and semi-infinite ranges.
//
// The range is cut into pieces at the user breakpoints. A piece touching a
// singular finite endpoint is mapped by a power substitution
//     t = a + (b - a) u^k,   k = max(1, 2 / (1 + sigma)),
// which turns t^sigma into an integrand vanishing like u^{k(1+sigma)-1}.
// When 1 + sigma is close to 0 a visible share of the mass sits below the
// smallest double; the lower end then uses t = a + w exp(-K(1 - u)) down to
// a + w e^{-K} and the remaining sliver is taken from the leading power.
// The unbounded piece [c, inf) is mapped by t = c / v (or c / v^k for a
// slowly decaying power tail). All panels of all
// pieces share one error budget and are refined largest-error-first.
// Vector-valued integrands are refined on one partition shared by all
// components.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ckn/errors.hpp"

namespace ckn {

enum class DecayHint { Compact, Exponential, StretchedExponential, Power };

struct QuadSpec {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    /// Integrand behaves like (t - lower)^sigma near lower; must exceed -1.
    double singular_power_at_lower = 0.0;
    /// Same for a finite upper endpoint, (upper - t)^sigma.
    double singular_power_at_upper = 0.0;
    /// For upper = inf: integrand decays like exp(-decay_rate t^decay_shape)
    /// (Exponential uses shape 1) or like a power of t.
    DecayHint decay = DecayHint::Exponential;
    double decay_rate = 1.0;
    double decay_shape = 1.0;
    /// Power: integrand decays like t^{-decay_power}; must exceed 1.
    double decay_power = 2.0;
    /// Explicit anchor for the tail mapping; 0 means derive it from the decay.
    double scale = 0.0;
    /// Interior points where the integrand is not smooth.
    std::vector<double> breakpoints;
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    /// Per-component override of abs_tol for vector integrands.
    std::vector<double> component_abs_tol;
    int max_subdivisions = 2000;
    /// Throw NonConvergence when the budget runs out (otherwise converged=false).
    bool strict = true;
};

struct IntegralResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    bool converged = false;
    int subdivisions = 0;
};

/// Length scale L at which the tail mapping t = L / v is anchored.
inline double tail_scale(const QuadSpec& spec) {
    if (spec.scale > 0.0) return spec.scale;
    switch (spec.decay) {
        case DecayHint::Exponential:
            return spec.decay_rate > 0.0 ? 1.0 / spec.decay_rate : 1.0;
        case DecayHint::StretchedExponential:
            return (spec.decay_rate > 0.0 && spec.decay_shape > 0.0)
                       ? std::pow(spec.decay_rate, -1.0 / spec.decay_shape)
                       : 1.0;
        case DecayHint::Compact:
        case DecayHint::Power:
            return 1.0;
    }
    return 1.0;
}

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467263506242,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class MapKind { Linear, PowerLower, PowerUpper, LogLower, Tail };

struct Piece {
    MapKind kind;
    double a;  // Linear/Power: [a, b]; Tail: anchor c (t = c / v)
    double b;  // Tail: power a of a t^{-a} tail, else 0
    double k;  // power-map exponent; LogLower: log of the width ratio
};

// Below this value of 1 + sigma the power map would push a visible part of
// the mass under the smallest double; the log map is used instead.
inline constexpr double kLogMapThreshold = 0.05;
// LogLower resolves [a + w e^{-k}, b] and treats the rest analytically.
inline constexpr double kLogMapDepth = 640.0;

inline double abs_tol_of(const QuadSpec& spec, std::size_t c) {
    return c < spec.component_abs_tol.size() ? spec.component_abs_tol[c] : spec.abs_tol;
}

template <std::size_t N>
struct Panel {
    std::size_t piece;
    double u0;
    double u1;
    std::array<double, N> value;
    std::array<double, N> error;
    double priority;
};

struct PanelLess {
    template <class P>
    bool operator()(const P& x, const P& y) const {
        if (x.priority != y.priority) return x.priority < y.priority;
        if (x.piece != y.piece) return x.piece > y.piece;
        return x.u0 > y.u0;
    }
};

// t(u) and dt/du for a piece; u ranges over [0, 1].
inline void map_point(const Piece& pc, double u, double& t, double& jac) {
    switch (pc.kind) {
        case MapKind::Linear:
            t = pc.a + (pc.b - pc.a) * u;
            jac = pc.b - pc.a;
            return;
        case MapKind::PowerLower: {
            double uk = std::pow(u, pc.k);
            t = pc.a + (pc.b - pc.a) * uk;
            jac = (pc.b - pc.a) * pc.k * (u > 0.0 ? uk / u : 0.0);
            return;
        }
        case MapKind::PowerUpper: {
            double uk = std::pow(u, pc.k);
            t = pc.b - (pc.b - pc.a) * uk;
            jac = (pc.b - pc.a) * pc.k * (u > 0.0 ? uk / u : 0.0);
            return;
        }
        case MapKind::LogLower: {
            double w = pc.b - pc.a;
            double e = w * std::exp(-pc.k * (1.0 - u));
            t = pc.a + e;
            jac = pc.k * e;
            return;
        }
        case MapKind::Tail: {
            double uk = pc.k == 1.0 ? u : std::pow(u, pc.k);
            t = pc.a / uk;
            jac = pc.a * pc.k / (uk * u);
            return;
        }
    }
}

// Beyond this point a t^{-a} tail is continued from its value at the cap.
inline constexpr double kTailCap = 1e300;

template <std::size_t N, class F>
std::array<double, N> extrapolate_tail(F& f, const Piece& pc, double u) {
    std::array<double, N> v{};
    if (u <= 0.0) return v;
    const std::array<double, N> y = f(kTailCap);
    const double log_t = std::log(pc.a) - pc.k * std::log(u);
    const double log_jac = std::log(pc.a * pc.k) - (pc.k + 1.0) * std::log(u);
    for (std::size_t i = 0; i < N; ++i) {
        if (y[i] == 0.0 || !std::isfinite(y[i])) continue;
        v[i] = std::copysign(std::exp(std::log(std::abs(y[i])) - pc.b * (log_t - std::log(kTailCap)) + log_jac), y[i]);
    }
    return v;
}

template <std::size_t N, class F>
std::array<double, N> eval_mapped(F& f, const Piece& pc, double u) {
    std::array<double, N> v{};
    double t = 0.0, jac = 0.0;
    map_point(pc, u, t, jac);
    if (pc.kind == MapKind::Tail && pc.b > 0.0 && !(t < kTailCap)) return extrapolate_tail<N>(f, pc, u);
    if (jac == 0.0 || !std::isfinite(t)) return v;
    const std::array<double, N> y = f(t);
    for (std::size_t i = 0; i < N; ++i) {
        if (y[i] == 0.0) continue;
        v[i] = y[i] * jac;
        // Far out on a tail map the Jacobian overflows while f underflows.
        if (!std::isfinite(v[i]) && pc.kind == MapKind::Tail && std::isfinite(y[i]))
            v[i] = std::copysign(std::exp(std::log(std::abs(y[i])) + std::log(pc.a * pc.k) - (pc.k + 1.0) * std::log(u)),
                                 y[i]);
        if (!std::isfinite(v[i])) {
            std::ostringstream msg;
            msg << "integrate: integrand not finite at t=" << t << " (f=" << y[i] << ")";
            throw NumericalError(msg.str());
        }
    }
    return v;
}

template <std::size_t N, class F>
Panel<N> gauss_kronrod_panel(F& f, std::size_t piece_index, const Piece& pc, double u0, double u1) {
    const double center = 0.5 * (u0 + u1);
    const double half = 0.5 * (u1 - u0);
    const auto fc = eval_mapped<N>(f, pc, center);
    std::array<std::array<double, N>, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        double dx = half * kKronrodNodes[j];
        f1[j] = eval_mapped<N>(f, pc, center - dx);
        f2[j] = eval_mapped<N>(f, pc, center + dx);
    }
    Panel<N> out{piece_index, u0, u1, {}, {}, 0.0};
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < N; ++i) {
        double kronrod = fc[i] * kKronrodWeights[7];
        double gauss = fc[i] * kGaussWeights[3];
        double resabs = std::abs(kronrod);
        for (int j = 0; j < 7; ++j) {
            kronrod += kKronrodWeights[j] * (f1[j][i] + f2[j][i]);
            resabs += kKronrodWeights[j] * (std::abs(f1[j][i]) + std::abs(f2[j][i]));
            if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j][i] + f2[j][i]);
        }
        const double mean = 0.5 * kronrod;
        double resasc = kKronrodWeights[7] * std::abs(fc[i] - mean);
        for (int j = 0; j < 7; ++j)
            resasc += kKronrodWeights[j] * (std::abs(f1[j][i] - mean) + std::abs(f2[j][i] - mean));
        resabs *= std::abs(half);
        resasc *= std::abs(half);
        double err = std::abs((kronrod - gauss) * half);
        if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
        out.value[i] = kronrod * half;
        out.error[i] = err;
    }
    return out;
}

inline double power_map_exponent(double sigma) {
    if (sigma >= 1.0) return 1.0;
    return std::max(1.0, 2.0 / (1.0 + sigma));
}

}  // namespace detail

template <std::size_t N>
struct VectorIntegral {
    std::array<double, N> value{};
    std::array<double, N> abs_error_estimate{};
    bool converged = false;
    int subdivisions = 0;
};

/// Integrates the components of a vector-valued f on one shared partition:
/// every component sees the same nodes and weights, and refinement runs
/// until each meets the tolerance. Linear relations between components then
/// hold for the computed values up to rounding.
template <std::size_t N, class F>
VectorIntegral<N> integrate_vector(F&& f, const QuadSpec& spec) {
    using namespace detail;
    using P = Panel<N>;
    if (!(spec.lower >= 0.0) || !std::isfinite(spec.lower))
        throw std::invalid_argument("integrate: lower must be finite and nonnegative");
    if (!(spec.upper > spec.lower)) throw std::invalid_argument("integrate: empty range");
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol >= 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    if (!(spec.singular_power_at_lower > -1.0) || !(spec.singular_power_at_upper > -1.0))
        throw SingularityTooStrong("integrate: endpoint singularity t^sigma with sigma <= -1");

    const bool finite_upper = std::isfinite(spec.upper);

    // Cut points.
    std::vector<double> cuts{spec.lower};
    for (double bp : spec.breakpoints)
        if (bp > spec.lower && bp < spec.upper && std::isfinite(bp)) cuts.push_back(bp);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (!finite_upper) {
        double anchor = spec.lower + tail_scale(spec);
        if (anchor > cuts.back()) cuts.push_back(anchor);
    } else {
        cuts.push_back(spec.upper);
    }

    // Numerical probe of the lower endpoint exponent. Deep probe points keep
    // logarithmic factors from passing for a stronger power.
    {
        double width = cuts[1] - cuts[0];
        double t1 = spec.lower + 1e-60 * width, t2 = spec.lower + 1e-80 * width;
        if (!(t2 > spec.lower)) {
            t1 = spec.lower + 1e-7 * width;
            t2 = spec.lower + 1e-9 * width;
        }
        const std::array<double, N> y1 = f(t1), y2 = f(t2);
        for (std::size_t i = 0; i < N; ++i) {
            if (std::isfinite(y1[i]) && std::isfinite(y2[i]) && y1[i] > 0.0 && y2[i] > 0.0) {
                double est = std::log(y2[i] / y1[i]) / std::log((t2 - spec.lower) / (t1 - spec.lower));
                if (est <= -1.0 - 1e-3)
                    throw SingularityTooStrong("integrate: probe detected non-integrable endpoint growth");
            }
        }
    }

    std::vector<Piece> pieces;
    const std::size_t nfinite = cuts.size() - 1;
    const bool log_lower = spec.singular_power_at_lower < -1.0 + kLogMapThreshold;
    for (std::size_t i = 0; i < nfinite; ++i) {
        double a = cuts[i], b = cuts[i + 1];
        bool sing_lo = (i == 0) && spec.singular_power_at_lower < 1.0;
        bool sing_hi = finite_upper && (i + 1 == nfinite) && spec.singular_power_at_upper < 1.0;
        Piece lower_piece{MapKind::PowerLower, a, b, power_map_exponent(spec.singular_power_at_lower)};
        if (sing_lo && log_lower) {
            lower_piece.kind = MapKind::LogLower;
            lower_piece.k = kLogMapDepth;
        }
        if (sing_lo && sing_hi) {
            double m = 0.5 * (a + b);
            lower_piece.b = m;
            pieces.push_back(lower_piece);
            pieces.push_back({MapKind::PowerUpper, m, b, power_map_exponent(spec.singular_power_at_upper)});
        } else if (sing_lo) {
            pieces.push_back(lower_piece);
        } else if (sing_hi) {
            pieces.push_back({MapKind::PowerUpper, a, b, power_map_exponent(spec.singular_power_at_upper)});
        } else {
            pieces.push_back({MapKind::Linear, a, b, 1.0});
        }
    }
    if (!finite_upper) {
        // t = c u^{-k} turns a t^{-a} tail into u^{k(a-1)-1}.
        double k = 1.0;
        if (spec.decay == DecayHint::Power) {
            if (!(spec.decay_power > 1.0))
                throw SingularityTooStrong("integrate: power tail t^{-a} needs a > 1");
            k = std::max(1.0, 2.0 / (spec.decay_power - 1.0));
        }
        // b carries the tail power (0 when the tail is not a power law).
        pieces.push_back({MapKind::Tail, cuts.back(), spec.decay == DecayHint::Power ? spec.decay_power : 0.0, k});
    }

    // Contribution of [lower, lower + eps] for a log-mapped lower end:
    // f ~ g (t - lower)^sigma with g constant there.
    std::array<double, N> sliver{};
    if (!pieces.empty() && pieces.front().kind == MapKind::LogLower) {
        const Piece& pc = pieces.front();
        double eps = (pc.b - pc.a) * std::exp(-pc.k);
        const std::array<double, N> y = f(pc.a + eps);
        for (std::size_t i = 0; i < N; ++i)
            if (std::isfinite(y[i])) sliver[i] = y[i] * eps / (1.0 + spec.singular_power_at_lower);
    }

    std::array<double, N> total = sliver, total_err{};
    std::vector<P> initial;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        P p = gauss_kronrod_panel<N>(f, i, pieces[i], 0.0, 1.0);
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += p.value[c];
            total_err[c] += p.error[c];
        }
        initial.push_back(p);
    }
    // Panels are refined in order of their error relative to the size of
    // each component, fixed from the first pass.
    std::array<double, N> weight{};
    for (std::size_t c = 0; c < N; ++c) {
        double scale = std::max(std::abs(total[c]), abs_tol_of(spec, c) / spec.rel_tol);
        weight[c] = scale > 0.0 ? 1.0 / scale : 1.0;
    }
    auto priority = [&](P& p) {
        p.priority = 0.0;
        for (std::size_t c = 0; c < N; ++c) p.priority += p.error[c] * weight[c];
    };
    std::priority_queue<P, std::vector<P>, PanelLess> queue;
    for (P& p : initial) {
        priority(p);
        queue.push(p);
    }
    std::vector<P> frozen;

    int subdivisions = 0;
    auto pending = [&] {
        for (std::size_t c = 0; c < N; ++c)
            if (total_err[c] > std::max(abs_tol_of(spec, c), spec.rel_tol * std::abs(total[c]))) return true;
        return false;
    };
    while (pending() && !queue.empty() && subdivisions < spec.max_subdivisions) {
        P worst = queue.top();
        queue.pop();
        double mid = 0.5 * (worst.u0 + worst.u1);
        if (!(mid > worst.u0) || !(mid < worst.u1) ||
            (worst.u1 - worst.u0) < 8.0 * std::numeric_limits<double>::epsilon() * std::abs(mid)) {
            frozen.push_back(worst);
            continue;
        }
        const Piece& pc = pieces[worst.piece];
        P left = gauss_kronrod_panel<N>(f, worst.piece, pc, worst.u0, mid);
        P right = gauss_kronrod_panel<N>(f, worst.piece, pc, mid, worst.u1);
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += left.value[c] + right.value[c] - worst.value[c];
            total_err[c] += left.error[c] + right.error[c] - worst.error[c];
        }
        priority(left);
        priority(right);
        queue.push(left);
        queue.push(right);
        ++subdivisions;
    }

    // Deterministic final accumulation in panel order (Neumaier summation).
    std::vector<P> all = std::move(frozen);
    while (!queue.empty()) {
        all.push_back(queue.top());
        queue.pop();
    }
    std::sort(all.begin(), all.end(), [](const P& x, const P& y) {
        return x.piece != y.piece ? x.piece < y.piece : x.u0 < y.u0;
    });
    VectorIntegral<N> out;
    out.converged = true;
    out.subdivisions = subdivisions;
    for (std::size_t c = 0; c < N; ++c) {
        double sum = sliver[c], comp = 0.0, err = 0.0;
        for (const P& p : all) {
            double t = sum + p.value[c];
            comp += std::abs(sum) >= std::abs(p.value[c]) ? (sum - t) + p.value[c] : (p.value[c] - t) + sum;
            sum = t;
            err += p.error[c];
        }
        out.value[c] = sum + comp;
        out.abs_error_estimate[c] = err;
        if (!(err <= std::max(abs_tol_of(spec, c), spec.rel_tol * std::abs(out.value[c])))) out.converged = false;
    }
    if (!out.converged && spec.strict) {
        std::ostringstream msg;
        msg << "integrate: no convergence after " << subdivisions << " subdivisions (value";
        for (std::size_t c = 0; c < N; ++c) msg << " " << out.value[c];
        msg << ", error estimate";
        for (std::size_t c = 0; c < N; ++c) msg << " " << out.abs_error_estimate[c];
        msg << ")";
        throw NonConvergence(msg.str());
    }
    return out;
}

/// Integrates f over spec.lower..spec.upper. f must be finite on the open
/// range; it is never evaluated at a singular endpoint.
template <class F>
IntegralResult integrate(F&& f, const QuadSpec& spec) {
    auto r = integrate_vector<1>([&](double t) { return std::array<double, 1>{f(t)}; }, spec);
    IntegralResult out;
    out.value = r.value[0];
    out.abs_error_estimate = r.abs_error_estimate[0];
    out.converged = r.converged;
    out.subdivisions = r.subdivisions;
    return out;
}

}  // namespace ckn
