#include "xscreen/sensbound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace xscreen {

double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / 1.4142135623730951);
}

double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / 2.5066282746310005;
}

double norm_quantile(double p) {
    static const boost::math::normal_distribution<double> unit;
    return boost::math::quantile(unit, p);
}

SensitivityModel::SensitivityModel(double gamma) : gamma_(gamma) {
    if (!(gamma >= 1) || !std::isfinite(gamma))
        throw input_error("gamma must be a finite number >= 1");
    kappa_ = gamma / (1 + gamma);
}

PValueBound pbound_normal(double t, double sum_q, double sum_q2, const SensitivityModel& model,
                          Tail tail) {
    PValueBound b;
    b.tail = tail;
    b.method = Method::normal;
    if (sum_q2 <= 0) {
        b.degenerate = true;
        return b;
    }
    const double k = model.kappa();
    const double sd = std::sqrt(k * (1 - k) * sum_q2);
    const double z_hi = (t - k * sum_q) / sd;        // mean under kappa
    const double z_lo = (t - (1 - k) * sum_q) / sd;  // mean under 1-kappa
    if (tail == Tail::greater) {
        b.upper = norm_cdf(-z_hi);
        b.lower = norm_cdf(-z_lo);
    } else {
        b.upper = norm_cdf(z_lo);
        b.lower = norm_cdf(z_hi);
    }
    return b;
}

namespace {

// Smallest denominator d <= max_den putting x on an integer lattice to
// within float noise, via continued-fraction convergents; 0 when none
// qualifies. The tolerance is absolute so that genuinely irrational scores
// are refused rather than snapped to a large accidental convergent.
std::int64_t rational_denominator(double x, std::int64_t max_den, double tol) {
    if (std::abs(x - std::round(x)) <= tol)
        return 1;
    double frac = x;
    std::int64_t k_m2 = 1, k_m1 = 0;
    for (int iters = 0; iters < 64; ++iters) {
        const double a = std::floor(frac);
        if (a < 0 || a > 9e15)
            return 0;
        const std::int64_t k = static_cast<std::int64_t>(a) * k_m1 + k_m2;
        if (k > max_den || k <= 0)
            return 0;
        const double prod = x * static_cast<double>(k);
        if (std::abs(prod - std::round(prod)) <= tol)
            return k;
        k_m2 = k_m1;
        k_m1 = k;
        const double rem = frac - a;
        if (rem < 1e-12)
            return 0;
        frac = 1.0 / rem;
    }
    return 0;
}

constexpr std::int64_t max_lattice_total = std::int64_t{1} << 22;

// Integer multiplier putting every score on a lattice, or throw.
std::int64_t lattice_scale(const std::vector<double>& q) {
    std::int64_t scale = 1;
    for (double v : q) {
        if (v == 0)
            continue;
        const std::int64_t d = rational_denominator(v * static_cast<double>(scale),
                                                    max_lattice_total, 1e-9);
        if (d == 0)
            throw exact_unavailable(
                "scores do not fit an integer lattice; use the normal method");
        if (scale > max_lattice_total / d && d > 1)
            throw exact_unavailable(
                "score lattice exceeds the configured resolution; use the normal method");
        if (d > 1)
            scale *= d;
    }
    return scale;
}

// P(sum of independent Bernoulli(p)*c_i >= t_scaled) (or <= for the less
// tail), computed by convolution over the integer lattice.
double dp_tail(const std::vector<std::int64_t>& c, std::int64_t total, double p,
               std::int64_t t_scaled, Tail tail) {
    std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
    dist[0] = 1.0;
    std::int64_t top = 0;
    for (std::int64_t ci : c) {
        if (ci == 0)
            continue;
        top += ci;
        for (std::int64_t s = top; s >= 0; --s) {
            double v = dist[static_cast<std::size_t>(s)] * (1 - p);
            if (s >= ci)
                v += dist[static_cast<std::size_t>(s - ci)] * p;
            dist[static_cast<std::size_t>(s)] = v;
        }
    }
    long double acc = 0;
    if (tail == Tail::greater) {
        for (std::int64_t s = std::max<std::int64_t>(t_scaled, 0); s <= total; ++s)
            acc += dist[static_cast<std::size_t>(s)];
    } else {
        for (std::int64_t s = 0; s <= std::min(t_scaled, total); ++s)
            acc += dist[static_cast<std::size_t>(s)];
    }
    return std::min<double>(1.0, static_cast<double>(acc));
}

}  // namespace

PValueBound pbound_exact(const std::vector<bool>& positive, const ScoreVector& scores,
                         const SensitivityModel& model, Tail tail) {
    if (positive.size() != scores.q.size())
        throw input_error("pbound_exact: length mismatch");
    PValueBound b;
    b.tail = tail;
    b.method = Method::exact;

    double sum_q2 = 0;
    for (double v : scores.q)
        sum_q2 += v * v;
    if (sum_q2 <= 0) {
        b.degenerate = true;
        return b;
    }

    const std::int64_t scale = lattice_scale(scores.q);
    std::vector<std::int64_t> c(scores.q.size());
    std::int64_t total = 0;
    std::int64_t t_scaled = 0;
    for (std::size_t i = 0; i < scores.q.size(); ++i) {
        const double scaled = scores.q[i] * static_cast<double>(scale);
        c[i] = std::llround(scaled);
        if (std::abs(scaled - static_cast<double>(c[i])) > 1e-6)
            throw exact_unavailable(
                "scores do not fit an integer lattice; use the normal method");
        if (total > max_lattice_total - c[i])
            throw exact_unavailable(
                "score lattice exceeds the configured resolution; use the normal method");
        total += c[i];
        if (positive[i])
            t_scaled += c[i];
    }

    const double k = model.kappa();
    if (tail == Tail::greater) {
        b.upper = dp_tail(c, total, k, t_scaled, tail);
        b.lower = dp_tail(c, total, 1 - k, t_scaled, tail);
    } else {
        b.upper = dp_tail(c, total, 1 - k, t_scaled, tail);
        b.lower = dp_tail(c, total, k, t_scaled, tail);
    }
    return b;
}

namespace {

template <typename UpperAt>
SensitivityValue gamma_search(const UpperAt& upper_at, double alpha) {
    if (!(alpha > 0) || alpha > 1)
        throw input_error("alpha must lie in (0, 1]");
    SensitivityValue out;
    if (upper_at(1.0) > alpha) {
        out.sensitive_at_gamma1 = true;
        return out;
    }
    double lo = 1.0, hi = 2.0;
    while (hi < gamma_search_max && upper_at(hi) <= alpha) {
        lo = hi;
        hi = std::min(hi * 2, gamma_search_max);
    }
    if (hi >= gamma_search_max && upper_at(gamma_search_max) <= alpha) {
        out.gamma = gamma_search_max;
        out.at_search_bound = true;
        return out;
    }
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (upper_at(mid) <= alpha ? lo : hi) = mid;
    }
    out.gamma = lo;
    return out;
}

}  // namespace

SensitivityValue sensitivity_value(const std::vector<double>& y, const ScoreSpec& spec,
                                   double alpha, Tail tail, Method method) {
    std::vector<double> abs_y(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]))
            throw input_error("sensitivity_value: non-finite difference");
        abs_y[i] = std::abs(y[i]);
    }
    const ScoreVector scores = compute_scores(abs_y, spec);
    const TestStatistic stat = test_statistic(y, scores);
    std::vector<bool> positive(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        positive[i] = y[i] > 0;

    auto upper_at = [&](double gamma) {
        const SensitivityModel model(gamma);
        return method == Method::normal
                   ? pbound_normal(stat.t, stat.sum_q, stat.sum_q2, model, tail).upper
                   : pbound_exact(positive, scores, model, tail).upper;
    };
    return gamma_search(upper_at, alpha);
}

SensitivityValue sensitivity_value_normal(double t, double sum_q, double sum_q2, double alpha,
                                          Tail tail) {
    auto upper_at = [&](double gamma) {
        return pbound_normal(t, sum_q, sum_q2, SensitivityModel(gamma), tail).upper;
    };
    return gamma_search(upper_at, alpha);
}

namespace {

void check_gamma_pair(double gamma_true, double gamma_assumed) {
    if (!(gamma_true >= 1) || !(gamma_assumed >= gamma_true))
        throw input_error("gamma bounds must satisfy 1 <= gamma_true <= gamma_assumed");
}

}  // namespace

double size_bound(double gamma_true, double gamma_assumed, double sum_q, double sum_q2,
                  double alpha) {
    check_gamma_pair(gamma_true, gamma_assumed);
    if (!(alpha > 0) || !(alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
    if (!(sum_q > 0) || !(sum_q2 > 0))
        throw input_error("score sums must be positive");
    const double kp = gamma_true / (1 + gamma_true);
    const double k = gamma_assumed / (1 + gamma_assumed);
    const double sd = std::sqrt(k * (1 - k) * sum_q2);
    return norm_cdf(-((k - kp) * sum_q / sd + norm_quantile(1 - alpha)));
}

double expected_pvalue(double gamma_true, double gamma_assumed, double sum_q, double sum_q2) {
    check_gamma_pair(gamma_true, gamma_assumed);
    if (!(sum_q > 0) || !(sum_q2 > 0))
        throw input_error("score sums must be positive");
    const double kp = gamma_true / (1 + gamma_true);
    const double k = gamma_assumed / (1 + gamma_assumed);
    return norm_cdf((k - kp) * sum_q /
                    std::sqrt((k * (1 - k) + kp * (1 - kp)) * sum_q2));
}

}  // namespace xscreen
