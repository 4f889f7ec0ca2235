#include "xscreen/multitest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xscreen {

namespace {

void check_inputs(const std::vector<IndexedP>& pvals, double alpha) {
    if (!(alpha > 0) || !(alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
    for (const auto& ip : pvals)
        if (!(ip.p >= 0) || ip.p > 1 || !std::isfinite(ip.p))
            throw input_error("p-values must lie in [0, 1]");
}

// one fallback pass at overall level `level`; levels[i] receives the
// threshold applied to hypothesis i
std::vector<bool> fallback_pass(const std::vector<IndexedP>& pvals, double level,
                                std::vector<double>* levels) {
    const std::size_t n = pvals.size();
    const double w = level / static_cast<double>(n);
    std::vector<bool> rejected(n, false);
    double carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = w + carry;
        if (levels)
            (*levels)[i] = c;
        rejected[i] = pvals[i].p <= c;
        carry = rejected[i] ? c : 0;
    }
    return rejected;
}

std::vector<bool> recycling_pass(const std::vector<IndexedP>& pvals, double level,
                                 std::vector<double>* levels_out) {
    const std::size_t n = pvals.size();
    std::vector<double> levels(n, 0);
    std::vector<bool> rejected = fallback_pass(pvals, level, &levels);
    if (n >= 2 && rejected[n - 1]) {
        double freed = levels[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) {
            if (rejected[j])
                continue;
            const double retest = levels[j] + freed;
            levels[j] = retest;
            if (pvals[j].p <= retest) {
                rejected[j] = true;
                freed = retest;
            } else {
                break;  // budget consumed by the failed retest
            }
        }
    }
    if (levels_out)
        *levels_out = std::move(levels);
    return rejected;
}

// Smallest overall level at which `pass` rejects hypothesis i, given that
// `rejected_at_alpha` is the outcome of running at alpha. Keeps the
// rejected <=> adjusted_p <= alpha invariant exact by bisecting within the
// known side.
template <typename Pass>
double ordered_adjusted_p(const Pass& pass, std::size_t i, double alpha, bool rejected_at_alpha,
                          double raw_p) {
    double lo, hi;
    if (rejected_at_alpha) {
        lo = 0;
        hi = alpha;
    } else {
        if (!pass(1.0)[i])
            return 1.0;
        lo = alpha;
        hi = 1.0;
    }
    for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pass(mid)[i] ? hi : lo) = mid;
    }
    return std::max(hi, raw_p);
}

}  // namespace

std::vector<TestOutcome> bonferroni(const std::vector<IndexedP>& pvals, std::size_t factor,
                                    double alpha) {
    check_inputs(pvals, alpha);
    if (factor < pvals.size() || factor == 0)
        throw input_error("bonferroni factor must cover the number of comparisons");
    std::vector<TestOutcome> out;
    out.reserve(pvals.size());
    for (const auto& ip : pvals) {
        TestOutcome o;
        o.hypothesis_index = ip.index;
        o.adjusted_p = std::min(1.0, static_cast<double>(factor) * ip.p);
        o.rejected = o.adjusted_p <= alpha;
        o.level_spent = alpha / static_cast<double>(factor);
        out.push_back(o);
    }
    return out;
}

std::vector<TestOutcome> holm(const std::vector<IndexedP>& pvals, double alpha) {
    check_inputs(pvals, alpha);
    const std::size_t n = pvals.size();
    std::vector<std::size_t> ord(n);
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
        return pvals[a].p != pvals[b].p ? pvals[a].p < pvals[b].p
                                        : pvals[a].index < pvals[b].index;
    });
    std::vector<TestOutcome> out(n);
    double running = 0;
    bool stopped = false;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& ip = pvals[ord[r]];
        const double mult = static_cast<double>(n - r);
        running = std::max(running, std::min(1.0, mult * ip.p));
        TestOutcome o;
        o.hypothesis_index = ip.index;
        o.adjusted_p = running;
        o.rejected = running <= alpha;
        if (!stopped) {
            o.level_spent = alpha / mult;
            if (!o.rejected)
                stopped = true;
        }
        out[ord[r]] = o;
    }
    return out;
}

std::vector<TestOutcome> fixed_sequence(const std::vector<IndexedP>& ordered_pvals, double alpha) {
    check_inputs(ordered_pvals, alpha);
    std::vector<TestOutcome> out;
    out.reserve(ordered_pvals.size());
    double running = 0;
    bool testing = true;
    for (const auto& ip : ordered_pvals) {
        running = std::max(running, ip.p);
        TestOutcome o;
        o.hypothesis_index = ip.index;
        o.adjusted_p = running;
        o.rejected = running <= alpha;
        o.level_spent = testing ? alpha : 0;
        if (testing && !o.rejected)
            testing = false;  // this one was tested and accepted; later ones are not
        out.push_back(o);
    }
    return out;
}

std::vector<TestOutcome> fallback(const std::vector<IndexedP>& ordered_pvals, double alpha) {
    check_inputs(ordered_pvals, alpha);
    const std::size_t n = ordered_pvals.size();
    std::vector<double> levels(n, 0);
    const std::vector<bool> rejected = fallback_pass(ordered_pvals, alpha, &levels);
    auto pass = [&](double level) { return fallback_pass(ordered_pvals, level, nullptr); };
    std::vector<TestOutcome> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].hypothesis_index = ordered_pvals[i].index;
        out[i].rejected = rejected[i];
        out[i].level_spent = levels[i];
        out[i].adjusted_p =
            ordered_adjusted_p(pass, i, alpha, rejected[i], ordered_pvals[i].p);
    }
    return out;
}

std::vector<TestOutcome> recycling(const std::vector<IndexedP>& ordered_pvals, double alpha) {
    check_inputs(ordered_pvals, alpha);
    const std::size_t n = ordered_pvals.size();
    std::vector<double> levels(n, 0);
    const std::vector<bool> rejected = recycling_pass(ordered_pvals, alpha, &levels);
    auto pass = [&](double level) { return recycling_pass(ordered_pvals, level, nullptr); };
    std::vector<TestOutcome> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].hypothesis_index = ordered_pvals[i].index;
        out[i].rejected = rejected[i];
        out[i].level_spent = levels[i];
        out[i].adjusted_p =
            ordered_adjusted_p(pass, i, alpha, rejected[i], ordered_pvals[i].p);
    }
    return out;
}

std::vector<TestOutcome> adaptive_min_p(const std::vector<std::vector<double>>& pvals_per_statistic,
                                        std::size_t n_statistics, double alpha,
                                        std::size_t k_total) {
    if (!(alpha > 0) || !(alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
    if (pvals_per_statistic.size() != n_statistics || n_statistics == 0)
        throw input_error("adaptive_min_p: statistic count mismatch");
    const std::size_t n_hyp = pvals_per_statistic[0].size();
    for (const auto& row : pvals_per_statistic)
        if (row.size() != n_hyp)
            throw input_error("adaptive_min_p: ragged p-value matrix");
    if (k_total < n_hyp)
        throw input_error("adaptive_min_p: k_total smaller than hypothesis count");
    const double factor = static_cast<double>(n_statistics) * 2.0 * static_cast<double>(k_total);
    std::vector<TestOutcome> out(n_hyp);
    for (std::size_t j = 0; j < n_hyp; ++j) {
        double p_min = 1;
        for (const auto& row : pvals_per_statistic) {
            if (!(row[j] >= 0) || row[j] > 1 || !std::isfinite(row[j]))
                throw input_error("p-values must lie in [0, 1]");
            p_min = std::min(p_min, row[j]);
        }
        out[j].hypothesis_index = j;
        out[j].adjusted_p = std::min(1.0, factor * p_min);
        out[j].rejected = out[j].adjusted_p <= alpha;
        out[j].level_spent = alpha / factor;
    }
    return out;
}

}  // namespace xscreen
