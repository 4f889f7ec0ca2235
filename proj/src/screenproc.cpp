#include "xscreen/screenproc.hpp"

#include <algorithm>
#include <cmath>

namespace xscreen {

namespace {

struct Assessed {
    SensitivityValue sv;
    double tie_p = 1;  // upper bound at the landed gamma, for exact ties
    Tail tail = Tail::greater;
    std::size_t candidate = 0;
};

// larger sensitivity value first; sentinel below everything; exact ties by
// smaller bound at the common gamma
bool more_robust(const Assessed& a, const Assessed& b) {
    if (a.sv.sensitive_at_gamma1 != b.sv.sensitive_at_gamma1)
        return !a.sv.sensitive_at_gamma1;
    if (a.sv.gamma != b.sv.gamma)
        return a.sv.gamma > b.sv.gamma;
    if (a.tie_p != b.tie_p)
        return a.tie_p < b.tie_p;
    return false;
}

Assessed assess_column(const std::vector<double>& col, const ScoreSpec& spec,
                       std::size_t candidate, double alpha) {
    ScoreVector scores;
    std::vector<double> abs_col(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
        if (!std::isfinite(col[i]))
            throw input_error("plan: non-finite difference");
        abs_col[i] = std::abs(col[i]);
    }
    scores = compute_scores(abs_col, spec);
    const TestStatistic stat = test_statistic(col, scores);

    Assessed best;
    bool have = false;
    for (Tail tail : {Tail::greater, Tail::less}) {
        Assessed a;
        a.tail = tail;
        a.candidate = candidate;
        a.sv = sensitivity_value_normal(stat.t, stat.sum_q, stat.sum_q2, alpha, tail);
        const double at = a.sv.sensitive_at_gamma1 ? 1.0 : a.sv.gamma;
        a.tie_p = pbound_normal(stat.t, stat.sum_q, stat.sum_q2, SensitivityModel(at), tail).upper;
        // strict comparison keeps `greater` on a full tie
        if (!have || more_robust(a, best)) {
            best = a;
            have = true;
        }
    }
    return best;
}

}  // namespace

ScreenPlan plan(const PairDiffMatrix& planning_half, const std::vector<ScoreSpec>& candidates,
                double gamma, double alpha, Selection selection) {
    if (candidates.empty())
        throw input_error("plan needs at least one candidate statistic");
    if (!(alpha > 0) || !(alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
    SensitivityModel check_gamma(gamma);  // validates
    (void)check_gamma;
    if (selection.mode == Selection::Mode::top_k && selection.k < 1)
        throw input_error("top_k selection needs k >= 1");

    const std::size_t K = planning_half.outcomes();
    std::vector<Assessed> best(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::vector<double> col = planning_half.column(k);
        Assessed b = assess_column(col, candidates[0], 0, alpha);
        for (std::size_t c = 1; c < candidates.size(); ++c) {
            const Assessed a = assess_column(col, candidates[c], c, alpha);
            if (more_robust(a, b))
                b = a;
        }
        best[k] = b;
    }

    std::vector<std::size_t> order(K);
    for (std::size_t k = 0; k < K; ++k)
        order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return more_robust(best[a], best[b]);  // equal keys keep index order
    });

    ScreenPlan p;
    p.selection = selection;
    const std::size_t keep =
        selection.mode == Selection::Mode::top_k ? std::min(selection.k, K) : K;
    p.order.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r) {
        PlanEntry e;
        e.hypothesis = order[r];
        e.direction = best[order[r]].tail;
        e.statistic = candidates[best[order[r]].candidate];
        e.gamma_star = best[order[r]].sv;
        e.planning_p = best[order[r]].tie_p;
        p.order.push_back(e);
    }
    return p;
}

HalfResult execute(const PairDiffMatrix& testing_half, const ScreenPlan& plan, double gamma,
                   double half_alpha, Procedure procedure, Method method) {
    if (!(half_alpha > 0) || !(half_alpha < 1))
        throw input_error("testing level must lie in (0, 1)");
    const SensitivityModel model(gamma);
    HalfResult out;
    if (plan.order.empty())
        return out;

    std::vector<IndexedP> ps;
    ps.reserve(plan.order.size());
    for (const PlanEntry& e : plan.order) {
        if (e.hypothesis >= testing_half.outcomes())
            throw input_error("plan references an outcome the testing data lacks");
        const std::vector<double> col = testing_half.column(e.hypothesis);
        std::vector<double> abs_col(col.size());
        for (std::size_t i = 0; i < col.size(); ++i)
            abs_col[i] = std::abs(col[i]);
        const ScoreVector scores = compute_scores(abs_col, e.statistic);
        double p;
        if (method == Method::normal) {
            const TestStatistic stat = test_statistic(col, scores);
            p = pbound_normal(stat.t, stat.sum_q, stat.sum_q2, model, e.direction).upper;
        } else {
            std::vector<bool> positive(col.size());
            for (std::size_t i = 0; i < col.size(); ++i)
                positive[i] = col[i] > 0;
            p = pbound_exact(positive, scores, model, e.direction).upper;
        }
        ps.push_back({e.hypothesis, p});
    }

    std::vector<TestOutcome> outcomes;
    switch (procedure) {
        case Procedure::bonferroni:
            outcomes = bonferroni(ps, ps.size(), half_alpha);
            break;
        case Procedure::holm:
            outcomes = holm(ps, half_alpha);
            break;
        case Procedure::fixed_sequence:
            outcomes = fixed_sequence(ps, half_alpha);
            break;
        case Procedure::fallback:
            outcomes = fallback(ps, half_alpha);
            break;
        case Procedure::recycling:
            outcomes = recycling(ps, half_alpha);
            break;
    }

    out.outcomes.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ExecOutcome o;
        o.hypothesis = ps[i].index;
        o.p = ps[i].p;
        o.adjusted_p = outcomes[i].adjusted_p;
        o.rejected = outcomes[i].rejected;
        o.level_spent = outcomes[i].level_spent;
        out.outcomes.push_back(o);
        if (o.rejected)
            out.rejected.push_back(o.hypothesis);
    }
    std::sort(out.rejected.begin(), out.rejected.end());
    return out;
}

namespace {

void validate_config(const ScreenConfig& config) {
    if (config.candidates.empty())
        throw input_error("screening needs at least one candidate statistic");
    if (!(config.alpha > 0) || !(config.alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
}

ScreenResult cross_screen_on_split(const PairDiffMatrix& m, const SplitAssignment& split,
                                   const ScreenConfig& config) {
    validate_config(config);
    const double pg = config.planning_gamma < 0 ? config.gamma : config.planning_gamma;
    const double pa = config.planning_alpha < 0 ? config.alpha : config.planning_alpha;

    ScreenResult res;
    res.split = split;
    res.gamma = config.gamma;
    res.alpha = config.alpha;

    const PairDiffMatrix m1 = m.rows(split.half1);
    const PairDiffMatrix m2 = m.rows(split.half2);

    res.plan2 = plan(m1, config.candidates, pg, pa, config.selection);
    res.plan1 = plan(m2, config.candidates, pg, pa, config.selection);
    res.half2 = execute(m2, res.plan2, config.gamma, config.alpha / 2, config.procedure,
                        config.test_method);
    res.half1 = execute(m1, res.plan1, config.gamma, config.alpha / 2, config.procedure,
                        config.test_method);
    res.r1 = res.half1.rejected;
    res.r2 = res.half2.rejected;
    std::set_union(res.r1.begin(), res.r1.end(), res.r2.begin(), res.r2.end(),
                   std::back_inserter(res.union_set));
    std::set_intersection(res.r1.begin(), res.r1.end(), res.r2.begin(), res.r2.end(),
                          std::back_inserter(res.intersection));

    res.adjusted_p.assign(m.outcomes(), 1.0);
    for (const HalfResult* half : {&res.half1, &res.half2})
        for (const ExecOutcome& o : half->outcomes)
            res.adjusted_p[o.hypothesis] =
                std::min(res.adjusted_p[o.hypothesis], std::min(1.0, 2 * o.adjusted_p));
    return res;
}

}  // namespace

ScreenResult cross_screen(const PairDiffMatrix& m, const ScreenConfig& config) {
    if (m.pairs() < 4)
        throw input_error("cross-screening needs at least four pairs");
    return cross_screen_on_split(m, random_split(m, config.seed), config);
}

ScreenResult nonrandom_cross_screen(const PairDiffMatrix& m,
                                    const std::vector<std::string>& labels,
                                    const ScreenConfig& config) {
    ScreenResult res = cross_screen_on_split(m, covariate_split(m, labels), config);
    res.covariate_based = true;
    return res;
}

SingleScreenResult single_screen(const PairDiffMatrix& m, double planning_fraction,
                                 const ScreenConfig& config) {
    validate_config(config);
    if (!(planning_fraction > 0) || !(planning_fraction < 1))
        throw input_error("planning fraction must lie in (0, 1)");
    const std::size_t n_plan =
        static_cast<std::size_t>(planning_fraction * static_cast<double>(m.pairs()));
    if (n_plan < 2)
        throw input_error("planning sample must have at least two pairs");
    if (n_plan >= m.pairs())
        throw input_error("planning fraction leaves no analysis pairs");

    const double pg = config.planning_gamma < 0 ? config.gamma : config.planning_gamma;
    const double pa = config.planning_alpha < 0 ? config.alpha : config.planning_alpha;

    SingleScreenResult res;
    res.split = random_split_n(m, n_plan, config.seed);
    res.gamma = config.gamma;
    res.alpha = config.alpha;

    const PairDiffMatrix planning = m.rows(res.split.half1);
    const PairDiffMatrix analysis = m.rows(res.split.half2);
    res.plan = plan(planning, config.candidates, pg, pa, config.selection);
    res.analysis = execute(analysis, res.plan, config.gamma, config.alpha, config.procedure,
                           config.test_method);
    res.rejected = res.analysis.rejected;
    res.adjusted_p.assign(m.outcomes(), 1.0);
    for (const ExecOutcome& o : res.analysis.outcomes)
        res.adjusted_p[o.hypothesis] = std::min(1.0, o.adjusted_p);
    return res;
}

}  // namespace xscreen
