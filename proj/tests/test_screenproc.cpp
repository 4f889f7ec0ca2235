#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "xscreen/screenproc.hpp"

using namespace xscreen;

namespace {

PairDiffMatrix three_outcome_matrix() {
    // outcome 0: uniformly positive; outcome 1: negative except one pair;
    // outcome 2: balanced
    const std::size_t I = 20;
    std::vector<double> v(I * 3);
    for (std::size_t i = 0; i < I; ++i) {
        v[i * 3 + 0] = static_cast<double>(i + 1);
        v[i * 3 + 1] = i == 0 ? 0.5 : -static_cast<double>(i + 1);
        v[i * 3 + 2] = (i % 2 ? 1.0 : -1.0) * static_cast<double>(i / 2 + 1);
    }
    return PairDiffMatrix(v, I, 3);
}

PairDiffMatrix random_matrix(std::size_t I, std::size_t K, std::uint64_t seed,
                             double shift = 0.4) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(shift, 1.0);
    std::vector<double> v(I * K);
    for (double& x : v)
        x = g(rng);
    return PairDiffMatrix(v, I, K);
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
    return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace

TEST_CASE("plan orders hypotheses by sensitivity value and picks directions") {
    const PairDiffMatrix m = three_outcome_matrix();
    const ScreenPlan p = plan(m, {ScoreSpec::wilcoxon()}, 2.0, 0.05, Selection::ordered_all());
    REQUIRE(p.order.size() == 3);
    CHECK(p.order[0].hypothesis == 0);
    CHECK(p.order[0].direction == Tail::greater);
    CHECK(p.order[1].hypothesis == 1);
    CHECK(p.order[1].direction == Tail::less);
    CHECK(p.order[2].hypothesis == 2);
    CHECK(p.order[0].gamma_star.gamma > p.order[1].gamma_star.gamma);
    CHECK(p.order[2].gamma_star.sensitive_at_gamma1);
    // the landed gamma really is feasible at the planning level
    CHECK(p.order[0].planning_p <= 0.05 + 1e-9);
    CHECK(p.order[1].planning_p <= 0.05 + 1e-9);
}

TEST_CASE("plan keeps only the k most robust hypotheses under top-k selection") {
    const PairDiffMatrix m = three_outcome_matrix();
    const ScreenPlan p = plan(m, {ScoreSpec::wilcoxon()}, 2.0, 0.05, Selection::top_k(2));
    REQUIRE(p.order.size() == 2);
    CHECK(p.order[0].hypothesis == 0);
    CHECK(p.order[1].hypothesis == 1);
    CHECK(plan(m, {ScoreSpec::wilcoxon()}, 2.0, 0.05, Selection::top_k(10)).order.size() == 3);
    CHECK_THROWS_AS(plan(m, {ScoreSpec::wilcoxon()}, 2.0, 0.05, Selection::top_k(0)),
                    input_error);
}

TEST_CASE("plan chooses among candidate statistics per hypothesis") {
    const PairDiffMatrix m = random_matrix(40, 4, 99, 0.5);
    const std::vector<ScoreSpec> cands{ScoreSpec::wilcoxon(), ScoreSpec::ustat(8, 5, 8)};
    const ScreenPlan p = plan(m, cands, 2.0, 0.05, Selection::ordered_all());
    REQUIRE(p.order.size() == 4);
    // each chosen statistic must be one of the candidates, and the chosen
    // sensitivity value can never fall below the single-candidate plans
    for (const PlanEntry& e : p.order) {
        const bool known = e.statistic.name() == cands[0].name() ||
                           e.statistic.name() == cands[1].name();
        CHECK(known);
    }
    for (const ScoreSpec& single : cands) {
        const ScreenPlan sp = plan(m, {single}, 2.0, 0.05, Selection::ordered_all());
        for (const PlanEntry& se : sp.order)
            for (const PlanEntry& e : p.order)
                if (e.hypothesis == se.hypothesis && !e.gamma_star.sensitive_at_gamma1)
                    CHECK(e.gamma_star.gamma >= se.gamma_star.gamma - 1e-9);
    }
}

TEST_CASE("plan ties prefer the greater tail") {
    // all-zero outcome: both tails are degenerate, identical in every key
    const PairDiffMatrix m(std::vector<double>(12, 0.0), 12, 1);
    const ScreenPlan p = plan(m, {ScoreSpec::sign()}, 1.0, 0.05, Selection::ordered_all());
    REQUIRE(p.order.size() == 1);
    CHECK(p.order[0].direction == Tail::greater);
    CHECK(p.order[0].gamma_star.sensitive_at_gamma1);
}

TEST_CASE("plan validates its arguments") {
    const PairDiffMatrix m = three_outcome_matrix();
    CHECK_THROWS_AS(plan(m, {}, 2.0, 0.05, Selection::ordered_all()), input_error);
    CHECK_THROWS_AS(plan(m, {ScoreSpec::wilcoxon()}, 0.5, 0.05, Selection::ordered_all()),
                    input_error);
    CHECK_THROWS_AS(plan(m, {ScoreSpec::wilcoxon()}, 2.0, 0.0, Selection::ordered_all()),
                    input_error);
}

TEST_CASE("execute runs planned tests in order and lists rejections sorted") {
    // plan hypotheses {2, 0} by hand
    ScreenPlan p;
    PlanEntry e;
    e.hypothesis = 2;
    e.direction = Tail::greater;
    e.statistic = ScoreSpec::wilcoxon();
    p.order.push_back(e);
    e.hypothesis = 0;
    p.order.push_back(e);

    const std::size_t I = 30;
    std::vector<double> v(I * 3);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t k = 0; k < 3; ++k)
            v[i * 3 + k] = static_cast<double>(i + 1);
    const PairDiffMatrix m(v, I, 3);

    const HalfResult r = execute(m, p, 1.0, 0.05, Procedure::fixed_sequence);
    REQUIRE(r.outcomes.size() == 2);
    CHECK(r.outcomes[0].hypothesis == 2);  // plan order preserved
    CHECK(r.outcomes[1].hypothesis == 0);
    CHECK(r.outcomes[0].rejected);
    CHECK(r.outcomes[1].rejected);
    CHECK(r.rejected == std::vector<std::size_t>{0, 2});  // ascending

    // exact testing gives the same decisions here
    const HalfResult rx =
        execute(m, p, 1.0, 0.05, Procedure::fixed_sequence, Method::exact);
    CHECK(rx.rejected == r.rejected);
}

TEST_CASE("execute rejects plans that reference missing outcomes") {
    ScreenPlan p;
    PlanEntry e;
    e.hypothesis = 5;
    e.statistic = ScoreSpec::wilcoxon();
    p.order.push_back(e);
    const PairDiffMatrix m(std::vector<double>(8, 1.0), 4, 2);
    CHECK_THROWS_AS(execute(m, p, 1.0, 0.05, Procedure::holm), input_error);
    CHECK_THROWS_AS(execute(m, ScreenPlan{}, 1.0, 1.5, Procedure::holm), input_error);
}

TEST_CASE("execute on an empty plan tests nothing") {
    const PairDiffMatrix m(std::vector<double>(8, 1.0), 4, 2);
    const HalfResult r = execute(m, ScreenPlan{}, 1.0, 0.05, Procedure::holm);
    CHECK(r.outcomes.empty());
    CHECK(r.rejected.empty());
}

TEST_CASE("cross-screening is deterministic given the seed") {
    const PairDiffMatrix m = random_matrix(30, 5, 2024);
    ScreenConfig cfg;
    cfg.gamma = 1.5;
    cfg.seed = 7;
    const ScreenResult a = cross_screen(m, cfg);
    const ScreenResult b = cross_screen(m, cfg);
    CHECK(a.split.half1 == b.split.half1);
    CHECK(a.union_set == b.union_set);
    CHECK(a.intersection == b.intersection);
    CHECK(a.adjusted_p == b.adjusted_p);

    cfg.seed = 8;
    const ScreenResult c = cross_screen(m, cfg);
    CHECK(a.split.half1 != c.split.half1);
}

TEST_CASE("cross-screening combines halves into union and intersection") {
    const PairDiffMatrix m = random_matrix(60, 6, 31, 0.6);
    for (Procedure proc : {Procedure::bonferroni, Procedure::holm, Procedure::fixed_sequence,
                           Procedure::fallback, Procedure::recycling}) {
        ScreenConfig cfg;
        cfg.gamma = 1.2;
        cfg.seed = 11;
        cfg.procedure = proc;
        const ScreenResult r = cross_screen(m, cfg);

        CHECK(r.split.half1.size() == 30);
        CHECK(r.r1 == r.half1.rejected);
        CHECK(r.r2 == r.half2.rejected);
        for (std::size_t h : r.intersection)
            CHECK(contains(r.union_set, h));
        for (std::size_t h : r.union_set)
            CHECK((contains(r.r1, h) || contains(r.r2, h)));
        for (std::size_t h : r.intersection)
            CHECK((contains(r.r1, h) && contains(r.r2, h)));

        // reported bound doubles the within-half adjustment, and agrees with
        // membership in the union at the nominal level
        REQUIRE(r.adjusted_p.size() == 6);
        for (std::size_t j = 0; j < 6; ++j) {
            double expect = 1.0;
            for (const HalfResult* half : {&r.half1, &r.half2})
                for (const ExecOutcome& o : half->outcomes)
                    if (o.hypothesis == j)
                        expect = std::min(expect, std::min(1.0, 2 * o.adjusted_p));
            CHECK(r.adjusted_p[j] == doctest::Approx(expect).epsilon(1e-12));
            CHECK(contains(r.union_set, j) == (r.adjusted_p[j] <= cfg.alpha));
        }
    }
}

TEST_CASE("cross-screening needs at least four pairs") {
    const PairDiffMatrix m(std::vector<double>(6, 1.0), 3, 2);
    CHECK_THROWS_AS(cross_screen(m, ScreenConfig{}), input_error);
    CHECK_THROWS_AS(cross_screen(random_matrix(8, 2, 1), ScreenConfig{.alpha = 0}),
                    input_error);
    CHECK_THROWS_AS(cross_screen(random_matrix(8, 2, 1), ScreenConfig{.candidates = {}}),
                    input_error);
}

TEST_CASE("hypotheses untested in both halves keep an adjusted bound of one") {
    const PairDiffMatrix m = random_matrix(40, 5, 5, 0.8);
    ScreenConfig cfg;
    cfg.selection = Selection::top_k(2);
    const ScreenResult r = cross_screen(m, cfg);
    std::vector<bool> tested(5, false);
    for (const HalfResult* half : {&r.half1, &r.half2})
        for (const ExecOutcome& o : half->outcomes)
            tested[o.hypothesis] = true;
    bool saw_untested = false;
    for (std::size_t j = 0; j < 5; ++j)
        if (!tested[j]) {
            saw_untested = true;
            CHECK(r.adjusted_p[j] == 1.0);
            CHECK_FALSE(contains(r.union_set, j));
        }
    CHECK(saw_untested);  // top-2 of 5 leaves at least one column untested
}

TEST_CASE("planning level overrides do not change the testing level") {
    const PairDiffMatrix m = random_matrix(50, 4, 17, 0.5);
    ScreenConfig cfg;
    cfg.gamma = 2.0;
    cfg.planning_gamma = 1.0;
    cfg.planning_alpha = 0.3;
    const ScreenResult r = cross_screen(m, cfg);
    CHECK(r.gamma == 2.0);
    CHECK(r.alpha == 0.05);
    for (const ExecOutcome& o : r.half1.outcomes)
        if (o.rejected)
            CHECK(o.adjusted_p <= 0.025 + 1e-12);
}

TEST_CASE("single-screening discards the planning pairs and spends full alpha") {
    const PairDiffMatrix m = random_matrix(25, 3, 77, 1.0);
    ScreenConfig cfg;
    cfg.gamma = 1.5;
    cfg.seed = 3;
    const SingleScreenResult r = single_screen(m, 0.2, cfg);
    CHECK(r.split.half1.size() == 5);  // floor(0.2 * 25)
    CHECK(r.split.half2.size() == 20);
    CHECK(r.rejected == r.analysis.rejected);
    REQUIRE(r.adjusted_p.size() == 3);
    for (const ExecOutcome& o : r.analysis.outcomes) {
        // full alpha, no doubling
        CHECK(r.adjusted_p[o.hypothesis] == doctest::Approx(std::min(1.0, o.adjusted_p)));
        CHECK(o.rejected == (o.adjusted_p <= 0.05));
    }

    CHECK_THROWS_AS(single_screen(m, 0.0, cfg), input_error);
    CHECK_THROWS_AS(single_screen(m, 1.0, cfg), input_error);
    CHECK_THROWS_AS(single_screen(m, 0.04, cfg), input_error);  // one planning pair
}

TEST_CASE("covariate-based screening splits by label and flags the result") {
    const std::size_t I = 12;
    std::vector<double> v(I * 2);
    for (std::size_t i = 0; i < I; ++i) {
        v[i * 2 + 0] = static_cast<double>(i + 1);
        v[i * 2 + 1] = 0.1;
    }
    const PairDiffMatrix m(v, I, 2);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < I; ++i)
        labels.push_back(i % 2 ? "urban" : "rural");

    const ScreenResult r = nonrandom_cross_screen(m, labels, ScreenConfig{});
    CHECK(r.covariate_based);
    CHECK(r.split.kind == SplitAssignment::Kind::covariate);
    CHECK(r.split.label == "rural");
    CHECK(r.split.half1 == std::vector<std::size_t>{0, 2, 4, 6, 8, 10});
    CHECK(r.split.half2 == std::vector<std::size_t>{1, 3, 5, 7, 9, 11});

    const ScreenResult plain = cross_screen(m, ScreenConfig{});
    CHECK_FALSE(plain.covariate_based);
}
