#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xscreen/multitest.hpp"
#include "xscreen/pairdata.hpp"
#include "xscreen/scores.hpp"
#include "xscreen/sensbound.hpp"

namespace xscreen {

enum class Procedure { bonferroni, holm, fixed_sequence, fallback, recycling };

struct Selection {
    enum class Mode { ordered_all, top_k };
    Mode mode = Mode::ordered_all;
    std::size_t k = 0;  // top_k only

    static Selection ordered_all() { return {}; }
    static Selection top_k(std::size_t k) { return {Mode::top_k, k}; }
};

// One planned test: which hypothesis, which tail, which statistic, and the
// planning diagnostics that ordered it. Plans carry no data rows, so a plan
// built from one half can only be executed against the other.
struct PlanEntry {
    std::size_t hypothesis = 0;
    Tail direction = Tail::greater;
    ScoreSpec statistic;
    SensitivityValue gamma_star;  // from the planning half
    double planning_p = 1;        // one-sided upper bound at the planning gamma
};

struct ScreenPlan {
    std::vector<PlanEntry> order;  // test order, least sensitive first
    Selection selection;
};

struct ExecOutcome {
    std::size_t hypothesis = 0;
    double p = 1;           // one-sided upper bound at the testing gamma
    double adjusted_p = 1;  // within this analysis (no cross-analysis factor)
    bool rejected = false;
    double level_spent = 0;
};

struct HalfResult {
    std::vector<ExecOutcome> outcomes;       // in plan order
    std::vector<std::size_t> rejected;       // hypothesis indices, ascending
};

struct ScreenConfig {
    std::vector<ScoreSpec> candidates{ScoreSpec::wilcoxon()};
    double gamma = 1;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    Selection selection;
    Procedure procedure = Procedure::fixed_sequence;
    Method test_method = Method::normal;
    // planning defaults to the testing gamma/alpha; override to plan at a
    // different bias level
    double planning_gamma = -1;
    double planning_alpha = -1;
};

struct ScreenResult {
    SplitAssignment split;
    ScreenPlan plan1;  // built from half2, executed on half1
    ScreenPlan plan2;  // built from half1, executed on half2
    HalfResult half1;
    HalfResult half2;
    std::vector<std::size_t> r1;
    std::vector<std::size_t> r2;
    std::vector<std::size_t> union_set;
    std::vector<std::size_t> intersection;  // replicated in both halves
    // per hypothesis, min over halves of twice the within-half adjusted
    // bound, capped at 1; 1 for hypotheses never tested
    std::vector<double> adjusted_p;
    double gamma = 1;
    double alpha = 0.05;
    bool covariate_based = false;  // intersection = subpopulation-consistent
};

struct SingleScreenResult {
    SplitAssignment split;  // half1 = planning (discarded), half2 = analysis
    ScreenPlan plan;
    HalfResult analysis;
    std::vector<std::size_t> rejected;
    std::vector<double> adjusted_p;  // no cross-analysis factor
    double gamma = 1;
    double alpha = 0.05;
};

// Order/direct/choose statistics for every hypothesis from planning data
// alone: per hypothesis and candidate take the tail with the larger
// sensitivity value, keep the candidate with the largest, sort descending.
// Exact ties compare the one-sided bound at the common gamma, then the lower
// hypothesis index wins; tied tails prefer `greater`.
ScreenPlan plan(const PairDiffMatrix& planning_half, const std::vector<ScoreSpec>& candidates,
                double gamma, double alpha, Selection selection);

// Run the planned one-sided tests at `gamma` on the other half and apply the
// multiplicity procedure at `half_alpha` over the planned set.
HalfResult execute(const PairDiffMatrix& testing_half, const ScreenPlan& plan, double gamma,
                   double half_alpha, Procedure procedure, Method method = Method::normal);

// Steps 1-4: split, cross-plan, test each half at alpha/2, combine. The
// union carries the familywise claim, the intersection the replicability
// claim.
ScreenResult cross_screen(const PairDiffMatrix& m, const ScreenConfig& config);

// Plan on floor(f*I) pairs, discard them, test the rest at full alpha.
SingleScreenResult single_screen(const PairDiffMatrix& m, double planning_fraction,
                                 const ScreenConfig& config);

// cross_screen on a covariate split; an intersection rejection means both
// subpopulations rejected independently.
ScreenResult nonrandom_cross_screen(const PairDiffMatrix& m,
                                    const std::vector<std::string>& labels,
                                    const ScreenConfig& config);

}  // namespace xscreen
