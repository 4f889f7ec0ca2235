#pragma once

#include <cstddef>
#include <vector>

#include "xscreen/errors.hpp"

namespace xscreen {

struct IndexedP {
    std::size_t index = 0;
    double p = 1;
};

struct TestOutcome {
    std::size_t hypothesis_index = 0;
    // smallest alpha at which this hypothesis would be rejected, given the
    // realized sequence for the ordered procedures
    double adjusted_p = 1;
    bool rejected = false;
    double level_spent = 0;  // level actually applied; 0 if never tested
};

// adjusted_p = min(1, factor * p)
std::vector<TestOutcome> bonferroni(const std::vector<IndexedP>& pvals, std::size_t factor,
                                    double alpha);

// Holm step-down.
std::vector<TestOutcome> holm(const std::vector<IndexedP>& pvals, double alpha);

// Test in the given order at full alpha, stopping at the first acceptance.
std::vector<TestOutcome> fixed_sequence(const std::vector<IndexedP>& ordered_pvals, double alpha);

// Test in order at base level alpha/n each; a rejection passes its whole
// accumulated level on to the next hypothesis. Reduces to the
// first-at-alpha/2, second-at-alpha-or-alpha/2 rule for two hypotheses.
std::vector<TestOutcome> fallback(const std::vector<IndexedP>& ordered_pvals, double alpha);

// fallback plus one backward sweep: the level accumulated by a rejection of
// the final hypothesis is offered to earlier acceptances from latest to
// earliest; a successful retest passes its whole level further back, a failed
// retest consumes the budget and ends the sweep. For two hypotheses this is
// exactly: if #1 failed at alpha/2 but #2 rejected at alpha/2, retest #1 at
// alpha.
std::vector<TestOutcome> recycling(const std::vector<IndexedP>& ordered_pvals, double alpha);

// One-sided bounds minimized over statistics, Bonferroni factor
// n_statistics * 2 * K. Rows of `pvals_per_statistic` are statistics, columns
// hypotheses; each cell holds the smaller of that statistic's two one-sided
// bounds (the factor's 2 pays for the within-cell minimum).
std::vector<TestOutcome> adaptive_min_p(const std::vector<std::vector<double>>& pvals_per_statistic,
                                        std::size_t n_statistics, double alpha, std::size_t k_total);

}  // namespace xscreen
