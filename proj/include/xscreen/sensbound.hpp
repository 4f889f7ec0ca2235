#pragma once

#include <cstdint>
#include <vector>

#include "xscreen/errors.hpp"
#include "xscreen/scores.hpp"

namespace xscreen {

enum class Tail { greater, less };
enum class Method { normal, exact };

// Odds-of-treatment bias bound gamma >= 1; kappa = gamma/(1+gamma) is the
// success probability of the worst-case bounding Bernoulli variables.
class SensitivityModel {
public:
    explicit SensitivityModel(double gamma);
    double gamma() const { return gamma_; }
    double kappa() const { return kappa_; }

private:
    double gamma_;
    double kappa_;
};

struct PValueBound {
    double upper = 1;
    double lower = 1;
    Tail tail = Tail::greater;
    Method method = Method::normal;
    bool degenerate = false;  // all-zero scores
};

// Normal approximation to the bounding tail probabilities. No continuity
// correction.
PValueBound pbound_normal(double t, double sum_q, double sum_q2, const SensitivityModel& model,
                          Tail tail);

// Exact bounding tail probabilities by dynamic-programming convolution over
// an integer score lattice. `positive` marks pairs with Y_i > 0. Scores that
// cannot be rescaled to a modest integer lattice raise exact_unavailable;
// there is no silent fallback to the approximation.
PValueBound pbound_exact(const std::vector<bool>& positive, const ScoreVector& scores,
                         const SensitivityModel& model, Tail tail);

struct SensitivityValue {
    double gamma = 1;
    bool sensitive_at_gamma1 = false;  // even the randomization test exceeds alpha
    bool at_search_bound = false;      // upper bound still below alpha at gamma_max
};

inline constexpr double gamma_search_max = 1000.0;

// Largest gamma at which the upper P-value bound stays <= alpha, by bisection
// to 1e-4. The two flag fields mark the ends of the search range.
SensitivityValue sensitivity_value(const std::vector<double>& y, const ScoreSpec& spec,
                                   double alpha, Tail tail, Method method = Method::normal);

// Same search on precomputed statistic sums, under the normal approximation.
// Lets planning loops score a column once and probe both tails.
SensitivityValue sensitivity_value_normal(double t, double sum_q, double sum_q2, double alpha,
                                          Tail tail);

// Upper bound on the size of a level-alpha sensitivity analysis performed at
// gamma_assumed when the true bias is only gamma_true.
double size_bound(double gamma_true, double gamma_assumed, double sum_q, double sum_q2,
                  double alpha);

// Approximate expectation of the upper P-value bound under the same
// true/assumed mismatch; near 1 means a severely conservative analysis.
double expected_pvalue(double gamma_true, double gamma_assumed, double sum_q, double sum_q2);

// Standard normal helpers shared across modules.
double norm_cdf(double z);
double norm_quantile(double p);
double norm_pdf(double z);

}  // namespace xscreen
