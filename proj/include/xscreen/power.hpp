#pragma once

#include <cstddef>

#include "xscreen/errors.hpp"

namespace xscreen {

// Asymptotic comparison of one combined level-alpha/(2K) test against a pair
// of split-sample tests at alpha/2. ncp is the standardized effect
// (theta - theta0)/sqrt(v), and the variance under the alternative is taken
// equal to the null variance.
struct AsymptoticParams {
    double ncp = 0;
    double alpha = 0.05;
    std::size_t k = 1;
};

// Power of the full-sample test with a two-sided Bonferroni correction over
// K hypotheses.
double bonferroni_power(const AsymptoticParams& params);

// Power of the split half-sample pair: one half must reach its alpha/2
// threshold and the planning half must point the right way. Adaptive
// quadrature, absolute error well under 1e-6.
double cross_screen_power(double ncp, double alpha);

// Smallest I giving the two-sided level-alpha/K noncentral-t test with
// noncentrality tau*sqrt(I) and I-1 degrees of freedom at least the target
// power.
std::size_t ttest_pairs_required(double tau, std::size_t k, double power = 0.8,
                                 double alpha = 0.05);

// Probability that the active outcome has the largest observed mean among K
// outcomes when its true effect is tau and each mean averages I pairs.
double naive_selection_prob(double tau, std::size_t k, std::size_t i_pairs);

}  // namespace xscreen
