#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xscreen/errors.hpp"

namespace xscreen {

enum class SimProcedure { bonferroni, cross_screen, single_screen };
enum class SimStatistic { wilcoxon, u858, adaptive };

struct SimMethod {
    SimProcedure procedure = SimProcedure::cross_screen;
    SimStatistic statistic = SimStatistic::adaptive;

    // round-trips with the CLI grammar bonferroni|cross-screen|single-screen
    // ":" wilcoxon|u858|adaptive
    static SimMethod parse(const std::string& text);
    std::string name() const;
};

struct ErrorDist {
    enum class Kind { normal, student_t };
    Kind kind = Kind::normal;
    double df = 4;

    static ErrorDist parse(const std::string& text);  // "normal" | "t:<df>"
    std::string name() const;
};

struct SimConfig {
    std::size_t k = 100;        // outcomes
    std::size_t i_pairs = 250;  // pairs
    double tau1 = 0;            // effect added to outcome 1
    double tau2 = 0;            // effect added to outcome 2
    ErrorDist error_dist;
    double gamma = 2;
    double alpha = 0.05;
    std::size_t replicates = 2000;
    std::uint64_t master_seed = 20160309;
    std::vector<SimMethod> methods;
    double planning_fraction = 0.2;  // single_screen arms
    unsigned threads = 0;            // 0 = hardware concurrency
};

struct MethodPower {
    SimMethod method;
    double h1 = 0, h2 = 0, h12 = 0;  // rejection proportions
    double se_h1 = 0, se_h2 = 0, se_h12 = 0;
    std::size_t replicates = 0;
};

struct SimResult {
    std::vector<MethodPower> methods;
    std::size_t replicates = 0;
    std::uint64_t master_seed = 0;
};

// Monte Carlo study of the screening procedures: per replicate draw I x K
// errors, shift the first two columns by tau1/tau2, run each configured
// method, and tally rejections of H1, H2, and both. Replicate streams are
// seeded from (master_seed, replicate index), so the tallies are identical
// for any thread count or scheduling.
SimResult simulate(const SimConfig& config);

double mc_standard_error(double p_hat, std::size_t n);

}  // namespace xscreen
