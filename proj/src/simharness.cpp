#include "xscreen/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "xscreen/multitest.hpp"
#include "xscreen/pairdata.hpp"
#include "xscreen/screenproc.hpp"
#include "xscreen/sensbound.hpp"

namespace xscreen {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<ScoreSpec> candidate_stats(SimStatistic s) {
    switch (s) {
        case SimStatistic::wilcoxon:
            return {ScoreSpec::wilcoxon()};
        case SimStatistic::u858:
            return {ScoreSpec::ustat(8, 5, 8)};
        case SimStatistic::adaptive:
            return {ScoreSpec::ustat(8, 5, 8), ScoreSpec::ustat(8, 6, 7),
                    ScoreSpec::ustat(8, 7, 8)};
    }
    throw input_error("unknown statistic");
}

struct Tally {
    std::uint64_t h1 = 0, h2 = 0, h12 = 0;
};

// one-sided bounds for one outcome column under every candidate statistic,
// minimized per statistic over the two tails
double min_one_sided_p(const std::vector<double>& col, const std::vector<ScoreSpec>& stats,
                       const SensitivityModel& model) {
    std::vector<double> abs_col(col.size());
    for (std::size_t i = 0; i < col.size(); ++i)
        abs_col[i] = std::abs(col[i]);
    double p_min = 1;
    for (const ScoreSpec& spec : stats) {
        const ScoreVector scores = compute_scores(abs_col, spec);
        const TestStatistic stat = test_statistic(col, scores);
        p_min = std::min(
            p_min, pbound_normal(stat.t, stat.sum_q, stat.sum_q2, model, Tail::greater).upper);
        p_min = std::min(
            p_min, pbound_normal(stat.t, stat.sum_q, stat.sum_q2, model, Tail::less).upper);
    }
    return p_min;
}

void run_replicate(const SimConfig& config, std::uint64_t rep,
                   const std::vector<std::vector<ScoreSpec>>& arm_stats,
                   std::vector<Tally>& tallies) {
    const std::uint64_t rep_seed = mix(config.master_seed, rep);
    std::mt19937_64 rng(rep_seed);

    const std::size_t I = config.i_pairs, K = config.k;
    std::vector<double> values(I * K);
    if (config.error_dist.kind == ErrorDist::Kind::normal) {
        std::normal_distribution<double> err(0, 1);
        for (double& v : values)
            v = err(rng);
    } else {
        std::student_t_distribution<double> err(config.error_dist.df);
        for (double& v : values)
            v = err(rng);
    }
    for (std::size_t i = 0; i < I; ++i) {
        values[i * K + 0] += config.tau1;
        if (K > 1)
            values[i * K + 1] += config.tau2;
    }
    const PairDiffMatrix m(std::move(values), I, K);

    for (std::size_t a = 0; a < config.methods.size(); ++a) {
        const SimMethod& method = config.methods[a];
        bool rej1 = false, rej2 = false;

        if (method.procedure == SimProcedure::bonferroni) {
            const SensitivityModel model(config.gamma);
            const std::size_t n_stats = arm_stats[a].size();
            const double threshold =
                config.alpha / (static_cast<double>(n_stats) * 2.0 * static_cast<double>(K));
            rej1 = min_one_sided_p(m.column(0), arm_stats[a], model) <= threshold;
            if (K > 1)
                rej2 = min_one_sided_p(m.column(1), arm_stats[a], model) <= threshold;
        } else {
            ScreenConfig sc;
            sc.candidates = arm_stats[a];
            sc.gamma = config.gamma;
            sc.alpha = config.alpha;
            sc.seed = mix(rep_seed, a);
            sc.selection = Selection::ordered_all();
            sc.procedure = Procedure::fixed_sequence;
            sc.test_method = Method::normal;
            if (method.procedure == SimProcedure::cross_screen) {
                const ScreenResult r = cross_screen(m, sc);
                rej1 = std::binary_search(r.union_set.begin(), r.union_set.end(),
                                          std::size_t{0});
                rej2 = std::binary_search(r.union_set.begin(), r.union_set.end(),
                                          std::size_t{1});
            } else {
                const SingleScreenResult r =
                    single_screen(m, config.planning_fraction, sc);
                rej1 = std::binary_search(r.rejected.begin(), r.rejected.end(), std::size_t{0});
                rej2 = std::binary_search(r.rejected.begin(), r.rejected.end(), std::size_t{1});
            }
        }

        tallies[a].h1 += rej1;
        tallies[a].h2 += rej2;
        tallies[a].h12 += rej1 && rej2;
    }
}

}  // namespace

SimResult simulate(const SimConfig& config) {
    if (config.replicates < 1)
        throw input_error("simulate needs at least one replicate");
    if (config.methods.empty())
        throw input_error("simulate needs at least one method");
    if (config.k < 2 || config.i_pairs < 4)
        throw input_error("simulate needs K >= 2 outcomes and I >= 4 pairs");
    if (!(config.alpha > 0) || !(config.alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
    if (config.error_dist.kind == ErrorDist::Kind::student_t && !(config.error_dist.df > 0))
        throw input_error("t error distribution needs df > 0");
    SensitivityModel check_gamma(config.gamma);
    (void)check_gamma;

    std::vector<std::vector<ScoreSpec>> arm_stats;
    arm_stats.reserve(config.methods.size());
    for (const SimMethod& method : config.methods)
        arm_stats.push_back(candidate_stats(method.statistic));

    const std::size_t M = config.methods.size();
    unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, config.replicates));

    std::vector<std::vector<Tally>> per_worker(threads, std::vector<Tally>(M));
    auto worker = [&](unsigned w) {
        for (std::uint64_t rep = w; rep < config.replicates; rep += threads)
            run_replicate(config, rep, arm_stats, per_worker[w]);
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back(worker, w);
        for (std::thread& t : pool)
            t.join();
    }

    SimResult out;
    out.replicates = config.replicates;
    out.master_seed = config.master_seed;
    out.methods.reserve(M);
    const double n = static_cast<double>(config.replicates);
    for (std::size_t a = 0; a < M; ++a) {
        Tally total;
        for (const auto& wt : per_worker) {
            total.h1 += wt[a].h1;
            total.h2 += wt[a].h2;
            total.h12 += wt[a].h12;
        }
        MethodPower mp;
        mp.method = config.methods[a];
        mp.replicates = config.replicates;
        mp.h1 = static_cast<double>(total.h1) / n;
        mp.h2 = static_cast<double>(total.h2) / n;
        mp.h12 = static_cast<double>(total.h12) / n;
        mp.se_h1 = mc_standard_error(mp.h1, config.replicates);
        mp.se_h2 = mc_standard_error(mp.h2, config.replicates);
        mp.se_h12 = mc_standard_error(mp.h12, config.replicates);
        out.methods.push_back(mp);
    }
    return out;
}

double mc_standard_error(double p_hat, std::size_t n) {
    if (n < 1)
        throw input_error("standard error needs n >= 1");
    if (!(p_hat >= 0) || p_hat > 1)
        throw input_error("proportion must lie in [0, 1]");
    return std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(n));
}

SimMethod SimMethod::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw input_error("method must look like procedure:statistic, got " + text);
    const std::string proc = text.substr(0, colon);
    const std::string stat = text.substr(colon + 1);
    SimMethod m;
    if (proc == "bonferroni")
        m.procedure = SimProcedure::bonferroni;
    else if (proc == "cross-screen")
        m.procedure = SimProcedure::cross_screen;
    else if (proc == "single-screen")
        m.procedure = SimProcedure::single_screen;
    else
        throw input_error("unknown procedure: " + proc);
    if (stat == "wilcoxon")
        m.statistic = SimStatistic::wilcoxon;
    else if (stat == "u858")
        m.statistic = SimStatistic::u858;
    else if (stat == "adaptive")
        m.statistic = SimStatistic::adaptive;
    else
        throw input_error("unknown statistic: " + stat);
    return m;
}

std::string SimMethod::name() const {
    std::string s;
    switch (procedure) {
        case SimProcedure::bonferroni: s = "bonferroni"; break;
        case SimProcedure::cross_screen: s = "cross-screen"; break;
        case SimProcedure::single_screen: s = "single-screen"; break;
    }
    s += ':';
    switch (statistic) {
        case SimStatistic::wilcoxon: s += "wilcoxon"; break;
        case SimStatistic::u858: s += "u858"; break;
        case SimStatistic::adaptive: s += "adaptive"; break;
    }
    return s;
}

ErrorDist ErrorDist::parse(const std::string& text) {
    ErrorDist d;
    if (text == "normal") {
        d.kind = Kind::normal;
        return d;
    }
    if (text.rfind("t:", 0) == 0) {
        d.kind = Kind::student_t;
        try {
            d.df = std::stod(text.substr(2));
        } catch (const std::exception&) {
            throw input_error("bad error distribution: " + text);
        }
        if (!(d.df > 0))
            throw input_error("t error distribution needs df > 0");
        return d;
    }
    throw input_error("unknown error distribution: " + text + " (expected normal or t:<df>)");
}

std::string ErrorDist::name() const {
    if (kind == Kind::normal)
        return "normal";
    char buf[32];
    std::snprintf(buf, sizeof buf, "t:%g", df);
    return buf;
}

}  // namespace xscreen
