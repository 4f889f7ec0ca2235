// End-to-end acceptance checks: published reference values, oracle
// cross-checks, and error-rate guarantees. Each check prints one PASS/FAIL
// line; the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "xscreen/multitest.hpp"
#include "xscreen/pairdata.hpp"
#include "xscreen/power.hpp"
#include "xscreen/scores.hpp"
#include "xscreen/screenproc.hpp"
#include "xscreen/sensbound.hpp"
#include "xscreen/simharness.hpp"

using namespace xscreen;

namespace {

struct CheckResult {
    bool pass = true;
    std::string detail;

    void fail(const std::string& msg) {
        pass = false;
        if (detail.size() < 400) {
            if (!detail.empty())
                detail += "; ";
            detail += msg;
        }
    }
};

long long round_to(double x, double scale) {
    return std::llround(x * scale);
}

void wilcoxon_sums(std::size_t I, double& sq, double& sq2) {
    const double n = static_cast<double>(I);
    sq = n * (n + 1) / 2.0;
    sq2 = n * (n + 1) * (2 * n + 1) / 6.0;
}

// ---------------------------------------------------------------- check 1
CheckResult check_size_epv_table() {
    struct Row {
        double gt, ga;
        double size[3];
        double epv[3];
    };
    static const Row rows[] = {
        {1.00, 1.00, {0.05000, 0.05000, 0.05000}, {0.50, 0.50, 0.50}},
        {1.00, 1.10, {0.01976, 0.01077, 0.00511}, {0.62, 0.68, 0.74}},
        {1.00, 1.25, {0.00445, 0.00074, 0.00007}, {0.75, 0.86, 0.94}},
        {1.10, 1.25, {0.01392, 0.00586, 0.00197}, {0.65, 0.73, 0.81}},
        {1.25, 1.25, {0.05000, 0.05000, 0.05000}, {0.50, 0.50, 0.50}},
        {1.25, 1.50, {0.00750, 0.00194, 0.00033}, {0.71, 0.81, 0.89}},
        {1.50, 2.00, {0.00204, 0.00017, 0.00001}, {0.80, 0.91, 0.97}},
    };
    static const std::size_t sizes[] = {100, 250, 500};

    CheckResult r;
    for (const Row& row : rows) {
        for (int j = 0; j < 3; ++j) {
            double sq, sq2;
            wilcoxon_sums(sizes[j], sq, sq2);
            const double sz = size_bound(row.gt, row.ga, sq, sq2, 0.05);
            const double ev = expected_pvalue(row.gt, row.ga, sq, sq2);
            if (round_to(sz, 1e5) != round_to(row.size[j], 1e5)) {
                std::ostringstream ss;
                ss << "size(" << row.gt << "," << row.ga << ",I=" << sizes[j] << ") = " << sz
                   << " want " << row.size[j];
                r.fail(ss.str());
            }
            if (round_to(ev, 100) != round_to(row.epv[j], 100)) {
                std::ostringstream ss;
                ss << "epv(" << row.gt << "," << row.ga << ",I=" << sizes[j] << ") = " << ev
                   << " want " << row.epv[j];
                r.fail(ss.str());
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------- check 2
CheckResult check_asymptotic_power_table() {
    static const double cs[] = {0.0591, 0.3929, 0.8285};
    static const std::size_t ks[] = {1, 10, 50, 100, 250, 500};
    static const double bonf[3][6] = {
        {0.2926, 0.0818, 0.0303, 0.0194, 0.0106, 0.0066},
        {0.8074, 0.5085, 0.3220, 0.2571, 0.1866, 0.1441},
        {0.9888, 0.9244, 0.8295, 0.7769, 0.6997, 0.6376},
    };

    CheckResult r;
    for (int n = 0; n < 3; ++n) {
        const double ncp = n + 1;
        const double got_cs = cross_screen_power(ncp, 0.05);
        if (round_to(got_cs, 1e4) != round_to(cs[n], 1e4)) {
            std::ostringstream ss;
            ss << "cs(ncp=" << ncp << ") = " << got_cs << " want " << cs[n];
            r.fail(ss.str());
        }
        for (int j = 0; j < 6; ++j) {
            const double got = bonferroni_power({ncp, 0.05, ks[j]});
            if (round_to(got, 1e4) != round_to(bonf[n][j], 1e4)) {
                std::ostringstream ss;
                ss << "bonferroni(ncp=" << ncp << ",K=" << ks[j] << ") = " << got << " want "
                   << bonf[n][j];
                r.fail(ss.str());
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------- check 3
CheckResult check_ttest_size_table() {
    static const double taus[] = {0.1, 0.3, 0.5};
    static const long pins[3][6] = {
        {787, 1335, 1713, 1874, 2087, 2247},
        {89, 152, 195, 214, 238, 256},
        {33, 57, 74, 81, 90, 97},
    };
    static const std::size_t ks[] = {1, 10, 50, 100, 250, 500};

    CheckResult r;
    for (int t = 0; t < 3; ++t)
        for (int j = 0; j < 6; ++j) {
            const long got = static_cast<long>(ttest_pairs_required(taus[t], ks[j]));
            if (std::labs(got - pins[t][j]) > 1) {
                std::ostringstream ss;
                ss << "pairs(tau=" << taus[t] << ",K=" << ks[j] << ") = " << got << " want "
                   << pins[t][j] << " +-1";
                r.fail(ss.str());
            }
        }
    return r;
}

// ---------------------------------------------------------------- check 4
CheckResult check_selection_probability() {
    static const double taus[] = {0.10, 0.25, 0.50};
    static const double pins[] = {0.082, 0.501, 0.988};
    CheckResult r;
    for (int j = 0; j < 3; ++j) {
        const double got = naive_selection_prob(taus[j], 100, 100);
        if (std::abs(got - pins[j]) > 0.002) {
            std::ostringstream ss;
            ss << "prob(tau=" << taus[j] << ") = " << got << " want " << pins[j] << " +-0.002";
            r.fail(ss.str());
        }
    }
    return r;
}

// ---------------------------------------------------------------- check 5
double brute_force_tail(const std::vector<double>& q, double t, double kappa, Tail tail,
                        bool upper) {
    const std::size_t n = q.size();
    const double p = (tail == Tail::greater) == upper ? kappa : 1 - kappa;
    long double acc = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double sum = 0;
        int pos = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) {
                sum += q[i];
                ++pos;
            }
        const bool in_tail = tail == Tail::greater ? sum >= t - 1e-9 : sum <= t + 1e-9;
        if (in_tail)
            acc += std::pow(p, pos) * std::pow(1 - p, static_cast<double>(n - pos));
    }
    return static_cast<double>(acc);
}

CheckResult check_exact_bound_oracle() {
    CheckResult r;
    std::mt19937_64 rng(7151);
    std::normal_distribution<double> gauss(0.25, 1.0);
    const ScoreSpec specs[] = {ScoreSpec::wilcoxon(), ScoreSpec::sign(),
                               ScoreSpec::ustat(3, 2, 3), ScoreSpec::ustat(4, 2, 4)};
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 4 + rng() % 9;  // 4..12
        std::vector<double> y(n), abs_y(n);
        std::vector<bool> positive(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = gauss(rng);
            abs_y[i] = std::abs(y[i]);
            positive[i] = y[i] > 0;
        }
        const ScoreVector scores = compute_scores(abs_y, specs[inst % 4]);
        double t = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (positive[i])
                t += scores.q[i];

        for (double gamma : {1.0, 1.5, 2.0, 5.0}) {
            const SensitivityModel model(gamma);
            for (Tail tail : {Tail::greater, Tail::less}) {
                const PValueBound b = pbound_exact(positive, scores, model, tail);
                const double up = brute_force_tail(scores.q, t, model.kappa(), tail, true);
                const double lo = brute_force_tail(scores.q, t, model.kappa(), tail, false);
                if (std::abs(b.upper - up) > 1e-12 || std::abs(b.lower - lo) > 1e-12) {
                    std::ostringstream ss;
                    ss << "instance " << inst << " gamma " << gamma << ": got (" << b.upper
                       << "," << b.lower << ") want (" << up << "," << lo << ")";
                    r.fail(ss.str());
                }
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------- check 6
CheckResult check_exact_normal_agreement() {
    CheckResult r;
    std::mt19937_64 rng(88);
    const double shifts[] = {0.0, 0.05, 0.1, 0.15, 0.2};
    const double gammas[] = {1.0, 1.5, 2.0};
    for (int inst = 0; inst < 100; ++inst) {
        std::normal_distribution<double> gauss(shifts[inst % 5], 1.0);
        const std::size_t n = 250;
        std::vector<double> abs_y(n);
        std::vector<bool> positive(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = gauss(rng);
            abs_y[i] = std::abs(y[i]);
            positive[i] = y[i] > 0;
        }
        const ScoreVector scores = compute_scores(abs_y, ScoreSpec::wilcoxon());
        const TestStatistic stat = test_statistic(y, scores);
        const SensitivityModel model(gammas[inst % 3]);
        const double ne = pbound_normal(stat.t, stat.sum_q, stat.sum_q2, model,
                                        Tail::greater).upper;
        const double ex = pbound_exact(positive, scores, model, Tail::greater).upper;
        if (std::abs(ne - ex) > 0.005) {
            std::ostringstream ss;
            ss << "instance " << inst << ": normal " << ne << " vs exact " << ex;
            r.fail(ss.str());
        }
    }
    return r;
}

// ---------------------------------------------------------------- check 7
CheckResult check_fwer_under_null() {
    CheckResult r;
    const int reps = 10000;
    const double alpha = 0.05;
    const double bar = alpha + 3 * std::sqrt(alpha * (1 - alpha) / reps);
    const std::size_t I = 50, K = 20;

    auto report = [&](const char* name, int count) {
        const double rate = static_cast<double>(count) / reps;
        if (rate > bar) {
            std::ostringstream ss;
            ss << name << " familywise rate " << rate << " > " << bar;
            r.fail(ss.str());
        }
    };

    {
        std::mt19937_64 rng(424242);
        std::normal_distribution<double> gauss(0, 1);
        ScreenConfig cfg;
        cfg.gamma = 1;
        cfg.alpha = alpha;
        cfg.test_method = Method::exact;
        int cross_any = 0, single_any = 0;
        for (int rep = 0; rep < reps; ++rep) {
            std::vector<double> v(I * K);
            for (double& x : v)
                x = gauss(rng);
            const PairDiffMatrix m(std::move(v), I, K);
            cfg.seed = rng();
            if (!cross_screen(m, cfg).union_set.empty())
                ++cross_any;
            cfg.seed = rng();
            if (!single_screen(m, 0.2, cfg).rejected.empty())
                ++single_any;
        }
        report("cross_screen", cross_any);
        report("single_screen", single_any);
    }

    {
        std::mt19937_64 rng(11235);
        std::uniform_real_distribution<double> u(0, 1);
        int any[6] = {0, 0, 0, 0, 0, 0};
        for (int rep = 0; rep < reps; ++rep) {
            std::vector<IndexedP> ps(K);
            std::vector<std::vector<double>> cells(2, std::vector<double>(K));
            for (std::size_t j = 0; j < K; ++j) {
                ps[j] = {j, u(rng)};
                cells[0][j] = u(rng);
                cells[1][j] = u(rng);
            }
            auto hit = [](const std::vector<TestOutcome>& out) {
                for (const TestOutcome& o : out)
                    if (o.rejected)
                        return 1;
                return 0;
            };
            any[0] += hit(bonferroni(ps, K, alpha));
            any[1] += hit(holm(ps, alpha));
            any[2] += hit(fixed_sequence(ps, alpha));
            any[3] += hit(fallback(ps, alpha));
            any[4] += hit(recycling(ps, alpha));
            any[5] += hit(adaptive_min_p(cells, 2, alpha, K));
        }
        report("bonferroni", any[0]);
        report("holm", any[1]);
        report("fixed_sequence", any[2]);
        report("fallback", any[3]);
        report("recycling", any[4]);
        report("adaptive_min_p", any[5]);
    }
    return r;
}

// ---------------------------------------------------------------- check 8
CheckResult check_simulated_power_cells() {
    CheckResult r;
    const double tol = 0.03;  // three percentage points

    auto expect = [&](const char* what, double got, double want) {
        if (std::abs(got - want) > tol) {
            std::ostringstream ss;
            ss << what << " = " << got << " want " << want << " +-" << tol;
            r.fail(ss.str());
        }
    };

    SimConfig base;
    base.replicates = 2000;
    base.gamma = 2;
    base.alpha = 0.05;
    base.master_seed = 20160309;

    {
        SimConfig cfg = base;
        cfg.k = 100;
        cfg.i_pairs = 250;
        cfg.tau1 = 0.5;
        cfg.tau2 = 0.0;
        cfg.methods = {SimMethod::parse("cross-screen:adaptive"),
                       SimMethod::parse("bonferroni:adaptive"),
                       SimMethod::parse("single-screen:wilcoxon")};
        const SimResult res = simulate(cfg);
        expect("K100 I250 tau(.5,0) cross-screen adaptive H1", res.methods[0].h1, 0.883);
        expect("K100 I250 tau(.5,0) bonferroni adaptive H1", res.methods[1].h1, 0.350);
        expect("K100 I250 tau(.5,0) single-screen wilcoxon H1", res.methods[2].h1, 0.578);
    }
    {
        SimConfig cfg = base;
        cfg.k = 100;
        cfg.i_pairs = 500;
        cfg.tau1 = 0.6;
        cfg.tau2 = 0.4;
        cfg.methods = {SimMethod::parse("cross-screen:adaptive"),
                       SimMethod::parse("bonferroni:adaptive")};
        const SimResult res = simulate(cfg);
        expect("K100 I500 tau(.6,.4) cross-screen adaptive H2", res.methods[0].h2, 0.865);
        expect("K100 I500 tau(.6,.4) bonferroni adaptive H2", res.methods[1].h2, 0.308);
    }
    {
        SimConfig cfg = base;
        cfg.k = 500;
        cfg.i_pairs = 500;
        cfg.tau1 = 0.5;
        cfg.tau2 = 0.5;
        cfg.methods = {SimMethod::parse("cross-screen:adaptive")};
        const SimResult res = simulate(cfg);
        expect("K500 I500 tau(.5,.5) cross-screen adaptive H12", res.methods[0].h12, 0.993);
    }
    return r;
}

// ---------------------------------------------------------------- check 9
CheckResult check_bonferroni_pins() {
    CheckResult r;
    auto pin = [&](double p, std::size_t n, double want) {
        const double adj = bonferroni({{0, p}}, n, 0.05)[0].adjusted_p;
        if (round_to(adj, 1000) != round_to(want, 1000)) {
            std::ostringstream ss;
            ss << "bonferroni(" << p << "," << n << ") = " << adj << " want " << want;
            r.fail(ss.str());
        }
    };
    pin(0.001036, 92, 0.095);
    pin(0.00383, 4, 0.015);
    pin(0.00865, 4, 0.035);
    return r;
}

// --------------------------------------------------------------- check 10
CheckResult check_ordered_testing_logic() {
    CheckResult r;
    auto want = [&](const char* what, const std::vector<TestOutcome>& out,
                    const std::vector<bool>& expected) {
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (out[i].rejected != expected[i]) {
                std::ostringstream ss;
                ss << what << ": hypothesis " << i + 1 << " "
                   << (out[i].rejected ? "rejected" : "accepted") << ", expected the opposite";
                r.fail(ss.str());
                return;
            }
    };
    auto ps = [](std::initializer_list<double> vals) {
        std::vector<IndexedP> out;
        std::size_t i = 0;
        for (double v : vals)
            out.push_back({i++, v});
        return out;
    };

    // fixed sequence: full alpha in order, stop at the first acceptance
    want("fixed_sequence stops", fixed_sequence(ps({0.01, 0.2, 0.001}), 0.05),
         {true, false, false});
    want("fixed_sequence runs on", fixed_sequence(ps({0.04, 0.05, 0.02}), 0.05),
         {true, true, true});

    // fallback with two hypotheses: alpha/2 then alpha (if first rejected)
    want("fallback both", fallback(ps({0.01, 0.04}), 0.05), {true, true});
    want("fallback second only", fallback(ps({0.04, 0.02}), 0.05), {false, true});
    want("fallback neither", fallback(ps({0.04, 0.03}), 0.05), {false, false});
    want("fallback first only", fallback(ps({0.01, 0.06}), 0.05), {true, false});

    // recycling: the level freed by the second rejection funds a retest of
    // the first at full alpha
    want("recycling retest succeeds", recycling(ps({0.03, 0.02}), 0.05), {true, true});
    want("recycling retest fails", recycling(ps({0.06, 0.02}), 0.05), {false, true});
    want("recycling nothing to recycle", recycling(ps({0.03, 0.04}), 0.05), {false, false});
    want("recycling backward sweep", recycling(ps({0.5, 0.04, 0.01}), 0.06),
         {false, true, true});
    return r;
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        CheckResult (*fn)();
    };
    static const Entry checks[] = {
        {"size and expected p-value bounds under assumed bias", check_size_epv_table},
        {"asymptotic power: bonferroni vs split-sample screening", check_asymptotic_power_table},
        {"pairs required by the corrected noncentral t-test", check_ttest_size_table},
        {"chance the active outcome posts the largest mean", check_selection_probability},
        {"exact bound equals brute-force enumeration (200 instances)", check_exact_bound_oracle},
        {"exact and normal bounds agree at I=250 (100 instances)", check_exact_normal_agreement},
        {"familywise error under the global null (10,000 datasets)", check_fwer_under_null},
        {"simulated power cells at 2000 replicates", check_simulated_power_cells},
        {"bonferroni adjustment arithmetic", check_bonferroni_pins},
        {"ordered-testing decision logic", check_ordered_testing_logic},
    };

    int failed = 0;
    int index = 0;
    for (const Entry& e : checks) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        CheckResult res;
        try {
            res = e.fn();
        } catch (const std::exception& ex) {
            res.pass = false;
            res.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d. %s (%.2f s)\n", res.pass ? "PASS" : "FAIL", index, e.label, secs);
        if (!res.pass) {
            ++failed;
            std::printf("        %s\n", res.detail.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%d of %d checks passed\n",
                static_cast<int>(std::size(checks)) - failed,
                static_cast<int>(std::size(checks)));
    return failed == 0 ? 0 : 1;
}
