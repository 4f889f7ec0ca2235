#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "xscreen/multitest.hpp"
#include "xscreen/pairdata.hpp"
#include "xscreen/power.hpp"
#include "xscreen/scores.hpp"
#include "xscreen/screenproc.hpp"
#include "xscreen/sensbound.hpp"
#include "xscreen/simharness.hpp"
#include "xscreen/version.hpp"

using nlohmann::json;
using namespace xscreen;

namespace {

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(ss.str())));
    return buf;
}

// probabilities are printed with 6 significant digits
double sig6(double x) {
    if (!std::isfinite(x) || x == 0)
        return x;
    const double mag = std::pow(10.0, 5 - std::floor(std::log10(std::fabs(x))));
    return std::round(x * mag) / mag;
}

json make_manifest(const std::string& subcommand, const std::vector<std::string>& argv_tail,
                   std::uint64_t seed, const std::string& input_digest) {
    json m;
    m["subcommand"] = subcommand;
    m["flags"] = argv_tail;
    m["seed"] = seed;
    m["library_version"] = library_version;
    m["input_digest"] = input_digest;
    return m;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void emit_csv(const json& manifest, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
    std::cout << "# manifest " << manifest.dump() << "\n";
    for (std::size_t j = 0; j < header.size(); ++j)
        std::cout << (j ? "," : "") << csv_escape(header[j]);
    std::cout << "\n";
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
            std::cout << (j ? "," : "") << csv_escape(row[j]);
        std::cout << "\n";
    }
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss << x;
    return ss.str();
}

Tail parse_tail(const std::string& s) {
    if (s == "greater")
        return Tail::greater;
    if (s == "less")
        return Tail::less;
    throw input_error("tail must be greater or less, got " + s);
}

Method parse_method(const std::string& s) {
    if (s == "normal")
        return Method::normal;
    if (s == "exact")
        return Method::exact;
    throw input_error("method must be normal or exact, got " + s);
}

Procedure parse_procedure(const std::string& s) {
    if (s == "bonferroni")
        return Procedure::bonferroni;
    if (s == "holm")
        return Procedure::holm;
    if (s == "fixed")
        return Procedure::fixed_sequence;
    if (s == "fallback")
        return Procedure::fallback;
    if (s == "recycle")
        return Procedure::recycling;
    throw input_error("unknown procedure: " + s +
                      " (expected bonferroni|holm|fixed|fallback|recycle)");
}

Selection parse_selection(const std::string& s) {
    if (s == "ordered")
        return Selection::ordered_all();
    if (s.rfind("top:", 0) == 0) {
        std::size_t k = 0;
        try {
            k = std::stoul(s.substr(4));
        } catch (const std::exception&) {
            throw input_error("bad selection: " + s);
        }
        return Selection::top_k(k);
    }
    throw input_error("selection must be ordered or top:<k>, got " + s);
}

std::vector<ScoreSpec> parse_stats(const std::vector<std::string>& texts) {
    std::vector<ScoreSpec> out;
    for (const std::string& t : texts)
        out.push_back(ScoreSpec::parse(t));
    if (out.empty())
        out.push_back(ScoreSpec::wilcoxon());
    return out;
}

const char* tail_name(Tail t) { return t == Tail::greater ? "greater" : "less"; }

json gamma_star_json(const SensitivityValue& gs) {
    json j;
    j["gamma"] = gs.gamma;
    j["sensitive_at_gamma1"] = gs.sensitive_at_gamma1;
    j["at_search_bound"] = gs.at_search_bound;
    return j;
}

json plan_json(const ScreenPlan& plan, const std::vector<std::string>& names) {
    json arr = json::array();
    for (const PlanEntry& e : plan.order) {
        json j;
        j["hypothesis"] = e.hypothesis;
        j["outcome"] = names.at(e.hypothesis);
        j["direction"] = tail_name(e.direction);
        j["stat"] = e.statistic.name();
        j["gamma_star"] = gamma_star_json(e.gamma_star);
        j["planning_p"] = sig6(e.planning_p);
        arr.push_back(j);
    }
    return arr;
}

json half_json(const HalfResult& half) {
    json arr = json::array();
    for (const ExecOutcome& o : half.outcomes) {
        json j;
        j["hypothesis"] = o.hypothesis;
        j["p"] = sig6(o.p);
        j["adjusted_p"] = sig6(o.adjusted_p);
        j["rejected"] = o.rejected;
        j["level_spent"] = sig6(o.level_spent);
        arr.push_back(j);
    }
    return arr;
}

json split_json(const SplitAssignment& split) {
    json j;
    j["kind"] = split.kind == SplitAssignment::Kind::random ? "random" : "covariate";
    if (split.kind == SplitAssignment::Kind::random)
        j["seed"] = split.seed;
    else
        j["label"] = split.label;
    j["half1"] = split.half1;
    j["half2"] = split.half2;
    return j;
}

std::vector<std::string> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw input_error("cannot open " + path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            labels.push_back(line);
    }
    return labels;
}

struct CommonScreenFlags {
    std::string file;
    double gamma = 1;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::vector<std::string> stats;
    std::string select = "ordered";
    std::string mtp = "fixed";
    std::string method = "normal";
    double planning_gamma = -1;
    double planning_alpha = -1;
};

void add_screen_flags(CLI::App* cmd, CommonScreenFlags& f) {
    cmd->add_option("file", f.file, "CSV of pair differences, one outcome per column")
        ->required();
    cmd->add_option("--gamma", f.gamma, "sensitivity parameter for testing");
    cmd->add_option("--alpha", f.alpha, "familywise level");
    cmd->add_option("--seed", f.seed, "split seed");
    cmd->add_option("--stat", f.stats,
                    "candidate statistic wilcoxon|sign|perm-t|huber[:c]|u:m,mlo,mhi "
                    "(repeat for several)");
    cmd->add_option("--select", f.select, "ordered | top:<k>");
    cmd->add_option("--mtp", f.mtp, "bonferroni|holm|fixed|fallback|recycle");
    cmd->add_option("--method", f.method, "normal | exact");
    cmd->add_option("--planning-gamma", f.planning_gamma, "gamma used when planning");
    cmd->add_option("--planning-alpha", f.planning_alpha, "alpha used when planning");
}

ScreenConfig to_config(const CommonScreenFlags& f) {
    ScreenConfig cfg;
    cfg.candidates = parse_stats(f.stats);
    cfg.gamma = f.gamma;
    cfg.alpha = f.alpha;
    cfg.seed = f.seed;
    cfg.selection = parse_selection(f.select);
    cfg.procedure = parse_procedure(f.mtp);
    cfg.test_method = parse_method(f.method);
    cfg.planning_gamma = f.planning_gamma;
    cfg.planning_alpha = f.planning_alpha;
    return cfg;
}

int run(int argc, char** argv) {
    const std::vector<std::string> argv_tail(argv + 1, argv + argc);
    CLI::App app{"Sensitivity analysis and cross-screening for matched pairs"};
    app.require_subcommand(1);
    std::string format = "json";
    app.add_option("--format", format, "json | csv")->capture_default_str();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "per-outcome sensitivity analysis, no split");
    std::string an_file, an_stat = "wilcoxon", an_tail = "greater", an_method = "normal",
                an_mtp = "bonferroni";
    double an_gamma = 1, an_alpha = 0.05;
    analyze->add_option("file", an_file, "CSV of pair differences")->required();
    analyze->add_option("--gamma", an_gamma, "sensitivity parameter");
    analyze->add_option("--alpha", an_alpha, "familywise level");
    analyze->add_option("--stat", an_stat, "wilcoxon|sign|perm-t|huber[:c]|u:m,mlo,mhi");
    analyze->add_option("--tail", an_tail, "greater | less");
    analyze->add_option("--method", an_method, "normal | exact");
    analyze->add_option("--mtp", an_mtp, "bonferroni|holm|fixed|fallback|recycle");

    // cross-screen / single-screen
    auto* cross = app.add_subcommand("cross-screen", "split, cross-plan, test both halves");
    CommonScreenFlags cf;
    add_screen_flags(cross, cf);
    std::string labels_path;
    cross->add_option("--labels", labels_path,
                      "newline-separated pair labels; two distinct values give a "
                      "covariate split instead of a random one");

    auto* single = app.add_subcommand("single-screen",
                                      "plan on a small discarded sample, test the rest");
    CommonScreenFlags sf;
    add_screen_flags(single, sf);
    double fraction = 0.2;
    single->add_option("--fraction", fraction, "planning fraction of pairs");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo power of the screening procedures");
    SimConfig sim_cfg;
    std::vector<std::string> sim_methods;
    std::string sim_dist = "normal";
    sim->add_option("--k", sim_cfg.k, "outcomes");
    sim->add_option("--i", sim_cfg.i_pairs, "pairs");
    sim->add_option("--tau1", sim_cfg.tau1, "effect on outcome 1");
    sim->add_option("--tau2", sim_cfg.tau2, "effect on outcome 2");
    sim->add_option("--dist", sim_dist, "normal | t:<df>");
    sim->add_option("--gamma", sim_cfg.gamma, "sensitivity parameter");
    sim->add_option("--alpha", sim_cfg.alpha, "familywise level");
    sim->add_option("--replicates", sim_cfg.replicates, "Monte Carlo replicates");
    sim->add_option("--seed", sim_cfg.master_seed, "master seed");
    sim->add_option("--methods", sim_methods,
                    "procedure:statistic, procedure in bonferroni|cross-screen|single-screen, "
                    "statistic in wilcoxon|u858|adaptive (comma-separated or repeated)")
        ->delimiter(',');
    sim->add_option("--fraction", sim_cfg.planning_fraction, "single-screen planning fraction");
    sim->add_option("--threads", sim_cfg.threads, "worker threads, 0 = hardware");

    // power family
    auto* power = app.add_subcommand("power", "analytic power and sample size");
    power->require_subcommand(1);
    auto* pasym = power->add_subcommand("asymptotic",
                                        "Bonferroni vs cross-screening asymptotic power");
    double ncp = 0, p_alpha = 0.05;
    std::size_t p_k = 1;
    pasym->add_option("--ncp", ncp, "standardized effect")->required();
    pasym->add_option("--k", p_k, "hypotheses");
    pasym->add_option("--alpha", p_alpha, "level");

    double tt_tau = 0, tt_power = 0.8, tt_alpha = 0.05;
    std::size_t tt_k = 1;
    auto add_ttest_flags = [&](CLI::App* c) {
        c->add_option("--tau", tt_tau, "effect size in sd units")->required();
        c->add_option("--k", tt_k, "hypotheses");
        c->add_option("--power", tt_power, "target power");
        c->add_option("--alpha", tt_alpha, "two-sided level before the K-fold correction");
    };
    auto* pttest = power->add_subcommand("ttest-size", "pairs required by the corrected t-test");
    add_ttest_flags(pttest);
    auto* ttest_alias = app.add_subcommand("ttest-size", "pairs required by the corrected t-test");
    add_ttest_flags(ttest_alias);

    auto* pnaive = power->add_subcommand("naive",
                                         "chance the active outcome has the largest mean");
    double nv_tau = 0;
    std::size_t nv_k = 1, nv_i = 1;
    pnaive->add_option("--tau", nv_tau, "true effect on the active outcome")->required();
    pnaive->add_option("--k", nv_k, "outcomes");
    pnaive->add_option("--i", nv_i, "pairs behind each mean");

    // epv
    auto* epv = app.add_subcommand("epv", "size bound and expected P-value bound under "
                                          "an assumed gamma larger than the truth");
    double e_gt = 1, e_g = 1, e_alpha = 0.05;
    std::size_t e_i = 0;
    std::string e_stat = "wilcoxon";
    epv->add_option("--gamma-true", e_gt, "true bias")->required();
    epv->add_option("--gamma", e_g, "assumed bias")->required();
    epv->add_option("--i", e_i, "pairs")->required();
    epv->add_option("--stat", e_stat, "rank statistic for the score sums");
    epv->add_option("--alpha", e_alpha, "level of the size bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the usage error
        return code == 0 ? 0 : 2;
    }

    if (format != "json" && format != "csv")
        throw input_error("format must be json or csv, got " + format);
    const bool csv = format == "csv";

    if (*analyze) {
        const json manifest =
            make_manifest("analyze", argv_tail, 0, file_digest(an_file));
        const PairDiffMatrix m = load_pairs(an_file);
        const ScoreSpec spec = ScoreSpec::parse(an_stat);
        const Tail tail = parse_tail(an_tail);
        const Method method = parse_method(an_method);
        const SensitivityModel model(an_gamma);
        const std::size_t K = m.outcomes();

        struct Row {
            TestStatistic stat;
            PValueBound bound;
            SensitivityValue gs;
        };
        std::vector<Row> rows(K);
        std::vector<IndexedP> pvals(K);
        for (std::size_t k = 0; k < K; ++k) {
            const std::vector<double> y = m.column(k);
            std::vector<double> abs_y(y.size());
            std::vector<bool> positive(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                abs_y[i] = std::abs(y[i]);
                positive[i] = y[i] > 0;
            }
            const ScoreVector scores = compute_scores(abs_y, spec);
            rows[k].stat = test_statistic(y, scores);
            rows[k].bound =
                method == Method::normal
                    ? pbound_normal(rows[k].stat.t, rows[k].stat.sum_q, rows[k].stat.sum_q2,
                                    model, tail)
                    : pbound_exact(positive, scores, model, tail);
            rows[k].gs = sensitivity_value(y, spec, an_alpha, tail, method);
            pvals[k] = {k, rows[k].bound.upper};
        }

        std::vector<TestOutcome> outcomes;
        switch (parse_procedure(an_mtp)) {
            case Procedure::bonferroni: outcomes = bonferroni(pvals, K, an_alpha); break;
            case Procedure::holm: outcomes = holm(pvals, an_alpha); break;
            case Procedure::fixed_sequence: outcomes = fixed_sequence(pvals, an_alpha); break;
            case Procedure::fallback: outcomes = fallback(pvals, an_alpha); break;
            case Procedure::recycling: outcomes = recycling(pvals, an_alpha); break;
        }
        std::vector<const TestOutcome*> by_index(K);
        for (const TestOutcome& o : outcomes)
            by_index[o.hypothesis_index] = &o;

        json out;
        out["manifest"] = manifest;
        out["gamma"] = an_gamma;
        out["alpha"] = an_alpha;
        out["stat"] = spec.name();
        out["tail"] = an_tail;
        out["method"] = an_method;
        out["mtp"] = an_mtp;
        json arr = json::array();
        for (std::size_t k = 0; k < K; ++k) {
            json j;
            j["outcome"] = m.outcome_names()[k];
            j["t"] = rows[k].stat.t;
            j["sum_q"] = rows[k].stat.sum_q;
            j["sum_q2"] = rows[k].stat.sum_q2;
            j["p_upper"] = sig6(rows[k].bound.upper);
            j["p_lower"] = sig6(rows[k].bound.lower);
            j["gamma_star"] = gamma_star_json(rows[k].gs);
            j["adjusted_p"] = sig6(by_index[k]->adjusted_p);
            j["rejected"] = by_index[k]->rejected;
            j["level_spent"] = sig6(by_index[k]->level_spent);
            arr.push_back(j);
        }
        out["outcomes"] = arr;
        if (csv) {
            std::vector<std::vector<std::string>> lines;
            for (std::size_t k = 0; k < K; ++k)
                lines.push_back({m.outcome_names()[k], fmt(rows[k].stat.t),
                                 fmt(sig6(rows[k].bound.upper)), fmt(sig6(rows[k].bound.lower)),
                                 fmt(rows[k].gs.gamma),
                                 fmt(sig6(by_index[k]->adjusted_p)),
                                 by_index[k]->rejected ? "true" : "false"});
            emit_csv(manifest,
                     {"outcome", "t", "p_upper", "p_lower", "gamma_star", "adjusted_p",
                      "rejected"},
                     lines);
        } else {
            std::cout << out.dump(2) << "\n";
        }
        return 0;
    }

    if (*cross) {
        const json manifest =
            make_manifest("cross-screen", argv_tail, cf.seed, file_digest(cf.file));
        const PairDiffMatrix m = load_pairs(cf.file);
        const ScreenConfig cfg = to_config(cf);
        const ScreenResult r = labels_path.empty()
                                   ? cross_screen(m, cfg)
                                   : nonrandom_cross_screen(m, read_labels(labels_path), cfg);
        json out;
        out["manifest"] = manifest;
        out["gamma"] = r.gamma;
        out["alpha"] = r.alpha;
        out["split"] = split_json(r.split);
        out["plan1"] = plan_json(r.plan1, m.outcome_names());
        out["plan2"] = plan_json(r.plan2, m.outcome_names());
        out["half1"] = half_json(r.half1);
        out["half2"] = half_json(r.half2);
        out["r1"] = r.r1;
        out["r2"] = r.r2;
        out["union"] = r.union_set;
        out["replicated"] = r.intersection;
        json adj = json::array();
        for (double p : r.adjusted_p)
            adj.push_back(sig6(p));
        out["adjusted_p"] = adj;
        if (csv) {
            std::vector<std::vector<std::string>> lines;
            for (std::size_t k = 0; k < m.outcomes(); ++k) {
                const bool in_union = std::binary_search(r.union_set.begin(),
                                                         r.union_set.end(), k);
                const bool repl = std::binary_search(r.intersection.begin(),
                                                     r.intersection.end(), k);
                lines.push_back({m.outcome_names()[k], fmt(sig6(r.adjusted_p[k])),
                                 in_union ? "true" : "false", repl ? "true" : "false"});
            }
            emit_csv(manifest, {"outcome", "adjusted_p", "rejected", "replicated"}, lines);
        } else {
            std::cout << out.dump(2) << "\n";
        }
        return 0;
    }

    if (*single) {
        const json manifest =
            make_manifest("single-screen", argv_tail, sf.seed, file_digest(sf.file));
        const PairDiffMatrix m = load_pairs(sf.file);
        const SingleScreenResult r = single_screen(m, fraction, to_config(sf));
        json out;
        out["manifest"] = manifest;
        out["gamma"] = r.gamma;
        out["alpha"] = r.alpha;
        out["fraction"] = fraction;
        out["split"] = split_json(r.split);
        out["plan"] = plan_json(r.plan, m.outcome_names());
        out["analysis"] = half_json(r.analysis);
        out["rejected"] = r.rejected;
        json adj = json::array();
        for (double p : r.adjusted_p)
            adj.push_back(sig6(p));
        out["adjusted_p"] = adj;
        if (csv) {
            std::vector<std::vector<std::string>> lines;
            for (std::size_t k = 0; k < m.outcomes(); ++k) {
                const bool rej = std::binary_search(r.rejected.begin(), r.rejected.end(), k);
                lines.push_back({m.outcome_names()[k], fmt(sig6(r.adjusted_p[k])),
                                 rej ? "true" : "false"});
            }
            emit_csv(manifest, {"outcome", "adjusted_p", "rejected"}, lines);
        } else {
            std::cout << out.dump(2) << "\n";
        }
        return 0;
    }

    if (*sim) {
        if (sim_methods.empty())
            sim_methods.push_back("cross-screen:adaptive");
        sim_cfg.methods.clear();
        for (const std::string& t : sim_methods)
            sim_cfg.methods.push_back(SimMethod::parse(t));
        sim_cfg.error_dist = ErrorDist::parse(sim_dist);
        const json manifest = make_manifest("simulate", argv_tail, sim_cfg.master_seed, "none");
        const SimResult r = simulate(sim_cfg);
        json out;
        out["manifest"] = manifest;
        out["k"] = sim_cfg.k;
        out["i"] = sim_cfg.i_pairs;
        out["tau1"] = sim_cfg.tau1;
        out["tau2"] = sim_cfg.tau2;
        out["dist"] = sim_cfg.error_dist.name();
        out["gamma"] = sim_cfg.gamma;
        out["alpha"] = sim_cfg.alpha;
        out["replicates"] = r.replicates;
        json arr = json::array();
        for (const MethodPower& mp : r.methods) {
            json j;
            j["method"] = mp.method.name();
            j["h1"] = sig6(mp.h1);
            j["h2"] = sig6(mp.h2);
            j["h12"] = sig6(mp.h12);
            j["se_h1"] = sig6(mp.se_h1);
            j["se_h2"] = sig6(mp.se_h2);
            j["se_h12"] = sig6(mp.se_h12);
            j["replicates"] = mp.replicates;
            arr.push_back(j);
        }
        out["methods"] = arr;
        if (csv) {
            std::vector<std::vector<std::string>> lines;
            for (const MethodPower& mp : r.methods)
                lines.push_back({mp.method.name(), fmt(sig6(mp.h1)), fmt(sig6(mp.h2)),
                                 fmt(sig6(mp.h12)), fmt(sig6(mp.se_h1)), fmt(sig6(mp.se_h2)),
                                 fmt(sig6(mp.se_h12)), std::to_string(mp.replicates)});
            emit_csv(manifest,
                     {"method", "h1", "h2", "h12", "se_h1", "se_h2", "se_h12", "replicates"},
                     lines);
        } else {
            std::cout << out.dump(2) << "\n";
        }
        return 0;
    }

    if (*pasym) {
        const json manifest = make_manifest("power asymptotic", argv_tail, 0, "none");
        AsymptoticParams params;
        params.ncp = ncp;
        params.alpha = p_alpha;
        params.k = p_k;
        json out;
        out["manifest"] = manifest;
        out["ncp"] = ncp;
        out["k"] = p_k;
        out["alpha"] = p_alpha;
        out["bonferroni"] = sig6(bonferroni_power(params));
        out["cross_screen"] = sig6(cross_screen_power(ncp, p_alpha));
        if (csv)
            emit_csv(manifest, {"ncp", "k", "bonferroni", "cross_screen"},
                     {{fmt(ncp), std::to_string(p_k), fmt(out["bonferroni"].get<double>()),
                       fmt(out["cross_screen"].get<double>())}});
        else
            std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*pttest || *ttest_alias) {
        const json manifest = make_manifest("ttest-size", argv_tail, 0, "none");
        const std::size_t pairs = ttest_pairs_required(tt_tau, tt_k, tt_power, tt_alpha);
        json out;
        out["manifest"] = manifest;
        out["tau"] = tt_tau;
        out["k"] = tt_k;
        out["power"] = tt_power;
        out["alpha"] = tt_alpha;
        out["pairs"] = pairs;
        if (csv)
            emit_csv(manifest, {"tau", "k", "pairs"},
                     {{fmt(tt_tau), std::to_string(tt_k), std::to_string(pairs)}});
        else
            std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*pnaive) {
        const json manifest = make_manifest("power naive", argv_tail, 0, "none");
        json out;
        out["manifest"] = manifest;
        out["tau"] = nv_tau;
        out["k"] = nv_k;
        out["i"] = nv_i;
        out["probability"] = sig6(naive_selection_prob(nv_tau, nv_k, nv_i));
        if (csv)
            emit_csv(manifest, {"tau", "k", "i", "probability"},
                     {{fmt(nv_tau), std::to_string(nv_k), std::to_string(nv_i),
                       fmt(out["probability"].get<double>())}});
        else
            std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*epv) {
        const json manifest = make_manifest("epv", argv_tail, 0, "none");
        if (e_i < 1)
            throw input_error("epv needs --i >= 1");
        const std::vector<double> table = rank_score_table(e_i, ScoreSpec::parse(e_stat));
        double sum_q = 0, sum_q2 = 0;
        for (double q : table) {
            sum_q += q;
            sum_q2 += q * q;
        }
        json out;
        out["manifest"] = manifest;
        out["gamma_true"] = e_gt;
        out["gamma"] = e_g;
        out["i"] = e_i;
        out["stat"] = e_stat;
        out["alpha"] = e_alpha;
        out["sum_q"] = sum_q;
        out["sum_q2"] = sum_q2;
        out["size_bound"] = sig6(size_bound(e_gt, e_g, sum_q, sum_q2, e_alpha));
        out["epv"] = sig6(expected_pvalue(e_gt, e_g, sum_q, sum_q2));
        if (csv)
            emit_csv(manifest, {"gamma_true", "gamma", "i", "size_bound", "epv"},
                     {{fmt(e_gt), fmt(e_g), std::to_string(e_i),
                       fmt(out["size_bound"].get<double>()), fmt(out["epv"].get<double>())}});
        else
            std::cout << out.dump(2) << "\n";
        return 0;
    }

    throw input_error("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
