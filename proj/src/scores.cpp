#include "xscreen/scores.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

namespace xscreen {

namespace {

void validate(const std::vector<double>& abs_y) {
    for (double v : abs_y)
        if (!(v >= 0) || !std::isfinite(v))
            throw input_error("absolute differences must be finite and nonnegative");
}

// midranks of all entries, ties averaged
std::vector<double> midranks_all(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> ord(n);
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[ord[j + 1]] == v[ord[i]])
            ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t)
            r[ord[t]] = mid;
        i = j + 1;
    }
    return r;
}

// binomial coefficient extended to real upper argument; zero at and below
// the integer cutoff so that C(n, k) = 0 for n < k still holds
double choose_real(double x, double k) {
    if (x <= k - 1.0)
        return 0.0;
    return std::exp(std::lgamma(x + 1.0) - std::lgamma(k + 1.0) - std::lgamma(x - k + 1.0));
}

double ustat_score(double a, double i_pairs, int m, int m_lo, int m_hi) {
    double num = 0;
    for (int l = m_lo; l <= m_hi; ++l)
        num += choose_real(a - 1.0, l - 1.0) * choose_real(i_pairs - a, m - l);
    return num / choose_real(i_pairs, m);
}

void check_ustat_params(const ScoreSpec& spec, std::size_t i_pairs) {
    if (spec.m_lo < 1 || spec.m_lo > spec.m_hi || spec.m_hi > spec.m ||
        static_cast<std::size_t>(spec.m) > i_pairs)
        throw input_error("ustat parameters must satisfy 1 <= mlo <= mhi <= m <= I");
}

// scores at integer ranks depend only on (I, m, mlo, mhi); memoized because
// screening loops score thousands of columns at the same size
std::shared_ptr<const std::vector<double>> cached_ustat_table(std::size_t i_pairs,
                                                              const ScoreSpec& spec) {
    static std::mutex mutex;
    static std::map<std::tuple<std::size_t, int, int, int>,
                    std::shared_ptr<const std::vector<double>>>
        cache;
    const auto key = std::make_tuple(i_pairs, spec.m, spec.m_lo, spec.m_hi);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto table = std::make_shared<std::vector<double>>(i_pairs);
    for (std::size_t a = 1; a <= i_pairs; ++a)
        (*table)[a - 1] = ustat_score(static_cast<double>(a), static_cast<double>(i_pairs),
                                      spec.m, spec.m_lo, spec.m_hi);
    cache.emplace(key, table);
    return table;
}

}  // namespace

std::vector<double> nonzero_midranks(const std::vector<double>& abs_y) {
    validate(abs_y);
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < abs_y.size(); ++i)
        if (abs_y[i] > 0)
            nz.push_back(i);
    std::sort(nz.begin(), nz.end(),
              [&](std::size_t a, std::size_t b) { return abs_y[a] < abs_y[b]; });
    std::vector<double> r(abs_y.size(), 0.0);
    std::size_t i = 0;
    while (i < nz.size()) {
        std::size_t j = i;
        while (j + 1 < nz.size() && abs_y[nz[j + 1]] == abs_y[nz[i]])
            ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t)
            r[nz[t]] = mid;
        i = j + 1;
    }
    return r;
}

ScoreVector compute_scores(const std::vector<double>& abs_y, const ScoreSpec& spec) {
    validate(abs_y);
    const std::size_t n = abs_y.size();
    if (n == 0)
        throw input_error("empty data");

    ScoreVector out;
    out.ranks = nonzero_midranks(abs_y);
    out.q.assign(n, 0.0);

    switch (spec.family) {
        case ScoreSpec::Family::wilcoxon:
            out.q = out.ranks;
            break;
        case ScoreSpec::Family::sign:
            for (std::size_t i = 0; i < n; ++i)
                out.q[i] = abs_y[i] > 0 ? 1.0 : 0.0;
            break;
        case ScoreSpec::Family::perm_t:
            for (std::size_t i = 0; i < n; ++i)
                out.q[i] = abs_y[i] / static_cast<double>(n);
            break;
        case ScoreSpec::Family::huber_m: {
            if (spec.huber_c <= 0)
                throw input_error("huber clamp must be positive");
            std::vector<double> nz;
            for (double v : abs_y)
                if (v > 0)
                    nz.push_back(v);
            if (nz.empty())
                break;  // all-zero data, all-zero scores
            std::sort(nz.begin(), nz.end());
            const std::size_t h = nz.size() / 2;
            const double scale =
                nz.size() % 2 ? nz[h] : 0.5 * (nz[h - 1] + nz[h]);
            for (std::size_t i = 0; i < n; ++i)
                out.q[i] = std::min(abs_y[i] / scale, spec.huber_c);
            break;
        }
        case ScoreSpec::Family::ustat: {
            check_ustat_params(spec, n);
            const std::vector<double> all_ranks = midranks_all(abs_y);
            const auto table = cached_ustat_table(n, spec);
            for (std::size_t i = 0; i < n; ++i) {
                if (!(abs_y[i] > 0))
                    continue;
                const double a = all_ranks[i];
                const double rounded = std::nearbyint(a);
                // tied ranks are midranks; only those pay a direct evaluation
                out.q[i] = std::abs(a - rounded) < 1e-9
                               ? (*table)[static_cast<std::size_t>(rounded) - 1]
                               : ustat_score(a, static_cast<double>(n), spec.m, spec.m_lo,
                                             spec.m_hi);
            }
            break;
        }
    }
    return out;
}

TestStatistic test_statistic(const std::vector<double>& y, const ScoreVector& scores) {
    if (y.size() != scores.q.size())
        throw input_error("test_statistic: length mismatch");
    TestStatistic s;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double q = scores.q[i];
        if (y[i] > 0)
            s.t += q;
        s.sum_q += q;
        s.sum_q2 += q * q;
    }
    return s;
}

std::vector<double> rank_score_table(std::size_t i_pairs, const ScoreSpec& spec) {
    std::vector<double> table(i_pairs);
    switch (spec.family) {
        case ScoreSpec::Family::wilcoxon:
            for (std::size_t a = 1; a <= i_pairs; ++a)
                table[a - 1] = static_cast<double>(a);
            return table;
        case ScoreSpec::Family::sign:
            std::fill(table.begin(), table.end(), 1.0);
            return table;
        case ScoreSpec::Family::ustat:
            check_ustat_params(spec, i_pairs);
            for (std::size_t a = 1; a <= i_pairs; ++a)
                table[a - 1] = ustat_score(static_cast<double>(a),
                                           static_cast<double>(i_pairs), spec.m, spec.m_lo,
                                           spec.m_hi);
            return table;
        default:
            throw input_error("rank score table exists only for rank-based families");
    }
}

ScoreSpec ScoreSpec::parse(const std::string& text) {
    auto parse_num = [&](const std::string& s, auto& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw input_error("bad statistic spec: " + text);
    };
    if (text == "wilcoxon")
        return wilcoxon();
    if (text == "sign")
        return sign();
    if (text == "perm-t")
        return perm_t();
    if (text == "huber")
        return huber_m();
    if (text.rfind("huber:", 0) == 0) {
        double c = 0;
        parse_num(text.substr(6), c);
        if (c <= 0)
            throw input_error("huber clamp must be positive");
        return huber_m(c);
    }
    if (text.rfind("u:", 0) == 0) {
        std::string rest = text.substr(2);
        int vals[3];
        for (int part = 0; part < 3; ++part) {
            auto comma = rest.find(',');
            const bool last = part == 2;
            if (last != (comma == std::string::npos))
                throw input_error("bad statistic spec: " + text +
                                  " (expected u:m,mlo,mhi)");
            parse_num(last ? rest : rest.substr(0, comma), vals[part]);
            if (!last)
                rest = rest.substr(comma + 1);
        }
        if (vals[1] < 1 || vals[1] > vals[2] || vals[2] > vals[0])
            throw input_error("ustat parameters must satisfy 1 <= mlo <= mhi <= m");
        return ustat(vals[0], vals[1], vals[2]);
    }
    throw input_error("unknown statistic: " + text);
}

std::string ScoreSpec::name() const {
    switch (family) {
        case Family::wilcoxon: return "wilcoxon";
        case Family::sign: return "sign";
        case Family::perm_t: return "perm-t";
        case Family::huber_m: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "huber:%g", huber_c);
            return buf;
        }
        case Family::ustat:
            return "u:" + std::to_string(m) + "," + std::to_string(m_lo) + "," +
                   std::to_string(m_hi);
    }
    return "?";
}

}  // namespace xscreen
