#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "xscreen/errors.hpp"

namespace xscreen {

// Score family for the sign-score statistic T = sum sgn(Y_i) q_i.
struct ScoreSpec {
    enum class Family { wilcoxon, sign, perm_t, huber_m, ustat };
    Family family = Family::wilcoxon;
    double huber_c = 2.5;  // huber_m clamp
    int m = 0, m_lo = 0, m_hi = 0;  // ustat (m, mlo, mhi)

    static ScoreSpec wilcoxon() { return {}; }
    static ScoreSpec sign() { return {Family::sign}; }
    static ScoreSpec perm_t() { return {Family::perm_t}; }
    static ScoreSpec huber_m(double c = 2.5) { return {Family::huber_m, c}; }
    static ScoreSpec ustat(int m, int m_lo, int m_hi) {
        return {Family::ustat, 2.5, m, m_lo, m_hi};
    }

    // round-trips with the CLI flag grammar
    // wilcoxon|sign|perm-t|huber[:c]|u:m,mlo,mhi
    static ScoreSpec parse(const std::string& text);
    std::string name() const;

    bool operator==(const ScoreSpec&) const = default;
};

struct ScoreVector {
    std::vector<double> q;      // nonnegative scores, 0 wherever |Y| = 0
    std::vector<double> ranks;  // midranks of |Y| among the nonzero entries, 0 for zeros
};

// Scores from absolute differences. Ties take midranks; zero differences are
// scored 0 in every family. ustat ranks run over all I entries (zeros keep
// their rank positions but still score 0), and its parameters must satisfy
// 1 <= mlo <= mhi <= m <= I at the observed I.
ScoreVector compute_scores(const std::vector<double>& abs_y, const ScoreSpec& spec);

struct TestStatistic {
    double t = 0;       // sum of q_i over positive Y_i
    double sum_q = 0;   // sum q_i
    double sum_q2 = 0;  // sum q_i^2
};

TestStatistic test_statistic(const std::vector<double>& y, const ScoreVector& scores);

// Midranks of the positive entries (zeros -> rank 0), shared by score
// families and useful to callers that rank once and score many families.
std::vector<double> nonzero_midranks(const std::vector<double>& abs_y);

// q as a function of the rank a = 1..I when all I values are distinct and
// nonzero; table[a-1] is the score of rank a. Supports the rank-based
// families (wilcoxon, sign, ustat).
std::vector<double> rank_score_table(std::size_t i_pairs, const ScoreSpec& spec);

}  // namespace xscreen
