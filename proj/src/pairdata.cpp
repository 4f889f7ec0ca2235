#include "xscreen/pairdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace xscreen {

PairDiffMatrix::PairDiffMatrix(std::vector<double> values, std::size_t pairs,
                               std::size_t outcomes, std::vector<std::string> outcome_names,
                               std::vector<std::string> pair_ids)
    : values_(std::move(values)),
      pairs_(pairs),
      outcomes_(outcomes),
      outcome_names_(std::move(outcome_names)),
      pair_ids_(std::move(pair_ids)) {
    if (pairs_ < 1 || outcomes_ < 1)
        throw input_error("pair difference matrix needs at least one pair and one outcome");
    if (values_.size() != pairs_ * outcomes_)
        throw input_error("pair difference matrix: value count does not match dimensions");
    for (double v : values_)
        if (!std::isfinite(v))
            throw input_error("pair difference matrix: non-finite entry");
    if (outcome_names_.empty()) {
        outcome_names_.reserve(outcomes_);
        for (std::size_t k = 0; k < outcomes_; ++k)
            outcome_names_.push_back("Y" + std::to_string(k + 1));
    } else if (outcome_names_.size() != outcomes_) {
        throw input_error("pair difference matrix: outcome name count does not match K");
    }
    if (pair_ids_.empty()) {
        pair_ids_.reserve(pairs_);
        for (std::size_t i = 0; i < pairs_; ++i)
            pair_ids_.push_back(std::to_string(i + 1));
    } else if (pair_ids_.size() != pairs_) {
        throw input_error("pair difference matrix: pair id count does not match I");
    }
}

std::vector<double> PairDiffMatrix::column(std::size_t k) const {
    if (k >= outcomes_)
        throw input_error("column index out of range");
    std::vector<double> col(pairs_);
    for (std::size_t i = 0; i < pairs_; ++i)
        col[i] = values_[i * outcomes_ + k];
    return col;
}

PairDiffMatrix PairDiffMatrix::rows(const std::vector<std::size_t>& idx) const {
    if (idx.empty())
        throw input_error("row subset must be nonempty");
    std::vector<double> vals;
    vals.reserve(idx.size() * outcomes_);
    std::vector<std::string> ids;
    ids.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= pairs_)
            throw input_error("row index out of range");
        vals.insert(vals.end(), values_.begin() + i * outcomes_,
                    values_.begin() + (i + 1) * outcomes_);
        ids.push_back(pair_ids_[i]);
    }
    return PairDiffMatrix(std::move(vals), idx.size(), outcomes_, outcome_names_, std::move(ids));
}

PairDiffMatrix pair_differences(const std::vector<std::vector<double>>& treated,
                                const std::vector<std::vector<double>>& control,
                                bool log2_transform, bool shift_one) {
    if (shift_one && !log2_transform)
        throw input_error("shift_one applies only with the log2 transform");
    if (treated.size() != control.size() || treated.empty())
        throw input_error("treated/control shape mismatch");
    const std::size_t I = treated.size();
    const std::size_t K = treated[0].size();
    std::vector<double> vals;
    vals.reserve(I * K);
    auto f = [&](double x, std::size_t i, std::size_t k) {
        if (!log2_transform)
            return x;
        if (x < 0)
            throw input_error("negative response at row " + std::to_string(i + 1) + ", column " +
                              std::to_string(k + 1) + " cannot be log2-transformed");
        double shifted = x + (shift_one ? 1.0 : 0.0);
        if (shifted <= 0)
            throw input_error("zero response at row " + std::to_string(i + 1) + ", column " +
                              std::to_string(k + 1) + " needs shift_one for the log2 transform");
        return std::log2(shifted);
    };
    for (std::size_t i = 0; i < I; ++i) {
        if (treated[i].size() != K || control[i].size() != K)
            throw input_error("treated/control shape mismatch at row " + std::to_string(i + 1));
        for (std::size_t k = 0; k < K; ++k)
            vals.push_back(f(treated[i][k], i, k) - f(control[i][k], i, k));
    }
    return PairDiffMatrix(std::move(vals), I, K);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

PairDiffMatrix load_pairs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw input_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty())
        throw input_error(path + ": empty file");

    // strip a UTF-8 BOM if present
    if (lines[0].size() >= 3 && lines[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
        lines[0].erase(0, 3);

    std::vector<std::string> header = split_csv_line(lines[0]);
    const std::size_t K = header.size();
    if (lines.size() == 1)
        throw input_error(path + ": no data rows");

    const std::size_t I = lines.size() - 1;
    std::vector<double> vals;
    vals.reserve(I * K);
    for (std::size_t r = 0; r < I; ++r) {
        std::vector<std::string> cells = split_csv_line(lines[r + 1]);
        if (cells.size() != K)
            throw input_error(path + ": row " + std::to_string(r + 2) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(K));
        for (std::size_t c = 0; c < K; ++c) {
            const std::string& cell = cells[c];
            double v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
                throw input_error(path + ": row " + std::to_string(r + 2) + ", column " +
                                  std::to_string(c + 1) + ": cannot parse '" + cell +
                                  "' as a number");
            vals.push_back(v);
        }
    }
    return PairDiffMatrix(std::move(vals), I, K, std::move(header));
}

namespace {

// SplitMix64; used to decorrelate seeds and as the shuffle engine. Stable
// across platforms, unlike std::shuffle / std::uniform_int_distribution.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t bounded(std::uint64_t& state, std::uint64_t n) {
    // rejection sampling, no modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = splitmix64(state);
    } while (x >= limit);
    return x % n;
}

}  // namespace

SplitAssignment random_split_n(const PairDiffMatrix& m, std::size_t n1, std::uint64_t seed) {
    const std::size_t I = m.pairs();
    if (n1 < 1 || n1 >= I)
        throw input_error("split sizes must both be nonempty");
    std::vector<std::size_t> idx(I);
    for (std::size_t i = 0; i < I; ++i)
        idx[i] = i;
    std::uint64_t state = seed;
    for (std::size_t i = I - 1; i > 0; --i)
        std::swap(idx[i], idx[bounded(state, i + 1)]);
    SplitAssignment s;
    s.kind = SplitAssignment::Kind::random;
    s.seed = seed;
    s.half1.assign(idx.begin(), idx.begin() + n1);
    s.half2.assign(idx.begin() + n1, idx.end());
    std::sort(s.half1.begin(), s.half1.end());
    std::sort(s.half2.begin(), s.half2.end());
    return s;
}

SplitAssignment random_split(const PairDiffMatrix& m, std::uint64_t seed) {
    if (m.pairs() < 2)
        throw input_error("random_split needs at least two pairs");
    return random_split_n(m, m.pairs() / 2, seed);
}

SplitAssignment covariate_split(const PairDiffMatrix& m, const std::vector<std::string>& labels) {
    if (labels.size() != m.pairs())
        throw input_error("covariate_split: one label per pair required");
    std::vector<std::string> distinct;
    for (const auto& l : labels)
        if (std::find(distinct.begin(), distinct.end(), l) == distinct.end())
            distinct.push_back(l);
    if (distinct.size() != 2)
        throw input_error("covariate_split needs exactly two label values, got " +
                          std::to_string(distinct.size()));
    std::sort(distinct.begin(), distinct.end());
    SplitAssignment s;
    s.kind = SplitAssignment::Kind::covariate;
    s.label = distinct[0];
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == distinct[0] ? s.half1 : s.half2).push_back(i);
    return s;
}

}  // namespace xscreen
