#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xscreen/errors.hpp"

namespace xscreen {

// I x K matrix of treated-minus-control pair differences Y_ik, row-major.
// Immutable after construction; rows are exchangeable pairs, columns are
// outcomes.
class PairDiffMatrix {
public:
    PairDiffMatrix(std::vector<double> values, std::size_t pairs, std::size_t outcomes,
                   std::vector<std::string> outcome_names = {},
                   std::vector<std::string> pair_ids = {});

    std::size_t pairs() const { return pairs_; }     // I
    std::size_t outcomes() const { return outcomes_; }  // K

    double operator()(std::size_t i, std::size_t k) const {
        return values_[i * outcomes_ + k];
    }

    std::vector<double> column(std::size_t k) const;
    // Row subset, preserving order of `idx`; pair ids follow the rows.
    PairDiffMatrix rows(const std::vector<std::size_t>& idx) const;

    const std::vector<std::string>& outcome_names() const { return outcome_names_; }
    const std::vector<std::string>& pair_ids() const { return pair_ids_; }

private:
    std::vector<double> values_;
    std::size_t pairs_;
    std::size_t outcomes_;
    std::vector<std::string> outcome_names_;
    std::vector<std::string> pair_ids_;
};

struct SplitAssignment {
    enum class Kind { random, covariate };
    std::vector<std::size_t> half1;  // sorted ascending
    std::vector<std::size_t> half2;  // sorted ascending
    Kind kind = Kind::random;
    std::uint64_t seed = 0;      // random splits
    std::string label;           // covariate splits: the label defining half1
};

// Y_ik = f(treated_ik) - f(control_ik), f = identity or log2(x [+1]).
// `shift_one` adds 1 to every response before taking logs (only meaningful
// with log2; rejected otherwise so the flag can't silently do nothing).
PairDiffMatrix pair_differences(const std::vector<std::vector<double>>& treated,
                                const std::vector<std::vector<double>>& control,
                                bool log2_transform = false, bool shift_one = false);

// Strict CSV reader: UTF-8, comma-separated, first row = outcome names,
// decimal point '.', no thousands separators. Any ragged row or non-numeric
// cell is an error naming the offending row and column.
PairDiffMatrix load_pairs(const std::string& path);

// Uniform random partition with |half1| = floor(I/2); deterministic given
// seed and stable across platforms (own Fisher-Yates, not std::shuffle).
SplitAssignment random_split(const PairDiffMatrix& m, std::uint64_t seed);

// Random partition with |half1| = n1; used by screening procedures that
// need planning fractions other than one half.
SplitAssignment random_split_n(const PairDiffMatrix& m, std::size_t n1, std::uint64_t seed);

// Partition by a binary covariate; half1 is the lexicographically smaller
// label. Sizes may be unequal.
SplitAssignment covariate_split(const PairDiffMatrix& m, const std::vector<std::string>& labels);

}  // namespace xscreen
