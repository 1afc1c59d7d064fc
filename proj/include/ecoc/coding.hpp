#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ecoc/code_matrix.hpp"
#include "ecoc/types.hpp"

namespace ecoc {

/** Generalization performance of the binary problem (positives vs
    negatives), in [0, 1]. Sides are disjoint ascending class-id lists. */
using PerfFn = std::function<scalar_t(const std::vector<int>& positives,
                                      const std::vector<int>& negatives)>;

/** Edge weight fed to the matching solver: the performance itself
    (hard-to-separate pairs merge first) or its complement. */
enum class WeightOrientation { performance, inverse_performance };

CodeMatrix one_vs_one(int n_classes);
CodeMatrix one_vs_all(int n_classes);
CodeMatrix dense_random(int n_classes, std::uint64_t seed);
CodeMatrix sparse_random(int n_classes, std::uint64_t seed);

int dense_column_count(int n_classes);   // ceil(10 * log2 N)
int sparse_column_count(int n_classes);  // ceil(15 * log2 N)

/** Pairs class subsets round by round: each round scores all subset pairs
    with perf_fn, solves a minimum-weight matching (odd rounds leave one
    bye subset), emits one column per matched pair, and merges the pairs,
    until the last two subsets form the final column. Always N-1 columns. */
CodeMatrix build_matching_code(
    int n_classes, const PerfFn& perf_fn,
    WeightOrientation orientation = WeightOrientation::performance);

/** Positive side is the subset holding the smallest class id. */
std::pair<std::vector<int>, std::vector<int>> first_subset_orientation(
    const std::vector<int>& a, const std::vector<int>& b);

}  // namespace ecoc
