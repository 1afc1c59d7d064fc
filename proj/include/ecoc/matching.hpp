#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "ecoc/types.hpp"

namespace ecoc {

// Weighted complete graph over an index set [0, n). Only the off-diagonal
// entries are meaningful; the matrix must be symmetric and finite.
struct MatchingProblem {
  matrix_t weights;

  int n_nodes() const { return static_cast<int>(weights.rows()); }
};

struct Matching {
  // Disjoint (i, j) pairs with i < j, listed in ascending order of i.
  std::vector<std::pair<int, int>> pairs;
  // Sum of pair weights, accumulated in list order.
  scalar_t total_weight = 0.0;
};

struct ByeMatching {
  Matching matching;
  std::optional<int> bye;  // node left unpaired on odd problems
};

/** Exact minimum-weight perfect matching (Edmonds' blossom algorithm).
    Equal-weight optima resolve to the lexicographically smallest sorted
    pair list. Requires an even node count. */
Matching solve_perfect(const MatchingProblem& problem);

/** Even n delegates to solve_perfect. Odd n returns the best matching over
    all choices of one left-out node; weight ties break toward the smallest
    bye index. */
ByeMatching solve_with_bye(const MatchingProblem& problem);

/** Exhaustive enumeration over all (n-1)!! perfect matchings. Test oracle;
    guarded to n <= 12. */
Matching brute_force(const MatchingProblem& problem);

/** Debug interchange: `n` on the first line, then one `i j w` line per edge.
    Every unordered pair must appear exactly once. */
MatchingProblem read_graph(std::istream& in);

}  // namespace ecoc
