#include "ecoc/coding.hpp"

#include <algorithm>
#include <cmath>

#include "ecoc/errors.hpp"
#include "ecoc/matching.hpp"
#include "ecoc/rng.hpp"

namespace ecoc {

namespace {

CodeMatrix assemble(int n_classes, std::vector<ColumnMeta> meta,
                    std::string tag, bool allow_negated_columns = false) {
  CodeMatrix matrix;
  matrix.cells =
      code_matrix_t::Zero(n_classes, static_cast<index_t>(meta.size()));
  for (std::size_t j = 0; j < meta.size(); ++j) {
    for (int c : meta[j].positive) matrix.cells(c, static_cast<index_t>(j)) = 1;
    for (int c : meta[j].negative)
      matrix.cells(c, static_cast<index_t>(j)) = -1;
  }
  matrix.columns = std::move(meta);
  matrix.strategy_tag = std::move(tag);
  validate(matrix, allow_negated_columns);
  return matrix;
}

bool column_valid(const code_matrix_t& cells, index_t j) {
  bool has_pos = false, has_neg = false;
  for (index_t i = 0; i < cells.rows(); ++i) {
    has_pos |= cells(i, j) == 1;
    has_neg |= cells(i, j) == -1;
  }
  if (!has_pos || !has_neg) return false;
  for (index_t k = 0; k < j; ++k)
    if (cells.col(k) == cells.col(j) ||
        cells.col(k) == (-cells.col(j)).eval())
      return false;
  return true;
}

bool rows_distinct(const code_matrix_t& cells) {
  for (index_t a = 0; a < cells.rows(); ++a)
    for (index_t b = a + 1; b < cells.rows(); ++b)
      if (cells.row(a) == cells.row(b)) return false;
  return true;
}

CodeMatrix random_code(int n_classes, std::uint64_t seed, bool sparse) {
  if (n_classes < 3)
    throw InvalidArgument("random code: need at least 3 classes");
  const index_t L = sparse ? sparse_column_count(n_classes)
                           : dense_column_count(n_classes);
  Rng rng(seed);
  constexpr int kColumnTries = 20000;
  constexpr int kMatrixTries = 64;
  for (int attempt = 0; attempt < kMatrixTries; ++attempt) {
    code_matrix_t cells(n_classes, L);
    for (index_t j = 0; j < L; ++j) {
      int tries = 0;
      do {
        if (++tries > kColumnTries)
          throw NumericError(
              "random code: column resampling budget exhausted (N too "
              "small for the required number of distinct columns)");
        for (index_t i = 0; i < n_classes; ++i) {
          if (sparse) {
            const std::uint64_t u = rng.below(4);
            cells(i, j) = u < 2 ? 0 : u == 2 ? 1 : -1;
          } else {
            cells(i, j) = rng.below(2) == 0 ? 1 : -1;
          }
        }
      } while (!column_valid(cells, j));
    }
    if (rows_distinct(cells))
      return from_cells(std::move(cells), sparse ? "sparse" : "dense");
  }
  throw NumericError("random code: matrix resampling budget exhausted");
}

}  // namespace

int dense_column_count(int n_classes) {
  if (n_classes < 2)
    throw InvalidArgument("column count: need at least 2 classes");
  return static_cast<int>(std::ceil(10.0 * std::log2(n_classes)));
}

int sparse_column_count(int n_classes) {
  if (n_classes < 2)
    throw InvalidArgument("column count: need at least 2 classes");
  return static_cast<int>(std::ceil(15.0 * std::log2(n_classes)));
}

CodeMatrix one_vs_one(int n_classes) {
  if (n_classes < 2)
    throw InvalidArgument("one_vs_one: need at least 2 classes");
  std::vector<ColumnMeta> meta;
  meta.reserve(n_classes * (n_classes - 1) / 2);
  for (int i = 0; i < n_classes; ++i)
    for (int j = i + 1; j < n_classes; ++j) meta.push_back({{i}, {j}});
  return assemble(n_classes, std::move(meta), "ovo");
}

CodeMatrix one_vs_all(int n_classes) {
  if (n_classes < 2)
    throw InvalidArgument("one_vs_all: need at least 2 classes");
  std::vector<ColumnMeta> meta;
  meta.reserve(n_classes);
  for (int i = 0; i < n_classes; ++i) {
    ColumnMeta column;
    column.positive = {i};
    for (int j = 0; j < n_classes; ++j)
      if (j != i) column.negative.push_back(j);
    meta.push_back(std::move(column));
  }
  // at N=2 the two columns are necessarily mutual negations
  return assemble(n_classes, std::move(meta), "ova", n_classes == 2);
}

CodeMatrix dense_random(int n_classes, std::uint64_t seed) {
  CodeMatrix matrix = random_code(n_classes, seed, /*sparse=*/false);
  validate(matrix);
  return matrix;
}

CodeMatrix sparse_random(int n_classes, std::uint64_t seed) {
  CodeMatrix matrix = random_code(n_classes, seed, /*sparse=*/true);
  validate(matrix);
  return matrix;
}

std::pair<std::vector<int>, std::vector<int>> first_subset_orientation(
    const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty())
    throw InvalidArgument("subset orientation: empty subset");
  std::vector<int> lo = a, hi = b;
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  for (int id : lo)
    if (std::binary_search(hi.begin(), hi.end(), id))
      throw InvalidArgument("subset orientation: subsets overlap on class " +
                            std::to_string(id));
  if (lo.front() > hi.front()) std::swap(lo, hi);
  return {std::move(lo), std::move(hi)};
}

CodeMatrix build_matching_code(int n_classes, const PerfFn& perf_fn,
                               WeightOrientation orientation) {
  if (n_classes < 2)
    throw InvalidArgument("matching code: need at least 2 classes");
  if (n_classes > 2 && !perf_fn)
    throw InvalidArgument("matching code: performance callback required");

  std::vector<std::vector<int>> subsets;
  subsets.reserve(n_classes);
  for (int c = 0; c < n_classes; ++c) subsets.push_back({c});

  std::vector<ColumnMeta> meta;
  meta.reserve(n_classes - 1);
  auto emit = [&meta](const std::vector<int>& a, const std::vector<int>& b) {
    auto [pos, neg] = first_subset_orientation(a, b);
    meta.push_back({std::move(pos), std::move(neg)});
  };

  while (subsets.size() > 2) {
    const int m = static_cast<int>(subsets.size());
    matrix_t weights = matrix_t::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const auto [pos, neg] =
            first_subset_orientation(subsets[a], subsets[b]);
        const scalar_t perf = perf_fn(pos, neg);
        if (!(perf >= 0.0 && perf <= 1.0))
          throw InvalidArgument(
              "matching code: generalization performance outside [0,1]");
        const scalar_t weight =
            orientation == WeightOrientation::performance ? perf
                                                          : 1.0 - perf;
        weights(a, b) = weights(b, a) = weight;
      }
    }

    const ByeMatching round = solve_with_bye({std::move(weights)});
    std::vector<std::vector<int>> next;
    next.reserve(round.matching.pairs.size() + 1);
    for (const auto& [a, b] : round.matching.pairs) {
      emit(subsets[a], subsets[b]);
      std::vector<int> merged;
      merged.reserve(subsets[a].size() + subsets[b].size());
      std::merge(subsets[a].begin(), subsets[a].end(), subsets[b].begin(),
                 subsets[b].end(), std::back_inserter(merged));
      next.push_back(std::move(merged));
    }
    if (round.bye) next.push_back(subsets[*round.bye]);
    std::sort(next.begin(), next.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    subsets = std::move(next);
  }

  emit(subsets[0], subsets[1]);
  return assemble(n_classes, std::move(meta), "matching");
}

}  // namespace ecoc
