#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecoc/types.hpp"

namespace ecoc {

// Labeled feature vectors. Class vocabulary is sorted ascending by external
// label (numerically when every label parses as a number, lexicographically
// otherwise) so row order in code matrices is reproducible across runs.
struct Dataset {
  matrix_t features;                 // n_instances x n_features
  std::vector<int> labels;           // per instance, index into `classes`
  std::vector<std::string> classes;  // external labels, sorted ascending
  std::string name;

  index_t size() const { return features.rows(); }
  index_t n_features() const { return features.cols(); }
  int n_classes() const { return static_cast<int>(classes.size()); }
  const std::string& label_of(index_t i) const { return classes[labels[i]]; }
};

struct ScalingParams {
  vector_t min;  // per-feature minimum
  vector_t max;  // per-feature maximum
};

// Deterministic fold partition. Assignments are a pure function of
// (instance order, k, seed, stratified).
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // per instance, fold index in [0, k)
  std::uint64_t seed = 0;
  bool stratified = true;

  std::vector<int> fold_indices(int fold) const;
  std::vector<int> rest_indices(int fold) const;
};

/** Loads delimiter-separated dense text, one instance per line. */
Dataset load_dense(const std::string& path, int label_column = 0,
                   char delimiter = ',');

/** Loads sparse `label index:value ...` text with 1-based increasing
    indices. `#` starts a comment. Absent indices read as 0. */
Dataset load_sparse(const std::string& path);

/** Writes the dense format with full decimal precision (round-trip exact). */
void write_dense(const Dataset& data, const std::string& path,
                 int label_column = 0, char delimiter = ',');

ScalingParams fit_scaling(const Dataset& data);

/** x' = 2(x - min)/(max - min) - 1 per feature. Constant features map to 0,
    out-of-range values clamp to [-1, 1]. */
Dataset apply_scaling(const Dataset& data, const ScalingParams& params);
vector_t scale_vector(const_vector_ref x, const ScalingParams& params);

FoldPlan make_folds(const Dataset& data, int k, std::uint64_t seed,
                    bool stratified = true);

/** New Dataset holding the given rows; class vocabulary is preserved so
    label indices stay aligned. */
Dataset subset(const Dataset& data, const std::vector<int>& rows);

/** Row indices whose label index is listed in `class_ids`. */
std::vector<int> rows_of_classes(const Dataset& data,
                                 const std::vector<int>& class_ids);

}  // namespace ecoc
