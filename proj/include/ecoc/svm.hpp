#pragma once

#include <cstddef>
#include <vector>

#include "ecoc/kernel.hpp"
#include "ecoc/types.hpp"

namespace ecoc {

struct SvmConfig {
  scalar_t C = 1.0;
  KernelSpec kernel;          // defaults to rbf, gamma 0.1
  scalar_t tolerance = 1e-3;  // stopping threshold on the KKT gap
  int max_passes = 1000;      // iteration budget is max_passes * n
  std::size_t cache_bytes = 32u << 20;  // kernel row cache
};

/** Raw dual solution over the full training set. */
struct SmoResult {
  vector_t alpha;  // one multiplier per instance, in [0, C]
  scalar_t bias = 0.0;
  scalar_t gap = 0.0;  // final KKT gap m(alpha) - M(alpha)
  int iterations = 0;
  bool converged = true;
};

/** Trained decision function keeping only the support vectors. */
struct BinaryModel {
  matrix_t support_vectors;  // n_sv x n_features
  vector_t dual_coefs;       // alpha_i * y_i per support vector
  scalar_t bias = 0.0;
  KernelSpec kernel;
  scalar_t C = 1.0;
  std::vector<int> positive_classes;  // class ids merged into the +1 side
  std::vector<int> negative_classes;
  bool converged = true;
  int iterations = 0;

  index_t n_support() const { return support_vectors.rows(); }
};

/** Maximal-violating-pair SMO for the soft-margin dual:
    min 1/2 a'Qa - sum(a)  s.t.  0 <= a <= C,  y'a = 0. */
SmoResult smo_solve(const_matrix_ref X, const std::vector<int>& y,
                    const SvmConfig& config);

/** Trains on (X, y) with y in {-1, +1} and compacts to support vectors. */
BinaryModel train_binary(const_matrix_ref X, const std::vector<int>& y,
                         const SvmConfig& config);

/** Trains on explicit positive/negative sides (rows are instances). */
BinaryModel train(const_matrix_ref positives, const_matrix_ref negatives,
                  const SvmConfig& config);

scalar_t decision(const BinaryModel& model, const_vector_ref x);

/** Decision values for every row of X. */
vector_t decision_batch(const BinaryModel& model, const_matrix_ref X);

}  // namespace ecoc
