#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ecoc/code_matrix.hpp"
#include "ecoc/coding.hpp"
#include "ecoc/dataset.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/svm.hpp"
#include "ecoc/types.hpp"

namespace ecoc {

enum class Strategy { ovo, ova, dense, sparse, matching };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

/** One trained binary model per code-matrix column plus everything needed
    to score a raw instance: the scaling fitted on the training data and the
    external label for each matrix row. */
struct EcocEnsemble {
  CodeMatrix matrix;
  std::vector<BinaryModel> models;
  Decoder decoder = Decoder::attenuated_euclidean;
  ScalingParams scaling;
  std::vector<std::string> class_labels;  // row index -> external label
  std::uint64_t seed = 0;                 // recorded, not used at predict time

  index_t n_columns() const { return matrix.n_columns(); }
  int n_classes() const { return static_cast<int>(matrix.n_classes()); }
};

/** models align with columns one to one, sides match the column metadata,
    and the scaling width matches the support vectors. */
void validate(const EcocEnsemble& ensemble);

struct PerfReport {
  std::string dataset;
  std::string strategy;
  scalar_t accuracy_mean = 0.0;
  scalar_t accuracy_std = 0.0;  // sample standard deviation over folds
  int n_classifiers = 0;
  std::vector<scalar_t> fold_accuracies;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

/** Raw decision value on one already-scaled instance. */
using DecisionFn = std::function<scalar_t(const_vector_ref)>;
/** Trains on rows of X with labels in {-1, +1}. */
using BinaryTrainer =
    std::function<DecisionFn(const_matrix_ref, const std::vector<int>&)>;

BinaryTrainer svm_trainer(const SvmConfig& config);

/** Fits scaling on `data`, then trains one model per column on the
    instances whose class is non-zero there. Columns train independently,
    so `threads` > 1 splits them across that many workers with identical
    results. */
EcocEnsemble train_ensemble(const Dataset& data, const CodeMatrix& matrix,
                            const SvmConfig& config, int threads = 1);

/** All column decisions for one raw instance, scaled internally. */
vector_t decision_vector(const EcocEnsemble& ensemble, const_vector_ref x);
/** Row index of the decoded class. */
int predict(const EcocEnsemble& ensemble, const_vector_ref x);
std::vector<int> predict_batch(const EcocEnsemble& ensemble,
                               const_matrix_ref X);

/** k-fold cross-validated accuracy of one positive-vs-negative sub-problem:
    instances of other classes are dropped, each fold is scored by a model
    trained on the remaining folds, and the result is total correct over
    total scored. Features are used as given; scale beforehand if the
    trainer needs it. */
scalar_t generalization_performance(const Dataset& data,
                                    const std::vector<int>& positive,
                                    const std::vector<int>& negative,
                                    const BinaryTrainer& trainer, int k,
                                    std::uint64_t seed);
scalar_t generalization_performance(const Dataset& data,
                                    const std::vector<int>& positive,
                                    const std::vector<int>& negative,
                                    const SvmConfig& config, int k,
                                    std::uint64_t seed);

/** Pair-scoring callback backed by the cross-validation above. The fold
    seed for a pair depends only on (seed, pair), not on call order. */
PerfFn cv_performance_fn(const Dataset& data, const SvmConfig& config, int k,
                         std::uint64_t seed);

struct EvalOptions {
  int outer_k = 5;
  int inner_k = 5;  // folds inside the pair-scoring cross-validation
  std::uint64_t seed = 0;
  Decoder decoder = Decoder::attenuated_euclidean;
  WeightOrientation orientation = WeightOrientation::performance;
  int threads = 1;
};

/** Code matrix for a strategy on this data. The matching strategy scores
    candidate pairs by cross-validation on `data` (scaled internally);
    fixed strategies only read the class count. */
CodeMatrix build_code(const Dataset& data, Strategy strategy,
                      const SvmConfig& config, const EvalOptions& options);

/** Outer cross-validation of a full pipeline: per fold, fit scaling and
    (for matching) the code matrix on the training portion only, train, and
    score the held-out fold. */
PerfReport evaluate(const Dataset& data, Strategy strategy,
                    const SvmConfig& config, const EvalOptions& options);

}  // namespace ecoc
