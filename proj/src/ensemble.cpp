#include "ecoc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <numeric>
#include <thread>
#include <utility>

#include "ecoc/errors.hpp"
#include "ecoc/rng.hpp"

namespace ecoc {

namespace {

constexpr std::uint64_t kDenseCodeTag = 0xd3;
constexpr std::uint64_t kSparseCodeTag = 0x59;
constexpr std::uint64_t kMatchingCodeTag = 0xcf;

// Seed for one pair's cross-validation; a function of content only, so the
// order in which pairs are scored cannot change the result.
std::uint64_t seed_for_pair(std::uint64_t seed, const std::vector<int>& pos,
                            const std::vector<int>& neg) {
  std::uint64_t h = mix_seed(seed);
  for (int id : pos) h = mix_seed(h ^ (static_cast<std::uint64_t>(id) + 2));
  h = mix_seed(h ^ 1);
  for (int id : neg) h = mix_seed(h ^ (static_cast<std::uint64_t>(id) + 2));
  return h;
}

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::ovo: return "ovo";
    case Strategy::ova: return "ova";
    case Strategy::dense: return "dense";
    case Strategy::sparse: return "sparse";
    case Strategy::matching: return "matching";
  }
  throw InvalidArgument("unknown strategy value");
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "ovo") return Strategy::ovo;
  if (name == "ova") return Strategy::ova;
  if (name == "dense") return Strategy::dense;
  if (name == "sparse") return Strategy::sparse;
  if (name == "matching") return Strategy::matching;
  throw InvalidArgument("unknown strategy '" + name +
                        "' (expected ovo, ova, dense, sparse, or matching)");
}

void validate(const EcocEnsemble& ensemble) {
  validate(ensemble.matrix,
           /*allow_negated_columns=*/ensemble.matrix.n_classes() == 2);
  if (ensemble.class_labels.size() != ensemble.matrix.n_classes())
    throw InvalidArgument("ensemble: class label count does not match the "
                          "code matrix rows");
  if (static_cast<index_t>(ensemble.models.size()) != ensemble.n_columns())
    throw InvalidArgument("ensemble: " +
                          std::to_string(ensemble.models.size()) +
                          " models for " +
                          std::to_string(ensemble.n_columns()) + " columns");
  if (ensemble.scaling.min.size() != ensemble.scaling.max.size())
    throw InvalidArgument("ensemble: scaling bounds disagree in length");
  for (std::size_t j = 0; j < ensemble.models.size(); ++j) {
    const auto& model = ensemble.models[j];
    const auto& column = ensemble.matrix.columns[j];
    if (model.positive_classes != column.positive ||
        model.negative_classes != column.negative)
      throw InvalidArgument("ensemble: model " + std::to_string(j) +
                            " sides do not match its column metadata");
    if (model.n_support() > 0 &&
        model.support_vectors.cols() != ensemble.scaling.min.size())
      throw InvalidArgument("ensemble: model " + std::to_string(j) +
                            " feature width does not match the scaling");
  }
}

BinaryTrainer svm_trainer(const SvmConfig& config) {
  return [config](const_matrix_ref X, const std::vector<int>& y) {
    auto model = std::make_shared<BinaryModel>(train_binary(X, y, config));
    return DecisionFn(
        [model](const_vector_ref x) { return decision(*model, x); });
  };
}

EcocEnsemble train_ensemble(const Dataset& data, const CodeMatrix& matrix,
                            const SvmConfig& config, int threads) {
  validate(matrix, /*allow_negated_columns=*/matrix.n_classes() == 2);
  if (data.size() == 0)
    throw InvalidArgument("train_ensemble: dataset is empty");
  if (static_cast<int>(matrix.n_classes()) != data.n_classes())
    throw InvalidArgument("train_ensemble: code matrix has " +
                          std::to_string(matrix.n_classes()) +
                          " classes, data has " +
                          std::to_string(data.n_classes()));
  if (threads < 1)
    throw InvalidArgument("train_ensemble: threads must be >= 1");

  EcocEnsemble ensemble;
  ensemble.matrix = matrix;
  ensemble.scaling = fit_scaling(data);
  ensemble.class_labels = data.classes;
  const Dataset scaled = apply_scaling(data, ensemble.scaling);

  const index_t n_columns = matrix.n_columns();
  ensemble.models.resize(n_columns);
  std::vector<std::exception_ptr> errors(n_columns);

  const auto train_column = [&](index_t j) noexcept {
    try {
      std::vector<index_t> rows;
      index_t n_pos = 0;
      for (index_t i = 0; i < scaled.size(); ++i) {
        const int cell = matrix.cells(scaled.labels[i], j);
        if (cell == 0) continue;
        rows.push_back(i);
        if (cell > 0) ++n_pos;
      }
      if (n_pos == 0 || n_pos == static_cast<index_t>(rows.size()))
        throw InvalidArgument(
            "column " + std::to_string(j) + ": " +
            (n_pos == 0 ? "positive" : "negative") +
            " side has no training instances");
      matrix_t X(rows.size(), scaled.n_features());
      std::vector<int> y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        X.row(static_cast<index_t>(r)) = scaled.features.row(rows[r]);
        y[r] = matrix.cells(scaled.labels[rows[r]], j);
      }
      BinaryModel model;
      try {
        model = train_binary(X, y, config);
      } catch (const NumericError& e) {
        throw NumericError("column " + std::to_string(j) + ": " + e.what());
      } catch (const InvalidArgument& e) {
        throw InvalidArgument("column " + std::to_string(j) + ": " +
                              e.what());
      }
      model.positive_classes = matrix.columns[j].positive;
      model.negative_classes = matrix.columns[j].negative;
      ensemble.models[j] = std::move(model);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };

  const int workers =
      std::min<int>(threads, static_cast<int>(n_columns));
  if (workers <= 1) {
    for (index_t j = 0; j < n_columns; ++j) train_column(j);
  } else {
    std::atomic<index_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (index_t j = next++; j < n_columns; j = next++) train_column(j);
      });
    for (auto& t : pool) t.join();
  }
  for (index_t j = 0; j < n_columns; ++j)
    if (errors[j]) std::rethrow_exception(errors[j]);

  return ensemble;
}

vector_t decision_vector(const EcocEnsemble& ensemble, const_vector_ref x) {
  const index_t dim = ensemble.scaling.min.size();
  if (x.size() != dim)
    throw InvalidArgument("predict: expected " + std::to_string(dim) +
                          " features, got " + std::to_string(x.size()));
  const vector_t xs = scale_vector(x, ensemble.scaling);
  vector_t out(ensemble.n_columns());
  for (index_t j = 0; j < out.size(); ++j)
    out[j] = decision(ensemble.models[j], xs);
  return out;
}

int predict(const EcocEnsemble& ensemble, const_vector_ref x) {
  return decode(ensemble.decoder, decision_vector(ensemble, x),
                ensemble.matrix);
}

std::vector<int> predict_batch(const EcocEnsemble& ensemble,
                               const_matrix_ref X) {
  std::vector<int> out(X.rows());
  for (index_t i = 0; i < X.rows(); ++i)
    out[i] = predict(ensemble, X.row(i).transpose());
  return out;
}

scalar_t generalization_performance(const Dataset& data,
                                    const std::vector<int>& positive,
                                    const std::vector<int>& negative,
                                    const BinaryTrainer& trainer, int k,
                                    std::uint64_t seed) {
  if (!trainer)
    throw InvalidArgument("generalization_performance: missing trainer");
  if (positive.empty() || negative.empty())
    throw InvalidArgument("generalization_performance: empty class subset");
  std::vector<char> is_pos(data.n_classes(), 0);
  for (int id : positive) {
    if (id < 0 || id >= data.n_classes())
      throw InvalidArgument("generalization_performance: class id " +
                            std::to_string(id) + " out of range");
    is_pos[id] = 1;
  }
  for (int id : negative) {
    if (id < 0 || id >= data.n_classes())
      throw InvalidArgument("generalization_performance: class id " +
                            std::to_string(id) + " out of range");
    if (is_pos[id])
      throw InvalidArgument("generalization_performance: class id " +
                            std::to_string(id) + " appears on both sides");
  }

  std::vector<int> wanted(positive);
  wanted.insert(wanted.end(), negative.begin(), negative.end());
  const Dataset restricted = subset(data, rows_of_classes(data, wanted));

  index_t n_pos = 0;
  for (int label : restricted.labels) n_pos += is_pos[label];
  if (n_pos == 0)
    throw InvalidArgument(
        "generalization_performance: positive side has no instances");
  if (n_pos == restricted.size())
    throw InvalidArgument(
        "generalization_performance: negative side has no instances");
  if (k < 2)
    throw InvalidArgument("generalization_performance: k must be >= 2");
  if (static_cast<index_t>(k) > restricted.size())
    throw InvalidArgument("generalization_performance: k = " +
                          std::to_string(k) + " exceeds the " +
                          std::to_string(restricted.size()) +
                          " available instances");

  const FoldPlan plan = make_folds(restricted, k, seed);
  index_t correct = 0;
  for (int f = 0; f < k; ++f) {
    const auto train_rows = plan.rest_indices(f);
    matrix_t X(train_rows.size(), restricted.n_features());
    std::vector<int> y(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      X.row(static_cast<index_t>(r)) = restricted.features.row(train_rows[r]);
      y[r] = is_pos[restricted.labels[train_rows[r]]] ? 1 : -1;
    }
    const DecisionFn decide = trainer(X, y);
    for (int i : plan.fold_indices(f)) {
      const int sign =
          decide(restricted.features.row(i).transpose()) >= 0 ? 1 : -1;
      const int truth = is_pos[restricted.labels[i]] ? 1 : -1;
      if (sign == truth) ++correct;
    }
  }
  return static_cast<scalar_t>(correct) /
         static_cast<scalar_t>(restricted.size());
}

scalar_t generalization_performance(const Dataset& data,
                                    const std::vector<int>& positive,
                                    const std::vector<int>& negative,
                                    const SvmConfig& config, int k,
                                    std::uint64_t seed) {
  return generalization_performance(data, positive, negative,
                                    svm_trainer(config), k, seed);
}

PerfFn cv_performance_fn(const Dataset& data, const SvmConfig& config, int k,
                         std::uint64_t seed) {
  auto shared = std::make_shared<const Dataset>(data);
  return [shared, config, k, seed](const std::vector<int>& positive,
                                   const std::vector<int>& negative) {
    return generalization_performance(
        *shared, positive, negative, config, k,
        seed_for_pair(seed, positive, negative));
  };
}

CodeMatrix build_code(const Dataset& data, Strategy strategy,
                      const SvmConfig& config, const EvalOptions& options) {
  const int n = data.n_classes();
  switch (strategy) {
    case Strategy::ovo:
      return one_vs_one(n);
    case Strategy::ova:
      return one_vs_all(n);
    case Strategy::dense:
      return dense_random(n, derive_seed(options.seed, kDenseCodeTag));
    case Strategy::sparse:
      return sparse_random(n, derive_seed(options.seed, kSparseCodeTag));
    case Strategy::matching: {
      const Dataset scaled = apply_scaling(data, fit_scaling(data));
      return build_matching_code(
          n,
          cv_performance_fn(scaled, config, options.inner_k,
                            derive_seed(options.seed, kMatchingCodeTag)),
          options.orientation);
    }
  }
  throw InvalidArgument("unknown strategy value");
}

PerfReport evaluate(const Dataset& data, Strategy strategy,
                    const SvmConfig& config, const EvalOptions& options) {
  if (options.outer_k < 2)
    throw InvalidArgument("evaluate: outer_k must be >= 2");

  PerfReport report;
  report.dataset = data.name;
  report.strategy = to_string(strategy);

  const FoldPlan plan = make_folds(data, options.outer_k, options.seed);
  CodeMatrix fixed;
  if (strategy != Strategy::matching)
    fixed = build_code(data, strategy, config, options);

  using clock = std::chrono::steady_clock;
  for (int f = 0; f < options.outer_k; ++f) {
    const Dataset train_data = subset(data, plan.rest_indices(f));

    const auto t_build = clock::now();
    CodeMatrix matrix;
    if (strategy == Strategy::matching) {
      EvalOptions fold_options = options;
      fold_options.seed =
          derive_seed(options.seed, static_cast<std::uint64_t>(f) + 1);
      matrix = build_code(train_data, strategy, config, fold_options);
    } else {
      matrix = fixed;
    }
    EcocEnsemble ensemble =
        train_ensemble(train_data, matrix, config, options.threads);
    ensemble.decoder = options.decoder;
    ensemble.seed = options.seed;
    const auto t_trained = clock::now();

    const auto test_rows = plan.fold_indices(f);
    index_t correct = 0;
    for (int i : test_rows)
      if (predict(ensemble, data.features.row(i).transpose()) ==
          data.labels[i])
        ++correct;
    const auto t_scored = clock::now();

    report.fold_accuracies.push_back(static_cast<scalar_t>(correct) /
                                     static_cast<scalar_t>(test_rows.size()));
    report.train_seconds += seconds_between(t_build, t_trained);
    report.predict_seconds += seconds_between(t_trained, t_scored);
    report.n_classifiers = static_cast<int>(matrix.n_columns());
  }

  const auto& acc = report.fold_accuracies;
  const scalar_t mean =
      std::accumulate(acc.begin(), acc.end(), scalar_t{0}) /
      static_cast<scalar_t>(acc.size());
  scalar_t ss = 0;
  for (scalar_t a : acc) ss += (a - mean) * (a - mean);
  report.accuracy_mean = mean;
  report.accuracy_std =
      std::sqrt(ss / static_cast<scalar_t>(acc.size() - 1));
  return report;
}

}  // namespace ecoc
