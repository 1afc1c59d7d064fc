#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ecoc/code_matrix.hpp"
#include "ecoc/coding.hpp"
#include "ecoc/dataset.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/ensemble.hpp"
#include "ecoc/errors.hpp"
#include "ecoc/matching.hpp"
#include "ecoc/model_io.hpp"
#include "ecoc/rng.hpp"
#include "ecoc/synth.hpp"

namespace {

using namespace ecoc;
using nlohmann::json;

std::string default_out_dir() {
  const char* env = std::getenv("ECOC_OUTPUT_DIR");
  return (env != nullptr && *env != '\0') ? env : ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void promote(const std::string& tmp, const std::string& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
}

// Readers never observe a half-written file: text lands under a temporary
// name in the target directory and is renamed into place.
void atomic_write(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp);
  }
  promote(tmp, path);
}

bool file_is_blank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  char c;
  while (in.get(c))
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

WeightOrientation orientation_from(const std::string& name) {
  if (name == "perf") return WeightOrientation::performance;
  if (name == "inverse-perf") return WeightOrientation::inverse_performance;
  throw InvalidArgument("unknown weight orientation '" + name + "'");
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

struct DataOpts {
  std::string path;
  std::string format = "dense";
  int label_column = 0;
  std::string delimiter = ",";

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--data", path, "Input data file");
    if (required) opt->required();
    cmd->add_option("--format", format, "Data file format")
        ->check(CLI::IsMember({"dense", "sparse"}))
        ->capture_default_str();
    cmd->add_option("--label-column", label_column,
                    "Label column index in dense files")
        ->capture_default_str();
    cmd->add_option("--delimiter", delimiter,
                    "Field delimiter in dense files")
        ->capture_default_str();
  }

  Dataset load() const {
    if (delimiter.size() != 1)
      throw InvalidArgument("--delimiter must be a single character");
    return format == "sparse" ? load_sparse(path)
                              : load_dense(path, label_column, delimiter[0]);
  }
};

struct SvmOpts {
  scalar_t C = 1.0;
  scalar_t gamma = 0.1;
  std::string kernel = "rbf";
  scalar_t tolerance = 1e-3;
  int max_passes = 1000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--C", C, "Soft-margin penalty")->capture_default_str();
    cmd->add_option("--gamma", gamma, "RBF kernel width")
        ->capture_default_str();
    cmd->add_option("--kernel", kernel, "Kernel type")
        ->check(CLI::IsMember({"rbf", "linear"}))
        ->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "KKT stopping tolerance")
        ->capture_default_str();
    cmd->add_option("--max-passes", max_passes,
                    "Iteration budget per trained instance")
        ->capture_default_str();
  }

  SvmConfig config() const {
    SvmConfig c;
    c.C = C;
    c.kernel.type = kernel_type_from_string(kernel);
    c.kernel.gamma = gamma;
    c.tolerance = tolerance;
    c.max_passes = max_passes;
    return c;
  }
};

void warn_two_class_ova(const CodeMatrix& matrix, bool quiet) {
  if (!quiet && matrix.strategy_tag == "ova" && matrix.n_classes() == 2)
    std::cerr << "warning: one-vs-all with two classes trains two mutually "
                 "negated columns\n";
}

struct CodegenOpts {
  std::string strategy;
  int classes = 0;
  DataOpts data;
  SvmOpts svm;
  int inner_k = 5;
  std::string orientation = "perf";
  std::string out;
  bool render = false;
};

void run_codegen(const CodegenOpts& o, std::uint64_t seed, bool quiet) {
  const Strategy strategy = strategy_from_string(o.strategy);
  CodeMatrix matrix;
  if (strategy == Strategy::matching) {
    if (o.data.path.empty())
      throw InvalidArgument("--data is required for the matching strategy");
    EvalOptions options;
    options.seed = seed;
    options.inner_k = o.inner_k;
    options.orientation = orientation_from(o.orientation);
    matrix = build_code(o.data.load(), strategy, o.svm.config(), options);
  } else {
    if (o.classes < 2)
      throw InvalidArgument("--classes must be at least 2 for the " +
                            o.strategy + " strategy");
    switch (strategy) {
      case Strategy::ovo: matrix = one_vs_one(o.classes); break;
      case Strategy::ova: matrix = one_vs_all(o.classes); break;
      case Strategy::dense: matrix = dense_random(o.classes, seed); break;
      case Strategy::sparse: matrix = sparse_random(o.classes, seed); break;
      case Strategy::matching: break;
    }
  }
  warn_two_class_ova(matrix, quiet);
  const std::string out =
      o.out.empty() ? join_path(default_out_dir(), "code_matrix.txt") : o.out;
  write_code_matrix(matrix, out + ".tmp");
  promote(out + ".tmp", out);
  if (o.render) std::cout << render_grid(matrix);
  if (!quiet)
    std::cout << "wrote " << out << " (" << matrix.n_columns()
              << " columns)\n";
}

struct TrainOpts {
  DataOpts data;
  SvmOpts svm;
  std::string strategy = "matching";
  std::string matrix_file;
  std::string decoder = "aed";
  int inner_k = 5;
  std::string orientation = "perf";
  std::string out;
};

void run_train(const TrainOpts& o, std::uint64_t seed, int threads,
               bool quiet) {
  const Dataset data = o.data.load();
  CodeMatrix matrix;
  if (!o.matrix_file.empty()) {
    matrix = read_code_matrix(o.matrix_file);
  } else {
    EvalOptions options;
    options.seed = seed;
    options.inner_k = o.inner_k;
    options.orientation = orientation_from(o.orientation);
    options.threads = threads;
    matrix =
        build_code(data, strategy_from_string(o.strategy), o.svm.config(),
                   options);
  }
  warn_two_class_ova(matrix, quiet);

  EcocEnsemble ensemble = train_ensemble(data, matrix, o.svm.config(), threads);
  ensemble.decoder = decoder_from_string(o.decoder);
  ensemble.seed = seed;

  const std::string out =
      o.out.empty() ? join_path(default_out_dir(), "ensemble") : o.out;
  save_ensemble(ensemble, out);
  if (!quiet) {
    std::cout << "columns: " << ensemble.n_columns() << "\n";
    for (std::size_t j = 0; j < ensemble.models.size(); ++j) {
      const auto& model = ensemble.models[j];
      std::cout << "column " << j << ": "
                << (model.converged ? "converged" : "NOT converged")
                << " support_vectors=" << model.n_support() << "\n";
    }
    std::cout << "saved to " << out << "\n";
  }
}

struct PredictOpts {
  std::string model;
  DataOpts data;
  bool scores = false;
  std::string out;
};

void run_predict(const PredictOpts& o, bool quiet) {
  const EcocEnsemble ensemble = load_ensemble(o.model);
  std::string text;
  if (!file_is_blank(o.data.path)) {
    const Dataset data = o.data.load();
    if (data.n_features() != ensemble.scaling.min.size())
      throw InvalidArgument(
          "predict: expected " + std::to_string(ensemble.scaling.min.size()) +
          " features, got " + std::to_string(data.n_features()));
    for (index_t i = 0; i < data.size(); ++i) {
      const vector_t outputs =
          decision_vector(ensemble, data.features.row(i).transpose());
      text += ensemble.class_labels[decode(ensemble.decoder, outputs,
                                           ensemble.matrix)];
      if (o.scores) {
        const vector_t signs = to_signs(outputs);
        for (index_t r = 0; r < ensemble.matrix.n_classes(); ++r) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), " %.6g",
                        distance(ensemble.decoder, signs,
                                 ensemble.matrix.cells.row(r).transpose()));
          text += buf;
        }
      }
      text += '\n';
    }
  }
  if (o.out.empty()) {
    std::cout << text;
  } else {
    atomic_write(o.out, text);
    if (!quiet) std::cout << "wrote " << o.out << "\n";
  }
}

struct EvaluateOpts {
  DataOpts data;
  SvmOpts svm;
  std::string strategy;
  int folds = 5;
  int inner_k = 5;
  std::string decoder = "aed";
  std::string orientation = "perf";
  std::string json_out;
};

void run_evaluate(const EvaluateOpts& o, std::uint64_t seed, int threads) {
  EvalOptions options;
  options.outer_k = o.folds;
  options.inner_k = o.inner_k;
  options.seed = seed;
  options.decoder = decoder_from_string(o.decoder);
  options.orientation = orientation_from(o.orientation);
  options.threads = threads;
  const PerfReport report = evaluate(
      o.data.load(), strategy_from_string(o.strategy), o.svm.config(),
      options);
  std::cout << report_table({report});
  if (!o.json_out.empty()) atomic_write(o.json_out, report_to_json({report}));
}

struct BenchmarkOpts {
  std::vector<std::string> data_paths;
  std::string format = "dense";
  int label_column = 0;
  std::string delimiter = ",";
  SvmOpts svm;
  std::vector<std::string> strategies = {"ovo", "ova", "dense", "sparse",
                                         "matching"};
  int repeats = 1;
  int folds = 5;
  int inner_k = 5;
  std::string decoder = "aed";
  std::string orientation = "perf";
  std::string out_dir;
};

void recompute_summary(PerfReport& report) {
  const auto& acc = report.fold_accuracies;
  scalar_t mean = 0;
  for (scalar_t a : acc) mean += a;
  mean /= static_cast<scalar_t>(acc.size());
  scalar_t ss = 0;
  for (scalar_t a : acc) ss += (a - mean) * (a - mean);
  report.accuracy_mean = mean;
  report.accuracy_std =
      acc.size() > 1 ? std::sqrt(ss / static_cast<scalar_t>(acc.size() - 1))
                     : 0.0;
}

void run_benchmark(const BenchmarkOpts& o, std::uint64_t seed, int threads,
                   bool quiet) {
  if (o.repeats < 1) throw InvalidArgument("--repeats must be >= 1");
  const std::string out_dir =
      o.out_dir.empty() ? default_out_dir() : o.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create directory " + out_dir + ": " + ec.message());

  std::vector<PerfReport> results;
  json failures = json::array();
  json timings = json::array();

  for (const auto& path : o.data_paths) {
    for (const auto& name : o.strategies) {
      try {
        DataOpts source;
        source.path = path;
        source.format = o.format;
        source.label_column = o.label_column;
        source.delimiter = o.delimiter;
        const Dataset data = source.load();
        const Strategy strategy = strategy_from_string(name);

        EvalOptions options;
        options.outer_k = o.folds;
        options.inner_k = o.inner_k;
        options.decoder = decoder_from_string(o.decoder);
        options.orientation = orientation_from(o.orientation);
        options.threads = threads;

        // fresh random matrices only make sense for the random codings
        const bool randomized =
            strategy == Strategy::dense || strategy == Strategy::sparse;
        const int repeats = randomized ? o.repeats : 1;
        PerfReport merged;
        for (int r = 0; r < repeats; ++r) {
          options.seed = repeats == 1
                             ? seed
                             : derive_seed(seed, 1000 + static_cast<std::uint64_t>(r));
          const PerfReport rep =
              evaluate(data, strategy, o.svm.config(), options);
          if (r == 0) {
            merged = rep;
          } else {
            merged.fold_accuracies.insert(merged.fold_accuracies.end(),
                                          rep.fold_accuracies.begin(),
                                          rep.fold_accuracies.end());
            merged.train_seconds += rep.train_seconds;
            merged.predict_seconds += rep.predict_seconds;
          }
        }
        recompute_summary(merged);
        results.push_back(merged);
        timings.push_back(
            {{"dataset", merged.dataset},
             {"strategy", merged.strategy},
             {"train_seconds", merged.train_seconds},
             {"predict_seconds", merged.predict_seconds},
             {"predict_seconds_per_instance",
              merged.predict_seconds /
                  static_cast<double>(data.size() * repeats)}});
        if (!quiet)
          std::cout << "done " << merged.dataset << "/" << merged.strategy
                    << ": " << format_number(merged.accuracy_mean) << "\n";
      } catch (const Error& e) {
        failures.push_back(
            {{"dataset", path}, {"strategy", name}, {"error", e.what()}});
        if (!quiet)
          std::cout << "failed " << path << "/" << name << ": " << e.what()
                    << "\n";
      }
    }
  }

  json report = json::parse(report_to_json(results));
  report["failures"] = failures;
  atomic_write(join_path(out_dir, "report.json"), report.dump(2) + "\n");
  atomic_write(join_path(out_dir, "timings.json"), timings.dump(2) + "\n");

  std::string table = report_table(results);
  for (const auto& f : failures)
    table += "FAILED " + f.at("dataset").get<std::string>() + "/" +
             f.at("strategy").get<std::string>() + ": " +
             f.at("error").get<std::string>() + "\n";
  atomic_write(join_path(out_dir, "report.txt"), table);
  if (!quiet) std::cout << table;
}

struct MatchOpts {
  std::string weights;
};

void run_match(const MatchOpts& o) {
  std::ifstream in(o.weights);
  if (!in) throw IoError("cannot open " + o.weights);
  const MatchingProblem problem = read_graph(in);
  const ByeMatching result = solve_with_bye(problem);
  for (const auto& [i, j] : result.matching.pairs)
    std::cout << i << " " << j << " " << format_number(problem.weights(i, j))
              << "\n";
  if (result.bye) std::cout << "bye " << *result.bye << "\n";
  std::cout << "total " << format_number(result.matching.total_weight)
            << "\n";
}

struct SynthOpts {
  int points = 200;
  double sigma = 0.4;
  std::string out;
};

void run_synth(const SynthOpts& o, std::uint64_t seed, bool quiet) {
  const Dataset data = make_synthetic_clusters(o.points, o.sigma, seed);
  const std::string out =
      o.out.empty() ? join_path(default_out_dir(), "synth8.csv") : o.out;
  write_dense(data, out + ".tmp");
  promote(out + ".tmp", out);
  if (!quiet)
    std::cout << "wrote " << out << " (" << data.size()
              << " instances, 8 classes)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-correcting output codes with a matching-built code "
               "matrix and an SMO kernel-SVM base learner"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;
  app.add_option("--seed", seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads for column training")
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "Suppress progress output");

  const std::vector<std::string> strategy_names = {"ovo", "ova", "dense",
                                                   "sparse", "matching"};
  const std::vector<std::string> decoder_names = {"hamming", "euclidean",
                                                  "aed"};
  const std::vector<std::string> orientation_names = {"perf", "inverse-perf"};

  CodegenOpts codegen;
  auto* cmd_codegen =
      app.add_subcommand("codegen", "Build a code matrix and write it out");
  cmd_codegen->add_option("--strategy", codegen.strategy, "Coding strategy")
      ->required()
      ->check(CLI::IsMember(strategy_names));
  cmd_codegen->add_option("--classes", codegen.classes,
                          "Class count (fixed strategies)");
  codegen.data.attach(cmd_codegen, /*required=*/false);
  codegen.svm.attach(cmd_codegen);
  cmd_codegen->add_option("--inner-k", codegen.inner_k,
                          "Folds for pair scoring (matching)")
      ->capture_default_str();
  cmd_codegen
      ->add_option("--weight-orientation", codegen.orientation,
                   "Matching edge weights: cross-validated performance or "
                   "one minus it")
      ->check(CLI::IsMember(orientation_names))
      ->capture_default_str();
  cmd_codegen->add_option("--out", codegen.out,
                          "Output file (default code_matrix.txt in the "
                          "output directory)");
  cmd_codegen->add_flag("--render", codegen.render,
                        "Print the matrix as a +/-/. grid");
  cmd_codegen->callback([&] { run_codegen(codegen, seed, quiet); });

  TrainOpts train;
  auto* cmd_train =
      app.add_subcommand("train", "Train an ensemble and save it");
  train.data.attach(cmd_train, /*required=*/true);
  train.svm.attach(cmd_train);
  auto* train_strategy =
      cmd_train->add_option("--strategy", train.strategy, "Coding strategy")
          ->check(CLI::IsMember(strategy_names))
          ->capture_default_str();
  cmd_train->add_option("--matrix", train.matrix_file,
                        "Use a code matrix file instead of building one")
      ->excludes(train_strategy);
  cmd_train->add_option("--decoder", train.decoder, "Decoding distance")
      ->check(CLI::IsMember(decoder_names))
      ->capture_default_str();
  cmd_train->add_option("--inner-k", train.inner_k,
                        "Folds for pair scoring (matching)")
      ->capture_default_str();
  cmd_train
      ->add_option("--weight-orientation", train.orientation,
                   "Matching edge weight orientation")
      ->check(CLI::IsMember(orientation_names))
      ->capture_default_str();
  cmd_train->add_option("--out", train.out,
                        "Ensemble directory (default ensemble/ in the "
                        "output directory)");
  cmd_train->callback([&] { run_train(train, seed, threads, quiet); });

  PredictOpts predict;
  auto* cmd_predict =
      app.add_subcommand("predict", "Predict labels with a saved ensemble");
  cmd_predict->add_option("--model", predict.model, "Ensemble directory")
      ->required();
  predict.data.attach(cmd_predict, /*required=*/true);
  cmd_predict->add_flag("--scores", predict.scores,
                        "Append per-class distances to each line");
  cmd_predict->add_option("--out", predict.out,
                          "Write predictions here instead of stdout");
  cmd_predict->callback([&] { run_predict(predict, quiet); });

  EvaluateOpts evaluate_opts;
  auto* cmd_evaluate = app.add_subcommand(
      "evaluate", "Cross-validate one strategy on one dataset");
  evaluate_opts.data.attach(cmd_evaluate, /*required=*/true);
  evaluate_opts.svm.attach(cmd_evaluate);
  cmd_evaluate
      ->add_option("--strategy", evaluate_opts.strategy, "Coding strategy")
      ->required()
      ->check(CLI::IsMember(strategy_names));
  cmd_evaluate->add_option("--folds", evaluate_opts.folds, "Outer folds")
      ->capture_default_str();
  cmd_evaluate->add_option("--inner-k", evaluate_opts.inner_k,
                           "Folds for pair scoring (matching)")
      ->capture_default_str();
  cmd_evaluate
      ->add_option("--decoder", evaluate_opts.decoder, "Decoding distance")
      ->check(CLI::IsMember(decoder_names))
      ->capture_default_str();
  cmd_evaluate
      ->add_option("--weight-orientation", evaluate_opts.orientation,
                   "Matching edge weight orientation")
      ->check(CLI::IsMember(orientation_names))
      ->capture_default_str();
  cmd_evaluate->add_option("--json", evaluate_opts.json_out,
                           "Also write the report as JSON here");
  cmd_evaluate->callback(
      [&] { run_evaluate(evaluate_opts, seed, threads); });

  BenchmarkOpts bench;
  auto* cmd_benchmark = app.add_subcommand(
      "benchmark", "Evaluate strategies across datasets and write reports");
  cmd_benchmark
      ->add_option("--data", bench.data_paths, "Dataset files (repeatable)")
      ->required();
  cmd_benchmark->add_option("--format", bench.format, "Data file format")
      ->check(CLI::IsMember({"dense", "sparse"}))
      ->capture_default_str();
  cmd_benchmark
      ->add_option("--label-column", bench.label_column,
                   "Label column index in dense files")
      ->capture_default_str();
  cmd_benchmark
      ->add_option("--delimiter", bench.delimiter,
                   "Field delimiter in dense files")
      ->capture_default_str();
  bench.svm.attach(cmd_benchmark);
  cmd_benchmark
      ->add_option("--strategies", bench.strategies,
                   "Strategies to benchmark")
      ->check(CLI::IsMember(strategy_names));
  cmd_benchmark
      ->add_option("--repeats", bench.repeats,
                   "Random matrices per dense/sparse cell")
      ->capture_default_str();
  cmd_benchmark->add_option("--folds", bench.folds, "Outer folds")
      ->capture_default_str();
  cmd_benchmark->add_option("--inner-k", bench.inner_k,
                            "Folds for pair scoring (matching)")
      ->capture_default_str();
  cmd_benchmark->add_option("--decoder", bench.decoder, "Decoding distance")
      ->check(CLI::IsMember(decoder_names))
      ->capture_default_str();
  cmd_benchmark
      ->add_option("--weight-orientation", bench.orientation,
                   "Matching edge weight orientation")
      ->check(CLI::IsMember(orientation_names))
      ->capture_default_str();
  cmd_benchmark->add_option("--out", bench.out_dir,
                            "Report directory (default: output directory)");
  cmd_benchmark->callback([&] { run_benchmark(bench, seed, threads, quiet); });

  MatchOpts match;
  auto* cmd_match = app.add_subcommand(
      "match", "Solve one minimum-weight matching problem from a file");
  cmd_match->add_option("--weights", match.weights, "Edge list file")
      ->required();
  cmd_match->callback([&] { run_match(match); });

  SynthOpts synth;
  auto* cmd_synth = app.add_subcommand(
      "synth", "Generate the 8-class Gaussian benchmark dataset");
  cmd_synth->add_option("--points", synth.points, "Points per class")
      ->capture_default_str();
  cmd_synth->add_option("--sigma", synth.sigma, "Cluster spread")
      ->capture_default_str();
  cmd_synth->add_option("--out", synth.out,
                        "Output file (default synth8.csv in the output "
                        "directory)");
  cmd_synth->callback([&] { run_synth(synth, seed, quiet); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ecoc::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ecoc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ecoc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ecoc::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
