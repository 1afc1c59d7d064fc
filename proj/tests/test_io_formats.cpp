#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ecoc/ensemble.hpp"
#include "ecoc/errors.hpp"
#include "ecoc/model_io.hpp"
#include "ecoc/rng.hpp"
#include "ecoc/synth.hpp"

using namespace ecoc;

namespace {

int temp_counter = 0;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ecoc_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(temp_counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

BinaryModel handmade_model() {
  BinaryModel model;
  model.support_vectors.resize(3, 2);
  model.support_vectors << 3.141592653589793, 1e-17, -0.0, 2.2250738585072014e-308,
      -1.7976931348623157e308, 0.1;
  model.dual_coefs.resize(3);
  model.dual_coefs << 0.7500000000000001, -1e-300, -0.75;
  model.bias = -0.1234567890123456789;
  model.kernel.type = KernelSpec::Type::rbf;
  model.kernel.gamma = 0.30000000000000004;
  model.C = 10.0;
  model.positive_classes = {0, 3};
  model.negative_classes = {1};
  model.converged = false;
  model.iterations = 917;
  return model;
}

EcocEnsemble toy_ensemble() {
  const auto data = make_synthetic_clusters(10, 0.4, 19);
  SvmConfig config;
  config.kernel.gamma = 0.1;
  auto ensemble = train_ensemble(data, one_vs_all(8), config);
  ensemble.decoder = Decoder::euclidean;
  ensemble.seed = 0xfeedbeef;
  return ensemble;
}

void check_equal(const BinaryModel& a, const BinaryModel& b) {
  CHECK(a.support_vectors == b.support_vectors);
  CHECK(a.dual_coefs == b.dual_coefs);
  CHECK(a.bias == b.bias);
  CHECK(a.kernel.type == b.kernel.type);
  CHECK(a.kernel.gamma == b.kernel.gamma);
  CHECK(a.C == b.C);
  CHECK(a.positive_classes == b.positive_classes);
  CHECK(a.negative_classes == b.negative_classes);
  CHECK(a.converged == b.converged);
  CHECK(a.iterations == b.iterations);
}

void rewrite(const std::string& path, const std::string& from,
             const std::string& to) {
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  text.replace(at, from.size(), to);
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("binary model json round trips bit-exactly") {
  TempDir dir;
  const auto original = handmade_model();
  write_model(original, dir.file("model.json"));
  check_equal(read_model(dir.file("model.json")), original);

  // a trained linear model as well
  Dataset data;
  data.classes = {"a", "b"};
  data.features.resize(4, 2);
  data.features << 0, 0, 0, 1, 2, 0, 2, 1;
  data.labels = {0, 0, 1, 1};
  SvmConfig config;
  config.kernel.type = KernelSpec::Type::linear;
  auto trained = train_binary(data.features, {1, 1, -1, -1}, config);
  trained.positive_classes = {0};
  trained.negative_classes = {1};
  write_model(trained, dir.file("trained.json"));
  check_equal(read_model(dir.file("trained.json")), trained);
}

TEST_CASE("model reader rejects damaged files") {
  TempDir dir;
  CHECK_THROWS_AS(read_model(dir.file("absent.json")), IoError);

  const auto bad_json = dir.file("bad.json");
  std::ofstream(bad_json) << "{ not json";
  CHECK_THROWS_AS(read_model(bad_json), ParseError);

  const auto model = handmade_model();
  const auto path = dir.file("model.json");

  write_model(model, path);
  rewrite(path, "ecoc-binary-model", "something-else");
  CHECK_THROWS_AS(read_model(path), ParseError);

  write_model(model, path);
  rewrite(path, "\"iterations\": 917", "\"iterations\": \"many\"");
  CHECK_THROWS_AS(read_model(path), ParseError);

  write_model(model, path);
  rewrite(path, "\"bias\"", "\"offset\"");
  CHECK_THROWS_AS(read_model(path), ParseError);
}

TEST_CASE("ensemble directory round trips") {
  TempDir dir;
  const auto original = toy_ensemble();
  save_ensemble(original, dir.file("model"));

  const auto loaded = load_ensemble(dir.file("model"));
  CHECK_NOTHROW(validate(loaded));
  CHECK(loaded.matrix.cells == original.matrix.cells);
  CHECK(loaded.matrix.strategy_tag == original.matrix.strategy_tag);
  CHECK(loaded.decoder == original.decoder);
  CHECK(loaded.class_labels == original.class_labels);
  CHECK(loaded.seed == original.seed);
  CHECK(loaded.scaling.min == original.scaling.min);
  CHECK(loaded.scaling.max == original.scaling.max);
  REQUIRE(loaded.models.size() == original.models.size());
  for (std::size_t j = 0; j < loaded.models.size(); ++j)
    check_equal(loaded.models[j], original.models[j]);

  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    vector_t x(2);
    x << rng.uniform01() * 12 - 6, rng.uniform01() * 4 - 2;
    CHECK(decision_vector(loaded, x) == decision_vector(original, x));
    CHECK(predict(loaded, x) == predict(original, x));
  }
}

TEST_CASE("ensemble loader rejects inconsistent directories") {
  TempDir dir;
  CHECK_THROWS_AS(load_ensemble(dir.file("nowhere")), IoError);

  const auto original = toy_ensemble();

  save_ensemble(original, dir.file("bad_manifest"));
  rewrite(dir.file("bad_manifest") + "/manifest.json", "\"n_columns\": 8",
          "\"n_columns\": 5");
  CHECK_THROWS_AS(load_ensemble(dir.file("bad_manifest")), ParseError);

  save_ensemble(original, dir.file("missing_model"));
  std::filesystem::remove(dir.file("missing_model") + "/model_3.json");
  CHECK_THROWS_AS(load_ensemble(dir.file("missing_model")), IoError);

  save_ensemble(original, dir.file("swapped_sides"));
  rewrite(dir.file("swapped_sides") + "/model_0.json",
          "\"positive_classes\": [\n    0\n  ]",
          "\"positive_classes\": [\n    7\n  ]");
  CHECK_THROWS_AS(load_ensemble(dir.file("swapped_sides")), ParseError);

  save_ensemble(original, dir.file("broken_matrix"));
  std::ofstream(dir.file("broken_matrix") + "/matrix") << "garbage\n";
  CHECK_THROWS_AS(load_ensemble(dir.file("broken_matrix")), ParseError);
}

TEST_CASE("reports serialize deterministically") {
  PerfReport a;
  a.dataset = "synth8";
  a.strategy = "matching";
  a.accuracy_mean = 0.95;
  a.accuracy_std = 0.01;
  a.n_classifiers = 7;
  a.fold_accuracies = {0.94, 0.95, 0.96};
  a.train_seconds = 1.25;
  a.predict_seconds = 0.75;
  PerfReport b = a;
  b.strategy = "ovo";
  b.n_classifiers = 28;

  const auto json_text = report_to_json({a, b});
  CHECK(json_text == report_to_json({a, b}));
  CHECK(json_text.find("train_seconds") == std::string::npos);
  CHECK(json_text.find("\"n_classifiers\": 7") != std::string::npos);
  CHECK(json_text.find("\"strategy\": \"ovo\"") != std::string::npos);

  const auto with_times = report_to_json({a, b}, true);
  CHECK(with_times.find("\"train_seconds\": 1.25") != std::string::npos);
  CHECK(with_times.find("\"predict_seconds\": 0.75") != std::string::npos);

  const auto table = report_table({a, b});
  CHECK(table.find("dataset") != std::string::npos);
  CHECK(table.find("0.9500 +/- 0.0100") != std::string::npos);
  CHECK(table.find("28") != std::string::npos);
  CHECK(table.find("matching") < table.find("ovo"));
}
