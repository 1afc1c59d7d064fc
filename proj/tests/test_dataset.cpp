#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "ecoc/dataset.hpp"
#include "ecoc/errors.hpp"

using namespace ecoc;

namespace {

// Writes `text` to a fresh file under the test's scratch directory.
class TempFile {
 public:
  explicit TempFile(const std::string& text) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("ecoc_test_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++) + ".txt"))
                .string();
    std::ofstream out(path_);
    out << text;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

TEST_CASE("dense loader reads labels and features") {
  TempFile f("1,0.5,2.0\n2,1.5,3.0\n1,2.5,4.0\n");
  const auto data = load_dense(f.path());
  CHECK(data.size() == 3);
  CHECK(data.n_features() == 2);
  CHECK(data.n_classes() == 2);
  CHECK(data.classes == std::vector<std::string>{"1", "2"});
  CHECK(data.labels == std::vector<int>{0, 1, 0});
  CHECK(data.features(0, 0) == 0.5);
  CHECK(data.features(1, 1) == 3.0);
  CHECK(data.label_of(1) == "2");
}

TEST_CASE("dense loader supports other label columns and delimiters") {
  TempFile f("0.5;2.0;a\n1.5;3.0;b\n");
  const auto data = load_dense(f.path(), 2, ';');
  CHECK(data.n_features() == 2);
  CHECK(data.classes == std::vector<std::string>{"a", "b"});
  CHECK(data.features(1, 0) == 1.5);
  CHECK(data.features(1, 1) == 3.0);
}

TEST_CASE("numeric labels sort numerically, text labels lexically") {
  TempFile numeric("10,1\n2,1\n3,1\n2,2\n");
  CHECK(load_dense(numeric.path()).classes ==
        std::vector<std::string>{"2", "3", "10"});
  TempFile text("b,1\n10,1\na,1\n");
  CHECK(load_dense(text.path()).classes ==
        std::vector<std::string>{"10", "a", "b"});
}

TEST_CASE("dense loader reports precise parse errors") {
  CHECK_THROWS_AS(load_dense("/nonexistent/file.csv"), IoError);

  TempFile ragged("1,2,3\n1,2\n");
  CHECK_THROWS_WITH_AS(load_dense(ragged.path()),
                       doctest::Contains("line 2"), ParseError);

  TempFile bad_number("1,2,3\n1,x,3\n");
  CHECK_THROWS_WITH_AS(load_dense(bad_number.path()),
                       doctest::Contains("line 2"), ParseError);

  TempFile empty_label(",1,2\n");
  CHECK_THROWS_AS(load_dense(empty_label.path()), ParseError);

  TempFile empty("");
  CHECK_THROWS_AS(load_dense(empty.path()), ParseError);
}

TEST_CASE("sparse loader expands indices and skips comments") {
  TempFile f(
      "# header comment\n"
      "1 1:0.5 3:1.25\n"
      "2 2:-1.0   # trailing comment\n"
      "1\n");
  const auto data = load_sparse(f.path());
  CHECK(data.size() == 3);
  CHECK(data.n_features() == 3);
  CHECK(data.features(0, 0) == 0.5);
  CHECK(data.features(0, 1) == 0.0);
  CHECK(data.features(0, 2) == 1.25);
  CHECK(data.features(1, 1) == -1.0);
  CHECK(data.features.row(2).isZero());
  CHECK(data.classes == std::vector<std::string>{"1", "2"});
}

TEST_CASE("sparse loader rejects malformed lines") {
  TempFile decreasing("1 3:1.0 2:1.0\n");
  CHECK_THROWS_AS(load_sparse(decreasing.path()), ParseError);
  TempFile repeated("1 2:1.0 2:2.0\n");
  CHECK_THROWS_AS(load_sparse(repeated.path()), ParseError);
  TempFile zero_index("1 0:1.0\n");
  CHECK_THROWS_AS(load_sparse(zero_index.path()), ParseError);
  TempFile bad_pair("1 2-1.0\n");
  CHECK_THROWS_AS(load_sparse(bad_pair.path()), ParseError);
  TempFile bad_value("1 2:abc\n");
  CHECK_THROWS_AS(load_sparse(bad_value.path()), ParseError);
}

TEST_CASE("dense write then load is an exact round trip") {
  Dataset data;
  data.features = matrix_t(2, 3);
  data.features << 0.1, -1.0 / 3.0, 1e-17, 2.5, 3.141592653589793, -0.0;
  data.labels = {1, 0};
  data.classes = {"neg", "pos"};
  data.name = "tiny";

  const std::string path =
      (std::filesystem::temp_directory_path() / "ecoc_roundtrip.csv").string();
  write_dense(data, path);
  const auto back = load_dense(path);
  std::remove(path.c_str());

  REQUIRE(back.size() == 2);
  REQUIRE(back.n_features() == 3);
  CHECK(back.features == data.features);
  CHECK(back.classes == data.classes);
  CHECK(back.labels == data.labels);
}

TEST_CASE("scaling maps the fitted range onto [-1, 1]") {
  Dataset data;
  data.features = matrix_t(3, 2);
  data.features << 0.0, 5.0, 5.0, 5.0, 10.0, 5.0;
  data.labels = {0, 0, 0};
  data.classes = {"a"};

  const auto params = fit_scaling(data);
  CHECK(params.min(0) == 0.0);
  CHECK(params.max(0) == 10.0);

  const auto scaled = apply_scaling(data, params);
  CHECK(scaled.features(0, 0) == -1.0);
  CHECK(scaled.features(1, 0) == 0.0);
  CHECK(scaled.features(2, 0) == 1.0);
  // constant feature collapses to zero
  CHECK(scaled.features.col(1).isZero());

  // refitting on scaled data is the identity transform
  const auto refit = fit_scaling(scaled);
  const auto twice = apply_scaling(scaled, refit);
  CHECK(twice.features == scaled.features);
}

TEST_CASE("scale_vector clamps out-of-range values") {
  ScalingParams params;
  params.min = vector_t::Zero(1);
  params.max = vector_t::Ones(1) * 10.0;
  vector_t probe(1);
  probe << 25.0;
  CHECK(scale_vector(probe, params)(0) == 1.0);
  probe << -5.0;
  CHECK(scale_vector(probe, params)(0) == -1.0);
  probe << 2.5;
  CHECK(scale_vector(probe, params)(0) == -0.5);
}

namespace {

Dataset synthetic_dataset(int n, int n_classes) {
  Dataset data;
  data.features = matrix_t::Zero(n, 1);
  for (int i = 0; i < n; ++i) data.features(i, 0) = i;
  data.classes.clear();
  for (int c = 0; c < n_classes; ++c)
    data.classes.push_back(std::to_string(c));
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) data.labels[i] = i % n_classes;
  return data;
}

}  // namespace

TEST_CASE("folds partition every instance exactly once") {
  const auto data = synthetic_dataset(23, 3);
  const auto plan = make_folds(data, 5, 42);
  REQUIRE(plan.k == 5);
  REQUIRE(static_cast<int>(plan.assignments.size()) == 23);

  std::set<int> seen;
  std::vector<int> sizes(5, 0);
  for (int f = 0; f < 5; ++f) {
    for (int idx : plan.fold_indices(f)) {
      CHECK(seen.insert(idx).second);
      CHECK(plan.assignments[idx] == f);
    }
    sizes[f] = static_cast<int>(plan.fold_indices(f).size());
    const auto rest = plan.rest_indices(f);
    CHECK(static_cast<int>(rest.size()) == 23 - sizes[f]);
  }
  CHECK(static_cast<int>(seen.size()) == 23);

  const int lo = *std::min_element(sizes.begin(), sizes.end());
  const int hi = *std::max_element(sizes.begin(), sizes.end());
  CHECK(hi - lo <= 1);
}

TEST_CASE("stratified folds balance every class") {
  const auto data = synthetic_dataset(103, 4);
  const auto plan = make_folds(data, 5, 7);
  for (int c = 0; c < 4; ++c) {
    std::vector<int> per_fold(5, 0);
    for (int i = 0; i < data.size(); ++i)
      if (data.labels[i] == c) ++per_fold[plan.assignments[i]];
    const int lo = *std::min_element(per_fold.begin(), per_fold.end());
    const int hi = *std::max_element(per_fold.begin(), per_fold.end());
    CHECK(hi - lo <= 1);
  }
  // overall fold sizes stay balanced too
  std::vector<int> sizes(5, 0);
  for (int a : plan.assignments) ++sizes[a];
  const int lo = *std::min_element(sizes.begin(), sizes.end());
  const int hi = *std::max_element(sizes.begin(), sizes.end());
  CHECK(hi - lo <= 1);
}

TEST_CASE("fold plans are reproducible by seed") {
  const auto data = synthetic_dataset(50, 3);
  const auto a = make_folds(data, 5, 123);
  const auto b = make_folds(data, 5, 123);
  const auto c = make_folds(data, 5, 124);
  CHECK(a.assignments == b.assignments);
  CHECK(a.assignments != c.assignments);
}

TEST_CASE("fold parameters are validated") {
  const auto data = synthetic_dataset(10, 2);
  CHECK_THROWS_AS(make_folds(data, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(make_folds(data, 11, 0), InvalidArgument);
}

TEST_CASE("subset keeps the class vocabulary aligned") {
  const auto data = synthetic_dataset(10, 3);
  const auto sub = subset(data, {0, 4, 8});
  CHECK(sub.size() == 3);
  CHECK(sub.n_classes() == 3);
  CHECK(sub.labels == std::vector<int>{0, 1, 2});
  CHECK(sub.features(1, 0) == 4.0);

  const auto rows = rows_of_classes(data, {1});
  CHECK(rows == std::vector<int>{1, 4, 7});
}
