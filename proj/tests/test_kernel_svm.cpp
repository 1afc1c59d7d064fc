#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ecoc/errors.hpp"
#include "ecoc/kernel.hpp"
#include "ecoc/rng.hpp"
#include "ecoc/svm.hpp"

using namespace ecoc;

namespace {

vector_t vec2(scalar_t a, scalar_t b) {
  vector_t v(2);
  v << a, b;
  return v;
}

// Two 2-D Gaussian blobs centered at (+offset, 0) and (-offset, 0).
struct Blobs {
  matrix_t X;
  std::vector<int> y;
};

Blobs make_blobs(int per_class, scalar_t offset, scalar_t sigma,
                 uint64_t seed) {
  Rng rng(seed);
  Blobs out;
  out.X.resize(2 * per_class, 2);
  out.y.resize(2 * per_class);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 1 : -1;
    out.X(i, 0) = label * offset + sigma * rng.normal();
    out.X(i, 1) = sigma * rng.normal();
    out.y[i] = label;
  }
  return out;
}

}  // namespace

TEST_CASE("kernel evaluation matches the closed forms") {
  KernelSpec rbf{KernelSpec::Type::rbf, 0.1};
  CHECK(kernel_eval(rbf, vec2(0.3, -2.0), vec2(0.3, -2.0)) == 1.0);
  CHECK(kernel_eval(rbf, vec2(0, 0), vec2(1, 1)) ==
        doctest::Approx(std::exp(-0.2)).epsilon(1e-12));

  KernelSpec linear{KernelSpec::Type::linear, 0.0};
  CHECK(kernel_eval(linear, vec2(1, 2), vec2(3, 4)) == 11.0);

  // symmetry is exact, not approximate
  const vector_t a = vec2(0.17, -1.3), b = vec2(2.4, 0.9);
  CHECK(kernel_eval(rbf, a, b) == kernel_eval(rbf, b, a));
  CHECK(kernel_eval(linear, a, b) == kernel_eval(linear, b, a));

  vector_t three(3);
  three << 1, 2, 3;
  CHECK_THROWS_AS(kernel_eval(rbf, a, three), InvalidArgument);
}

TEST_CASE("kernel_column equals elementwise evaluation") {
  Rng rng(7);
  matrix_t X(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
  vector_t x(3);
  x << 0.5, -1.0, 2.0;
  for (auto type : {KernelSpec::Type::linear, KernelSpec::Type::rbf}) {
    KernelSpec spec{type, 0.25};
    const vector_t col = kernel_column(spec, X, x);
    for (int i = 0; i < 5; ++i)
      CHECK(col(i) ==
            doctest::Approx(kernel_eval(spec, X.row(i).transpose(), x))
                .epsilon(1e-14));
  }
}

TEST_CASE("kernel names round trip") {
  CHECK(to_string(KernelSpec::Type::rbf) == "rbf");
  CHECK(to_string(KernelSpec::Type::linear) == "linear");
  CHECK(kernel_type_from_string("rbf") == KernelSpec::Type::rbf);
  CHECK(kernel_type_from_string("linear") == KernelSpec::Type::linear);
  CHECK_THROWS_AS(kernel_type_from_string("poly"), InvalidArgument);
}

TEST_CASE("decision handles the degenerate and hand-computed models") {
  BinaryModel empty;
  empty.support_vectors.resize(0, 2);
  empty.dual_coefs.resize(0);
  empty.bias = 0.5;
  CHECK(decision(empty, vec2(123.0, -4.0)) == 0.5);

  BinaryModel lone;
  lone.kernel = {KernelSpec::Type::rbf, 0.7};
  lone.support_vectors = vec2(0.2, 0.4).transpose();
  lone.dual_coefs = vector_t::Ones(1);
  lone.bias = 0.0;
  CHECK(decision(lone, vec2(0.2, 0.4)) == doctest::Approx(1.0));

  BinaryModel linear;
  linear.kernel = {KernelSpec::Type::linear, 0.0};
  linear.support_vectors = vec2(2.0, 0.0).transpose();
  linear.dual_coefs = vector_t::Ones(1);
  linear.bias = -1.0;
  CHECK(decision(linear, vec2(1.0, 0.0)) == doctest::Approx(1.0));

  vector_t three(3);
  three << 1, 2, 3;
  CHECK_THROWS_AS(decision(linear, three), InvalidArgument);
}

TEST_CASE("separable pair trains to the textbook solution") {
  matrix_t pos = vec2(1, 1).transpose();
  matrix_t neg = vec2(-1, -1).transpose();
  SvmConfig config;
  config.kernel = {KernelSpec::Type::linear, 0.0};
  const auto model = train(pos, neg, config);
  CHECK(decision(model, vec2(1, 1)) > 0);
  CHECK(decision(model, vec2(-1, -1)) < 0);
  // alpha = 1/4 on both sides, bias 0: f(x) = (x1 + x2)/4
  CHECK(decision(model, vec2(1, 1)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(decision(model, vec2(-1, -1)) == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(std::abs(model.bias) < 1e-9);
}

TEST_CASE("xor needs the rbf kernel and reaches 100% training accuracy") {
  matrix_t X(4, 2);
  X << 1, 1, -1, -1, 1, -1, -1, 1;
  const std::vector<int> y = {1, 1, -1, -1};
  SvmConfig config;
  config.C = 10.0;
  config.kernel = {KernelSpec::Type::rbf, 1.0};
  const auto model = train_binary(X, y, config);
  for (int i = 0; i < 4; ++i) {
    const scalar_t f = decision(model, X.row(i).transpose());
    CHECK(y[i] * f > 0);
  }
  CHECK(model.converged);
}

TEST_CASE("dual constraints and kkt conditions hold on random problems") {
  SvmConfig config;  // rbf gamma 0.1, C 1, tol 1e-3
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    // alternate between clearly separable and heavily overlapping blobs
    const scalar_t offset = seed % 2 == 0 ? 2.0 : 0.5;
    const auto blobs = make_blobs(30, offset, 0.8, 1000 + seed);
    const auto result = smo_solve(blobs.X, blobs.y, config);
    REQUIRE(result.converged);

    scalar_t alpha_dot_y = 0.0;
    for (int i = 0; i < blobs.X.rows(); ++i) {
      CHECK(result.alpha(i) >= 0.0);
      CHECK(result.alpha(i) <= config.C);
      alpha_dot_y += result.alpha(i) * blobs.y[i];
    }
    CHECK(std::abs(alpha_dot_y) <= 1e-6);

    // recompute decisions from scratch and check the kkt cases
    for (int i = 0; i < blobs.X.rows(); ++i) {
      scalar_t f = result.bias;
      for (int j = 0; j < blobs.X.rows(); ++j)
        f += result.alpha(j) * blobs.y[j] *
             kernel_eval(config.kernel, blobs.X.row(j).transpose(),
                         blobs.X.row(i).transpose());
      const scalar_t margin = blobs.y[i] * f;
      const scalar_t slack = config.tolerance + 1e-9;
      if (result.alpha(i) == 0.0) {
        CHECK(margin >= 1.0 - slack);
      } else if (result.alpha(i) == config.C) {
        CHECK(margin <= 1.0 + slack);
      } else {
        CHECK(std::abs(margin - 1.0) <= slack);
      }
    }
  }
}

TEST_CASE("separable training points all clear the margin") {
  const auto blobs = make_blobs(25, 3.0, 0.4, 99);
  SvmConfig config;
  config.C = 10.0;
  const auto model = train_binary(blobs.X, blobs.y, config);
  for (int i = 0; i < blobs.X.rows(); ++i) {
    const scalar_t f = decision(model, blobs.X.row(i).transpose());
    CHECK(blobs.y[i] * f >= 1.0 - config.tolerance);
  }
}

TEST_CASE("training and prediction are deterministic") {
  const auto blobs = make_blobs(40, 1.0, 1.0, 5);
  SvmConfig config;
  const auto a = train_binary(blobs.X, blobs.y, config);
  const auto b = train_binary(blobs.X, blobs.y, config);
  CHECK(a.dual_coefs == b.dual_coefs);
  CHECK(a.bias == b.bias);
  CHECK(a.support_vectors == b.support_vectors);
  CHECK(a.iterations == b.iterations);
  const vector_t probe = vec2(0.123, -0.456);
  CHECK(decision(a, probe) == decision(a, probe));
  CHECK(decision(a, probe) == decision(b, probe));
}

TEST_CASE("kernel cache size cannot change the result") {
  const auto blobs = make_blobs(50, 1.0, 1.0, 11);
  SvmConfig big;
  SvmConfig tiny;
  tiny.cache_bytes = 1;  // at most two rows stay cached
  const auto a = smo_solve(blobs.X, blobs.y, big);
  const auto b = smo_solve(blobs.X, blobs.y, tiny);
  CHECK(a.alpha == b.alpha);
  CHECK(a.bias == b.bias);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("duplicated training data keeps the decision surface") {
  const auto blobs = make_blobs(40, 1.5, 0.6, 21);
  matrix_t doubled(blobs.X.rows() * 2, 2);
  doubled.topRows(blobs.X.rows()) = blobs.X;
  doubled.bottomRows(blobs.X.rows()) = blobs.X;
  std::vector<int> ydoubled = blobs.y;
  ydoubled.insert(ydoubled.end(), blobs.y.begin(), blobs.y.end());

  SvmConfig config;
  const auto a = train_binary(blobs.X, blobs.y, config);
  const auto b = train_binary(doubled, ydoubled, config);

  int agree = 0, total = 0;
  for (scalar_t x0 = -3.0; x0 <= 3.0; x0 += 0.25) {
    for (scalar_t x1 = -3.0; x1 <= 3.0; x1 += 0.25) {
      const vector_t p = vec2(x0, x1);
      const bool sa = decision(a, p) >= 0;
      const bool sb = decision(b, p) >= 0;
      agree += sa == sb;
      ++total;
    }
  }
  CHECK(static_cast<scalar_t>(agree) / total >= 0.99);
}

TEST_CASE("iteration budget exhaustion is a soft failure") {
  const auto blobs = make_blobs(50, 0.1, 1.5, 3);  // heavy overlap
  SvmConfig config;
  config.max_passes = 0;  // budget of zero iterations
  const auto result = smo_solve(blobs.X, blobs.y, config);
  CHECK(!result.converged);
  CHECK(result.alpha.size() == blobs.X.rows());
  const auto model = train_binary(blobs.X, blobs.y, config);
  CHECK(!model.converged);
}

TEST_CASE("invalid training inputs are rejected") {
  matrix_t X(2, 2);
  X << 1, 1, -1, -1;
  SvmConfig config;

  CHECK_THROWS_AS(train_binary(X, {1, 1}, config), InvalidArgument);
  CHECK_THROWS_AS(train_binary(X, {1, 0}, config), InvalidArgument);
  CHECK_THROWS_AS(train_binary(X, {1}, config), InvalidArgument);
  CHECK_THROWS_AS(train_binary(matrix_t(0, 2), {}, config), InvalidArgument);

  SvmConfig bad_c;
  bad_c.C = 0.0;
  CHECK_THROWS_AS(train_binary(X, {1, -1}, bad_c), InvalidArgument);
  SvmConfig bad_gamma;
  bad_gamma.kernel.gamma = -1.0;
  CHECK_THROWS_AS(train_binary(X, {1, -1}, bad_gamma), InvalidArgument);

  CHECK_THROWS_AS(train(matrix_t(0, 2), X, config), InvalidArgument);
  CHECK_THROWS_AS(train(X, matrix_t(0, 2), config), InvalidArgument);
  CHECK_THROWS_AS(train(X, matrix_t(1, 3), config), InvalidArgument);
}

TEST_CASE("two-sided train wrapper matches the label form") {
  const auto blobs = make_blobs(20, 1.5, 0.5, 77);
  matrix_t pos = blobs.X.topRows(20);
  matrix_t neg = blobs.X.bottomRows(20);
  const auto a = train(pos, neg, SvmConfig{});
  const auto b = train_binary(blobs.X, blobs.y, SvmConfig{});
  CHECK(a.dual_coefs == b.dual_coefs);
  CHECK(a.bias == b.bias);

  // decision_batch equals row-by-row decisions
  const vector_t batch = decision_batch(a, blobs.X);
  for (int i = 0; i < blobs.X.rows(); ++i)
    CHECK(batch(i) == decision(a, blobs.X.row(i).transpose()));
}
