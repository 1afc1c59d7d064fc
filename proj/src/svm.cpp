#include "ecoc/svm.hpp"

#include <algorithm>
#include <limits>
#include <list>
#include <unordered_map>
#include <utility>

#include "ecoc/errors.hpp"

namespace ecoc {

namespace {

// LRU cache of full kernel rows; transparent, affects speed only.
class RowCache {
 public:
  RowCache(const_matrix_ref X, const KernelSpec& kernel, std::size_t budget)
      : X_(X),
        kernel_(kernel),
        max_rows_(std::max<std::size_t>(
            2, budget / (sizeof(scalar_t) *
                         static_cast<std::size_t>(std::max<index_t>(
                             1, X.rows()))))) {}

  const vector_t& row(int i) {
    auto hit = index_.find(i);
    if (hit != index_.end()) {
      rows_.splice(rows_.begin(), rows_, hit->second);
      return hit->second->second;
    }
    rows_.emplace_front(i, kernel_column(kernel_, X_, X_.row(i).transpose()));
    index_[i] = rows_.begin();
    if (rows_.size() > max_rows_) {
      index_.erase(rows_.back().first);
      rows_.pop_back();
    }
    return rows_.front().second;
  }

 private:
  const_matrix_ref X_;
  KernelSpec kernel_;
  std::size_t max_rows_;
  std::list<std::pair<int, vector_t>> rows_;
  std::unordered_map<int, std::list<std::pair<int, vector_t>>::iterator>
      index_;
};

void validate_inputs(const_matrix_ref X, const std::vector<int>& y,
                     const SvmConfig& config) {
  if (X.rows() == 0) throw InvalidArgument("svm: empty training set");
  if (static_cast<index_t>(y.size()) != X.rows())
    throw InvalidArgument("svm: feature/label count mismatch");
  if (config.C <= 0) throw InvalidArgument("svm: C must be positive");
  if (config.tolerance <= 0)
    throw InvalidArgument("svm: tolerance must be positive");
  if (config.kernel.type == KernelSpec::Type::rbf && config.kernel.gamma <= 0)
    throw InvalidArgument("svm: rbf gamma must be positive");
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1)
      pos = true;
    else if (label == -1)
      neg = true;
    else
      throw InvalidArgument("svm: labels must be +1 or -1");
  }
  if (!pos || !neg)
    throw InvalidArgument("svm: training set needs both classes");
}

}  // namespace

SmoResult smo_solve(const_matrix_ref X, const std::vector<int>& y,
                    const SvmConfig& config) {
  validate_inputs(X, y, config);
  const int n = static_cast<int>(X.rows());
  const scalar_t C = config.C;
  const scalar_t inf = std::numeric_limits<scalar_t>::infinity();

  RowCache cache(X, config.kernel, config.cache_bytes);
  vector_t diag(n);
  if (config.kernel.type == KernelSpec::Type::rbf)
    diag.setOnes();
  else
    diag = X.rowwise().squaredNorm();
  vector_t yv(n);
  for (int k = 0; k < n; ++k) yv(k) = y[k];

  vector_t alpha = vector_t::Zero(n);
  vector_t grad = -vector_t::Ones(n);  // grad_i = (Q alpha)_i - 1
  const long long budget = static_cast<long long>(config.max_passes) * n;
  long long it = 0;
  scalar_t m = 0.0, M = 0.0, gap = inf;
  bool converged = false;

  while (true) {
    // maximal violating pair: i maximizes -y*grad over the up set,
    // j minimizes it over the low set; ties keep the smallest index
    m = -inf;
    M = inf;
    int i = -1, j = -1;
    for (int k = 0; k < n; ++k) {
      const scalar_t v = -yv(k) * grad(k);
      const bool can_up = y[k] > 0 ? alpha(k) < C : alpha(k) > 0;
      const bool can_low = y[k] > 0 ? alpha(k) > 0 : alpha(k) < C;
      if (can_up && v > m) {
        m = v;
        i = k;
      }
      if (can_low && v < M) {
        M = v;
        j = k;
      }
    }
    gap = m - M;
    if (gap < config.tolerance) {
      converged = true;
      break;
    }
    if (it >= budget) break;
    ++it;

    const vector_t& Ki = cache.row(i);
    const vector_t& Kj = cache.row(j);
    const scalar_t curvature =
        std::max(diag(i) + diag(j) - 2.0 * Ki(j), scalar_t(1e-12));

    // step d > 0 along (alpha_i += y_i d, alpha_j -= y_j d), clipped to
    // whichever box wall is hit first
    const scalar_t wall_i = y[i] > 0 ? C - alpha(i) : alpha(i);
    const scalar_t wall_j = y[j] > 0 ? alpha(j) : C - alpha(j);
    const scalar_t d = std::min({gap / curvature, wall_i, wall_j});
    alpha(i) += yv(i) * d;
    alpha(j) -= yv(j) * d;
    if (d == wall_i) alpha(i) = y[i] > 0 ? C : 0.0;
    if (d == wall_j) alpha(j) = y[j] > 0 ? 0.0 : C;

    grad += d * yv.cwiseProduct(Ki - Kj);
  }

  // bias: average the implied threshold over free support vectors, or the
  // midpoint of the remaining interval when none are free
  scalar_t sum = 0.0;
  int n_free = 0;
  for (int k = 0; k < n; ++k) {
    if (alpha(k) > 0.0 && alpha(k) < C) {
      sum += -yv(k) * grad(k);
      ++n_free;
    }
  }
  SmoResult result;
  result.alpha = std::move(alpha);
  result.bias = n_free > 0 ? sum / n_free : (m + M) / 2.0;
  result.gap = gap;
  result.iterations = static_cast<int>(it);
  result.converged = converged;
  return result;
}

BinaryModel train_binary(const_matrix_ref X, const std::vector<int>& y,
                         const SvmConfig& config) {
  const SmoResult solution = smo_solve(X, y, config);
  const int n = static_cast<int>(X.rows());

  std::vector<int> sv;
  for (int k = 0; k < n; ++k)
    if (solution.alpha(k) > 0.0) sv.push_back(k);

  BinaryModel model;
  model.support_vectors.resize(sv.size(), X.cols());
  model.dual_coefs.resize(sv.size());
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(s) = X.row(sv[s]);
    model.dual_coefs(s) = solution.alpha(sv[s]) * y[sv[s]];
  }
  model.bias = solution.bias;
  model.kernel = config.kernel;
  model.C = config.C;
  model.converged = solution.converged;
  model.iterations = solution.iterations;
  return model;
}

BinaryModel train(const_matrix_ref positives, const_matrix_ref negatives,
                  const SvmConfig& config) {
  if (positives.rows() == 0 || negatives.rows() == 0)
    throw InvalidArgument("svm: both sides must be non-empty");
  if (positives.cols() != negatives.cols())
    throw InvalidArgument("svm: feature dimension mismatch between sides");
  matrix_t X(positives.rows() + negatives.rows(), positives.cols());
  X.topRows(positives.rows()) = positives;
  X.bottomRows(negatives.rows()) = negatives;
  std::vector<int> y(X.rows());
  std::fill(y.begin(), y.begin() + positives.rows(), 1);
  std::fill(y.begin() + positives.rows(), y.end(), -1);
  return train_binary(X, y, config);
}

scalar_t decision(const BinaryModel& model, const_vector_ref x) {
  if (model.n_support() == 0) return model.bias;
  if (x.size() != model.support_vectors.cols())
    throw InvalidArgument("svm: feature size mismatch in decision");
  return model.dual_coefs.dot(
             kernel_column(model.kernel, model.support_vectors, x)) +
         model.bias;
}

vector_t decision_batch(const BinaryModel& model, const_matrix_ref X) {
  vector_t out(X.rows());
  for (index_t r = 0; r < X.rows(); ++r)
    out(r) = decision(model, X.row(r).transpose());
  return out;
}

}  // namespace ecoc
