#include "ecoc/matching.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "ecoc/errors.hpp"

namespace ecoc {

namespace {

constexpr scalar_t kEps = 1e-12;     // slack tightness threshold
constexpr scalar_t kTieEps = 1e-9;   // weight-tie threshold for tie-breaking

// Edmonds' blossom algorithm, primal-dual form, for dense complete graphs.
// Pseudonode slots n..2n-1 hold contracted blossoms. Reduced costs are kept
// directly in a pairwise slack matrix over original vertices; the alternating
// forest is rebuilt from scratch after every dual adjustment, which keeps the
// label bookkeeping simple at the cost of a constant factor.
class BlossomSolver {
 public:
  explicit BlossomSolver(const matrix_t& weights)
      : n_(static_cast<int>(weights.rows())), size_(2 * n_), slack_(weights) {
    const scalar_t shift = min_off_diagonal(weights);
    for (int u = 0; u < n_; ++u)
      for (int v = 0; v < n_; ++v)
        if (u != v) slack_(u, v) -= shift;

    deep_.resize(size_);
    shallow_.resize(size_);
    outer_.resize(size_);
    mate_.assign(size_, -1);
    parent_.assign(size_, -1);
    root_.resize(size_);
    tip_.resize(size_);
    label_.assign(size_, kUnlabeled);
    dual_.assign(size_, 0.0);
    active_.assign(size_, false);
    blocked_.assign(size_, false);
    queued_.assign(size_, false);
    for (int i = 0; i < size_; ++i) {
      outer_[i] = i;
      root_[i] = i;
      tip_[i] = i;
      if (i < n_) {
        deep_[i] = {i};
        active_[i] = true;
      } else {
        free_slots_.push_back(i);
      }
    }
  }

  // Returns the mate of every original vertex.
  std::vector<int> solve() {
    int guard = 50 * n_ * n_ + 100;
    bool perfect = false;
    while (!perfect) {
      if (--guard < 0)
        throw NumericError("matching solver failed to converge");
      greedy_init();
      perfect = grow();
      if (perfect) break;
      adjust_duals();
      reset();
    }
    for (int b = n_; b < size_; ++b)
      if (active_[b] && outer_[b] == b && mate_[b] != -1) expand(b, true);
    return std::vector<int>(mate_.begin(), mate_.begin() + n_);
  }

 private:
  enum Label { kUnlabeled = 0, kOdd = 1, kEven = 2 };

  static scalar_t min_off_diagonal(const matrix_t& w) {
    scalar_t m = std::numeric_limits<scalar_t>::infinity();
    for (int u = 0; u < w.rows(); ++u)
      for (int v = u + 1; v < w.cols(); ++v) m = std::min(m, w(u, v));
    return std::isfinite(m) ? m : 0.0;
  }

  bool tight(int u, int v) const { return slack_(u, v) <= kEps; }

  static bool edge_less(int a1, int b1, int a2, int b2) {
    if (a1 > b1) std::swap(a1, b1);
    if (a2 > b2) std::swap(a2, b2);
    return a1 != a2 ? a1 < a2 : b1 < b2;
  }

  // Greedy matching over currently tight edges; a speed heuristic only.
  void greedy_init() {
    for (int u = 0; u < n_; ++u) {
      if (mate_[outer_[u]] != -1) continue;
      for (int v = 0; v < n_; ++v) {
        if (u == v || outer_[u] == outer_[v]) continue;
        if (!tight(u, v) || mate_[outer_[v]] != -1) continue;
        mate_[outer_[u]] = v;
        mate_[outer_[v]] = u;
        break;
      }
    }
  }

  // Grows the alternating forest over tight edges, augmenting and
  // contracting as opportunities appear. Returns true once perfect.
  bool grow() {
    reset();
    while (!queue_.empty()) {
      const int w = outer_[queue_.back()];
      queue_.pop_back();
      bool interrupted = false;
      for (std::size_t di = 0; di < deep_[w].size() && !interrupted; ++di) {
        const int u = deep_[w][di];
        for (int v = 0; v < n_; ++v) {
          if (u == v || outer_[u] == outer_[v] || !tight(u, v)) continue;
          const int ov = outer_[v];
          if (label_[ov] == kOdd) continue;
          if (label_[ov] == kUnlabeled) {
            // v's pseudonode becomes odd, its mate even.
            const int mv = mate_[ov];
            label_[ov] = kOdd;
            parent_[ov] = u;
            root_[ov] = root_[outer_[u]];
            const int om = outer_[mv];
            label_[om] = kEven;
            parent_[om] = v;
            root_[om] = root_[outer_[u]];
            if (!queued_[om]) {
              queue_.push_back(mv);
              queued_[om] = true;
            }
          } else if (root_[ov] != root_[outer_[u]]) {
            augment(u, v);
            reset();
            interrupted = true;
            break;
          } else if (ov != outer_[u]) {
            const int b = contract(u, v);
            queue_.push_back(b);
            queued_[b] = true;
            interrupted = true;
            break;
          }
        }
      }
    }
    for (int i = 0; i < n_; ++i)
      if (mate_[outer_[i]] == -1) return false;
    return true;
  }

  // Flips matched/unmatched edges along root(u)..u - v..root(v).
  void augment(int u, int v) {
    int p = outer_[u];
    int q = outer_[v];
    const int other_side = q;
    int up = parent_[p];
    mate_[p] = q;
    mate_[q] = p;
    expand(p, false);
    expand(q, false);
    while (up != -1) {
      q = outer_[parent_[p]];
      p = outer_[parent_[q]];
      up = parent_[p];
      mate_[p] = q;
      mate_[q] = p;
      expand(p, false);
      expand(q, false);
    }
    p = other_side;
    up = parent_[p];
    while (up != -1) {
      q = outer_[parent_[p]];
      p = outer_[parent_[q]];
      up = parent_[p];
      mate_[p] = q;
      mate_[q] = p;
      expand(p, false);
      expand(q, false);
    }
  }

  // Contracts the odd cycle through u and v into a fresh pseudonode.
  int contract(int u, int v) {
    const int t = free_slots_.back();
    free_slots_.pop_back();

    std::vector<char> on_path(size_, 0);
    int cur = outer_[u];
    on_path[cur] = 1;
    while (parent_[cur] != -1) {
      cur = outer_[parent_[cur]];
      on_path[cur] = 1;
    }
    int meet = outer_[v];
    while (!on_path[meet]) meet = outer_[parent_[meet]];
    tip_[t] = meet;

    shallow_[t].clear();
    std::vector<int> u_side;
    for (cur = outer_[u]; cur != meet; cur = outer_[parent_[cur]])
      u_side.push_back(cur);
    shallow_[t].push_back(meet);
    shallow_[t].insert(shallow_[t].end(), u_side.rbegin(), u_side.rend());
    for (cur = outer_[v]; cur != meet; cur = outer_[parent_[cur]])
      shallow_[t].push_back(cur);

    deep_[t].clear();
    for (int child : shallow_[t]) {
      outer_[child] = t;
      for (int original : deep_[child]) {
        deep_[t].push_back(original);
        outer_[original] = t;
      }
    }

    parent_[t] = parent_[meet];
    label_[t] = kEven;
    root_[t] = root_[meet];
    active_[t] = true;
    blocked_[t] = false;
    dual_[t] = 0.0;
    outer_[t] = t;
    mate_[t] = mate_[meet];
    return t;
  }

  // Materializes the matching inside a pseudonode. Blocked blossoms stay
  // contracted unless expand_blocked is set (final extraction).
  void expand(int node, bool expand_blocked) {
    const int partner = outer_[mate_[node]];
    int best_x = -1, best_y = -1;
    for (int x : deep_[node]) {
      for (int y : deep_[partner]) {
        if (!tight(x, y)) continue;
        if (best_x == -1 || edge_less(x, y, best_x, best_y)) {
          best_x = x;
          best_y = y;
        }
      }
    }
    if (best_x == -1) throw NumericError("matching invariant violated");
    mate_[node] = best_y;
    mate_[partner] = best_x;
    if (node < n_ || (blocked_[node] && !expand_blocked)) return;

    // Rotate the odd cycle so the child holding the matched endpoint leads.
    auto holds_endpoint = [&](int child) {
      return std::find(deep_[child].begin(), deep_[child].end(), best_x) !=
             deep_[child].end();
    };
    auto& cycle = shallow_[node];
    auto lead = std::find_if(cycle.begin(), cycle.end(), holds_endpoint);
    std::rotate(cycle.begin(), lead, cycle.end());

    mate_[cycle.front()] = mate_[node];
    for (std::size_t k = 1; k + 1 < cycle.size(); k += 2) {
      mate_[cycle[k]] = cycle[k + 1];
      mate_[cycle[k + 1]] = cycle[k];
    }

    for (int child : cycle) {
      outer_[child] = child;
      for (int original : deep_[child]) outer_[original] = child;
    }
    active_[node] = false;
    free_slots_.push_back(node);

    for (int child : cycle) expand(child, expand_blocked);
  }

  // Undoes an unblocked pseudonode without touching recorded mates; the
  // children's pre-contraction mates are still consistent.
  void dissolve(int node) {
    if (node < n_ || (blocked_[node] && dual_[node] > kEps)) return;
    for (int child : shallow_[node]) {
      outer_[child] = child;
      for (int original : deep_[child]) outer_[original] = child;
      dissolve(child);
    }
    active_[node] = false;
    blocked_[node] = false;
    mate_[node] = -1;
    free_slots_.push_back(node);
  }

  void adjust_duals() {
    const scalar_t inf = std::numeric_limits<scalar_t>::infinity();
    scalar_t even_unlabeled = inf, even_even = inf, odd_blossom = inf;
    for (int u = 0; u < n_; ++u) {
      for (int v = u + 1; v < n_; ++v) {
        const int ou = outer_[u], ov = outer_[v];
        if (ou == ov) continue;
        const int lu = label_[ou], lv = label_[ov];
        if ((lu == kEven && lv == kUnlabeled) ||
            (lv == kEven && lu == kUnlabeled))
          even_unlabeled = std::min(even_unlabeled, slack_(u, v));
        else if (lu == kEven && lv == kEven)
          even_even = std::min(even_even, slack_(u, v));
      }
    }
    for (int b = n_; b < size_; ++b)
      if (active_[b] && outer_[b] == b && label_[b] == kOdd)
        odd_blossom = std::min(odd_blossom, dual_[b]);

    const scalar_t delta =
        std::min({even_unlabeled, even_even / 2.0, odd_blossom});
    if (!std::isfinite(delta))
      throw NumericError("matching solver stuck: no dual adjustment exists");

    for (int i = 0; i < size_; ++i) {
      if (outer_[i] != i || !active_[i]) continue;
      if (label_[i] == kEven)
        dual_[i] += delta;
      else if (label_[i] == kOdd)
        dual_[i] -= delta;
    }
    for (int u = 0; u < n_; ++u) {
      for (int v = u + 1; v < n_; ++v) {
        const int ou = outer_[u], ov = outer_[v];
        if (ou == ov) continue;
        const int lu = label_[ou], lv = label_[ov];
        scalar_t change = 0.0;
        if (lu == kEven && lv == kEven)
          change = -2.0 * delta;
        else if (lu == kOdd && lv == kOdd)
          change = 2.0 * delta;
        else if ((lu == kEven && lv == kUnlabeled) ||
                 (lv == kEven && lu == kUnlabeled))
          change = -delta;
        else if ((lu == kOdd && lv == kUnlabeled) ||
                 (lv == kOdd && lu == kUnlabeled))
          change = delta;
        if (change != 0.0) {
          slack_(u, v) += change;
          slack_(v, u) += change;
        }
      }
    }
    // Blossoms whose dual reached zero unblock; expand matched ones.
    for (int b = n_; b < size_; ++b) {
      if (!active_[b]) continue;
      if (dual_[b] > kEps) {
        blocked_[b] = true;
      } else if (blocked_[b]) {
        if (mate_[b] == -1) {
          dissolve(b);
        } else {
          blocked_[b] = false;
          expand(b, false);
        }
      }
    }
  }

  // Clears the forest; unblocked leftover blossoms are dissolved.
  void reset() {
    for (int i = 0; i < size_; ++i) {
      parent_[i] = -1;
      root_[i] = i;
      if (i >= n_ && active_[i] && outer_[i] == i) dissolve(i);
    }
    std::fill(queued_.begin(), queued_.end(), false);
    queue_.clear();
    for (int i = 0; i < n_; ++i) {
      if (mate_[outer_[i]] == -1) {
        label_[outer_[i]] = kEven;
        if (!queued_[outer_[i]]) {
          queue_.push_back(i);
          queued_[outer_[i]] = true;
        }
      } else {
        label_[outer_[i]] = kUnlabeled;
      }
    }
  }

  int n_;
  int size_;
  matrix_t slack_;
  std::vector<std::vector<int>> deep_;     // original vertices inside
  std::vector<std::vector<int>> shallow_;  // immediate children, cycle order
  std::vector<int> outer_, mate_, parent_, root_, tip_, label_;
  std::vector<scalar_t> dual_;
  std::vector<bool> active_, blocked_, queued_;
  std::vector<int> queue_, free_slots_;
};

void validate(const MatchingProblem& problem) {
  const auto& w = problem.weights;
  if (w.rows() != w.cols())
    throw InvalidArgument("matching: weight matrix must be square");
  if (w.rows() < 2) throw InvalidArgument("matching: need at least 2 nodes");
  for (int u = 0; u < w.rows(); ++u) {
    for (int v = u + 1; v < w.cols(); ++v) {
      if (!std::isfinite(w(u, v)) || !std::isfinite(w(v, u)))
        throw NumericError("matching: non-finite weight at (" +
                           std::to_string(u) + "," + std::to_string(v) + ")");
      if (w(u, v) != w(v, u))
        throw InvalidArgument("matching: weight matrix not symmetric at (" +
                              std::to_string(u) + "," + std::to_string(v) +
                              ")");
    }
  }
}

matrix_t submatrix(const matrix_t& w, const std::vector<int>& keep) {
  matrix_t sub(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      sub(i, j) = w(keep[i], keep[j]);
  return sub;
}

scalar_t blossom_weight(const matrix_t& w) {
  if (w.rows() == 0) return 0.0;
  BlossomSolver solver(w);
  const auto mate = solver.solve();
  scalar_t total = 0.0;
  for (int u = 0; u < w.rows(); ++u)
    if (mate[u] > u) total += w(u, mate[u]);
  return total;
}

Matching finish(const matrix_t& w, std::vector<std::pair<int, int>>&& pairs) {
  Matching m;
  m.pairs = std::move(pairs);
  m.total_weight = 0.0;
  for (const auto& [i, j] : m.pairs) m.total_weight += w(i, j);
  return m;
}

}  // namespace

Matching solve_perfect(const MatchingProblem& problem) {
  validate(problem);
  const int n = problem.n_nodes();
  if (n % 2 != 0)
    throw InvalidArgument("solve_perfect: odd node count " +
                          std::to_string(n));
  const matrix_t& w = problem.weights;

  // The blossom solver pins the optimal weight; a greedy lexicographic
  // refinement then fixes which optimal matching is returned, so equal
  // weights always resolve to the smallest sorted pair list.
  std::vector<int> alive(n);
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<std::pair<int, int>> pairs;
  while (!alive.empty()) {
    const int u = alive.front();
    int best_v = -1;
    scalar_t best_total = 0.0;
    if (alive.size() == 2) {
      best_v = alive[1];
    } else {
      for (std::size_t vi = 1; vi < alive.size(); ++vi) {
        const int v = alive[vi];
        std::vector<int> rest;
        rest.reserve(alive.size() - 2);
        for (int node : alive)
          if (node != u && node != v) rest.push_back(node);
        const scalar_t total = w(u, v) + blossom_weight(submatrix(w, rest));
        if (best_v == -1 || total < best_total - kTieEps) {
          best_v = v;
          best_total = total;
        }
      }
    }
    pairs.emplace_back(u, best_v);
    std::erase(alive, u);
    std::erase(alive, best_v);
  }
  return finish(w, std::move(pairs));
}

ByeMatching solve_with_bye(const MatchingProblem& problem) {
  validate(problem);
  const int n = problem.n_nodes();
  if (n % 2 == 0) return {solve_perfect(problem), std::nullopt};

  ByeMatching best;
  bool first = true;
  for (int bye = 0; bye < n; ++bye) {
    std::vector<int> keep;
    keep.reserve(n - 1);
    for (int v = 0; v < n; ++v)
      if (v != bye) keep.push_back(v);
    const Matching local = solve_perfect({submatrix(problem.weights, keep)});
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(local.pairs.size());
    for (const auto& [i, j] : local.pairs) pairs.emplace_back(keep[i], keep[j]);
    Matching remapped = finish(problem.weights, std::move(pairs));
    if (first || remapped.total_weight < best.matching.total_weight - kTieEps) {
      best = {std::move(remapped), bye};
      first = false;
    }
  }
  return best;
}

Matching brute_force(const MatchingProblem& problem) {
  validate(problem);
  const int n = problem.n_nodes();
  if (n % 2 != 0)
    throw InvalidArgument("brute_force: odd node count " + std::to_string(n));
  if (n > 12)
    throw InvalidArgument("brute_force: n=" + std::to_string(n) +
                          " exceeds the enumeration guard (12)");
  const matrix_t& w = problem.weights;

  std::vector<std::pair<int, int>> current, best;
  scalar_t best_weight = std::numeric_limits<scalar_t>::infinity();
  std::vector<bool> used(n, false);

  // Pairing the lowest unused node first enumerates matchings in
  // lexicographic order of their sorted pair lists, so keeping the first
  // strict minimum reproduces the solver's tie-breaking rule.
  auto recurse = [&](auto&& self, scalar_t weight) -> void {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!used[i]) {
        u = i;
        break;
      }
    if (u == -1) {
      if (weight < best_weight) {
        best_weight = weight;
        best = current;
      }
      return;
    }
    used[u] = true;
    for (int v = u + 1; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      current.emplace_back(u, v);
      self(self, weight + w(u, v));
      current.pop_back();
      used[v] = false;
    }
    used[u] = false;
  };
  recurse(recurse, 0.0);
  return finish(w, std::move(best));
}

MatchingProblem read_graph(std::istream& in) {
  int n = 0;
  if (!(in >> n)) throw ParseError("graph: missing node count");
  if (n < 2) throw ParseError("graph: need at least 2 nodes");

  matrix_t weights = matrix_t::Zero(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen(n, n);
  seen.setConstant(false);

  int i, j;
  scalar_t w;
  while (in >> i >> j >> w) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw ParseError("graph: bad edge (" + std::to_string(i) + "," +
                       std::to_string(j) + ")");
    if (seen(i, j))
      throw ParseError("graph: duplicate edge (" + std::to_string(i) + "," +
                       std::to_string(j) + ")");
    weights(i, j) = weights(j, i) = w;
    seen(i, j) = seen(j, i) = true;
  }
  if (!in.eof()) throw ParseError("graph: unparseable edge line");
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!seen(a, b))
        throw ParseError("graph: missing weight for edge (" +
                         std::to_string(a) + "," + std::to_string(b) + ")");
  return {std::move(weights)};
}

}  // namespace ecoc
