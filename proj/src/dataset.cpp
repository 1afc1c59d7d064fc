#include "ecoc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ecoc/errors.hpp"
#include "ecoc/rng.hpp"

namespace ecoc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + token.size() && std::isfinite(out);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.push_back("");
  return cells;
}

// Numeric order when every label is a number, lexicographic otherwise.
std::vector<std::string> sorted_classes(const std::vector<std::string>& raw) {
  std::vector<std::string> classes = raw;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  bool all_numeric = true;
  std::vector<double> values(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!parse_double(classes[i], values[i])) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::vector<std::size_t> order(classes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a] != values[b]) return values[a] < values[b];
      return classes[a] < classes[b];
    });
    std::vector<std::string> out(classes.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[i] = classes[order[i]];
    return out;
  }
  return classes;
}

Dataset assemble(std::vector<std::vector<double>>&& rows,
                 std::vector<std::string>&& raw_labels, index_t n_features,
                 const std::string& name) {
  Dataset data;
  data.name = name;
  data.classes = sorted_classes(raw_labels);
  std::map<std::string, int> index_of;
  for (std::size_t i = 0; i < data.classes.size(); ++i)
    index_of[data.classes[i]] = static_cast<int>(i);

  data.features.resize(static_cast<index_t>(rows.size()), n_features);
  data.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (index_t j = 0; j < n_features; ++j)
      data.features(static_cast<index_t>(i), j) = rows[i][j];
    data.labels[i] = index_of[raw_labels[i]];
  }
  return data;
}

std::string basename_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

Dataset load_dense(const std::string& path, int label_column,
                   char delimiter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::string line;
  int line_no = 0;
  index_t n_columns = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delimiter);
    const auto n = static_cast<index_t>(cells.size());
    if (n_columns < 0) {
      n_columns = n;
      if (label_column < 0 || label_column >= n_columns)
        throw ParseError("label column " + std::to_string(label_column) +
                         " out of range for " + std::to_string(n_columns) +
                         " columns");
    } else if (n != n_columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(n_columns) + " columns, got " +
                       std::to_string(n));
    }

    std::vector<double> features;
    features.reserve(n_columns - 1);
    for (index_t c = 0; c < n_columns; ++c) {
      if (c == label_column) {
        if (cells[c].empty())
          throw ParseError("line " + std::to_string(line_no) +
                           ": empty label");
        raw_labels.push_back(cells[c]);
        continue;
      }
      double value;
      if (!parse_double(cells[c], value))
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(c + 1) + ": not a number: '" +
                         cells[c] + "'");
      features.push_back(value);
    }
    rows.push_back(std::move(features));
  }

  if (rows.empty()) throw ParseError("'" + path + "': no instances");
  return assemble(std::move(rows), std::move(raw_labels), n_columns - 1,
                  basename_of(path));
}

Dataset load_sparse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::vector<std::vector<std::pair<index_t, double>>> sparse_rows;
  std::vector<std::string> raw_labels;
  std::string line;
  int line_no = 0;
  index_t max_index = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream tokens(trim(line));
    std::string label;
    if (!(tokens >> label)) continue;
    raw_labels.push_back(label);

    std::vector<std::pair<index_t, double>> entries;
    std::string token;
    index_t previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected index:value, got '" + token + "'");
      double index_value, value;
      if (!parse_double(token.substr(0, colon), index_value) ||
          index_value != std::floor(index_value) || index_value < 1)
        throw ParseError("line " + std::to_string(line_no) +
                         ": bad feature index in '" + token + "'");
      if (!parse_double(token.substr(colon + 1), value))
        throw ParseError("line " + std::to_string(line_no) +
                         ": bad feature value in '" + token + "'");
      const auto index = static_cast<index_t>(index_value);
      if (index <= previous)
        throw ParseError("line " + std::to_string(line_no) +
                         ": indices not increasing");
      previous = index;
      entries.emplace_back(index - 1, value);
    }
    max_index = std::max(max_index, previous);
    sparse_rows.push_back(std::move(entries));
  }

  if (sparse_rows.empty()) throw ParseError("'" + path + "': no instances");

  std::vector<std::vector<double>> rows(sparse_rows.size(),
                                        std::vector<double>(max_index, 0.0));
  for (std::size_t i = 0; i < sparse_rows.size(); ++i)
    for (const auto& [column, value] : sparse_rows[i]) rows[i][column] = value;
  return assemble(std::move(rows), std::move(raw_labels), max_index,
                  basename_of(path));
}

void write_dense(const Dataset& data, const std::string& path,
                 int label_column, char delimiter) {
  const index_t n_columns = data.n_features() + 1;
  if (label_column < 0 || label_column >= n_columns)
    throw InvalidArgument("label column out of range");

  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");

  char buffer[40];
  for (index_t i = 0; i < data.size(); ++i) {
    index_t feature = 0;
    for (index_t c = 0; c < n_columns; ++c) {
      if (c > 0) out << delimiter;
      if (c == label_column) {
        out << data.label_of(i);
      } else {
        std::snprintf(buffer, sizeof(buffer), "%.17g",
                      data.features(i, feature++));
        out << buffer;
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

ScalingParams fit_scaling(const Dataset& data) {
  if (data.size() == 0) throw InvalidArgument("fit_scaling: empty dataset");
  ScalingParams params;
  params.min = data.features.colwise().minCoeff();
  params.max = data.features.colwise().maxCoeff();
  return params;
}

vector_t scale_vector(const_vector_ref x, const ScalingParams& params) {
  if (x.size() != params.min.size())
    throw InvalidArgument("scale_vector: expected " +
                          std::to_string(params.min.size()) +
                          " features, got " + std::to_string(x.size()));
  vector_t scaled(x.size());
  for (index_t j = 0; j < x.size(); ++j) {
    const scalar_t lo = params.min[j], hi = params.max[j];
    if (hi == lo) {
      scaled[j] = 0.0;
    } else {
      const scalar_t v = 2.0 * (x[j] - lo) / (hi - lo) - 1.0;
      scaled[j] = std::clamp(v, -1.0, 1.0);
    }
  }
  return scaled;
}

Dataset apply_scaling(const Dataset& data, const ScalingParams& params) {
  if (data.n_features() != params.min.size())
    throw InvalidArgument("apply_scaling: feature count mismatch");
  Dataset scaled = data;
  for (index_t i = 0; i < data.size(); ++i)
    scaled.features.row(i) = scale_vector(data.features.row(i), params);
  return scaled;
}

std::vector<int> FoldPlan::fold_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldPlan::rest_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

FoldPlan make_folds(const Dataset& data, int k, std::uint64_t seed,
                    bool stratified) {
  const auto n = static_cast<int>(data.size());
  if (k < 2) throw InvalidArgument("make_folds: k must be >= 2");
  if (k > n)
    throw InvalidArgument("make_folds: k=" + std::to_string(k) +
                          " larger than instance count " + std::to_string(n));

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignments.assign(n, 0);

  Rng rng(mix_seed(seed));
  if (stratified) {
    // Shuffled per-class lists dealt round-robin with a rotating start, so
    // overall fold sizes differ by at most 1 and per-class counts do too.
    std::vector<std::vector<int>> by_class(data.classes.size());
    for (int i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);
    int next = 0;
    for (auto& members : by_class) {
      rng.shuffle(members);
      for (int index : members) {
        plan.assignments[index] = next;
        next = (next + 1) % k;
      }
    }
  } else {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (int position = 0; position < n; ++position)
      plan.assignments[order[position]] = position % k;
  }
  return plan;
}

Dataset subset(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.name = data.name;
  out.classes = data.classes;
  out.features.resize(static_cast<index_t>(rows.size()), data.n_features());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<index_t>(i)) = data.features.row(rows[i]);
    out.labels[i] = data.labels[rows[i]];
  }
  return out;
}

std::vector<int> rows_of_classes(const Dataset& data,
                                 const std::vector<int>& class_ids) {
  std::vector<bool> wanted(data.classes.size(), false);
  for (int c : class_ids) wanted[c] = true;
  std::vector<int> rows;
  for (index_t i = 0; i < data.size(); ++i)
    if (wanted[data.labels[i]]) rows.push_back(static_cast<int>(i));
  return rows;
}

}  // namespace ecoc
