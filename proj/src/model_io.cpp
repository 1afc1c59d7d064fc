#include "ecoc/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include "ecoc/errors.hpp"

namespace ecoc {

namespace {

using nlohmann::json;

constexpr const char* kModelFormat = "ecoc-binary-model";
constexpr const char* kManifestFormat = "ecoc-ensemble";
constexpr const char* kReportFormat = "ecoc-report";
constexpr int kFormatVersion = 1;

json json_array(const_vector_ref v) {
  json out = json::array();
  for (index_t i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

vector_t vector_from_json(const json& arr) {
  vector_t v(static_cast<index_t>(arr.size()));
  index_t i = 0;
  for (const auto& x : arr) v[i++] = x.get<scalar_t>();
  return v;
}

json json_rows(const_matrix_ref m) {
  json out = json::array();
  for (index_t r = 0; r < m.rows(); ++r)
    out.push_back(json_array(m.row(r).transpose()));
  return out;
}

matrix_t matrix_from_json(const json& rows, const std::string& what) {
  const index_t n = static_cast<index_t>(rows.size());
  matrix_t m(n, n == 0 ? 0 : static_cast<index_t>(rows.front().size()));
  index_t r = 0;
  for (const auto& row : rows) {
    if (static_cast<index_t>(row.size()) != m.cols())
      throw ParseError(what + ": ragged row lengths");
    m.row(r++) = vector_from_json(row).transpose();
  }
  return m;
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

std::string model_path(const std::string& dir, std::size_t j) {
  return dir + "/model_" + std::to_string(j) + ".json";
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace

void write_model(const BinaryModel& model, const std::string& path) {
  if (model.dual_coefs.size() != model.support_vectors.rows())
    throw InvalidArgument("model: one dual coefficient per support vector");
  json j;
  j["format"] = kModelFormat;
  j["version"] = kFormatVersion;
  j["kernel"] = {{"type", to_string(model.kernel.type)},
                 {"gamma", model.kernel.gamma}};
  j["C"] = model.C;
  j["bias"] = model.bias;
  j["dual_coefs"] = json_array(model.dual_coefs);
  j["support_vectors"] = json_rows(model.support_vectors);
  j["positive_classes"] = model.positive_classes;
  j["negative_classes"] = model.negative_classes;
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  write_text(path, j.dump(2) + "\n");
}

BinaryModel read_model(const std::string& path) {
  const json j = parse_file(path);
  try {
    if (j.at("format") != kModelFormat || j.at("version") != kFormatVersion)
      throw ParseError(path + ": not a version-" +
                       std::to_string(kFormatVersion) + " model file");
    BinaryModel model;
    model.kernel.type =
        kernel_type_from_string(j.at("kernel").at("type").get<std::string>());
    model.kernel.gamma = j.at("kernel").at("gamma").get<scalar_t>();
    model.C = j.at("C").get<scalar_t>();
    model.bias = j.at("bias").get<scalar_t>();
    model.dual_coefs = vector_from_json(j.at("dual_coefs"));
    model.support_vectors =
        matrix_from_json(j.at("support_vectors"), path + ": support_vectors");
    model.positive_classes =
        j.at("positive_classes").get<std::vector<int>>();
    model.negative_classes =
        j.at("negative_classes").get<std::vector<int>>();
    model.converged = j.at("converged").get<bool>();
    model.iterations = j.at("iterations").get<int>();
    if (model.dual_coefs.size() != model.support_vectors.rows())
      throw ParseError(path + ": dual coefficient count does not match the "
                       "support vectors");
    return model;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_ensemble(const EcocEnsemble& ensemble, const std::string& dir) {
  validate(ensemble);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());

  write_code_matrix(ensemble.matrix, dir + "/matrix");
  for (std::size_t j = 0; j < ensemble.models.size(); ++j)
    write_model(ensemble.models[j], model_path(dir, j));

  json manifest;
  manifest["format"] = kManifestFormat;
  manifest["version"] = kFormatVersion;
  manifest["decoder"] = to_string(ensemble.decoder);
  manifest["classes"] = ensemble.class_labels;
  manifest["scaling"] = {{"min", json_array(ensemble.scaling.min)},
                         {"max", json_array(ensemble.scaling.max)}};
  manifest["n_columns"] = ensemble.models.size();
  manifest["seed"] = ensemble.seed;
  write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
}

EcocEnsemble load_ensemble(const std::string& dir) {
  const std::string manifest_path = dir + "/manifest.json";
  const json manifest = parse_file(manifest_path);
  EcocEnsemble ensemble;
  try {
    if (manifest.at("format") != kManifestFormat ||
        manifest.at("version") != kFormatVersion)
      throw ParseError(manifest_path + ": not a version-" +
                       std::to_string(kFormatVersion) + " ensemble manifest");
    ensemble.decoder =
        decoder_from_string(manifest.at("decoder").get<std::string>());
    ensemble.class_labels =
        manifest.at("classes").get<std::vector<std::string>>();
    ensemble.scaling.min = vector_from_json(manifest.at("scaling").at("min"));
    ensemble.scaling.max = vector_from_json(manifest.at("scaling").at("max"));
    ensemble.seed = manifest.at("seed").get<std::uint64_t>();
    ensemble.matrix = read_code_matrix(dir + "/matrix");
    const auto n_columns = manifest.at("n_columns").get<std::size_t>();
    if (static_cast<index_t>(n_columns) != ensemble.matrix.n_columns())
      throw ParseError(manifest_path +
                       ": column count disagrees with the matrix file");
    ensemble.models.reserve(n_columns);
    for (std::size_t j = 0; j < n_columns; ++j)
      ensemble.models.push_back(read_model(model_path(dir, j)));
  } catch (const json::exception& e) {
    throw ParseError(manifest_path + ": " + e.what());
  }
  try {
    validate(ensemble);
  } catch (const InvalidArgument& e) {
    throw ParseError(dir + ": inconsistent ensemble: " + e.what());
  }
  return ensemble;
}

std::string report_to_json(const std::vector<PerfReport>& reports,
                           bool include_timings) {
  json results = json::array();
  for (const auto& r : reports) {
    json entry = {{"dataset", r.dataset},
                  {"strategy", r.strategy},
                  {"accuracy_mean", r.accuracy_mean},
                  {"accuracy_std", r.accuracy_std},
                  {"n_classifiers", r.n_classifiers},
                  {"fold_accuracies", r.fold_accuracies}};
    if (include_timings) {
      entry["train_seconds"] = r.train_seconds;
      entry["predict_seconds"] = r.predict_seconds;
    }
    results.push_back(std::move(entry));
  }
  const json j = {{"format", kReportFormat},
                  {"version", kFormatVersion},
                  {"results", results}};
  return j.dump(2) + "\n";
}

std::string report_table(const std::vector<PerfReport>& reports) {
  std::vector<std::array<std::string, 6>> rows;
  rows.push_back({"dataset", "strategy", "accuracy", "classifiers",
                  "train_s", "predict_s"});
  for (const auto& r : reports)
    rows.push_back({r.dataset, r.strategy,
                    fixed(r.accuracy_mean, 4) + " +/- " +
                        fixed(r.accuracy_std, 4),
                    std::to_string(r.n_classifiers), fixed(r.train_seconds, 3),
                    fixed(r.predict_seconds, 3)});

  std::array<std::size_t, 6> widths{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());

  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size())
        out += std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace ecoc
