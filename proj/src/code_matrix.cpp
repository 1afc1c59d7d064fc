#include "ecoc/code_matrix.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ecoc/errors.hpp"

namespace ecoc {

namespace {

std::string column_label(index_t j) {
  return "column " + std::to_string(j);
}

std::vector<int> parse_id_list(const std::string& token, int n_classes,
                               int line_no) {
  std::vector<int> ids;
  std::stringstream ss(token);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t pos = 0;
      const int id = std::stoi(piece, &pos);
      if (pos != piece.size()) throw std::invalid_argument(piece);
      if (id < 0 || id >= n_classes)
        throw ParseError("line " + std::to_string(line_no) +
                         ": class id out of range: " + piece);
      ids.push_back(id);
    } catch (const std::invalid_argument&) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": bad class id: '" + piece + "'");
    } catch (const std::out_of_range&) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": bad class id: '" + piece + "'");
    }
  }
  if (ids.empty())
    throw ParseError("line " + std::to_string(line_no) + ": empty id list");
  return ids;
}

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

void validate(const CodeMatrix& matrix, bool allow_negated_columns) {
  const index_t n = matrix.n_classes();
  const index_t L = matrix.n_columns();
  if (n < 2) throw InvalidArgument("code matrix: need at least 2 classes");
  if (L < 1) throw InvalidArgument("code matrix: need at least 1 column");
  if (static_cast<index_t>(matrix.columns.size()) != L)
    throw InvalidArgument("code matrix: metadata/cell column count mismatch");

  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < L; ++j)
      if (matrix.cells(i, j) < -1 || matrix.cells(i, j) > 1)
        throw InvalidArgument("code matrix: cell (" + std::to_string(i) +
                              "," + std::to_string(j) + ") outside {-1,0,1}");

  for (index_t j = 0; j < L; ++j) {
    const auto& meta = matrix.columns[j];
    if (meta.positive.empty() || meta.negative.empty())
      throw InvalidArgument("code matrix: " + column_label(j) +
                            " has an empty side");
    std::vector<int> pos, neg;
    for (index_t i = 0; i < n; ++i) {
      if (matrix.cells(i, j) == 1) pos.push_back(static_cast<int>(i));
      if (matrix.cells(i, j) == -1) neg.push_back(static_cast<int>(i));
    }
    if (pos != meta.positive || neg != meta.negative)
      throw InvalidArgument("code matrix: " + column_label(j) +
                            " metadata disagrees with cells");
  }

  for (index_t a = 0; a < n; ++a)
    for (index_t b = a + 1; b < n; ++b)
      if (matrix.cells.row(a) == matrix.cells.row(b))
        throw InvalidArgument("code matrix: classes " + std::to_string(a) +
                              " and " + std::to_string(b) +
                              " share a codeword");

  for (index_t a = 0; a < L; ++a) {
    for (index_t b = a + 1; b < L; ++b) {
      if (matrix.cells.col(a) == matrix.cells.col(b))
        throw InvalidArgument("code matrix: duplicate columns " +
                              std::to_string(a) + " and " +
                              std::to_string(b));
      if (!allow_negated_columns &&
          matrix.cells.col(a) == (-matrix.cells.col(b)).eval())
        throw InvalidArgument("code matrix: columns " + std::to_string(a) +
                              " and " + std::to_string(b) +
                              " are negations of each other");
    }
  }
}

CodeMatrix from_cells(code_matrix_t cells, std::string strategy_tag) {
  CodeMatrix matrix;
  matrix.cells = std::move(cells);
  matrix.strategy_tag = std::move(strategy_tag);
  matrix.columns.resize(matrix.n_columns());
  for (index_t j = 0; j < matrix.n_columns(); ++j) {
    auto& meta = matrix.columns[j];
    for (index_t i = 0; i < matrix.n_classes(); ++i) {
      if (matrix.cells(i, j) == 1) meta.positive.push_back(static_cast<int>(i));
      if (matrix.cells(i, j) == -1)
        meta.negative.push_back(static_cast<int>(i));
    }
  }
  return matrix;
}

void write_code_matrix(const CodeMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << matrix.n_classes() << ' ' << matrix.n_columns() << ' '
      << matrix.strategy_tag << '\n';
  for (index_t i = 0; i < matrix.n_classes(); ++i) {
    for (index_t j = 0; j < matrix.n_columns(); ++j) {
      if (j) out << ' ';
      out << matrix.cells(i, j);
    }
    out << '\n';
  }
  for (const auto& meta : matrix.columns)
    out << "col positive=" << join_ids(meta.positive)
        << " negative=" << join_ids(meta.negative) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

CodeMatrix read_code_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header");
  std::istringstream header(line);
  index_t n = 0, L = 0;
  std::string tag;
  if (!(header >> n >> L >> tag) || n < 2 || L < 1)
    throw ParseError("line 1: expected 'n_classes n_columns strategy_tag'");
  std::string extra;
  if (header >> extra) throw ParseError("line 1: trailing content");

  CodeMatrix matrix;
  matrix.strategy_tag = tag;
  matrix.cells.resize(n, L);
  int line_no = 1;
  for (index_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw ParseError("line " + std::to_string(line_no + 1) +
                       ": missing codeword row");
    ++line_no;
    std::istringstream row(line);
    for (index_t j = 0; j < L; ++j) {
      int value;
      if (!(row >> value) || value < -1 || value > 1)
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(j + 1) + ": expected -1, 0 or 1");
      matrix.cells(i, j) = value;
    }
    if (row >> extra)
      throw ParseError("line " + std::to_string(line_no) +
                       ": trailing content");
  }

  matrix.columns.resize(L);
  for (index_t j = 0; j < L; ++j) {
    if (!std::getline(in, line))
      throw ParseError("line " + std::to_string(line_no + 1) +
                       ": missing column metadata");
    ++line_no;
    std::istringstream meta(line);
    std::string kw, pos_token, neg_token;
    if (!(meta >> kw >> pos_token >> neg_token) || kw != "col" ||
        pos_token.rfind("positive=", 0) != 0 ||
        neg_token.rfind("negative=", 0) != 0)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'col positive=<ids> negative=<ids>'");
    if (meta >> extra)
      throw ParseError("line " + std::to_string(line_no) +
                       ": trailing content");
    matrix.columns[j].positive = parse_id_list(
        pos_token.substr(9), static_cast<int>(n), line_no);
    matrix.columns[j].negative = parse_id_list(
        neg_token.substr(9), static_cast<int>(n), line_no);
  }
  while (std::getline(in, line))
    if (!line.empty())
      throw ParseError("line " + std::to_string(line_no + 1) +
                       ": unexpected trailing content");

  validate(matrix, /*allow_negated_columns=*/n == 2);
  return matrix;
}

std::string render_grid(const CodeMatrix& matrix) {
  std::string grid;
  for (index_t i = 0; i < matrix.n_classes(); ++i) {
    for (index_t j = 0; j < matrix.n_columns(); ++j) {
      const int cell = matrix.cells(i, j);
      grid += cell > 0 ? '+' : cell < 0 ? '-' : '.';
    }
    grid += '\n';
  }
  return grid;
}

}  // namespace ecoc
