#pragma once

#include <string>
#include <vector>

#include "ecoc/types.hpp"

namespace ecoc {

struct ColumnMeta {
  std::vector<int> positive;  // class ids labeled +1, ascending
  std::vector<int> negative;  // class ids labeled -1, ascending
};

/** Ternary class/column coding. Row r is class r's codeword. */
struct CodeMatrix {
  code_matrix_t cells;              // n_classes x n_columns, in {-1, 0, +1}
  std::vector<ColumnMeta> columns;  // one entry per column
  std::string strategy_tag;

  index_t n_classes() const { return cells.rows(); }
  index_t n_columns() const { return cells.cols(); }
};

/** Checks cell range, cell/meta agreement, non-empty column sides, row
    distinctness, and column duplicate/negation freedom. The negation rule
    can be relaxed (one-vs-all at N=2 cannot avoid it). */
void validate(const CodeMatrix& matrix, bool allow_negated_columns = false);

/** Rebuilds a CodeMatrix from bare cells, deriving column metadata. */
CodeMatrix from_cells(code_matrix_t cells, std::string strategy_tag);

void write_code_matrix(const CodeMatrix& matrix, const std::string& path);
CodeMatrix read_code_matrix(const std::string& path);

/** One line per class, one character per column: '+', '-', '.'. */
std::string render_grid(const CodeMatrix& matrix);

}  // namespace ecoc
