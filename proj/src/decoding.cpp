#include "ecoc/decoding.hpp"

#include <cmath>
#include <limits>

#include "ecoc/errors.hpp"

namespace ecoc {

std::string to_string(Decoder decoder) {
  switch (decoder) {
    case Decoder::hamming:
      return "hamming";
    case Decoder::euclidean:
      return "euclidean";
    case Decoder::attenuated_euclidean:
      return "aed";
  }
  throw InvalidArgument("unknown decoder");
}

Decoder decoder_from_string(const std::string& name) {
  if (name == "hamming") return Decoder::hamming;
  if (name == "euclidean") return Decoder::euclidean;
  if (name == "aed") return Decoder::attenuated_euclidean;
  throw InvalidArgument("unknown decoder: " + name);
}

vector_t to_signs(const_vector_ref values) {
  vector_t signs(values.size());
  for (index_t j = 0; j < values.size(); ++j)
    signs(j) = values(j) >= 0.0 ? 1.0 : -1.0;
  return signs;
}

scalar_t distance(Decoder decoder, const_vector_ref signs,
                  const_code_vector_ref codeword) {
  if (signs.size() != codeword.size())
    throw InvalidArgument("decoding: output/codeword length mismatch");
  switch (decoder) {
    case Decoder::hamming: {
      index_t count = 0;
      for (index_t j = 0; j < signs.size(); ++j)
        if (codeword(j) != 0 && signs(j) != codeword(j)) ++count;
      return static_cast<scalar_t>(count);
    }
    case Decoder::euclidean:
      return (signs - codeword.cast<scalar_t>()).norm();
    case Decoder::attenuated_euclidean: {
      scalar_t sum = 0.0;
      for (index_t j = 0; j < signs.size(); ++j) {
        const scalar_t y = codeword(j);
        const scalar_t x = signs(j);
        sum += std::abs(y) * std::abs(x) * (x - y) * (x - y);
      }
      return std::sqrt(sum);
    }
  }
  throw InvalidArgument("unknown decoder");
}

int decode(Decoder decoder, const_vector_ref outputs,
           const CodeMatrix& matrix) {
  if (outputs.size() != matrix.n_columns())
    throw InvalidArgument("decoding: output length " +
                          std::to_string(outputs.size()) +
                          " does not match " +
                          std::to_string(matrix.n_columns()) + " columns");
  const vector_t signs = to_signs(outputs);
  int best = 0;
  scalar_t best_distance = std::numeric_limits<scalar_t>::infinity();
  for (index_t r = 0; r < matrix.n_classes(); ++r) {
    const scalar_t d =
        distance(decoder, signs, matrix.cells.row(r).transpose());
    if (d < best_distance) {
      best_distance = d;
      best = static_cast<int>(r);
    }
  }
  return best;
}

}  // namespace ecoc
