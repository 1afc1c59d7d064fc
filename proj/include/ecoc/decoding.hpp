#pragma once

#include <string>

#include "ecoc/code_matrix.hpp"
#include "ecoc/types.hpp"

namespace ecoc {

enum class Decoder { hamming, euclidean, attenuated_euclidean };

std::string to_string(Decoder decoder);
/** Accepts "hamming", "euclidean", "aed". */
Decoder decoder_from_string(const std::string& name);

/** Signs of raw decision values; zero maps to +1. */
vector_t to_signs(const_vector_ref values);

/** Distance from a sign vector to one ternary codeword.
    hamming: disagreements on non-zero codeword positions.
    euclidean: plain distance with codeword zeros as literal coordinates.
    attenuated_euclidean: sqrt(sum_j |y_j||x_j|(x_j - y_j)^2), so zero
    codeword positions contribute nothing. */
scalar_t distance(Decoder decoder, const_vector_ref signs,
                  const_code_vector_ref codeword);

/** Class id whose codeword is nearest to sign(outputs); distance ties
    break to the smallest class id. */
int decode(Decoder decoder, const_vector_ref outputs,
           const CodeMatrix& matrix);

}  // namespace ecoc
