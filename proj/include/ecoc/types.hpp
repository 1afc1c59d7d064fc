#pragma once

#include <Eigen/Dense>

namespace ecoc {

/** Scalar type used throughout the library. */
using scalar_t = double;

/** Dense column vector. */
using vector_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;

/** Dense matrix, rows are instances unless stated otherwise. */
using matrix_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Ternary code cells live in {-1, 0, +1}. */
using code_matrix_t = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using code_vector_t = Eigen::Matrix<int, Eigen::Dynamic, 1>;
using const_code_vector_ref = Eigen::Ref<const code_vector_t>;

using index_t = Eigen::Index;

/** Expression-friendly read-only views for public interfaces. */
using const_vector_ref = Eigen::Ref<const vector_t>;
using const_matrix_ref = Eigen::Ref<const matrix_t>;

}  // namespace ecoc
