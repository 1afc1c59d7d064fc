#pragma once

#include <string>

#include "ecoc/types.hpp"

namespace ecoc {

struct KernelSpec {
  enum class Type { linear, rbf };
  Type type = Type::rbf;
  scalar_t gamma = 0.1;  // rbf only
};

scalar_t kernel_eval(const KernelSpec& spec, const_vector_ref x,
                     const_vector_ref y);

/** K(X.row(i), x) for every row of X. */
vector_t kernel_column(const KernelSpec& spec, const_matrix_ref X,
                       const_vector_ref x);

std::string to_string(KernelSpec::Type type);
KernelSpec::Type kernel_type_from_string(const std::string& name);

}  // namespace ecoc
