#include "ecoc/kernel.hpp"

#include "ecoc/errors.hpp"

namespace ecoc {

scalar_t kernel_eval(const KernelSpec& spec, const_vector_ref x,
                     const_vector_ref y) {
  if (x.size() != y.size())
    throw InvalidArgument("kernel: dimension mismatch");
  switch (spec.type) {
    case KernelSpec::Type::linear:
      return x.dot(y);
    case KernelSpec::Type::rbf:
      return std::exp(-spec.gamma * (x - y).squaredNorm());
  }
  throw InvalidArgument("unknown kernel type");
}

vector_t kernel_column(const KernelSpec& spec, const_matrix_ref X,
                       const_vector_ref x) {
  if (X.cols() != x.size())
    throw InvalidArgument("kernel: dimension mismatch");
  switch (spec.type) {
    case KernelSpec::Type::linear:
      return X * x;
    case KernelSpec::Type::rbf:
      return (-spec.gamma *
              (X.rowwise() - x.transpose()).rowwise().squaredNorm().array())
          .exp()
          .matrix();
  }
  throw InvalidArgument("unknown kernel type");
}

std::string to_string(KernelSpec::Type type) {
  switch (type) {
    case KernelSpec::Type::linear:
      return "linear";
    case KernelSpec::Type::rbf:
      return "rbf";
  }
  throw InvalidArgument("unknown kernel type");
}

KernelSpec::Type kernel_type_from_string(const std::string& name) {
  if (name == "linear") return KernelSpec::Type::linear;
  if (name == "rbf") return KernelSpec::Type::rbf;
  throw InvalidArgument("unknown kernel type: " + name);
}

}  // namespace ecoc
