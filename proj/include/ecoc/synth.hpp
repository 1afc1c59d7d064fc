#pragma once

#include <cstdint>

#include "ecoc/dataset.hpp"

namespace ecoc {

/** Two-dimensional 8-class Gaussian benchmark: two groups of four
    overlapping clusters, the groups far apart, so pairs inside a group are
    hard to separate and the group split is easy. Labels are "1".."8". */
Dataset make_synthetic_clusters(index_t points_per_class = 200,
                                scalar_t sigma = 0.4,
                                std::uint64_t seed = 0);

}  // namespace ecoc
