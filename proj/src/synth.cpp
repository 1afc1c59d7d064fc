#include "ecoc/synth.hpp"

#include <string>

#include "ecoc/errors.hpp"
#include "ecoc/rng.hpp"

namespace ecoc {

Dataset make_synthetic_clusters(index_t points_per_class, scalar_t sigma,
                                std::uint64_t seed) {
  if (points_per_class < 1)
    throw InvalidArgument("synthetic clusters: points_per_class must be >= 1");
  if (!(sigma > 0))
    throw InvalidArgument("synthetic clusters: sigma must be positive");

  constexpr int kClasses = 8;
  constexpr scalar_t kCenters[kClasses][2] = {
      {-5.0, -1.0}, {-5.0, 1.0}, {-3.0, -1.0}, {-3.0, 1.0},
      {3.0, -1.0},  {3.0, 1.0},  {5.0, -1.0},  {5.0, 1.0}};

  Dataset data;
  data.name = "synth8";
  for (int c = 1; c <= kClasses; ++c) data.classes.push_back(std::to_string(c));
  data.features.resize(kClasses * points_per_class, 2);
  data.labels.resize(kClasses * points_per_class);

  Rng rng(seed);
  index_t row = 0;
  for (int c = 0; c < kClasses; ++c) {
    for (index_t p = 0; p < points_per_class; ++p, ++row) {
      data.features(row, 0) = kCenters[c][0] + sigma * rng.normal();
      data.features(row, 1) = kCenters[c][1] + sigma * rng.normal();
      data.labels[row] = c;
    }
  }
  return data;
}

}  // namespace ecoc
